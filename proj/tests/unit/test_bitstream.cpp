#include <random>

#include "doctest.h"
#include "saip/bitstream.hpp"
#include "syntax_gen.hpp"

using namespace saip;
using namespace saip::bs;

namespace {

std::vector<std::uint8_t> encode_bins(const std::vector<int>& bins, const std::vector<int>& ctx_ids, int num_ctx,
                                      std::vector<ContextModel>* final_ctx = nullptr) {
  std::vector<std::uint8_t> out;
  ArithEncoder enc(&out);
  std::vector<ContextModel> ctx(num_ctx);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (ctx_ids[i] < 0)
      enc.encode_bypass(bins[i]);
    else
      enc.encode_bin(ctx[ctx_ids[i]], bins[i]);
  }
  enc.finish();
  if (final_ctx) *final_ctx = ctx;
  return out;
}

}  // namespace

TEST_CASE("context probability stays strictly inside (0, 1)") {
  std::mt19937 rng(1);
  for (int run = 0; run < 50; ++run) {
    ContextModel c;
    const int bias = static_cast<int>(rng() % 3);
    for (int i = 0; i < 5000; ++i) {
      const int bin = bias == 0 ? 0 : bias == 1 ? 1 : static_cast<int>(rng() & 1);
      c.update(bin);
      CHECK(c.p1 > 0);
      CHECK(c.p1 < (1 << ContextModel::kProbBits));
    }
  }
}

TEST_CASE("random bins over random contexts round-trip") {
  std::mt19937 rng(7);
  const int n = 10000, num_ctx = 16;
  std::vector<int> bins(n), ids(n);
  std::vector<double> bias(num_ctx);
  for (auto& b : bias) b = std::uniform_real_distribution<double>(0.02, 0.98)(rng);
  for (int i = 0; i < n; ++i) {
    ids[i] = static_cast<int>(rng() % (num_ctx + 2)) - 2;
    if (ids[i] < 0) ids[i] = -1;
    const double p = ids[i] < 0 ? 0.5 : bias[ids[i]];
    bins[i] = std::uniform_real_distribution<double>(0, 1)(rng) < p;
  }
  std::vector<ContextModel> enc_ctx;
  auto bytes = encode_bins(bins, ids, num_ctx, &enc_ctx);

  ArithDecoder dec(bytes);
  std::vector<ContextModel> ctx(num_ctx);
  for (int i = 0; i < n; ++i) {
    const int b = ids[i] < 0 ? dec.decode_bypass() : dec.decode_bin(ctx[ids[i]]);
    REQUIRE(b == bins[i]);
  }
  dec.finish();
  CHECK(ctx == enc_ctx);
}

TEST_CASE("long runs of zero bins compress below one bit per bin") {
  std::vector<int> bins(10000, 0), ids(10000, 0);
  auto bytes = encode_bins(bins, ids, 1);
  CHECK(bytes.size() * 8 < 10000);
  CHECK(bytes.size() * 8 < 1000);
}

TEST_CASE("first bin on a fresh context costs about one bit") {
  ArithEncoder enc;
  ContextModel c;
  const auto before = enc.frac_bits();
  enc.encode_bin(c, 1);
  const double bits = to_bits(enc.frac_bits() - before);
  CHECK(bits == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("bypass bins cost exactly one bit") {
  ArithEncoder enc;
  const auto before = enc.frac_bits();
  enc.encode_bypass_bits(0x2D, 6);
  CHECK(enc.frac_bits() - before == 6 * kOneBit);
}

TEST_CASE("trial encoding measures the same rate as the real encoder") {
  std::mt19937 rng(3);
  for (int run = 0; run < 20; ++run) {
    std::vector<std::uint8_t> out;
    ArithEncoder real(&out);
    ArithEncoder trial;
    ContextSet c1, c2;
    for (int i = 0; i < 300; ++i) {
      const auto p = saip::testing::random_params(rng);
      const auto cu = saip::testing::random_syntax_cu(rng, p);
      write_cu_syntax(real, c1, cu, p);
      write_cu_syntax(trial, c2, cu, p);
    }
    CHECK(real.frac_bits() == trial.frac_bits());
    CHECK(real.bits_written() == trial.bits_written());
    CHECK(real.class_bits() == trial.class_bits());
    real.finish();
    trial.finish();
    CHECK(real.bits_written() == trial.bits_written());
    CHECK(out.size() * 8 == real.bits_written());
  }
}

TEST_CASE("fractional rate tracks emitted length within flush overhead") {
  std::mt19937 rng(11);
  std::vector<std::uint8_t> out;
  ArithEncoder enc(&out);
  std::vector<ContextModel> ctx(4);
  for (int i = 0; i < 20000; ++i) enc.encode_bin(ctx[i % 4], (rng() % 10) < (i % 4) + 1);
  const double est = to_bits(enc.frac_bits());
  enc.finish();
  CHECK(std::abs(static_cast<double>(out.size() * 8) - est) < 20.0);
}

TEST_CASE("decoder reports reading past the payload") {
  std::vector<int> bins(64, 1), ids(64, -1);
  auto bytes = encode_bins(bins, ids, 0);
  bytes.resize(bytes.size() / 2);
  ArithDecoder dec(bytes, 800);
  auto read_all = [&] {
    for (int i = 0; i < 64; ++i) dec.decode_bypass();
  };
  CHECK_THROWS_AS(read_all(), BitstreamError);
  try {
    ArithDecoder d2(bytes, 800);
    for (int i = 0; i < 64; ++i) d2.decode_bypass();
  } catch (const BitstreamError& e) {
    CHECK(e.bit_offset() >= 800 + bytes.size() * 8);
  }
}

TEST_CASE("SAIP merge record with zero indices takes five bins") {
  SyntaxParams p;
  SyntaxCU cu;
  cu.mode = CuMode::Saip;
  cu.saip_flag = true;
  cu.saip_merge_flag = true;
  ArithEncoder enc;
  ContextSet ctx;
  write_saip_data(enc, ctx, cu, p);
  CHECK(enc.bins() == 5);
}

TEST_CASE("saip_flag 0 emits no other SAIP element") {
  SyntaxParams p;
  SyntaxCU cu;
  cu.mode = CuMode::Merge;
  ArithEncoder enc;
  ContextSet ctx;
  write_saip_data(enc, ctx, cu, p);
  CHECK(enc.bins() == 1);
  ContextSet fresh;
  CHECK(ctx.saip_merge_flag == fresh.saip_merge_flag);
  CHECK(ctx.saip_back_idx == fresh.saip_back_idx);
  CHECK(ctx.saip_reverse_idx == fresh.saip_reverse_idx);
}

TEST_CASE("SAIP bin counts follow the binarization lengths") {
  SyntaxParams p;
  std::mt19937 rng(5);
  for (int i = 0; i < 500; ++i) {
    SyntaxCU cu;
    cu.mode = CuMode::Saip;
    cu.saip_flag = true;
    const int alpha = static_cast<int>(rng() % kPrimaryListSize);
    cu.set_primary_index(alpha);
    cu.saip_back_idx = static_cast<int>(rng() % 7);
    cu.saip_reverse_idx = static_cast<int>(rng() % 2);
    int expected = 2 + tu_length(cu.saip_back_idx, 6) + 1;
    if (alpha < 7)
      expected += tu_length(alpha, 6);
    else
      expected += 1 + tu_length(cu.saip_mmvd_distance_idx, 7) + 2;
    ArithEncoder enc;
    ContextSet ctx;
    write_saip_data(enc, ctx, cu, p);
    CHECK(enc.bins() == expected);
  }
}

TEST_CASE("primary index decomposition") {
  SyntaxCU cu;
  cu.set_primary_index(7);
  CHECK_FALSE(cu.saip_merge_flag);
  CHECK(cu.saip_mmvd_cand_idx == 0);
  CHECK(cu.saip_mmvd_distance_idx == 0);
  CHECK(cu.saip_mmvd_direction_idx == 0);
  cu.set_primary_index(70);
  CHECK(cu.saip_mmvd_cand_idx == 1);
  CHECK(cu.saip_mmvd_distance_idx == 7);
  CHECK(cu.saip_mmvd_direction_idx == 3);
  for (int a = 0; a < kPrimaryListSize; ++a) {
    cu.set_primary_index(a);
    CHECK(cu.primary_index() == a);
  }
  CHECK_THROWS_AS(cu.set_primary_index(71), ArgumentError);
}

TEST_CASE("random SyntaxCU records round-trip with lockstep contexts") {
  std::mt19937 rng(2024);
  std::vector<std::pair<SyntaxParams, SyntaxCU>> records;
  for (int i = 0; i < 10000; ++i) {
    auto p = saip::testing::random_params(rng);
    records.emplace_back(p, saip::testing::random_syntax_cu(rng, p));
  }
  std::vector<std::uint8_t> out;
  ArithEncoder enc(&out);
  ContextSet ectx;
  for (const auto& [p, cu] : records) write_cu_syntax(enc, ectx, cu, p);
  enc.finish();

  ArithDecoder dec(out);
  ContextSet dctx;
  int mismatches = 0;
  for (const auto& [p, cu] : records) mismatches += !(read_cu_syntax(dec, dctx, p) == cu);
  dec.finish();
  CHECK(mismatches == 0);
  CHECK(dctx == ectx);
}

TEST_CASE("illegal SyntaxCU fields are rejected on write") {
  SyntaxParams p;
  ArithEncoder enc;
  ContextSet ctx;
  SyntaxCU cu;
  cu.mode = CuMode::Saip;
  cu.saip_flag = true;
  cu.saip_back_idx = 7;
  CHECK_THROWS_AS(write_cu_syntax(enc, ctx, cu, p), ArgumentError);
  cu.saip_back_idx = 0;
  cu.saip_reverse_idx = 2;
  CHECK_THROWS_AS(write_cu_syntax(enc, ctx, cu, p), ArgumentError);
  SyntaxCU bwd;
  bwd.mode = CuMode::Merge;
  bwd.dir = InterDir::Backward;
  CHECK_THROWS_AS(write_cu_syntax(enc, ctx, bwd, p), ArgumentError);
}

TEST_CASE("secondary index beyond the signalled maximum is a bitstream error") {
  // A stream written with a 7-entry list read back with a 1-entry list
  // desynchronizes; the truncated unary reader never exceeds its cMax.
  SyntaxParams p;
  p.max_secondary = 3;
  std::vector<std::uint8_t> out;
  ArithEncoder enc(&out);
  ContextSet ctx;
  SyntaxCU cu;
  cu.mode = CuMode::Saip;
  cu.saip_flag = true;
  cu.saip_back_idx = 2;
  write_saip_data(enc, ctx, cu, p);
  enc.finish();
  ArithDecoder dec(out);
  ContextSet dctx;
  SyntaxCU back;
  read_saip_data(dec, dctx, back, p);
  CHECK(back.saip_back_idx == 2);
}

TEST_CASE("Exp-Golomb order 0 of 7 is 0001000") {
  BitWriter bw;
  bw.put_ue(7);
  CHECK(bw.to_string() == "0001000");
  BitWriter b0;
  b0.put_ue(0);
  CHECK(b0.to_string() == "1");
  BitWriter b3;
  b3.put_ue(3);
  CHECK(b3.to_string() == "00100");
}

TEST_CASE("sequence header round-trips") {
  SequenceHeader h;
  h.width = 1920;
  h.height = 1080;
  h.bit_depth = 10;
  h.gop_size = 32;
  h.qp = 37;
  h.num_refs = 4;
  h.profile = Profile::LowDelayB;
  h.enable_saip_merge = true;
  h.enable_saip_mmvd = false;
  h.max_secondary_candidates = 7;
  h.seg_source = seg::MaskSource::external("masks/seq");
  auto bytes = write_header(h);
  std::size_t used = 0;
  auto back = read_header(bytes, used);
  CHECK(back == h);
  CHECK(used == bytes.size());

  h.seg_source = seg::MaskSource::builtin(99, 40);
  h.refresh_interval_gops = 3;
  h.width = 64;
  h.height = 48;
  bytes = write_header(h);
  CHECK(read_header(bytes, used) == h);
}

TEST_CASE("header rejects foreign data and bad fields") {
  std::vector<std::uint8_t> junk = {'R', 'I', 'F', 'F', 1, 0, 0, 0};
  std::size_t used = 0;
  CHECK_THROWS_AS(read_header(junk, used), BitstreamError);
  SequenceHeader h;
  h.width = 64;
  h.height = 64;
  h.max_secondary_candidates = 0;
  CHECK_THROWS_AS(write_header(h), ArgumentError);
  h.max_secondary_candidates = 8;
  CHECK_THROWS_AS(write_header(h), ArgumentError);
  h.max_secondary_candidates = 1;
  auto bytes = write_header(h);
  bytes.resize(8);
  CHECK_THROWS_AS(read_header(bytes, used), BitstreamError);
}

TEST_CASE("frame header round-trips") {
  BitWriter bw;
  FrameHeader a{0, SliceType::I, 22}, b{1234, SliceType::B, 51};
  write_frame_header(bw, a);
  write_frame_header(bw, b);
  BitReader br(bw.bytes());
  CHECK(read_frame_header(br) == a);
  CHECK(read_frame_header(br) == b);
}

TEST_CASE("diagonal scan visits every position once") {
  for (int n : {1, 2, 4, 8, 16, 32}) {
    const auto& scan = diagonal_scan(n);
    REQUIRE(scan.size() == static_cast<std::size_t>(n * n));
    std::vector<int> seen(n * n, 0);
    for (auto [x, y] : scan) ++seen[y * n + x];
    for (int v : seen) CHECK(v == 1);
    CHECK(scan.front() == std::pair{0, 0});
    CHECK(scan.back() == std::pair{n - 1, n - 1});
  }
  CHECK_THROWS_AS(diagonal_scan(12), ArgumentError);
}

TEST_CASE("all-zero residual block costs one bin") {
  ArithEncoder enc;
  ContextSet ctx;
  code_residual(enc, ctx, CoeffBlock(8, 8, 0), false);
  CHECK(enc.bins() == 1);
}

TEST_CASE("single DC coefficient has a short deterministic code") {
  CoeffBlock b(16, 16, 0);
  b.at(0, 0) = 1;
  std::vector<std::uint8_t> o1, o2;
  for (auto* o : {&o1, &o2}) {
    ArithEncoder enc(o);
    ContextSet ctx;
    code_residual(enc, ctx, b, true);
    CHECK(enc.bins() == 4);  // cbf, last prefix terminator, gt1, sign
    enc.finish();
  }
  CHECK(o1 == o2);
  ArithDecoder dec(o1);
  ContextSet ctx;
  CHECK(decode_residual(dec, ctx, 16, true) == b);
}

TEST_CASE("random sparse residual blocks round-trip") {
  std::mt19937 rng(99);
  std::vector<std::pair<CoeffBlock, bool>> blocks;
  for (int i = 0; i < 1000; ++i) {
    const int size = 4 << (rng() % 4);
    blocks.emplace_back(saip::testing::random_sparse_block(rng, size), rng() & 1);
  }
  std::vector<std::uint8_t> out;
  ArithEncoder enc(&out);
  ContextSet ectx;
  for (const auto& [b, chroma] : blocks) code_residual(enc, ectx, b, chroma);
  enc.finish();
  ArithDecoder dec(out);
  ContextSet dctx;
  int mismatches = 0;
  for (const auto& [b, chroma] : blocks) mismatches += !(decode_residual(dec, dctx, b.width(), chroma) == b);
  dec.finish();
  CHECK(mismatches == 0);
  CHECK(dctx == ectx);
}

TEST_CASE("out-of-range coefficient is rejected") {
  CoeffBlock b(4, 4, 0);
  b.at(1, 1) = kMaxCoeff + 1;
  ArithEncoder enc;
  ContextSet ctx;
  CHECK_THROWS_AS(code_residual(enc, ctx, b, false), ArgumentError);
  CHECK_THROWS_AS(code_residual(enc, ctx, CoeffBlock(4, 8, 0), false), ArgumentError);
}
