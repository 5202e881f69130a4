#include <cstdlib>

#include "saip/bitstream.hpp"

namespace saip::bs {

// ---------------------------------------------------------------------------
// Primitive binarizations
// ---------------------------------------------------------------------------

void write_tu(ArithEncoder& enc, ContextModel& ctx, int value, int cmax) {
  if (value < 0 || value > cmax) throw ArgumentError("truncated unary value out of range");
  for (int i = 0; i < cmax; ++i) {
    const int bin = i < value ? 1 : 0;
    if (i == 0)
      enc.encode_bin(ctx, bin);
    else
      enc.encode_bypass(bin);
    if (!bin) break;
  }
}

int read_tu(ArithDecoder& dec, ContextModel& ctx, int cmax) {
  int v = 0;
  while (v < cmax) {
    const int bin = v == 0 ? dec.decode_bin(ctx) : dec.decode_bypass();
    if (!bin) break;
    ++v;
  }
  return v;
}

void write_eg_bypass(ArithEncoder& enc, std::uint32_t value, int k) {
  while (value >= (1u << k)) {
    enc.encode_bypass(1);
    value -= 1u << k;
    ++k;
  }
  enc.encode_bypass(0);
  enc.encode_bypass_bits(value, k);
}

std::uint32_t read_eg_bypass(ArithDecoder& dec, int k) {
  std::uint32_t base = 0;
  while (dec.decode_bypass()) {
    base += 1u << k;
    if (++k > 24) throw BitstreamError("Exp-Golomb escape too long", dec.bit_offset());
  }
  return base + dec.decode_bypass_bits(k);
}

// ---------------------------------------------------------------------------
// SAIP merge data
// ---------------------------------------------------------------------------

int SyntaxCU::primary_index() const {
  if (saip_merge_flag) return saip_merge_idx;
  return kMergeListSize + saip_mmvd_cand_idx * kMmvdDistances * kMmvdDirections +
         saip_mmvd_distance_idx * kMmvdDirections + saip_mmvd_direction_idx;
}

void SyntaxCU::set_primary_index(int alpha) {
  if (alpha < 0 || alpha >= kPrimaryListSize) throw ArgumentError("primary index out of range");
  if (alpha < kMergeListSize) {
    saip_merge_flag = true;
    saip_merge_idx = alpha;
    saip_mmvd_cand_idx = saip_mmvd_distance_idx = saip_mmvd_direction_idx = 0;
    return;
  }
  const int m = alpha - kMergeListSize;
  saip_merge_flag = false;
  saip_merge_idx = 0;
  saip_mmvd_cand_idx = m / (kMmvdDistances * kMmvdDirections);
  saip_mmvd_distance_idx = (m / kMmvdDirections) % kMmvdDistances;
  saip_mmvd_direction_idx = m % kMmvdDirections;
}

namespace {

void check_saip_fields(const SyntaxCU& cu, const SyntaxParams& p) {
  if (!cu.saip_flag) return;
  if (cu.saip_merge_flag && !p.saip_merge_enabled) throw ArgumentError("SAIP merge disabled in sequence");
  if (!cu.saip_merge_flag && !p.saip_mmvd_enabled) throw ArgumentError("SAIP MMVD disabled in sequence");
  if (cu.saip_merge_idx < 0 || cu.saip_merge_idx >= kMergeListSize) throw ArgumentError("saip_merge_idx out of range");
  if (cu.saip_mmvd_cand_idx < 0 || cu.saip_mmvd_cand_idx >= kMmvdBases)
    throw ArgumentError("saip_mmvd_cand_idx out of range");
  if (cu.saip_mmvd_distance_idx < 0 || cu.saip_mmvd_distance_idx >= kMmvdDistances)
    throw ArgumentError("saip_mmvd_distance_idx out of range");
  if (cu.saip_mmvd_direction_idx < 0 || cu.saip_mmvd_direction_idx >= kMmvdDirections)
    throw ArgumentError("saip_mmvd_direction_idx out of range");
  if (cu.saip_back_idx < 0 || cu.saip_back_idx >= p.max_secondary) throw ArgumentError("saip_back_idx out of range");
  if (cu.saip_reverse_idx != 0 && cu.saip_reverse_idx != 1) throw ArgumentError("saip_reverse_idx out of range");
}

}  // namespace

void write_saip_data(ArithEncoder& enc, ContextSet& ctx, const SyntaxCU& cu, const SyntaxParams& p) {
  if (!p.saip_enabled()) {
    if (cu.saip_flag) throw ArgumentError("SAIP disabled in sequence");
    return;
  }
  check_saip_fields(cu, p);
  enc.set_class(SyntaxClass::Saip);
  enc.encode_bin(ctx.saip_flag, cu.saip_flag);
  if (!cu.saip_flag) return;
  if (p.saip_merge_enabled && p.saip_mmvd_enabled) enc.encode_bin(ctx.saip_merge_flag, cu.saip_merge_flag);
  if (cu.saip_merge_flag) {
    write_tu(enc, ctx.merge_idx, cu.saip_merge_idx, kMergeListSize - 1);
  } else {
    enc.encode_bin(ctx.mmvd_cand_idx, cu.saip_mmvd_cand_idx);
    write_tu(enc, ctx.mmvd_distance_idx, cu.saip_mmvd_distance_idx, kMmvdDistances - 1);
    enc.encode_bypass_bits(static_cast<std::uint32_t>(cu.saip_mmvd_direction_idx), 2);
  }
  if (p.max_secondary > 1) write_tu(enc, ctx.saip_back_idx, cu.saip_back_idx, p.max_secondary - 1);
  enc.encode_bin(ctx.saip_reverse_idx, cu.saip_reverse_idx);
}

void read_saip_data(ArithDecoder& dec, ContextSet& ctx, SyntaxCU& cu, const SyntaxParams& p) {
  cu.saip_flag = p.saip_enabled() && dec.decode_bin(ctx.saip_flag);
  if (!cu.saip_flag) return;
  if (p.saip_merge_enabled && p.saip_mmvd_enabled)
    cu.saip_merge_flag = dec.decode_bin(ctx.saip_merge_flag);
  else
    cu.saip_merge_flag = p.saip_merge_enabled;
  if (cu.saip_merge_flag) {
    cu.saip_merge_idx = read_tu(dec, ctx.merge_idx, kMergeListSize - 1);
  } else {
    cu.saip_mmvd_cand_idx = dec.decode_bin(ctx.mmvd_cand_idx);
    cu.saip_mmvd_distance_idx = read_tu(dec, ctx.mmvd_distance_idx, kMmvdDistances - 1);
    cu.saip_mmvd_direction_idx = static_cast<int>(dec.decode_bypass_bits(2));
  }
  cu.saip_back_idx = p.max_secondary > 1 ? read_tu(dec, ctx.saip_back_idx, p.max_secondary - 1) : 0;
  cu.saip_reverse_idx = dec.decode_bin(ctx.saip_reverse_idx);
}

// ---------------------------------------------------------------------------
// Coding-unit prediction syntax
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxMvd = 2 * kMvMax;

void write_inter_dir(ArithEncoder& enc, ContextSet& ctx, InterDir dir) {
  enc.encode_bin(ctx.inter_dir[0], dir == InterDir::Bi);
  if (dir != InterDir::Bi) enc.encode_bin(ctx.inter_dir[1], dir == InterDir::Backward);
}

InterDir read_inter_dir(ArithDecoder& dec, ContextSet& ctx) {
  if (dec.decode_bin(ctx.inter_dir[0])) return InterDir::Bi;
  return dec.decode_bin(ctx.inter_dir[1]) ? InterDir::Backward : InterDir::Forward;
}

void write_mvd(ArithEncoder& enc, ContextSet& ctx, int dx, int dy) {
  const int ax = std::abs(dx), ay = std::abs(dy);
  if (ax > kMaxMvd || ay > kMaxMvd) throw ArgumentError("motion vector difference out of range");
  enc.encode_bin(ctx.mvd_gt0[0], ax > 0);
  enc.encode_bin(ctx.mvd_gt0[1], ay > 0);
  if (ax > 0) enc.encode_bin(ctx.mvd_gt1[0], ax > 1);
  if (ay > 0) enc.encode_bin(ctx.mvd_gt1[1], ay > 1);
  if (ax > 0) {
    if (ax > 1) write_eg_bypass(enc, static_cast<std::uint32_t>(ax - 2), 1);
    enc.encode_bypass(dx < 0);
  }
  if (ay > 0) {
    if (ay > 1) write_eg_bypass(enc, static_cast<std::uint32_t>(ay - 2), 1);
    enc.encode_bypass(dy < 0);
  }
}

void read_mvd(ArithDecoder& dec, ContextSet& ctx, int& dx, int& dy) {
  const bool gx = dec.decode_bin(ctx.mvd_gt0[0]);
  const bool gy = dec.decode_bin(ctx.mvd_gt0[1]);
  const bool gx1 = gx && dec.decode_bin(ctx.mvd_gt1[0]);
  const bool gy1 = gy && dec.decode_bin(ctx.mvd_gt1[1]);
  auto magnitude = [&](bool g0, bool g1) -> int {
    if (!g0) return 0;
    std::uint32_t a = 1;
    if (g1) a = 2 + read_eg_bypass(dec, 1);
    if (a > static_cast<std::uint32_t>(kMaxMvd))
      throw BitstreamError("motion vector difference out of range", dec.bit_offset());
    const int s = dec.decode_bypass();
    return s ? -static_cast<int>(a) : static_cast<int>(a);
  };
  dx = magnitude(gx, gx1);
  dy = magnitude(gy, gy1);
}

}  // namespace

void write_cu_syntax(ArithEncoder& enc, ContextSet& ctx, const SyntaxCU& cu, const SyntaxParams& p) {
  if (p.slice == SliceType::I) {
    if (cu.mode != CuMode::Intra) throw ArgumentError("inter coding unit in intra slice");
    return;
  }
  if (p.slice == SliceType::P && cu.dir != InterDir::Forward && cu.mode != CuMode::Intra)
    throw ArgumentError("backward prediction in P slice");
  if (cu.mode == CuMode::Saip && !cu.saip_flag) throw ArgumentError("SAIP mode without saip_flag");
  if (cu.mode != CuMode::Saip && cu.saip_flag) throw ArgumentError("saip_flag outside SAIP mode");

  enc.set_class(SyntaxClass::Mode);
  enc.encode_bin(ctx.skip_flag, cu.mode == CuMode::Skip);
  if (cu.mode == CuMode::Skip) {
    if (p.slice == SliceType::B) write_inter_dir(enc, ctx, cu.dir);
    write_tu(enc, ctx.merge_idx, cu.merge_idx, kMergeListSize - 1);
    return;
  }
  enc.encode_bin(ctx.pred_mode_flag, cu.mode == CuMode::Intra);
  if (cu.mode == CuMode::Intra) return;
  if (p.slice == SliceType::B) write_inter_dir(enc, ctx, cu.dir);

  const bool merge = cu.mode == CuMode::Merge || cu.mode == CuMode::Saip;
  enc.encode_bin(ctx.merge_flag, merge);
  if (merge) {
    write_saip_data(enc, ctx, cu, p);
    if (!cu.saip_flag) {
      enc.set_class(SyntaxClass::Mode);
      write_tu(enc, ctx.merge_idx, cu.merge_idx, kMergeListSize - 1);
    }
  } else {
    enc.set_class(SyntaxClass::Motion);
    for (int l = 0; l < 2; ++l) {
      if (!uses_list(cu.dir, l)) continue;
      const AmvpData& a = cu.amvp[l];
      if (a.ref_idx < 0 || a.ref_idx >= p.num_refs) throw ArgumentError("ref_idx out of range");
      if (a.mvp_idx != 0 && a.mvp_idx != 1) throw ArgumentError("mvp_idx out of range");
      if (p.num_refs > 1) write_tu(enc, ctx.ref_idx, a.ref_idx, p.num_refs - 1);
      write_mvd(enc, ctx, a.mvd_x, a.mvd_y);
      enc.encode_bin(ctx.mvp_idx, a.mvp_idx);
    }
  }
  enc.set_class(SyntaxClass::Mode);
  enc.encode_bin(ctx.root_cbf, cu.root_cbf);
}

SyntaxCU read_cu_syntax(ArithDecoder& dec, ContextSet& ctx, const SyntaxParams& p) {
  SyntaxCU cu;
  if (p.slice == SliceType::I) {
    cu.mode = CuMode::Intra;
    return cu;
  }
  if (dec.decode_bin(ctx.skip_flag)) {
    cu.mode = CuMode::Skip;
    if (p.slice == SliceType::B) cu.dir = read_inter_dir(dec, ctx);
    cu.merge_idx = read_tu(dec, ctx.merge_idx, kMergeListSize - 1);
    return cu;
  }
  if (dec.decode_bin(ctx.pred_mode_flag)) {
    cu.mode = CuMode::Intra;
    return cu;
  }
  if (p.slice == SliceType::B) cu.dir = read_inter_dir(dec, ctx);
  if (dec.decode_bin(ctx.merge_flag)) {
    read_saip_data(dec, ctx, cu, p);
    if (cu.saip_flag) {
      cu.mode = CuMode::Saip;
    } else {
      cu.mode = CuMode::Merge;
      cu.merge_idx = read_tu(dec, ctx.merge_idx, kMergeListSize - 1);
    }
  } else {
    cu.mode = CuMode::Amvp;
    for (int l = 0; l < 2; ++l) {
      if (!uses_list(cu.dir, l)) continue;
      AmvpData& a = cu.amvp[l];
      a.ref_idx = p.num_refs > 1 ? read_tu(dec, ctx.ref_idx, p.num_refs - 1) : 0;
      read_mvd(dec, ctx, a.mvd_x, a.mvd_y);
      a.mvp_idx = dec.decode_bin(ctx.mvp_idx);
    }
  }
  cu.root_cbf = dec.decode_bin(ctx.root_cbf);
  return cu;
}

void write_split_flag(ArithEncoder& enc, ContextSet& ctx, int depth, bool split) {
  enc.set_class(SyntaxClass::Split);
  enc.encode_bin(ctx.split_flag[std::min(depth, 2)], split);
}

bool read_split_flag(ArithDecoder& dec, ContextSet& ctx, int depth) {
  return dec.decode_bin(ctx.split_flag[std::min(depth, 2)]);
}

// ---------------------------------------------------------------------------
// Residual coefficients
// ---------------------------------------------------------------------------

const std::vector<std::pair<int, int>>& diagonal_scan(int n) {
  static const std::array<std::vector<std::pair<int, int>>, 7> scans = [] {
    std::array<std::vector<std::pair<int, int>>, 7> s;
    for (int log2 = 0; log2 < 7; ++log2) {
      const int size = 1 << log2;
      for (int d = 0; d <= 2 * (size - 1); ++d)
        for (int y = std::min(d, size - 1); y >= 0 && d - y < size; --y) s[log2].emplace_back(d - y, y);
    }
    return s;
  }();
  int log2 = 0;
  while ((1 << log2) < n && log2 < 6) ++log2;
  if ((1 << log2) != n) throw ArgumentError("scan size must be a power of two up to 64");
  return scans[log2];
}

namespace {

int sig_class(int x, int y) {
  const int d = x + y;
  if (d == 0) return 0;
  if (d < 3) return 1;
  if (d < 8) return 2;
  return 3;
}

}  // namespace

void code_residual(ArithEncoder& enc, ContextSet& ctx, const CoeffBlock& coeffs, bool chroma) {
  const int n = coeffs.width();
  if (coeffs.height() != n) throw ArgumentError("residual block must be square");
  const auto& scan = diagonal_scan(n);
  const int c = chroma ? 1 : 0;

  int last = -1;
  for (int s = 0; s < static_cast<int>(scan.size()); ++s) {
    const int v = coeffs.at(scan[s].first, scan[s].second);
    if (v > kMaxCoeff || v < -kMaxCoeff) throw ArgumentError("coefficient out of range");
    if (v != 0) last = s;
  }
  enc.set_class(SyntaxClass::Residual);
  enc.encode_bin(ctx.cbf[c], last >= 0);
  if (last < 0) return;

  std::uint32_t v = static_cast<std::uint32_t>(last);
  int prefix = 0;
  while (v >= (1u << prefix)) {
    enc.encode_bin(ctx.last_prefix[c][prefix], 1);
    v -= 1u << prefix;
    ++prefix;
  }
  enc.encode_bin(ctx.last_prefix[c][prefix], 0);
  enc.encode_bypass_bits(v, prefix);

  for (int s = last; s >= 0; --s) {
    const auto [x, y] = scan[s];
    const int coef = coeffs.at(x, y);
    const int a = std::abs(coef);
    if (s < last) {
      enc.encode_bin(ctx.sig[c][sig_class(x, y)], a != 0);
      if (a == 0) continue;
    }
    enc.encode_bin(ctx.gt1[c][x + y == 0 ? 0 : 1], a > 1);
    if (a > 1) {
      enc.encode_bin(ctx.gt2[c], a > 2);
      if (a > 2) write_eg_bypass(enc, static_cast<std::uint32_t>(a - 3), 0);
    }
    enc.encode_bypass(coef < 0);
  }
}

CoeffBlock decode_residual(ArithDecoder& dec, ContextSet& ctx, int size, bool chroma) {
  const auto& scan = diagonal_scan(size);
  const int c = chroma ? 1 : 0;
  CoeffBlock out(size, size, 0);
  if (!dec.decode_bin(ctx.cbf[c])) return out;

  int prefix = 0;
  std::uint32_t base = 0;
  while (dec.decode_bin(ctx.last_prefix[c][prefix])) {
    base += 1u << prefix;
    if (++prefix >= static_cast<int>(ctx.last_prefix[c].size()))
      throw BitstreamError("last position prefix too long", dec.bit_offset());
  }
  const std::uint32_t last_u = base + dec.decode_bypass_bits(prefix);
  if (last_u >= scan.size()) throw BitstreamError("last position out of range", dec.bit_offset());
  const int last = static_cast<int>(last_u);

  for (int s = last; s >= 0; --s) {
    const auto [x, y] = scan[s];
    if (s < last && !dec.decode_bin(ctx.sig[c][sig_class(x, y)])) continue;
    std::uint32_t a = 1;
    if (dec.decode_bin(ctx.gt1[c][x + y == 0 ? 0 : 1])) {
      a = 2;
      if (dec.decode_bin(ctx.gt2[c])) a = 3 + read_eg_bypass(dec, 0);
    }
    if (a > static_cast<std::uint32_t>(kMaxCoeff)) throw BitstreamError("coefficient out of range", dec.bit_offset());
    const int sign = dec.decode_bypass();
    out.at(x, y) = sign ? -static_cast<int>(a) : static_cast<int>(a);
  }
  return out;
}

}  // namespace saip::bs
