#include <fstream>

#include "frame_coding.hpp"
#include "saip/codec.hpp"

namespace saip::codec {

namespace {

using detail::inside;
using detail::quadrants;

class FrameDecoder {
 public:
  FrameDecoder(const bs::SequenceHeader& hdr, const bs::FrameHeader& fh, const ReferenceStore& store,
               std::span<const std::uint8_t> data, std::uint64_t base_bits)
      : hdr_(hdr),
        fh_(fh),
        store_(store),
        syntax_(detail::syntax_params_for(hdr, fh.slice, store)),
        dec_(data, base_bits),
        recon_(hdr.width, hdr.height, hdr.bit_depth, fh.poc),
        grid_(hdr.width, hdr.height) {}

  void run(DecodedFrame& out) {
    for (int y = 0; y < hdr_.height; y += hdr_.ctu_size)
      for (int x = 0; x < hdr_.width; x += hdr_.ctu_size) decode_node({x, y, hdr_.ctu_size, hdr_.ctu_size}, 0, out);
    dec_.finish();
    out.class_bits = mirror_.class_bits();
  }

  Frame& recon() { return recon_; }
  mvc::MotionGrid& grid() { return grid_; }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw bs::BitstreamError(what, dec_.bit_offset()); }

  void decode_node(const BlockArea& a, int depth, DecodedFrame& out) {
    bool split;
    if (!inside(a, hdr_.width, hdr_.height)) {
      split = true;
    } else if (a.w > hdr_.min_cu) {
      split = bs::read_split_flag(dec_, ctx_, depth);
      bs::write_split_flag(mirror_, mirror_ctx_, depth, split);
    } else {
      split = false;
    }
    if (split) {
      for (const auto& q : quadrants(a, hdr_.width, hdr_.height)) decode_node(q, depth + 1, out);
      return;
    }
    decode_cu(a, out);
  }

  void decode_cu(const BlockArea& a, DecodedFrame& out) {
    bs::SyntaxCU s;
    try {
      s = bs::read_cu_syntax(dec_, ctx_, syntax_);
    } catch (const ArgumentError& e) {
      fail(e.what());
    }
    bs::write_cu_syntax(mirror_, mirror_ctx_, s, syntax_);

    mc::CuPredictor predictor(store_, a);
    const auto cands = detail::candidate_lists(grid_, a, store_, fh_.poc, fh_.slice);
    for (int l = 0; l < 2; ++l)
      if (s.mode != bs::CuMode::Intra && uses_list(s.dir, l) && !cands[l].available)
        fail("coding unit references empty list " + std::to_string(l));

    std::array<Plane, 3> pred;
    rdo::CuMotion motion;
    CuRecord rec{a, s, rdo::kind_of(s), {}};
    switch (s.mode) {
      case bs::CuMode::Intra: pred = rdo::intra_dc_predict(recon_, a); break;
      case bs::CuMode::Skip:
      case bs::CuMode::Merge: {
        std::array<MotionVector, 2> mv{};
        for (int l = 0; l < 2; ++l)
          if (uses_list(s.dir, l)) mv[l] = cands[l].merge[s.merge_idx].mv;
        pred = predictor.baseline(mv, s.dir).planes;
        for (int l = 0; l < 2; ++l) motion.uniform.mv[l] = mv[l];
        break;
      }
      case bs::CuMode::Amvp: {
        std::array<MotionVector, 2> mv{};
        for (int l = 0; l < 2; ++l) {
          if (!uses_list(s.dir, l)) continue;
          const auto& d = s.amvp[l];
          if (d.ref_idx >= store_.list_size(l)) fail("reference index beyond list " + std::to_string(l));
          const auto mvps = mvc::amvp_predictors(cands[l], d.ref_idx);
          const MotionVector& p = mvps[d.mvp_idx];
          mv[l] = MotionVector::make(p.mvx + d.mvd_x, p.mvy + d.mvd_y, d.ref_idx);
        }
        pred = predictor.baseline(mv, s.dir).planes;
        for (int l = 0; l < 2; ++l) motion.uniform.mv[l] = mv[l];
        break;
      }
      case bs::CuMode::Saip: {
        rdo::CandidateCombo combo;
        combo.alpha = s.primary_index();
        combo.j = s.saip_reverse_idx;
        combo.beta = s.saip_back_idx;
        motion.saip = true;
        motion.pair = rdo::combo_motion(combo, s.dir, predictor, cands);
        pred = predictor.saip(motion.pair).planes;
        for (int l = 0; l < 2; ++l)
          if (uses_list(s.dir, l)) motion.masks[l] = predictor.region(l, motion.pair.primary[l]).block_mask(a);
        rec.saip_motion = motion.pair;
        break;
      }
    }

    std::vector<bs::CoeffBlock> levels;
    if (s.mode == bs::CuMode::Intra || s.root_cbf) {
      for (const auto& tu : rdo::tu_layout(a.w, a.h)) {
        levels.push_back(bs::decode_residual(dec_, ctx_, tu.area.w, tu.comp != 0));
        bs::code_residual(mirror_, mirror_ctx_, levels.back(), tu.comp != 0);
      }
    }
    detail::paste_cu(recon_, a, rdo::reconstruct_cu(pred, levels, a.w, a.h, fh_.qp, hdr_.bit_depth));
    detail::store_cu_motion(grid_, a, motion, store_.lists());
    out.cus.push_back(rec);
  }

  const bs::SequenceHeader& hdr_;
  bs::FrameHeader fh_;
  const ReferenceStore& store_;
  bs::SyntaxParams syntax_;
  bs::ArithDecoder dec_;
  bs::ContextSet ctx_;
  // Re-encodes every decoded symbol to attribute bits to syntax classes.
  bs::ArithEncoder mirror_;
  bs::ContextSet mirror_ctx_;
  Frame recon_;
  mvc::MotionGrid grid_;
};

std::uint32_t get_u32(std::span<const std::uint8_t> d, std::size_t pos) {
  return (std::uint32_t{d[pos]} << 24) | (std::uint32_t{d[pos + 1]} << 16) | (std::uint32_t{d[pos + 2]} << 8) |
         d[pos + 3];
}

}  // namespace

bs::SequenceHeader decode_stream(std::span<const std::uint8_t> data, const FrameSink& sink) {
  std::size_t pos = 0;
  const bs::SequenceHeader hdr = bs::read_header(data, pos);
  seg::MaskPipeline masks(hdr.seg_source, seg::SegConfig{hdr.refresh_interval_gops, hdr.gop_size});
  ReferenceStore store;
  int expected_poc = 0;
  while (pos < data.size()) {
    if (data.size() - pos < 4) throw bs::BitstreamError("truncated frame length", pos * 8);
    const std::uint32_t len = get_u32(data, pos);
    pos += 4;
    if (len > data.size() - pos) throw bs::BitstreamError("truncated frame payload", pos * 8);
    const auto payload = data.subspan(pos, len);

    bs::BitReader br(payload, pos * 8);
    bs::FrameHeader fh;
    try {
      fh = bs::read_frame_header(br);
    } catch (const ParseError& e) {
      throw bs::BitstreamError(e.what(), br.bit_offset());
    }
    if (fh.poc != expected_poc) throw bs::BitstreamError("unexpected poc " + std::to_string(fh.poc), pos * 8);
    if (fh.slice != detail::slice_type_for(fh.poc, hdr)) throw bs::BitstreamError("slice type does not match the GOP structure", pos * 8);
    const std::size_t hbytes = br.byte_position();
    store.build_lists(fh.poc, hdr.num_refs);

    FrameDecoder fd(hdr, fh, store, payload.subspan(hbytes), (pos + hbytes) * 8);
    DecodedFrame out;
    out.header = fh;
    fd.run(out);
    out.bits = (static_cast<std::uint64_t>(len) + 4) * 8;
    out.class_bits[static_cast<int>(bs::SyntaxClass::Header)] += (hbytes + 4) * 8 * bs::kOneBit;

    SegMask mask = masks.next(fd.recon());
    out.recon = fd.recon();
    store.add(std::move(fd.recon()), std::move(mask), std::move(fd.grid()));
    store.retain(static_cast<std::size_t>(hdr.num_refs));
    sink(out);
    pos += len;
    ++expected_poc;
  }
  return hdr;
}

std::vector<DecodedFrame> decode_all(std::span<const std::uint8_t> data, bs::SequenceHeader* header) {
  std::vector<DecodedFrame> frames;
  const auto hdr = decode_stream(data, [&](const DecodedFrame& f) { frames.push_back(f); });
  if (header) *header = hdr;
  return frames;
}

int decode_file(const std::filesystem::path& in, const std::filesystem::path& out) {
  const auto data = read_file(in);
  std::ofstream os(out, std::ios::binary);
  if (!os) throw IoError("cannot write " + out.string());
  int n = 0;
  decode_stream(data, [&](const DecodedFrame& f) {
    append_yuv(f.recon, os);
    os.flush();
    ++n;
  });
  return n;
}

}  // namespace saip::codec
