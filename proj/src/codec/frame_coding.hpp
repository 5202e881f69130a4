#pragma once

#include <array>
#include <vector>

#include "saip/bitstream.hpp"
#include "saip/codec.hpp"
#include "saip/mvc.hpp"
#include "saip/rdo.hpp"
#include "saip/reference_store.hpp"

namespace saip::codec::detail {

inline bs::SliceType slice_type_for(int poc, const bs::SequenceHeader& h) {
  if (poc % h.gop_size == 0) return bs::SliceType::I;
  return h.profile == bs::Profile::LowDelayB ? bs::SliceType::B : bs::SliceType::P;
}

inline bs::SyntaxParams syntax_params_for(const bs::SequenceHeader& h, bs::SliceType slice,
                                          const ReferenceStore& store) {
  bs::SyntaxParams p;
  p.slice = slice;
  p.saip_merge_enabled = h.enable_saip_merge;
  p.saip_mmvd_enabled = h.enable_saip_mmvd;
  p.max_secondary = h.max_secondary_candidates;
  p.num_refs = std::max(1, std::min(h.num_refs, store.list_size(0)));
  return p;
}

inline std::array<rdo::ListCandidates, 2> candidate_lists(const mvc::MotionGrid& grid, const BlockArea& cu,
                                                          const ReferenceStore& store, int poc, bs::SliceType slice) {
  std::array<rdo::ListCandidates, 2> c;
  if (slice == bs::SliceType::I) return c;
  c[0] = mvc::build_candidate_lists(grid, cu, 0, store, poc);
  if (slice == bs::SliceType::B) c[1] = mvc::build_candidate_lists(grid, cu, 1, store, poc);
  return c;
}

inline void store_cu_motion(mvc::MotionGrid& grid, const BlockArea& cu, const rdo::CuMotion& m,
                            const mvc::ListPocs& pocs) {
  if (m.saip)
    mvc::store_motion(grid, cu, m.pair, m.masks, pocs);
  else if (m.uniform.is_valid())
    mvc::store_uniform(grid, cu, m.uniform, pocs);
  else
    mvc::store_intra(grid, cu);
}

inline void paste_cu(Frame& recon, const BlockArea& cu, const std::array<Plane, 3>& planes) {
  for (int c = 0; c < 3; ++c) {
    const BlockArea pa = mc::plane_area(cu, c);
    paste(recon.plane(c), planes[c], pa.x, pa.y);
  }
}

// Quadrants of `a` that start inside the picture, in z-order.
inline std::vector<BlockArea> quadrants(const BlockArea& a, int width, int height) {
  std::vector<BlockArea> q;
  const int h = a.w / 2;
  for (int i = 0; i < 4; ++i) {
    const BlockArea c{a.x + (i & 1) * h, a.y + (i >> 1) * h, h, h};
    if (c.x < width && c.y < height) q.push_back(c);
  }
  return q;
}

inline bool inside(const BlockArea& a, int width, int height) { return a.x + a.w <= width && a.y + a.h <= height; }

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

inline rdo::ModeKind record_kind(const bs::SyntaxCU& s) { return rdo::kind_of(s); }

}  // namespace saip::codec::detail
