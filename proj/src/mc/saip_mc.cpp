#include <string>

#include "saip/motion_comp.hpp"

namespace saip::mc {

Plane ormc_blend(const Plane& p_primary, const Plane& p_secondary, const mask::BlockMask& bm,
                 const mask::WeightMap& wm, int reverse_idx) {
  const int w = p_primary.width();
  const int h = p_primary.height();
  if (p_secondary.width() != w || p_secondary.height() != h || bm.bits.width() != w || bm.bits.height() != h ||
      wm.w0.width() != w || wm.w0.height() != h)
    throw ArgumentError("ormc_blend inputs differ in geometry");
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.at(x, y) = static_cast<Sample>(
          ormc_pixel(p_primary.at(x, y), p_secondary.at(x, y), bm.bits.at(x, y) ^ reverse_idx, wm.w0.at(x, y)));
  return out;
}

void average_into(Plane& dst, const Plane& other) {
  auto& d = dst.data();
  const auto& o = other.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<Sample>((d[i] + o[i] + 1) >> 1);
}

namespace {

std::uint64_t single_key(int poc, const MotionVector& mv, int comp) {
  return (static_cast<std::uint64_t>(poc & 0xffff) << 32) ^
         (static_cast<std::uint64_t>(mv.mvx + 8192) << 18) ^ (static_cast<std::uint64_t>(mv.mvy + 8192) << 4) ^
         static_cast<std::uint64_t>(comp);
}

}  // namespace

CuPredictor::CuPredictor(const ReferenceStore& store, const BlockArea& cu) : store_(store), cu_(cu) {
}

const Plane& CuPredictor::single(int list, const MotionVector& mv, int comp) {
  const auto& e = store_.entry(list, mv.ref_idx);
  const auto key = single_key(e.frame.poc(), mv, comp);
  auto it = singles_.find(key);
  if (it != singles_.end()) return it->second;
  Plane p = motion_compensate(e.frame.plane(comp), comp, cu_, mv, e.frame.bit_depth());
  return singles_.emplace(key, std::move(p)).first->second;
}

std::uint64_t CuPredictor::region_key(int list, const MotionVector& mv) const {
  const auto& e = store_.entry(list, mv.ref_idx);
  const MotionVector rounded{mask::round_to_integer_pel(mv.mvx), mask::round_to_integer_pel(mv.mvy), 0, true};
  return single_key(e.frame.poc(), rounded, 3);
}

const mask::RegionMask& CuPredictor::region(int list, const MotionVector& mv) {
  const auto key = region_key(list, mv);
  auto it = regions_.find(key);
  if (it != regions_.end()) return it->second;
  const auto& lf = luma_filter();
  auto r = mask::translate_region(store_.entry(list, mv.ref_idx).weights, cu_, mv, lf.lo(), lf.hi());
  return regions_.emplace(key, std::move(r)).first->second;
}

const CuPredictor::BlendTable& CuPredictor::blend_table(int list, const MotionVector& mv, int comp) {
  const auto key = region_key(list, mv) + 1 + comp;
  auto it = blends_.find(key);
  if (it != blends_.end()) return it->second;
  const mask::RegionMask& rm = region(list, mv);
  const int step = comp == 0 ? 1 : 2;
  const int w = rm.w / step, h = rm.h / step;
  BlendTable t;
  t.wp = MaskPlane(w, h);
  t.ex0 = w, t.ey0 = h;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int cat = rm.category(x * step, y * step);
      const int w0 = mask::kW0ByCategory[cat];
      t.wp.at(x, y) = static_cast<std::uint8_t>(rm.bit(x * step, y * step) ? w0 : 4 - w0);
      if (cat != 0) {
        ++t.edges;
        t.ex0 = std::min(t.ex0, x), t.ex1 = std::max(t.ex1, x);
        t.ey0 = std::min(t.ey0, y), t.ey1 = std::max(t.ey1, y);
      }
    }
  return blends_.emplace(key, std::move(t)).first->second;
}

void CuPredictor::saip_uni(int list, const MotionVector& pmv, const MotionVector& smv, int j, FusionMode mode,
                           int num_comps, std::array<Plane, 3>& out) {
  const mask::RegionMask& rm = region(list, pmv);
  for (int c = 0; c < num_comps; ++c) {
    const Plane& pp = single(list, pmv, c);
    const Plane& ps = single(list, smv, c);
    if (rm.block_uniform || pmv.same_motion(smv)) {
      out[c] = (rm.block_value ^ j) || pmv.same_motion(smv) ? pp : ps;
      continue;
    }
    const int w = pp.width();
    const int h = pp.height();
    const int step = c == 0 ? 1 : 2;
    if (out[c].width() != w || out[c].height() != h) out[c] = Plane(w, h);
    const BlendTable& bt = blend_table(list, pmv, c);
    for (int y = 0; y < h; ++y) {
      Sample* dst = &out[c].at(0, y);
      const Sample* a = &pp.at(0, y);
      const Sample* b = &ps.at(0, y);
      const std::uint8_t* wrow = &bt.wp.at(0, y);
      for (int x = 0; x < w; ++x) {
        const int wp = j ? 4 - wrow[x] : wrow[x];
        dst[x] = static_cast<Sample>((wp * a[x] + (4 - wp) * b[x] + 2) >> 2);
      }
    }
    const int ex0 = bt.ex0, ex1 = bt.ex1, ey0 = bt.ey0, ey1 = bt.ey1;
    if (mode == FusionMode::OneStep || ex1 < ex0) continue;

    // Edge pixels: interpolate from the fused integer-pel prediction so the
    // filter taps see the blended neighbourhood across the partition line.
    const auto& pe = store_.entry(list, pmv.ref_idx).frame;
    const auto& se = store_.entry(list, smv.ref_idx).frame;
    const InterpFilter& f = filter_for(c);
    const int shift = c == 0 ? 2 : 3;
    const int fmask = (1 << shift) - 1;
    const int lo = f.lo();
    const int rw = ex1 - ex0 + f.num_taps;
    const int rh = ey1 - ey0 + f.num_taps;
    const BlockArea pa = plane_area(cu_, c);
    const Plane ip = fetch_block(pe.plane(c), pa.x + (pmv.mvx >> shift) - lo + ex0,
                                 pa.y + (pmv.mvy >> shift) - lo + ey0, rw, rh);
    const Plane is = fetch_block(se.plane(c), pa.x + (smv.mvx >> shift) - lo + ex0,
                                 pa.y + (smv.mvy >> shift) - lo + ey0, rw, rh);
    Plane fused(rw, rh);
    for (int v = 0; v < rh; ++v) {
      const int my = (ey0 + v - lo) * step;
      for (int u = 0; u < rw; ++u) {
        const int mx = (ex0 + u - lo) * step;
        fused.at(u, v) = static_cast<Sample>(ormc_pixel(ip.at(u, v), is.at(u, v), rm.bit(mx, my) ^ j,
                                                        mask::kW0ByCategory[rm.category(mx, my)]));
      }
    }
    const int bd = pe.bit_depth();
    const int bw = ex1 - ex0 + 1, bh = ey1 - ey0 + 1;
    const bool whole_box = 4 * bt.edges >= bw * bh;
    Plane bp, bs;
    if (whole_box) {
      bp = interpolate(fused, lo, bw, bh, pmv.mvx & fmask, pmv.mvy & fmask, f, bd);
      bs = interpolate(fused, lo, bw, bh, smv.mvx & fmask, smv.mvy & fmask, f, bd);
    }
    for (int y = ey0; y <= ey1; ++y)
      for (int x = ex0; x <= ex1; ++x) {
        const int cat = rm.category(x * step, y * step);
        if (cat == 0) continue;
        const int fx = x - ex0 + lo, fy = y - ey0 + lo;
        const int vp = whole_box ? bp.at(x - ex0, y - ey0)
                                 : interpolate_at(fused, fx, fy, pmv.mvx & fmask, pmv.mvy & fmask, f, bd);
        const int vs = whole_box ? bs.at(x - ex0, y - ey0)
                                 : interpolate_at(fused, fx, fy, smv.mvx & fmask, smv.mvy & fmask, f, bd);
        out[c].at(x, y) =
            static_cast<Sample>(ormc_pixel(vp, vs, rm.bit(x * step, y * step) ^ j, mask::kW0ByCategory[cat]));
      }
  }
}

Prediction CuPredictor::saip(const MotionPair& mp, FusionMode mode, bool luma_only) {
  mp.validate();
  const int nc = luma_only ? 1 : 3;
  Prediction out{cu_, {}};
  bool first = true;
  for (int l = 0; l < 2; ++l) {
    if (!uses_list(mp.dir, l)) continue;
    if (first) {
      saip_uni(l, mp.primary[l], mp.secondary[l], mp.reverse_idx, mode, nc, out.planes);
      first = false;
    } else {
      std::array<Plane, 3> other;
      saip_uni(l, mp.primary[l], mp.secondary[l], mp.reverse_idx, mode, nc, other);
      for (int c = 0; c < nc; ++c) average_into(out.planes[c], other[c]);
    }
  }
  return out;
}

Prediction CuPredictor::baseline(const std::array<MotionVector, 2>& mv, InterDir dir, bool luma_only) {
  const int nc = luma_only ? 1 : 3;
  Prediction out{cu_, {}};
  bool first = true;
  for (int l = 0; l < 2; ++l) {
    if (!uses_list(dir, l)) continue;
    if (!mv[l].valid) throw ArgumentError("baseline prediction needs a valid vector in list " + std::to_string(l));
    for (int c = 0; c < nc; ++c) {
      if (first)
        out.planes[c] = single(l, mv[l], c);
      else
        average_into(out.planes[c], single(l, mv[l], c));
    }
    first = false;
  }
  return out;
}

SaipOutput saip_predict(const ReferenceStore& store, const BlockArea& cu, const MotionPair& mp, FusionMode mode) {
  CuPredictor pred(store, cu);
  SaipOutput out{pred.saip(mp, mode), {}};
  for (int l = 0; l < 2; ++l)
    if (uses_list(mp.dir, l)) out.masks[l] = pred.region(l, mp.primary[l]).block_mask(cu);
  return out;
}

Prediction baseline_predict(const ReferenceStore& store, const BlockArea& cu, const std::array<MotionVector, 2>& mv,
                            InterDir dir) {
  CuPredictor pred(store, cu);
  return pred.baseline(mv, dir);
}

Prediction baseline_predict(const ReferenceStore& store, const BlockArea& cu, const MotionVector& mv) {
  return baseline_predict(store, cu, {mv, MotionVector{}}, InterDir::Forward);
}

}  // namespace saip::mc
