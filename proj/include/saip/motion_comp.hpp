#pragma once

// Segmentation-assisted motion compensation: ORMC blending, DCT-IF
// interpolation and the two-step integer/fractional fusion.

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "saip/core.hpp"
#include "saip/mask_ops.hpp"
#include "saip/reference_store.hpp"

namespace saip::mc {

struct InterpFilter {
  int num_taps = 8;
  int phases = 4;
  std::vector<std::array<int, 8>> coeffs;  // first num_taps entries used
  int shift = 6;

  // Taps before / after the output position.
  int lo() const { return num_taps / 2 - 1; }
  int hi() const { return num_taps / 2; }
};

// 8-tap quarter-pel luma and 4-tap eighth-pel chroma DCT-IF sets.
const InterpFilter& luma_filter();
const InterpFilter& chroma_filter();
inline const InterpFilter& filter_for(int comp) { return comp == 0 ? luma_filter() : chroma_filter(); }

struct Prediction {
  BlockArea area;
  std::array<Plane, 3> planes;

  bool has_chroma() const { return !planes[1].empty(); }
  bool operator==(const Prediction&) const = default;
};

// Plane-space block of a coding unit (chroma halves every coordinate).
inline BlockArea plane_area(const BlockArea& cu, int comp) {
  return comp == 0 ? cu : BlockArea{cu.x / 2, cu.y / 2, cu.w / 2, cu.h / 2};
}

// Copies a w x h block at (x, y), replicating samples outside the plane.
Plane fetch_block(const Plane& ref, int x, int y, int w, int h);

// Luma copy displaced by an integer vector; chroma follows at half resolution
// (interpolated when the luma vector is odd).
Prediction fetch_integer_block(const Frame& ref, const BlockArea& area, int dx, int dy);

// Separable horizontal-then-vertical filtering. `src` holds the w x h
// output region at offset (margin, margin). Phase (0, 0) copies.
Plane interpolate(const Plane& src, int margin, int w, int h, int fx, int fy, const InterpFilter& filter,
                  int bit_depth);

// Single output sample of `interpolate` at (x, y) in `src` coordinates.
int interpolate_at(const Plane& src, int x, int y, int fx, int fy, const InterpFilter& filter, int bit_depth);

// One blended sample: primary gets w0/4 where the primary flag is set,
// w1/4 otherwise; rounding is half-up.
inline int ormc_pixel(int p_primary, int p_secondary, int primary_flag, int w0) {
  return primary_flag ? (w0 * p_primary + (4 - w0) * p_secondary + 2) >> 2
                      : ((4 - w0) * p_primary + w0 * p_secondary + 2) >> 2;
}

// Per-pixel region blend. `bm` bits give the instance side; with
// reverse_idx = 1 the zero side is primary.
Plane ormc_blend(const Plane& p_primary, const Plane& p_secondary, const mask::BlockMask& bm,
                 const mask::WeightMap& wm, int reverse_idx = 0);

// Luma/chroma MC of one plane for a quarter-pel luma vector.
Plane motion_compensate(const Plane& ref, int comp, const BlockArea& cu, const MotionVector& mv, int bit_depth);

enum class FusionMode { TwoStep, OneStep };

struct SaipOutput {
  Prediction pred;
  std::array<mask::BlockMask, 2> masks;  // per reference list used
};

// Caches single-vector predictions and translated masks for one coding
// unit so repeated candidate evaluation does not redo motion compensation.
class CuPredictor {
 public:
  CuPredictor(const ReferenceStore& store, const BlockArea& cu);

  const BlockArea& area() const { return cu_; }
  const ReferenceStore& store() const { return store_; }

  const Plane& single(int list, const MotionVector& mv, int comp);
  const mask::RegionMask& region(int list, const MotionVector& mv_primary);

  // One-direction SAIP prediction of planes [0, num_comps).
  void saip_uni(int list, const MotionVector& primary, const MotionVector& secondary, int reverse_idx, FusionMode mode,
                int num_comps, std::array<Plane, 3>& out);

  Prediction saip(const MotionPair& mp, FusionMode mode = FusionMode::TwoStep, bool luma_only = false);
  Prediction baseline(const std::array<MotionVector, 2>& mv, InterDir dir, bool luma_only = false);

 private:
  // Primary weight (in fourths, reverse index 0) per plane sample and the
  // bounding box of the edge samples of one translated region.
  struct BlendTable {
    MaskPlane wp;
    int ex0 = 0, ex1 = -1, ey0 = 0, ey1 = -1;
    int edges = 0;
  };
  std::uint64_t region_key(int list, const MotionVector& mv_primary) const;
  const BlendTable& blend_table(int list, const MotionVector& mv_primary, int comp);

  const ReferenceStore& store_;
  BlockArea cu_;
  std::unordered_map<std::uint64_t, Plane> singles_;
  std::unordered_map<std::uint64_t, mask::RegionMask> regions_;
  std::unordered_map<std::uint64_t, BlendTable> blends_;
};

// Averages two directional predictions with equal weights.
void average_into(Plane& dst, const Plane& other);

SaipOutput saip_predict(const ReferenceStore& store, const BlockArea& cu, const MotionPair& mp,
                        FusionMode mode = FusionMode::TwoStep);
Prediction baseline_predict(const ReferenceStore& store, const BlockArea& cu, const std::array<MotionVector, 2>& mv,
                            InterDir dir);
Prediction baseline_predict(const ReferenceStore& store, const BlockArea& cu, const MotionVector& mv);

}  // namespace saip::mc
