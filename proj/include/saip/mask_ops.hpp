#pragma once

// Mask geometry: translating reference masks onto coding blocks, Prewitt
// based edge-distance classification, blend weights and corner patterns.

#include <array>
#include <atomic>
#include <cstdint>

#include "saip/core.hpp"

namespace saip::mask {

// Binary mask translated onto a coding block (1 = instance side).
struct BlockMask {
  BlockArea area;
  MaskPlane bits;
};

// Per-pixel edge category: 0 = away from the partition line, 1 = adjacent,
// 2 = one pixel further out.
struct CategoryMap {
  MaskPlane cat;
};

// Blend weights in fourths; w1 is implied as 4 - w0.
struct WeightMap {
  MaskPlane w0;
  int w1(int x, int y) const { return 4 - w0.at(x, y); }
};

struct CornerPattern {
  int id = 0;
  bool tl = false;
  bool tr = false;
  bool bl = false;
  bool br = false;

  static CornerPattern from_flags(bool tl, bool tr, bool bl, bool br) {
    return {(tl ? 8 : 0) | (tr ? 4 : 0) | (bl ? 2 : 0) | (br ? 1 : 0), tl, tr, bl, br};
  }
  static CornerPattern from_id(int id) { return from_flags(id & 8, id & 4, id & 2, id & 1); }
};

enum class PrewittScale { k3x3, k5x5 };

// Nearest integer pel of a quarter-pel component, ties away from zero.
int round_to_integer_pel(int quarter_pel);

// Gradient magnitude max(|sum(S*P)|, |sum(S*P^T)|) of a 3x3 or 5x5 window.
int prewitt_g(const MaskPlane& window, PrewittScale scale);

// Edge category of one pixel given a mask reader with replicate padding.
template <typename Reader>
std::uint8_t category_at(const Reader& m, int x, int y) {
  // 3x3: rows/columns at distance 1
  int gv = 0, gh = 0;
  for (int k = -1; k <= 1; ++k) {
    gv += m(x + k, y + 1) - m(x + k, y - 1);
    gh += m(x + 1, y + k) - m(x - 1, y + k);
  }
  if (gv != 0 || gh != 0) return 1;
  gv = gh = 0;
  for (int k = -2; k <= 2; ++k) {
    gv += m(x + k, y + 2) - m(x + k, y - 2);
    gh += m(x + 2, y + k) - m(x - 2, y + k);
  }
  return (gv != 0 || gh != 0) ? 2 : 0;
}

inline constexpr std::array<std::uint8_t, 3> kW0ByCategory = {4, 2, 3};

BlockMask translate_mask(const SegMask& ref_mask, const BlockArea& block, const MotionVector& mv);
CategoryMap classify_pixels(const BlockMask& bm);
WeightMap weight_map(const CategoryMap& cm);
// Corner flags are 1 where the 2x2 corner group lies wholly in the secondary
// region; `reverse_idx` = 1 makes mask value 0 the primary region.
CornerPattern classify_pattern(const BlockMask& bm, int reverse_idx = 0);

// Whole-frame category and weight map, computed once per reference frame.
class FrameWeights {
 public:
  FrameWeights() = default;
  explicit FrameWeights(const SegMask& mask);

  int width() const { return binary_.width(); }
  int height() const { return binary_.height(); }
  const MaskPlane& binary() const { return binary_; }
  const CategoryMap& categories() const { return categories_; }
  const WeightMap& weights() const { return weights_; }

  std::uint8_t bit(int x, int y) const { return binary_.clamped(x, y); }
  // Any coordinate; outside the picture the replicate-padded mask is classified directly.
  std::uint8_t category(int x, int y) const;

  // Category map extended by kPad samples on each side; it equals category()
  // for any coordinate once clamped into [-kPad, size + kPad - 1].
  static constexpr int kPad = 3;
  const MaskPlane& padded_categories() const { return padded_cat_; }

  // Number of FrameWeights constructed so far in this process.
  static long precompute_count() { return counter_.load(); }

 private:
  MaskPlane binary_;
  CategoryMap categories_;
  WeightMap weights_;
  MaskPlane padded_cat_;
  static std::atomic<long> counter_;
};

FrameWeights precompute_weight_map(const SegMask& mask);

// Translated mask and categories over a block extended by a margin on each
// side (lo to the left/top, hi to the right/bottom), in luma samples.
struct RegionMask {
  int w = 0;
  int h = 0;
  int lo = 0;
  int hi = 0;
  MaskPlane bits;  // (w + lo + hi) x (h + lo + hi)
  MaskPlane cat;
  bool block_uniform = true;  // bits constant over the block and no edge category inside it
  std::uint8_t block_value = 0;

  std::uint8_t bit(int x, int y) const { return bits.at(x + lo, y + lo); }
  std::uint8_t category(int x, int y) const { return cat.at(x + lo, y + lo); }
  bool has_edge_in_block() const;
  BlockMask block_mask(const BlockArea& area) const;
};

// Corner pattern of the block part of a region mask.
CornerPattern classify_pattern(const RegionMask& rm, int reverse_idx);

RegionMask translate_region(const FrameWeights& fw, const BlockArea& block, const MotionVector& mv, int lo, int hi);

}  // namespace saip::mask
