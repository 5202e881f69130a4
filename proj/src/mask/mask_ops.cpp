#include "saip/mask_ops.hpp"

#include <cstdlib>

namespace saip::mask {

std::atomic<long> FrameWeights::counter_{0};

int round_to_integer_pel(int quarter_pel) {
  const int mag = (std::abs(quarter_pel) + 2) >> 2;
  return quarter_pel < 0 ? -mag : mag;
}

int prewitt_g(const MaskPlane& window, PrewittScale scale) {
  const int n = scale == PrewittScale::k3x3 ? 3 : 5;
  if (window.width() != n || window.height() != n) throw ArgumentError("prewitt window has wrong size");
  int gv = 0, gh = 0;
  for (int k = 0; k < n; ++k) {
    gv += window.at(k, n - 1) - window.at(k, 0);
    gh += window.at(n - 1, k) - window.at(0, k);
  }
  return std::max(std::abs(gv), std::abs(gh));
}

BlockMask translate_mask(const SegMask& ref_mask, const BlockArea& block, const MotionVector& mv) {
  const int dx = round_to_integer_pel(mv.mvx);
  const int dy = round_to_integer_pel(mv.mvy);
  BlockMask bm{block, MaskPlane(block.w, block.h)};
  for (int y = 0; y < block.h; ++y)
    for (int x = 0; x < block.w; ++x) bm.bits.at(x, y) = ref_mask.binary.clamped(block.x + x + dx, block.y + y + dy);
  return bm;
}

CategoryMap classify_pixels(const BlockMask& bm) {
  const auto reader = [&](int x, int y) { return static_cast<int>(bm.bits.clamped(x, y)); };
  CategoryMap cm{MaskPlane(bm.bits.width(), bm.bits.height())};
  for (int y = 0; y < bm.bits.height(); ++y)
    for (int x = 0; x < bm.bits.width(); ++x) cm.cat.at(x, y) = category_at(reader, x, y);
  return cm;
}

WeightMap weight_map(const CategoryMap& cm) {
  WeightMap wm{MaskPlane(cm.cat.width(), cm.cat.height())};
  for (std::size_t i = 0; i < cm.cat.size(); ++i) wm.w0.data()[i] = kW0ByCategory[cm.cat.data()[i]];
  return wm;
}

CornerPattern classify_pattern(const BlockMask& bm, int reverse_idx) {
  const int w = bm.bits.width();
  const int h = bm.bits.height();
  if (w < 4 || h < 4) throw ArgumentError("corner pattern needs a block of at least 4x4");
  const auto secondary_corner = [&](int x0, int y0) {
    for (int y = y0; y < y0 + 2; ++y)
      for (int x = x0; x < x0 + 2; ++x)
        if ((bm.bits.at(x, y) ^ reverse_idx) != 0) return false;
    return true;
  };
  return CornerPattern::from_flags(secondary_corner(0, 0), secondary_corner(w - 2, 0), secondary_corner(0, h - 2),
                                   secondary_corner(w - 2, h - 2));
}

FrameWeights::FrameWeights(const SegMask& mask) : binary_(mask.binary) {
  const int w = binary_.width();
  const int h = binary_.height();
  categories_.cat = MaskPlane(w, h);
  const auto reader = [&](int x, int y) { return static_cast<int>(binary_.clamped(x, y)); };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) categories_.cat.at(x, y) = category_at(reader, x, y);
  weights_ = weight_map(categories_);
  // Three samples out every tap of the 5x5 classifier reads the replicated
  // border, so the ring of width kPad covers every outside position.
  padded_cat_ = MaskPlane(w + 2 * kPad, h + 2 * kPad);
  for (int y = -kPad; y < h + kPad; ++y)
    for (int x = -kPad; x < w + kPad; ++x)
      padded_cat_.at(x + kPad, y + kPad) = category_at(reader, x, y);
  ++counter_;
}

std::uint8_t FrameWeights::category(int x, int y) const {
  if (x >= 0 && y >= 0 && x < width() && y < height()) return categories_.cat.at(x, y);
  return padded_cat_.at(std::clamp(x, -kPad, width() + kPad - 1) + kPad,
                        std::clamp(y, -kPad, height() + kPad - 1) + kPad);
}

FrameWeights precompute_weight_map(const SegMask& mask) { return FrameWeights(mask); }

bool RegionMask::has_edge_in_block() const {
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (category(x, y) != 0) return true;
  return false;
}

BlockMask RegionMask::block_mask(const BlockArea& area) const {
  BlockMask bm{area, MaskPlane(w, h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) bm.bits.at(x, y) = bit(x, y);
  return bm;
}

CornerPattern classify_pattern(const RegionMask& rm, int reverse_idx) {
  if (rm.w < 4 || rm.h < 4) throw ArgumentError("corner pattern needs a block of at least 4x4");
  const auto secondary_corner = [&](int x0, int y0) {
    for (int y = y0; y < y0 + 2; ++y)
      for (int x = x0; x < x0 + 2; ++x)
        if ((rm.bit(x, y) ^ reverse_idx) != 0) return false;
    return true;
  };
  return CornerPattern::from_flags(secondary_corner(0, 0), secondary_corner(rm.w - 2, 0),
                                   secondary_corner(0, rm.h - 2), secondary_corner(rm.w - 2, rm.h - 2));
}

RegionMask translate_region(const FrameWeights& fw, const BlockArea& block, const MotionVector& mv, int lo, int hi) {
  RegionMask r;
  r.w = block.w;
  r.h = block.h;
  r.lo = lo;
  r.hi = hi;
  const int rw = block.w + lo + hi;
  const int rh = block.h + lo + hi;
  r.bits = MaskPlane(rw, rh);
  r.cat = MaskPlane(rw, rh);
  const int ox = block.x + round_to_integer_pel(mv.mvx) - lo;
  const int oy = block.y + round_to_integer_pel(mv.mvy) - lo;
  const bool inside = ox >= 0 && oy >= 0 && ox + rw <= fw.width() && oy + rh <= fw.height();
  if (inside) {
    for (int y = 0; y < rh; ++y) {
      const auto src_bits = fw.binary().row(oy + y).subspan(ox, rw);
      const auto src_cat = fw.categories().cat.row(oy + y).subspan(ox, rw);
      std::copy(src_bits.begin(), src_bits.end(), r.bits.row(y).begin());
      std::copy(src_cat.begin(), src_cat.end(), r.cat.row(y).begin());
    }
  } else {
    const int fw_w = fw.width(), fw_h = fw.height();
    constexpr int pad = FrameWeights::kPad;
    std::vector<int> bx(rw), cx(rw);
    for (int x = 0; x < rw; ++x) {
      bx[x] = std::clamp(ox + x, 0, fw_w - 1);
      cx[x] = std::clamp(ox + x, -pad, fw_w + pad - 1) + pad;
    }
    for (int y = 0; y < rh; ++y) {
      const auto src_bits = fw.binary().row(std::clamp(oy + y, 0, fw_h - 1));
      const auto src_cat = fw.padded_categories().row(std::clamp(oy + y, -pad, fw_h + pad - 1) + pad);
      auto dst_bits = r.bits.row(y);
      auto dst_cat = r.cat.row(y);
      for (int x = 0; x < rw; ++x) {
        dst_bits[x] = src_bits[bx[x]];
        dst_cat[x] = src_cat[cx[x]];
      }
    }
  }
  r.block_value = r.bit(0, 0);
  r.block_uniform = true;
  for (int y = 0; y < r.h && r.block_uniform; ++y)
    for (int x = 0; x < r.w; ++x)
      if (r.bit(x, y) != r.block_value || r.category(x, y) != 0) {
        r.block_uniform = false;
        break;
      }
  return r;
}

}  // namespace saip::mask
