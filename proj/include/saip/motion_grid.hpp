#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "saip/core.hpp"

namespace saip::mvc {

// Motion of one prediction unit in both reference lists.
struct MotionInfo {
  std::array<MotionVector, 2> mv{};

  bool is_valid() const { return mv[0].valid || mv[1].valid; }
  bool operator==(const MotionInfo&) const = default;
};

enum class RegionTag : std::uint8_t { Primary = 0, Secondary = 1 };

struct MotionUnit {
  MotionInfo motion;
  std::array<int, 2> ref_poc{-1, -1};
  RegionTag region = RegionTag::Primary;
  bool coded = false;
  bool inter = false;
};

// 4x4-unit motion storage covering one frame.
class MotionGrid {
 public:
  MotionGrid() = default;
  MotionGrid(int width, int height) : units_w_((width + 3) / 4), units_h_((height + 3) / 4),
                                      units_(static_cast<std::size_t>(units_w_) * units_h_) {}

  int units_w() const { return units_w_; }
  int units_h() const { return units_h_; }

  MotionUnit& unit(int ux, int uy) { return units_[static_cast<std::size_t>(uy) * units_w_ + ux]; }
  const MotionUnit& unit(int ux, int uy) const { return units_[static_cast<std::size_t>(uy) * units_w_ + ux]; }

  // Unit covering luma pixel (x, y); nullptr outside the picture.
  const MotionUnit* at_pixel(int x, int y) const {
    if (x < 0 || y < 0) return nullptr;
    const int ux = x >> 2;
    const int uy = y >> 2;
    if (ux >= units_w_ || uy >= units_h_) return nullptr;
    return &unit(ux, uy);
  }

  void reset() { std::fill(units_.begin(), units_.end(), MotionUnit{}); }

  // Number of unit writes since construction (instrumentation).
  long writes() const { return writes_; }
  void count_write() { ++writes_; }

 private:
  int units_w_ = 0;
  int units_h_ = 0;
  std::vector<MotionUnit> units_;
  long writes_ = 0;
};

}  // namespace saip::mvc
