#include "saip/core.hpp"

#include <string>

namespace saip {

Frame::Frame(int width, int height, int bit_depth, int poc)
    : width_(width), height_(height), bit_depth_(bit_depth), poc_(poc) {
  if (width <= 0 || height <= 0) throw ArgumentError("frame dimensions must be positive");
  if (width % 8 != 0 || height % 8 != 0) throw ArgumentError("frame dimensions must be multiples of 8");
  if (bit_depth != 8 && bit_depth != 10) throw ArgumentError("bit depth must be 8 or 10");
  const auto mid = static_cast<Sample>(1 << (bit_depth - 1));
  planes_[0] = Plane(width, height, mid);
  planes_[1] = Plane(width / 2, height / 2, mid);
  planes_[2] = Plane(width / 2, height / 2, mid);
}

std::size_t Frame::frame_bytes(int width, int height, int bit_depth) {
  const std::size_t bps = bit_depth > 8 ? 2 : 1;
  const auto luma = static_cast<std::size_t>(width) * height;
  return (luma + 2 * (luma / 4)) * bps;
}

void Frame::validate() const {
  if (planes_[0].width() != width_ || planes_[0].height() != height_)
    throw ArgumentError("luma plane does not match frame size");
  for (int c = 1; c < 3; ++c)
    if (planes_[c].width() != width_ / 2 || planes_[c].height() != height_ / 2)
      throw ArgumentError("chroma plane does not match 4:2:0 geometry");
  for (const auto& p : planes_)
    for (Sample s : p.data())
      if (s > max_value()) throw ArgumentError("sample exceeds bit depth");
}

MaskPlane binarize(const LabelPlane& labels) {
  MaskPlane out(labels.width(), labels.height());
  auto& dst = out.data();
  const auto& src = labels.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0 ? 1 : 0;
  return out;
}

SegMask::SegMask(LabelPlane label_map, int poc_value)
    : labels(std::move(label_map)), binary(binarize(labels)), poc(poc_value) {}

void MotionPair::validate() const {
  if (reverse_idx != 0 && reverse_idx != 1) throw ArgumentError("reverse index must be 0 or 1");
  if (primary_cand_idx < 0 || primary_cand_idx >= kPrimaryListSize)
    throw ArgumentError("primary candidate index out of range");
  if (secondary_cand_idx < 0 || secondary_cand_idx >= kSecondaryListSize)
    throw ArgumentError("secondary candidate index out of range");
  for (int l = 0; l < 2; ++l)
    if (uses_list(dir, l) && !primary[l].valid)
      throw ArgumentError("primary motion missing for list " + std::to_string(l));
}

}  // namespace saip
