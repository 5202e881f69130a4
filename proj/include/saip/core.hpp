#pragma once

// Shared domain types, raw video / mask file I/O and plane helpers.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace saip {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::uint64_t offset = 0)
      : std::runtime_error(what), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// ---------------------------------------------------------------------------
// 2-D arrays
// ---------------------------------------------------------------------------

template <typename T>
class Plane2D {
 public:
  Plane2D() = default;
  Plane2D(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill) {
    if (width < 0 || height < 0) throw ArgumentError("negative plane dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  // Replicate-padded read.
  const T& clamped(int x, int y) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }

  std::span<T> row(int y) { return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Plane2D& o) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Sample = std::uint16_t;
using Plane = Plane2D<Sample>;
using MaskPlane = Plane2D<std::uint8_t>;
using LabelPlane = Plane2D<std::uint16_t>;

enum class Component : int { Y = 0, U = 1, V = 2 };

struct BlockArea {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  bool operator==(const BlockArea&) const = default;
};

// ---------------------------------------------------------------------------
// Frame
// ---------------------------------------------------------------------------

class Frame {
 public:
  Frame() = default;
  // Allocates a 4:2:0 frame filled with mid-grey.
  Frame(int width, int height, int bit_depth, int poc = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  int bit_depth() const { return bit_depth_; }
  int poc() const { return poc_; }
  void set_poc(int poc) { poc_ = poc; }
  int max_value() const { return (1 << bit_depth_) - 1; }

  Plane& plane(int c) { return planes_[c]; }
  const Plane& plane(int c) const { return planes_[c]; }
  Plane& luma() { return planes_[0]; }
  const Plane& luma() const { return planes_[0]; }

  // Bytes of one frame in the raw I420 layout.
  static std::size_t frame_bytes(int width, int height, int bit_depth);

  // Throws ArgumentError when dimensions or sample ranges are violated.
  void validate() const;

  bool operator==(const Frame& o) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int bit_depth_ = 8;
  int poc_ = 0;
  std::array<Plane, 3> planes_;
};

// Binary foreground mask: 1 wherever the label is a nonzero instance id.
MaskPlane binarize(const LabelPlane& labels);

// Instance label map plus its binarized form.
struct SegMask {
  LabelPlane labels;
  MaskPlane binary;
  int poc = 0;

  SegMask() = default;
  SegMask(LabelPlane label_map, int poc_value);

  int width() const { return labels.width(); }
  int height() const { return labels.height(); }
  bool operator==(const SegMask&) const = default;
};

// ---------------------------------------------------------------------------
// Motion
// ---------------------------------------------------------------------------

inline constexpr int kMvMax = 4 * 512;

// Quarter-pel luma motion vector.
struct MotionVector {
  int mvx = 0;
  int mvy = 0;
  int ref_idx = 0;
  bool valid = false;

  static MotionVector make(int x, int y, int ref = 0) { return {clamp_component(x), clamp_component(y), ref, true}; }
  static int clamp_component(int v) { return std::clamp(v, -kMvMax, kMvMax); }

  bool same_motion(const MotionVector& o) const {
    return valid == o.valid && mvx == o.mvx && mvy == o.mvy && ref_idx == o.ref_idx;
  }
  bool operator==(const MotionVector&) const = default;
};

enum class InterDir : int { Forward = 0, Backward = 1, Bi = 2 };

inline bool uses_list(InterDir dir, int list) {
  return dir == InterDir::Bi || static_cast<int>(dir) == list;
}

inline constexpr int kPrimaryListSize = 71;
inline constexpr int kSecondaryListSize = 7;

// Motion payload of one SAIP coding unit. Arrays are indexed by reference
// list (0 = forward, 1 = backward); only the lists used by `dir` matter.
struct MotionPair {
  std::array<MotionVector, 2> primary{};
  std::array<MotionVector, 2> secondary{};
  int reverse_idx = 0;
  InterDir dir = InterDir::Forward;
  int primary_cand_idx = 0;
  int secondary_cand_idx = 0;

  // Throws ArgumentError on out-of-range indices or inconsistent direction.
  void validate() const;
  bool operator==(const MotionPair&) const = default;
};

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

// Reads every frame of a raw planar 4:2:0 file. 10-bit samples are 16-bit LE.
std::vector<Frame> read_yuv(const std::filesystem::path& path, int width, int height, int bit_depth);
// Returns the number of bytes written.
std::size_t write_yuv(std::span<const Frame> frames, const std::filesystem::path& path);
// Appends one frame to an already open stream.
void append_yuv(const Frame& frame, std::ostream& out);

SegMask read_mask_pgm(const std::filesystem::path& path, int poc = 0);
void write_mask_pgm(const LabelPlane& labels, const std::filesystem::path& path);
// Writes an 8-bit grey image, used for analysis overlays.
void write_pgm(const MaskPlane& image, const std::filesystem::path& path);

// `<prefix>_%05d.pgm`
std::filesystem::path mask_path(const std::string& prefix, int poc);

// ---------------------------------------------------------------------------
// Plane helpers
// ---------------------------------------------------------------------------

template <typename T>
Plane2D<T> pad_replicate(const Plane2D<T>& plane, int margin) {
  if (margin < 0) throw ArgumentError("negative padding margin");
  Plane2D<T> out(plane.width() + 2 * margin, plane.height() + 2 * margin);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out.at(x, y) = plane.clamped(x - margin, y - margin);
  return out;
}

template <typename T>
Plane2D<T> crop(const Plane2D<T>& plane, const BlockArea& area) {
  Plane2D<T> out(area.w, area.h);
  for (int y = 0; y < area.h; ++y)
    for (int x = 0; x < area.w; ++x) out.at(x, y) = plane.clamped(area.x + x, area.y + y);
  return out;
}

template <typename T>
void paste(Plane2D<T>& dst, const Plane2D<T>& src, int x0, int y0) {
  for (int y = 0; y < src.height(); ++y) {
    if (y0 + y < 0 || y0 + y >= dst.height()) continue;
    for (int x = 0; x < src.width(); ++x) {
      if (x0 + x < 0 || x0 + x >= dst.width()) continue;
      dst.at(x0 + x, y0 + y) = src.at(x, y);
    }
  }
}

inline int clip_sample(int v, int max_value) { return std::clamp(v, 0, max_value); }

}  // namespace saip
