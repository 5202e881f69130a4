#pragma once

// Per-frame segmentation mask acquisition: external label files or a
// built-in luma-threshold segmenter with overlap-based label propagation.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saip/core.hpp"

namespace saip::seg {

using saip::binarize;

enum class SourceKind : int { ExternalFiles = 0, BuiltinThreshold = 1 };

struct MaskSource {
  SourceKind kind = SourceKind::BuiltinThreshold;
  std::string file_prefix;  // external files only
  int threshold = 128;      // builtin only, luma sample value
  int min_area = 16;        // builtin only, pixels

  static MaskSource external(std::string prefix) {
    return {SourceKind::ExternalFiles, std::move(prefix), 128, 16};
  }
  static MaskSource builtin(int threshold, int min_area) {
    return {SourceKind::BuiltinThreshold, {}, threshold, min_area};
  }
  bool operator==(const MaskSource&) const = default;
};

struct SegConfig {
  int refresh_interval_gops = 1;
  int gop_size = 8;

  void validate() const;
  // True when `poc` starts a label refresh interval.
  bool is_refresh_point(int poc) const;
};

// 4-connected components of luma >= threshold with area >= min_area,
// labelled 1..K in raster order of their first pixel.
SegMask builtin_segment(const Frame& frame, int threshold, int min_area);

// Relabels `fresh` components with the label of the previous mask they
// overlap most (ties toward the smaller label); unmatched components drop to 0.
LabelPlane propagate_labels(const LabelPlane& fresh, const LabelPlane& previous);

// Stateful per-frame driver. Frames must arrive in increasing poc order.
class MaskPipeline {
 public:
  MaskPipeline(MaskSource source, SegConfig cfg);

  // Produces the mask for `frame`. Throws IoError naming the poc when an
  // external file is missing and ArgumentError on size mismatch.
  SegMask next(const Frame& frame);

  // Pocs that received fresh (non-propagated) labelling so far.
  const std::vector<int>& fresh_pocs() const { return fresh_pocs_; }
  const MaskSource& source() const { return source_; }

 private:
  MaskSource source_;
  SegConfig cfg_;
  std::optional<SegMask> previous_;
  std::vector<int> fresh_pocs_;
};

std::vector<SegMask> run_pipeline(std::span<const Frame> frames, const MaskSource& source, const SegConfig& cfg);

}  // namespace saip::seg
