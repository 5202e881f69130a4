#include "saip/seg_pipeline.hpp"

#include <map>
#include <string>

namespace saip::seg {

void SegConfig::validate() const {
  if (refresh_interval_gops < 1) throw ArgumentError("refresh interval must be at least one GOP");
  if (gop_size < 1) throw ArgumentError("gop size must be positive");
}

bool SegConfig::is_refresh_point(int poc) const {
  return poc % (gop_size * refresh_interval_gops) == 0;
}

SegMask builtin_segment(const Frame& frame, int threshold, int min_area) {
  const Plane& luma = frame.luma();
  const int w = luma.width();
  const int h = luma.height();
  LabelPlane labels(w, h);
  Plane2D<int> comp(w, h, -1);

  std::vector<std::pair<int, int>> stack;
  std::vector<std::pair<int, int>> members;
  std::uint16_t next_label = 1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (luma.at(x, y) < threshold || comp.at(x, y) >= 0) continue;
      members.clear();
      stack.assign(1, {x, y});
      comp.at(x, y) = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        members.emplace_back(cx, cy);
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = cx + dx[k];
          const int ny = cy + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (comp.at(nx, ny) >= 0 || luma.at(nx, ny) < threshold) continue;
          comp.at(nx, ny) = 1;
          stack.emplace_back(nx, ny);
        }
      }
      if (static_cast<int>(members.size()) < min_area) continue;
      for (auto [mx, my] : members) labels.at(mx, my) = next_label;
      if (next_label < 0xffff) ++next_label;
    }
  }
  return SegMask(std::move(labels), frame.poc());
}

LabelPlane propagate_labels(const LabelPlane& fresh, const LabelPlane& previous) {
  if (fresh.width() != previous.width() || fresh.height() != previous.height())
    throw ArgumentError("label maps differ in size");
  // overlap[fresh label][previous label] = pixel count
  std::map<std::uint16_t, std::map<std::uint16_t, int>> overlap;
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    const auto f = fresh.data()[i];
    if (f == 0) continue;
    const auto p = previous.data()[i];
    auto& row = overlap[f];
    if (p != 0) ++row[p];
  }
  std::map<std::uint16_t, std::uint16_t> remap;
  for (const auto& [f, row] : overlap) {
    std::uint16_t best = 0;
    int best_count = 0;
    for (const auto& [p, count] : row)  // ascending p, so strict > keeps the smaller label on ties
      if (count > best_count) {
        best = p;
        best_count = count;
      }
    remap[f] = best;
  }
  LabelPlane out(fresh.width(), fresh.height());
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    const auto f = fresh.data()[i];
    out.data()[i] = f == 0 ? 0 : remap[f];
  }
  return out;
}

MaskPipeline::MaskPipeline(MaskSource source, SegConfig cfg) : source_(std::move(source)), cfg_(cfg) {
  cfg_.validate();
  if (source_.kind == SourceKind::BuiltinThreshold && source_.threshold <= 0)
    throw ArgumentError("builtin segmenter threshold must be positive");
}

SegMask MaskPipeline::next(const Frame& frame) {
  const int poc = frame.poc();
  SegMask mask;
  if (source_.kind == SourceKind::ExternalFiles) {
    const auto path = mask_path(source_.file_prefix, poc);
    if (!std::filesystem::exists(path))
      throw IoError("missing mask file for poc " + std::to_string(poc) + ": " + path.string());
    mask = read_mask_pgm(path, poc);
    if (mask.width() != frame.width() || mask.height() != frame.height())
      throw ArgumentError("mask size mismatch for poc " + std::to_string(poc));
    fresh_pocs_.push_back(poc);
  } else {
    if (source_.threshold >= (1 << frame.bit_depth()))
      throw ArgumentError("builtin segmenter threshold exceeds sample range");
    SegMask fresh = builtin_segment(frame, source_.threshold, source_.min_area);
    if (cfg_.is_refresh_point(poc) || !previous_) {
      mask = std::move(fresh);
      fresh_pocs_.push_back(poc);
    } else {
      mask = SegMask(propagate_labels(fresh.labels, previous_->labels), poc);
    }
  }
  previous_ = mask;
  return mask;
}

std::vector<SegMask> run_pipeline(std::span<const Frame> frames, const MaskSource& source, const SegConfig& cfg) {
  MaskPipeline pipeline(source, cfg);
  std::vector<SegMask> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(pipeline.next(f));
  return out;
}

}  // namespace saip::seg
