#pragma once

#include <array>
#include <deque>
#include <vector>

#include "saip/core.hpp"
#include "saip/mask_ops.hpp"
#include "saip/motion_grid.hpp"

namespace saip {

// Reconstructed reference pictures with their masks, motion and
// precomputed blend weights.
class ReferenceStore {
 public:
  struct Entry {
    Frame frame;
    SegMask mask;
    mvc::MotionGrid grid;
    mask::FrameWeights weights;
  };

  // Adds a reference; the weight map is computed here, once per frame.
  void add(Frame frame, SegMask mask, mvc::MotionGrid grid);
  // Drops the oldest entries beyond `max_entries`.
  void retain(std::size_t max_entries);

  // Builds both reference lists for a picture at `cur_poc`: nearest past
  // picture first, at most `count` entries each.
  void build_lists(int cur_poc, int count);
  void set_list(int list, std::vector<int> pocs);

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  int list_size(int list) const { return static_cast<int>(lists_[list].size()); }
  int poc_of(int list, int ref_idx) const;
  const Entry& entry(int list, int ref_idx) const;
  const Entry& by_poc(int poc) const;
  const std::array<std::vector<int>, 2>& lists() const { return lists_; }
  // True when both lists name the same pictures in the same order.
  bool lists_identical() const { return lists_[0] == lists_[1]; }

 private:
  std::deque<Entry> entries_;
  std::array<std::vector<int>, 2> lists_;
};

}  // namespace saip
