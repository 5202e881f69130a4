#include "saip/reference_store.hpp"

#include <algorithm>
#include <string>

namespace saip {

void ReferenceStore::add(Frame frame, SegMask mask, mvc::MotionGrid grid) {
  if (mask.width() != frame.width() || mask.height() != frame.height())
    throw ArgumentError("reference mask does not match frame for poc " + std::to_string(frame.poc()));
  mask::FrameWeights weights = mask::precompute_weight_map(mask);
  entries_.push_back(Entry{std::move(frame), std::move(mask), std::move(grid), std::move(weights)});
}

void ReferenceStore::retain(std::size_t max_entries) {
  while (entries_.size() > max_entries) entries_.pop_front();
}

void ReferenceStore::build_lists(int cur_poc, int count) {
  std::vector<int> pocs;
  for (auto it = entries_.rbegin(); it != entries_.rend() && static_cast<int>(pocs.size()) < count; ++it)
    if (it->frame.poc() < cur_poc) pocs.push_back(it->frame.poc());
  lists_[0] = pocs;
  lists_[1] = pocs;
}

void ReferenceStore::set_list(int list, std::vector<int> pocs) {
  for (int p : pocs) (void)by_poc(p);
  lists_[list] = std::move(pocs);
}

int ReferenceStore::poc_of(int list, int ref_idx) const {
  if (list < 0 || list > 1 || ref_idx < 0 || ref_idx >= list_size(list))
    throw ArgumentError("reference index " + std::to_string(ref_idx) + " unavailable in list " + std::to_string(list));
  return lists_[list][ref_idx];
}

const ReferenceStore::Entry& ReferenceStore::entry(int list, int ref_idx) const { return by_poc(poc_of(list, ref_idx)); }

const ReferenceStore::Entry& ReferenceStore::by_poc(int poc) const {
  for (const auto& e : entries_)
    if (e.frame.poc() == poc) return e;
  throw ArgumentError("reference poc " + std::to_string(poc) + " not in store");
}

}  // namespace saip
