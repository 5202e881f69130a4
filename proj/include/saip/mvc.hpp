#pragma once

// Motion-vector coding: merge list, the 71-entry primary list, the
// corner-pattern ordered secondary list and 4x4 motion storage.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "saip/core.hpp"
#include "saip/mask_ops.hpp"
#include "saip/motion_grid.hpp"

namespace saip {
class ReferenceStore;
}

namespace saip::mvc {

enum class Source : std::uint8_t { A0 = 0, A1, B0, B1, B2, T, Zero, Mmvd };
inline constexpr int kNumPoolSources = 6;  // A0..T

const char* source_name(Source s);

struct CandidateEntry {
  MotionVector mv;
  Source source = Source::Zero;
  int mmvd_base = -1;
  int mmvd_distance = -1;
  int mmvd_direction = -1;
  bool operator==(const CandidateEntry&) const = default;
};

// Motion available from each neighbouring source for one reference list;
// empty where the source is unavailable.
struct SourceSet {
  std::array<std::optional<MotionVector>, kNumPoolSources> mv{};
  const std::optional<MotionVector>& operator[](Source s) const { return mv[static_cast<int>(s)]; }
  std::optional<MotionVector>& operator[](Source s) { return mv[static_cast<int>(s)]; }
};

// Anchor sample of a spatial neighbour for a CU.
std::pair<int, int> anchor_position(Source s, const BlockArea& cu);

// POC-distance scaling of a temporal vector, clipped to the vector range.
MotionVector scale_temporal(const MotionVector& mv, int tb, int td);

// Reference-list POCs, [list][ref_idx].
using ListPocs = std::array<std::vector<int>, 2>;

// Collects neighbour motion for `list`. A neighbour counts when coded and
// inter; its other-list vector is used when it points at a picture present
// in `list`. `col_grid` is the motion of `list`'s first reference picture.
SourceSet gather_sources(const MotionGrid& grid, const BlockArea& cu, int list, const ListPocs& pocs, int cur_poc,
                         const MotionGrid* col_grid, int col_poc);
SourceSet gather_sources(const MotionGrid& grid, const BlockArea& cu, int list, const ReferenceStore& store,
                         int cur_poc);

// B1, A1, B0, A0, B2, T with availability and duplicate pruning, zero filled to 7.
std::vector<CandidateEntry> build_merge_list(const SourceSet& sources);

inline constexpr std::array<int, 8> kMmvdOffsets = {1, 2, 4, 8, 16, 32, 64, 128};

// Merge entries followed by MMVD expansion of the first two.
std::vector<CandidateEntry> build_primary_list(const std::vector<CandidateEntry>& merge7);

// Source order of the secondary list for a corner pattern.
std::array<Source, kSecondaryListSize> secondary_order(const mask::CornerPattern& pattern);

// Seven entries in pattern order; unavailable sources contribute zero motion.
using SecondaryList = std::array<CandidateEntry, kSecondaryListSize>;
SecondaryList build_secondary_list(const SourceSet& sources, const mask::CornerPattern& pattern);

// Writes one SAIP CU: each 4x4 unit of list l takes the primary vector when
// at least half its pixels are on the primary side of masks[l].
void store_motion(MotionGrid& grid, const BlockArea& cu, const MotionPair& mp,
                  const std::array<mask::BlockMask, 2>& masks, const ListPocs& pocs);
// Writes a CU with one motion per list.
void store_uniform(MotionGrid& grid, const BlockArea& cu, const MotionInfo& motion, const ListPocs& pocs);
void store_intra(MotionGrid& grid, const BlockArea& cu);

// Everything one reference list contributes to a CU's candidate derivation.
struct CandidateLists {
  std::vector<CandidateEntry> merge;
  std::vector<CandidateEntry> primary;
  SourceSet sources;
  bool available = false;  // list holds at least one reference picture
};

CandidateLists build_candidate_lists(const MotionGrid& grid, const BlockArea& cu, int list, const ReferenceStore& store,
                                     int cur_poc);

// The two motion-vector predictors of an AMVP CU: the first two merge
// entries, re-targeted at `ref_idx`.
std::array<MotionVector, 2> amvp_predictors(const CandidateLists& lists, int ref_idx);

// Corner pattern of the mask translated by a list's primary vector.
using PatternFn = std::function<mask::CornerPattern(int list, const MotionVector& primary, int reverse_idx)>;

// Motion of a SAIP CU from its primary index, reverse index and secondary index.
MotionPair derive_saip_motion(int alpha, int reverse_idx, int beta, InterDir dir,
                              const std::array<CandidateLists, 2>& lists, const PatternFn& pattern_of);

}  // namespace saip::mvc
