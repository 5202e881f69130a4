#include <cstdlib>

#include "saip/mvc.hpp"
#include "saip/reference_store.hpp"

namespace saip::mvc {

const char* source_name(Source s) {
  switch (s) {
    case Source::A0: return "A0";
    case Source::A1: return "A1";
    case Source::B0: return "B0";
    case Source::B1: return "B1";
    case Source::B2: return "B2";
    case Source::T: return "T";
    case Source::Zero: return "zero";
    case Source::Mmvd: return "mmvd";
  }
  return "?";
}

std::pair<int, int> anchor_position(Source s, const BlockArea& cu) {
  switch (s) {
    case Source::A0: return {cu.x - 1, cu.y + cu.h};
    case Source::A1: return {cu.x - 1, cu.y + cu.h - 1};
    case Source::B0: return {cu.x + cu.w, cu.y - 1};
    case Source::B1: return {cu.x + cu.w - 1, cu.y - 1};
    case Source::B2: return {cu.x - 1, cu.y - 1};
    default: throw ArgumentError("source has no spatial anchor");
  }
}

MotionVector scale_temporal(const MotionVector& mv, int tb, int td) {
  if (td == 0) throw ArgumentError("zero temporal distance");
  tb = std::clamp(tb, -128, 127);
  td = std::clamp(td, -128, 127);
  if (tb == td) return mv;
  const int tx = (16384 + std::abs(td) / 2) / td;
  const int factor = std::clamp((tb * tx + 32) >> 6, -4096, 4095);
  auto scale = [factor](int v) {
    const int p = factor * v;
    const int mag = (std::abs(p) + 127) >> 8;
    return p < 0 ? -mag : mag;
  };
  return MotionVector::make(scale(mv.mvx), scale(mv.mvy), mv.ref_idx);
}

namespace {

int ref_idx_of(const ListPocs& pocs, int list, int poc) {
  const auto& l = pocs[list];
  for (std::size_t i = 0; i < l.size(); ++i)
    if (l[i] == poc) return static_cast<int>(i);
  return -1;
}

std::optional<MotionVector> unit_motion(const MotionUnit* u, int list, const ListPocs& pocs) {
  if (!u || !u->coded || !u->inter) return std::nullopt;
  for (int l : {list, 1 - list}) {
    const MotionVector& mv = u->motion.mv[l];
    if (!mv.valid) continue;
    const int ref = ref_idx_of(pocs, list, u->ref_poc[l]);
    if (ref >= 0) return MotionVector::make(mv.mvx, mv.mvy, ref);
  }
  return std::nullopt;
}

}  // namespace

SourceSet gather_sources(const MotionGrid& grid, const BlockArea& cu, int list, const ListPocs& pocs, int cur_poc,
                         const MotionGrid* col_grid, int col_poc) {
  SourceSet set;
  for (Source s : {Source::A0, Source::A1, Source::B0, Source::B1, Source::B2}) {
    const auto [x, y] = anchor_position(s, cu);
    set[s] = unit_motion(grid.at_pixel(x, y), list, pocs);
  }
  if (col_grid && !pocs[list].empty()) {
    const MotionUnit* u = col_grid->at_pixel(cu.x + cu.w / 2, cu.y + cu.h / 2);
    if (u && u->coded && u->inter) {
      for (int l : {list, 1 - list}) {
        const MotionVector& mv = u->motion.mv[l];
        if (!mv.valid) continue;
        const int td = col_poc - u->ref_poc[l];
        const int tb = cur_poc - pocs[list][0];
        if (td == 0) break;
        MotionVector scaled = scale_temporal(mv, tb, td);
        scaled.ref_idx = 0;
        set[Source::T] = scaled;
        break;
      }
    }
  }
  return set;
}

SourceSet gather_sources(const MotionGrid& grid, const BlockArea& cu, int list, const ReferenceStore& store,
                         int cur_poc) {
  if (store.list_size(list) == 0) return gather_sources(grid, cu, list, store.lists(), cur_poc, nullptr, 0);
  const auto& col = store.entry(list, 0);
  return gather_sources(grid, cu, list, store.lists(), cur_poc, &col.grid, col.frame.poc());
}

std::vector<CandidateEntry> build_merge_list(const SourceSet& sources) {
  std::vector<CandidateEntry> list;
  list.reserve(kSecondaryListSize);
  for (Source s : {Source::B1, Source::A1, Source::B0, Source::A0, Source::B2, Source::T}) {
    const auto& mv = sources[s];
    if (!mv) continue;
    bool dup = false;
    for (const auto& e : list) dup = dup || e.mv.same_motion(*mv);
    if (!dup) list.push_back({*mv, s});
  }
  while (list.size() < static_cast<std::size_t>(kSecondaryListSize))
    list.push_back({MotionVector::make(0, 0, 0), Source::Zero});
  return list;
}

std::vector<CandidateEntry> build_primary_list(const std::vector<CandidateEntry>& merge7) {
  if (merge7.size() != static_cast<std::size_t>(kSecondaryListSize))
    throw ArgumentError("merge list must hold 7 entries");
  std::vector<CandidateEntry> list = merge7;
  list.reserve(kPrimaryListSize);
  static constexpr std::array<std::array<int, 2>, 4> kDirections = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  for (int base = 0; base < 2; ++base) {
    const MotionVector& b = merge7[base].mv;
    for (int d = 0; d < static_cast<int>(kMmvdOffsets.size()); ++d) {
      for (int dir = 0; dir < 4; ++dir) {
        CandidateEntry e;
        e.mv = MotionVector::make(b.mvx + kDirections[dir][0] * kMmvdOffsets[d],
                                  b.mvy + kDirections[dir][1] * kMmvdOffsets[d], b.ref_idx);
        e.source = Source::Mmvd;
        e.mmvd_base = base;
        e.mmvd_distance = d;
        e.mmvd_direction = dir;
        list.push_back(e);
      }
    }
  }
  return list;
}

std::array<Source, kSecondaryListSize> secondary_order(const mask::CornerPattern& pattern) {
  if (pattern.id < 0 || pattern.id > 15) throw ArgumentError("corner pattern id out of range");
  if (pattern.id == 0)
    return {Source::B1, Source::A1, Source::B0, Source::Zero, Source::A0, Source::B2, Source::T};

  // Spatial sources in priority order with the corner each one touches.
  struct Anchor {
    Source source;
    bool secondary;
  };
  const std::array<Anchor, 5> spatial = {{{Source::B1, pattern.tr},
                                          {Source::B2, pattern.tl},
                                          {Source::B0, pattern.tr},
                                          {Source::A0, pattern.bl},
                                          {Source::A1, pattern.bl}}};
  std::array<Source, 5> ordered{};
  std::size_t n = 0;
  for (const auto& a : spatial)
    if (a.secondary) ordered[n++] = a.source;
  for (const auto& a : spatial)
    if (!a.secondary) ordered[n++] = a.source;

  return {ordered[0], ordered[1], ordered[2], Source::Zero, ordered[3], ordered[4], Source::T};
}

SecondaryList build_secondary_list(const SourceSet& sources, const mask::CornerPattern& pattern) {
  SecondaryList list;
  const auto order = secondary_order(pattern);
  for (int i = 0; i < kSecondaryListSize; ++i) {
    const Source s = order[i];
    const auto& mv = s == Source::Zero ? std::nullopt : sources[s];
    list[i] = {mv ? *mv : MotionVector::make(0, 0, 0), s};
  }
  return list;
}

namespace {

void write_unit(MotionGrid& grid, int ux, int uy, const MotionInfo& motion, const ListPocs& pocs, RegionTag tag) {
  if (ux < 0 || uy < 0 || ux >= grid.units_w() || uy >= grid.units_h()) return;
  MotionUnit& u = grid.unit(ux, uy);
  u.motion = motion;
  for (int l = 0; l < 2; ++l) {
    const MotionVector& mv = motion.mv[l];
    u.ref_poc[l] = mv.valid && mv.ref_idx < static_cast<int>(pocs[l].size()) ? pocs[l][mv.ref_idx] : -1;
  }
  u.region = tag;
  u.coded = true;
  u.inter = motion.is_valid();
  grid.count_write();
}

void check_cu(const BlockArea& cu) {
  if (cu.w <= 0 || cu.h <= 0 || cu.w % 4 || cu.h % 4) throw ArgumentError("CU dimensions must be multiples of 4");
}

}  // namespace

void store_motion(MotionGrid& grid, const BlockArea& cu, const MotionPair& mp,
                  const std::array<mask::BlockMask, 2>& masks, const ListPocs& pocs) {
  check_cu(cu);
  int tag_list = -1;
  for (int l = 0; l < 2; ++l) {
    if (!uses_list(mp.dir, l)) continue;
    if (masks[l].bits.width() != cu.w || masks[l].bits.height() != cu.h)
      throw ArgumentError("mask geometry does not match CU");
    if (tag_list < 0) tag_list = l;
  }
  for (int uy = 0; uy < cu.h / 4; ++uy) {
    for (int ux = 0; ux < cu.w / 4; ++ux) {
      MotionInfo info;
      RegionTag tag = RegionTag::Primary;
      for (int l = 0; l < 2; ++l) {
        if (!uses_list(mp.dir, l)) continue;
        int primary = 0;
        for (int y = 0; y < 4; ++y)
          for (int x = 0; x < 4; ++x) primary += (masks[l].bits.at(ux * 4 + x, uy * 4 + y) ^ mp.reverse_idx) & 1;
        const bool use_primary = primary * 2 >= 16;
        info.mv[l] = use_primary ? mp.primary[l] : mp.secondary[l];
        if (l == tag_list) tag = use_primary ? RegionTag::Primary : RegionTag::Secondary;
      }
      write_unit(grid, (cu.x >> 2) + ux, (cu.y >> 2) + uy, info, pocs, tag);
    }
  }
}

void store_uniform(MotionGrid& grid, const BlockArea& cu, const MotionInfo& motion, const ListPocs& pocs) {
  check_cu(cu);
  for (int uy = 0; uy < cu.h / 4; ++uy)
    for (int ux = 0; ux < cu.w / 4; ++ux)
      write_unit(grid, (cu.x >> 2) + ux, (cu.y >> 2) + uy, motion, pocs, RegionTag::Primary);
}

void store_intra(MotionGrid& grid, const BlockArea& cu) {
  store_uniform(grid, cu, MotionInfo{}, ListPocs{});
}

CandidateLists build_candidate_lists(const MotionGrid& grid, const BlockArea& cu, int list, const ReferenceStore& store,
                                     int cur_poc) {
  CandidateLists out;
  out.available = store.list_size(list) > 0;
  if (!out.available) return out;
  out.sources = gather_sources(grid, cu, list, store, cur_poc);
  out.merge = build_merge_list(out.sources);
  out.primary = build_primary_list(out.merge);
  return out;
}

std::array<MotionVector, 2> amvp_predictors(const CandidateLists& lists, int ref_idx) {
  if (lists.merge.size() < 2) throw ArgumentError("merge list not built");
  return {MotionVector::make(lists.merge[0].mv.mvx, lists.merge[0].mv.mvy, ref_idx),
          MotionVector::make(lists.merge[1].mv.mvx, lists.merge[1].mv.mvy, ref_idx)};
}

MotionPair derive_saip_motion(int alpha, int reverse_idx, int beta, InterDir dir,
                              const std::array<CandidateLists, 2>& lists, const PatternFn& pattern_of) {
  MotionPair mp;
  mp.dir = dir;
  mp.reverse_idx = reverse_idx;
  mp.primary_cand_idx = alpha;
  mp.secondary_cand_idx = beta;
  for (int l = 0; l < 2; ++l) {
    if (!uses_list(dir, l)) continue;
    if (!lists[l].available) throw ArgumentError("reference list " + std::to_string(l) + " is empty");
    if (alpha < 0 || alpha >= static_cast<int>(lists[l].primary.size()))
      throw ArgumentError("primary candidate index out of range");
    if (beta < 0 || beta >= kSecondaryListSize) throw ArgumentError("secondary candidate index out of range");
    mp.primary[l] = lists[l].primary[alpha].mv;
    const auto secondary = build_secondary_list(lists[l].sources, pattern_of(l, mp.primary[l], reverse_idx));
    mp.secondary[l] = secondary[beta].mv;
  }
  return mp;
}

}  // namespace saip::mvc
