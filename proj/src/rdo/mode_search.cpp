#include <cstdlib>
#include <limits>

#include "saip/rdo.hpp"

namespace saip::rdo {

namespace {

int eg1_bins(int v) {
  int k = 1, n = 1;
  while (v >= (1 << k)) {
    v -= 1 << k;
    ++k;
    ++n;
  }
  return n + k;
}

int component_bins(int d) {
  const int a = std::abs(d);
  if (a == 0) return 1;
  if (a == 1) return 3;
  return 3 + eg1_bins(a - 2);
}

// SAD of the CU luma against the reference displaced by an integer vector.
std::int64_t block_sad(const Plane& src, const Plane& ref, int x0, int y0) {
  const int w = src.width(), h = src.height();
  std::int64_t s = 0;
  if (x0 >= 0 && y0 >= 0 && x0 + w <= ref.width() && y0 + h <= ref.height()) {
    for (int y = 0; y < h; ++y) {
      const Sample* a = &src.at(0, y);
      const Sample* b = &ref.at(x0, y0 + y);
      for (int x = 0; x < w; ++x) s += std::abs(static_cast<int>(a[x]) - b[x]);
    }
    return s;
  }
  for (int y = 0; y < h; ++y) {
    const int ry = std::clamp(y0 + y, 0, ref.height() - 1);
    for (int x = 0; x < w; ++x) {
      const int rx = std::clamp(x0 + x, 0, ref.width() - 1);
      s += std::abs(static_cast<int>(src.at(x, y)) - ref.at(rx, ry));
    }
  }
  return s;
}

struct MvCost {
  double bins;
  int mvp_idx;
};

MvCost best_mvp(const MotionVector& mv, const std::array<MotionVector, 2>& mvps) {
  MvCost best{std::numeric_limits<double>::infinity(), 0};
  for (int i = 0; i < 2; ++i) {
    const double b = mvd_bins(mv.mvx - mvps[i].mvx, mv.mvy - mvps[i].mvy) + 1;
    if (b < best.bins) best = {b, i};
  }
  return best;
}

int to_integer(int q) { return (q + 2) >> 2; }

bs::SyntaxCU amvp_syntax(InterDir dir, const std::array<MotionVector, 2>& mv,
                         const std::array<std::array<MotionVector, 2>, 2>& mvps, const std::array<int, 2>& mvp_idx) {
  bs::SyntaxCU s;
  s.mode = bs::CuMode::Amvp;
  s.dir = dir;
  for (int l = 0; l < 2; ++l) {
    if (!uses_list(dir, l)) continue;
    const MotionVector& p = mvps[l][mvp_idx[l]];
    s.amvp[l] = {mv[l].ref_idx, mvp_idx[l], mv[l].mvx - p.mvx, mv[l].mvy - p.mvy};
  }
  return s;
}

mvc::MotionInfo uniform_motion(InterDir dir, const std::array<MotionVector, 2>& mv) {
  mvc::MotionInfo info;
  for (int l = 0; l < 2; ++l)
    if (uses_list(dir, l)) info.mv[l] = mv[l];
  return info;
}

int dir_bins(InterDir dir, const bs::SyntaxParams& sp) {
  if (sp.slice != bs::SliceType::B) return 0;
  return dir == InterDir::Bi ? 1 : 2;
}

}  // namespace

int mvd_bins(int dx, int dy) { return component_bins(dx) + component_bins(dy); }

MeResult motion_search(mc::CuPredictor& predictor, int list, int ref_idx, const std::array<MotionVector, 2>& mvps,
                       const RdContext& rc) {
  const Plane& ref = predictor.store().entry(list, ref_idx).frame.plane(0);
  const Plane& src = rc.src[0];
  const double lam = rc.params.lambda_satd;
  const int limit = kMvMax / 4;
  const BlockArea& cu = rc.cu;

  auto int_cost = [&](int ix, int iy) {
    const MotionVector mv = MotionVector::make(ix * 4, iy * 4, ref_idx);
    return static_cast<double>(block_sad(src, ref, cu.x + ix, cu.y + iy)) + lam * best_mvp(mv, mvps).bins;
  };

  int bx = 0, by = 0;
  double best = int_cost(0, 0);
  for (const auto& p : mvps) {
    const int ix = to_integer(p.mvx), iy = to_integer(p.mvy);
    const double c = int_cost(ix, iy);
    if (c < best) best = c, bx = ix, by = iy;
  }
  const int cx = bx, cy = by;
  auto in_window = [&](int ix, int iy) {
    return std::abs(ix - cx) <= rc.params.me_range && std::abs(iy - cy) <= rc.params.me_range &&
           std::abs(ix) <= limit && std::abs(iy) <= limit;
  };
  auto try_point = [&](int ix, int iy, int& nx, int& ny, double& nbest) {
    if (!in_window(ix, iy)) return;
    const double c = int_cost(ix, iy);
    if (c < nbest) nbest = c, nx = ix, ny = iy;
  };

  for (int round = 0; round < 2; ++round) {
    const int ox = bx, oy = by;
    int nx = bx, ny = by;
    double nbest = best;
    for (int step = 1; step <= rc.params.me_range; step *= 2) {
      try_point(ox + step, oy, nx, ny, nbest);
      try_point(ox - step, oy, nx, ny, nbest);
      try_point(ox, oy + step, nx, ny, nbest);
      try_point(ox, oy - step, nx, ny, nbest);
      if (step >= 2) {
        const int h = step / 2;
        try_point(ox + h, oy + h, nx, ny, nbest);
        try_point(ox - h, oy + h, nx, ny, nbest);
        try_point(ox + h, oy - h, nx, ny, nbest);
        try_point(ox - h, oy - h, nx, ny, nbest);
      }
    }
    bx = nx, by = ny, best = nbest;
    for (int it = 0; it < 32; ++it) {
      const int sx = bx, sy = by;
      try_point(sx + 1, sy, bx, by, best);
      try_point(sx - 1, sy, bx, by, best);
      try_point(sx, sy + 1, bx, by, best);
      try_point(sx, sy - 1, bx, by, best);
      if (bx == sx && by == sy) break;
    }
    if (std::abs(bx - ox) <= 1 && std::abs(by - oy) <= 1) break;
  }

  auto frac_cost = [&](const MotionVector& mv) {
    return static_cast<double>(satd(predictor.single(list, mv, 0), src)) + lam * best_mvp(mv, mvps).bins;
  };
  MotionVector mv = MotionVector::make(bx * 4, by * 4, ref_idx);
  double cost = frac_cost(mv);
  for (int step : {2, 1}) {
    const MotionVector center = mv;
    for (int dy = -step; dy <= step; dy += step)
      for (int dx = -step; dx <= step; dx += step) {
        if (!dx && !dy) continue;
        const MotionVector cand = MotionVector::make(center.mvx + dx, center.mvy + dy, ref_idx);
        if (cand.same_motion(center)) continue;
        const double c = frac_cost(cand);
        if (c < cost) cost = c, mv = cand;
      }
  }
  return {mv, best_mvp(mv, mvps).mvp_idx, cost};
}

std::vector<ModeCandidate> search_cu_modes(mc::CuPredictor& predictor, const std::array<ListCandidates, 2>& cands,
                                           const RdContext& rc, const Frame& recon, const CuSearchOptions& opts,
                                           CuSearchStats* stats) {
  std::vector<ModeCandidate> out;
  {
    bs::SyntaxCU s;
    s.mode = bs::CuMode::Intra;
    out.push_back({ModeKind::IntraDc, evaluate_cu(rc, s, intra_dc_predict(recon, rc.cu), true)});
  }
  if (rc.syntax.slice == bs::SliceType::I) return out;

  const bool b_slice = rc.syntax.slice == bs::SliceType::B;
  std::vector<InterDir> dirs;
  if (cands[0].available) dirs.push_back(InterDir::Forward);
  if (b_slice && opts.allow_backward && cands[1].available) {
    dirs.push_back(InterDir::Backward);
    if (cands[0].available) dirs.push_back(InterDir::Bi);
  }
  if (dirs.empty()) return out;
  const double lam_satd = rc.params.lambda_satd;

  // Merge candidates, screened by luma SATD.
  struct MergeTrial {
    InterDir dir;
    int idx;
    std::array<MotionVector, 2> mv;
    double cost;
  };
  std::vector<MergeTrial> trials;
  for (InterDir dir : dirs) {
    std::vector<std::array<MotionVector, 2>> seen;
    for (int idx = 0; idx < bs::kMergeListSize; ++idx) {
      std::array<MotionVector, 2> mv{};
      for (int l = 0; l < 2; ++l)
        if (uses_list(dir, l)) mv[l] = cands[l].merge[idx].mv;
      bool dup = false;
      for (const auto& s : seen) dup = dup || (s[0].same_motion(mv[0]) && s[1].same_motion(mv[1]));
      if (dup) continue;
      seen.push_back(mv);
      const auto pred = predictor.baseline(mv, dir, true);
      const double c = static_cast<double>(satd(pred.planes[0], rc.src[0])) +
                       lam_satd * (bs::tu_length(idx, bs::kMergeListSize - 1) + dir_bins(dir, rc.syntax));
      trials.push_back({dir, idx, mv, c});
    }
  }
  std::stable_sort(trials.begin(), trials.end(), [](const MergeTrial& a, const MergeTrial& b) { return a.cost < b.cost; });
  if (trials.size() > 2) trials.resize(2);
  for (const auto& t : trials) {
    const auto pred = predictor.baseline(t.mv, t.dir);
    bs::SyntaxCU s;
    s.dir = t.dir;
    s.merge_idx = t.idx;
    s.mode = bs::CuMode::Skip;
    CodedCu skip = evaluate_cu(rc, s, pred.planes, false);
    skip.motion.uniform = uniform_motion(t.dir, t.mv);
    out.push_back({ModeKind::Skip, std::move(skip)});
    s.mode = bs::CuMode::Merge;
    CodedCu merge = evaluate_cu(rc, s, pred.planes, true);
    if (merge.syntax.root_cbf) {
      merge.motion.uniform = uniform_motion(t.dir, t.mv);
      out.push_back({ModeKind::BaselineInter, std::move(merge)});
    }
  }

  // AMVP. With identical lists the bi trial pairs the best vector with the
  // best vector on a different reference picture.
  std::array<std::vector<MeResult>, 2> me;
  std::array<std::vector<std::array<MotionVector, 2>>, 2> mvps;
  const bool want_l1 = b_slice && cands[1].available;
  for (int l = 0; l < 2; ++l) {
    if (!cands[l].available || (l == 1 && !want_l1)) continue;
    if (l == 1 && !opts.allow_backward) {
      // Same pictures, so the list-0 vectors carry over; the predictors
      // come from the list-1 candidates, as on the decoder side.
      for (std::size_t r = 0; r < me[0].size(); ++r) {
        mvps[1].push_back(mvc::amvp_predictors(cands[1], static_cast<int>(r)));
        MeResult m = me[0][r];
        const MvCost old_mvp = best_mvp(m.mv, mvps[0][r]), new_mvp = best_mvp(m.mv, mvps[1][r]);
        m.cost += lam_satd * (new_mvp.bins - old_mvp.bins);
        m.mvp_idx = new_mvp.mvp_idx;
        me[1].push_back(m);
      }
      continue;
    }
    const int refs = std::min(rc.syntax.num_refs, predictor.store().list_size(l));
    for (int r = 0; r < refs; ++r) {
      mvps[l].push_back(mvc::amvp_predictors(cands[l], r));
      MeResult m = motion_search(predictor, l, r, mvps[l].back(), rc);
      if (rc.syntax.num_refs > 1) m.cost += lam_satd * bs::tu_length(r, rc.syntax.num_refs - 1);
      me[l].push_back(m);
    }
  }
  auto best_ref = [&](int l, int exclude) {
    int best = -1;
    for (int r = 0; r < static_cast<int>(me[l].size()); ++r)
      if (r != exclude && (best < 0 || me[l][r].cost < me[l][best].cost)) best = r;
    return best;
  };
  std::vector<std::pair<InterDir, std::array<int, 2>>> amvp_trials;
  const int r0 = best_ref(0, -1);
  if (r0 >= 0) amvp_trials.push_back({InterDir::Forward, {r0, -1}});
  if (want_l1 && opts.allow_backward) {
    const int r1 = best_ref(1, -1);
    if (r1 >= 0) amvp_trials.push_back({InterDir::Backward, {-1, r1}});
    if (r0 >= 0 && r1 >= 0) amvp_trials.push_back({InterDir::Bi, {r0, r1}});
  } else if (want_l1 && r0 >= 0) {
    const int r1 = best_ref(1, r0);
    if (r1 >= 0) amvp_trials.push_back({InterDir::Bi, {r0, r1}});
  }
  for (const auto& [dir, refs] : amvp_trials) {
    std::array<MotionVector, 2> mv{};
    std::array<std::array<MotionVector, 2>, 2> pv{};
    std::array<int, 2> idx{};
    for (int l = 0; l < 2; ++l) {
      if (!uses_list(dir, l)) continue;
      mv[l] = me[l][refs[l]].mv;
      idx[l] = me[l][refs[l]].mvp_idx;
      pv[l] = mvps[l][refs[l]];
    }
    const auto pred = predictor.baseline(mv, dir);
    const bs::SyntaxCU s = amvp_syntax(dir, mv, pv, idx);
    for (bool residual : {true, false}) {
      CodedCu c = evaluate_cu(rc, s, pred.planes, residual);
      c.motion.uniform = uniform_motion(dir, mv);
      out.push_back({ModeKind::BaselineInter, std::move(c)});
    }
  }

  // SAIP.
  if (opts.saip && rc.syntax.saip_enabled()) {
    auto take = [&](SaipSearchResult r) {
      if (stats) {
        stats->saip.stage1 += r.counters.stage1;
        stats->saip.stage2 += r.counters.stage2;
        stats->saip.stage1_skipped += r.counters.stage1_skipped;
        stats->saip.stage2_skipped += r.counters.stage2_skipped;
        ++stats->saip_searches;
      }
      if (r.found) out.push_back({kind_of(r.coded.syntax), std::move(r.coded)});
    };
    for (InterDir dir : dirs) {
      if (dir == InterDir::Bi)
        take(search_saip_bi(predictor, cands, rc));
      else
        take(search_saip_uni(predictor, static_cast<int>(dir), cands[static_cast<int>(dir)], rc));
    }
  }
  return out;
}

}  // namespace saip::rdo
