#include <limits>
#include <unordered_map>

#include "saip/rdo.hpp"

namespace saip::rdo {

double rate_alpha(int alpha, const bs::SyntaxParams& sp) {
  double r = (sp.saip_merge_enabled && sp.saip_mmvd_enabled) ? 1.0 : 0.0;
  if (alpha < bs::kMergeListSize) return r + bs::tu_length(alpha, bs::kMergeListSize - 1);
  const int m = alpha - bs::kMergeListSize;
  const int dist = (m / bs::kMmvdDirections) % bs::kMmvdDistances;
  return r + 1 + bs::tu_length(dist, bs::kMmvdDistances - 1) + 2;
}

double rate_beta(int beta, const bs::SyntaxParams& sp) {
  return sp.max_secondary > 1 ? bs::tu_length(beta, sp.max_secondary - 1) : 0.0;
}

namespace {

bool alpha_allowed(int alpha, const bs::SyntaxParams& sp) {
  return alpha < bs::kMergeListSize ? sp.saip_merge_enabled : sp.saip_mmvd_enabled;
}

std::uint64_t mv_key(const MotionVector& mv) {
  return (static_cast<std::uint64_t>(mv.ref_idx & 0xff) << 32) ^ (static_cast<std::uint64_t>(mv.mvx + 8192) << 16) ^
         static_cast<std::uint64_t>(mv.mvy + 8192);
}

struct PairKey {
  std::uint64_t a, b;
  int j;
  bool operator==(const PairKey&) const = default;
};
struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const { return std::hash<std::uint64_t>()(k.a * 0x9E3779B97F4A7C15ull ^ k.b) ^ k.j; }
};

// Keeps the best `keep` combos, earlier enumeration order winning ties.
void insert_top(std::vector<CandidateCombo>& top, const CandidateCombo& c, int keep) {
  auto it = top.begin();
  while (it != top.end() && it->stage1_cost <= c.stage1_cost) ++it;
  if (it - top.begin() >= keep) return;
  top.insert(it, c);
  if (static_cast<int>(top.size()) > keep) top.pop_back();
}

// Luma SATD of one direction's SAIP prediction, cached by the vectors that
// actually shape it.
class UniSatdCache {
 public:
  UniSatdCache(mc::CuPredictor& pred, const Plane& src) : pred_(pred), src_(src) {}

  const Plane& luma(int list, const MotionVector& p, const MotionVector& s, int j) {
    const auto& rm = pred_.region(list, p);
    if (rm.block_uniform) return pred_.single(list, (rm.block_value ^ j) ? p : s, 0);
    if (p.same_motion(s)) return pred_.single(list, p, 0);
    PairKey key{mv_key(p) | (static_cast<std::uint64_t>(list) << 40), mv_key(s), j};
    auto it = blended_[list].find(key);
    if (it != blended_[list].end()) return it->second;
    std::array<Plane, 3> out;
    pred_.saip_uni(list, p, s, j, mc::FusionMode::TwoStep, 1, out);
    return blended_[list].emplace(key, std::move(out[0])).first->second;
  }

  std::int64_t satd(int list, const MotionVector& p, const MotionVector& s, int j) {
    const auto& rm = pred_.region(list, p);
    if (rm.block_uniform || p.same_motion(s)) {
      const MotionVector& eff = p.same_motion(s) || (rm.block_value ^ j) ? p : s;
      const std::uint64_t k = mv_key(eff) | (static_cast<std::uint64_t>(list) << 40);
      auto it = single_satd_.find(k);
      if (it != single_satd_.end()) return it->second;
      const std::int64_t v = rdo::satd(pred_.single(list, eff, 0), src_);
      single_satd_.emplace(k, v);
      return v;
    }
    PairKey key{mv_key(p) | (static_cast<std::uint64_t>(list) << 40), mv_key(s), j};
    auto it = blended_satd_.find(key);
    if (it != blended_satd_.end()) return it->second;
    pred_.saip_uni(list, p, s, j, mc::FusionMode::TwoStep, 1, scratch_);
    const std::int64_t v = rdo::satd(scratch_[0], src_);
    blended_satd_.emplace(key, v);
    return v;
  }

 private:
  mc::CuPredictor& pred_;
  const Plane& src_;
  std::array<std::unordered_map<PairKey, Plane, PairKeyHash>, 2> blended_;
  std::unordered_map<std::uint64_t, std::int64_t> single_satd_;
  std::unordered_map<PairKey, std::int64_t, PairKeyHash> blended_satd_;
  std::array<Plane, 3> scratch_;
};

struct Stage1Setup {
  int num_alpha;
  int num_beta;
};

Stage1Setup stage1_bounds(const RdContext& rc) {
  return {std::min(rc.params.primary_limit, kPrimaryListSize),
          std::min({rc.params.secondary_limit, rc.syntax.max_secondary, kSecondaryListSize})};
}

bs::SyntaxCU combo_syntax(const CandidateCombo& c, InterDir dir) {
  bs::SyntaxCU s;
  s.mode = bs::CuMode::Saip;
  s.dir = dir;
  s.saip_flag = true;
  s.set_primary_index(c.alpha);
  s.saip_back_idx = c.beta;
  s.saip_reverse_idx = c.j;
  return s;
}

// Stage 2: full RD over the retained combos, with and without residual.
void run_stage2(SaipSearchResult& res, InterDir dir, mc::CuPredictor& predictor,
                const std::array<ListCandidates, 2>& cands, const RdContext& rc) {
  const int keep = static_cast<int>(res.stage1_best.size());
  int n = keep;
  if (rc.params.et_enabled && keep >= 3 && res.stage1_best[0].stage1_cost < 0.9 * res.stage1_best[2].stage1_cost) {
    n = 2;
    res.counters.stage2_skipped += 2 * (keep - n);
  }
  for (int i = 0; i < n; ++i) {
    CandidateCombo combo = res.stage1_best[i];
    const MotionPair mp = combo_motion(combo, dir, predictor, cands);
    const mc::Prediction pred = predictor.saip(mp, mc::FusionMode::TwoStep);
    for (bool residual : {true, false}) {
      CodedCu coded = evaluate_cu(rc, combo_syntax(combo, dir), pred.planes, residual);
      ++res.counters.stage2;
      if (!res.found || coded.cost < res.coded.cost) {
        combo.ssd_cost = coded.distortion;
        combo.r_full = bs::to_bits(coded.rate);
        combo.rd_cost = coded.cost;
        combo.residual = coded.syntax.root_cbf;
        coded.motion.saip = true;
        coded.motion.pair = mp;
        for (int l = 0; l < 2; ++l)
          if (uses_list(dir, l)) coded.motion.masks[l] = predictor.region(l, mp.primary[l]).block_mask(rc.cu);
        res.best = combo;
        res.coded = std::move(coded);
        res.found = true;
      }
    }
  }
}

}  // namespace

MotionPair combo_motion(const CandidateCombo& combo, InterDir dir, mc::CuPredictor& predictor,
                        const std::array<ListCandidates, 2>& cands) {
  return mvc::derive_saip_motion(combo.alpha, combo.j, combo.beta, dir, cands,
                                 [&](int list, const MotionVector& p, int j) {
                                   return mask::classify_pattern(predictor.region(list, p), j);
                                 });
}

SaipSearchResult search_saip_uni(mc::CuPredictor& predictor, int list, const ListCandidates& cands,
                                 const RdContext& rc) {
  if (predictor.store().empty()) throw ArgumentError("reference store is empty");
  if (!cands.available || cands.primary.size() != static_cast<std::size_t>(kPrimaryListSize))
    throw ArgumentError("candidate lists not built for this CU");
  SaipSearchResult res;
  const auto [num_alpha, num_beta] = stage1_bounds(rc);
  const double lam = rc.params.lambda_satd;
  UniSatdCache cache(predictor, rc.src[0]);
  double running_min = std::numeric_limits<double>::infinity();

  for (int alpha = 0; alpha < num_alpha; ++alpha) {
    if (!alpha_allowed(alpha, rc.syntax)) continue;
    const MotionVector& pmv = cands.primary[alpha].mv;
    const mask::RegionMask& rm = predictor.region(list, pmv);
    const double ra = rate_alpha(alpha, rc.syntax);
    for (int j = 0; j < 2; ++j) {
      const auto secondary = mvc::build_secondary_list(cands.sources, mask::classify_pattern(rm, j));
      for (int beta = 0; beta < num_beta; ++beta) {
        CandidateCombo c;
        c.alpha = alpha;
        c.j = j;
        c.beta = beta;
        c.r_alpha = ra;
        c.r_j = 1.0;
        c.r_beta = rate_beta(beta, rc.syntax);
        c.satd_cost = cache.satd(list, pmv, secondary[beta].mv, j);
        c.stage1_cost = static_cast<double>(c.satd_cost) + lam * (c.r_alpha + c.r_j + c.r_beta);
        ++res.counters.stage1;
        if (rc.params.et_enabled && beta == 0 && c.stage1_cost > running_min) {
          res.counters.stage1_skipped += num_beta - 1;
          break;
        }
        running_min = std::min(running_min, c.stage1_cost);
        insert_top(res.stage1_best, c, rc.params.stage2_keep);
      }
    }
  }
  if (res.stage1_best.empty()) return res;

  const InterDir dir = list == 0 ? InterDir::Forward : InterDir::Backward;
  std::array<ListCandidates, 2> both;
  both[list] = cands;
  run_stage2(res, dir, predictor, both, rc);
  return res;
}

SaipSearchResult search_saip_bi(mc::CuPredictor& predictor, const std::array<ListCandidates, 2>& cands,
                                const RdContext& rc) {
  if (predictor.store().empty()) throw ArgumentError("reference store is empty");
  if (!cands[0].available || !cands[1].available) {
    const int list = cands[0].available ? 0 : 1;
    if (!cands[list].available) throw ArgumentError("no reference list available");
    SaipSearchResult r = search_saip_uni(predictor, list, cands[list], rc);
    r.counters.uni_fallback = true;
    return r;
  }
  SaipSearchResult res;
  const auto [num_alpha, num_beta] = stage1_bounds(rc);
  const double lam = rc.params.lambda_satd;
  UniSatdCache cache(predictor, rc.src[0]);
  double running_min = std::numeric_limits<double>::infinity();

  for (int alpha = 0; alpha < num_alpha; ++alpha) {
    if (!alpha_allowed(alpha, rc.syntax)) continue;
    const std::array<MotionVector, 2> pmv = {cands[0].primary[alpha].mv, cands[1].primary[alpha].mv};
    const double ra = rate_alpha(alpha, rc.syntax);
    for (int j = 0; j < 2; ++j) {
      std::array<mvc::SecondaryList, 2> secondary;
      for (int l = 0; l < 2; ++l)
        secondary[l] =
            mvc::build_secondary_list(cands[l].sources, mask::classify_pattern(predictor.region(l, pmv[l]), j));
      for (int beta = 0; beta < num_beta; ++beta) {
        CandidateCombo c;
        c.alpha = alpha;
        c.j = j;
        c.beta = beta;
        c.r_alpha = ra;
        c.r_j = 1.0;
        c.r_beta = rate_beta(beta, rc.syntax);
        Plane avg = cache.luma(0, pmv[0], secondary[0][beta].mv, j);
        mc::average_into(avg, cache.luma(1, pmv[1], secondary[1][beta].mv, j));
        c.satd_cost = satd(avg, rc.src[0]);
        c.stage1_cost = static_cast<double>(c.satd_cost) + lam * (c.r_alpha + c.r_j + c.r_beta);
        ++res.counters.stage1;
        if (rc.params.et_enabled && beta == 0 && c.stage1_cost > running_min) {
          res.counters.stage1_skipped += num_beta - 1;
          break;
        }
        running_min = std::min(running_min, c.stage1_cost);
        insert_top(res.stage1_best, c, rc.params.stage2_keep);
      }
    }
  }
  if (res.stage1_best.empty()) return res;
  run_stage2(res, InterDir::Bi, predictor, cands, rc);
  return res;
}

}  // namespace saip::rdo
