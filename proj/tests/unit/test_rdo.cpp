#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "saip/rdo.hpp"
#include "synthetic.hpp"

using namespace saip;
using namespace saip::rdo;

namespace {

Plane random_plane(int w, int h, std::mt19937& rng, int max_value = 255) {
  Plane p(w, h);
  for (auto& v : p.data()) v = static_cast<Sample>(rng() % (max_value + 1));
  return p;
}

struct Rig {
  testing::CuScene scene;
  CodingState state{bs::ArithEncoder(nullptr), bs::ContextSet{}};
  bs::SyntaxParams syntax;
  RdContext rc;

  Rig(std::mt19937& rng, const BlockArea& cu, bool et, int qp = 32, bool two_motion = true)
      : scene(testing::make_scene(rng, 64, cu, two_motion)) {
    rc = RdContext::make(scene.orig, cu, RdoParams::for_qp(qp, et), syntax, state);
  }
};

}  // namespace

TEST_CASE("satd") {
  std::mt19937 rng(1);
  const Plane zero(4, 4, 0), ones(4, 4, 1);
  CHECK(satd(ones, ones) == 0);
  CHECK(satd(ones, zero) == 16);
  CHECK(testing::oracle_satd(ones, zero) == 16);
  for (auto [w, h] : {std::pair{8, 8}, {16, 16}, {4, 12}, {32, 8}, {64, 64}}) {
    for (int t = 0; t < 10; ++t) {
      const Plane a = random_plane(w, h, rng), b = random_plane(w, h, rng);
      CHECK(satd(a, b) == testing::oracle_satd(a, b));
    }
  }
  // Mixed tiling: 8x8 where possible, 4x4 for the remainder.
  const Plane a = random_plane(12, 8, rng), b = random_plane(12, 8, rng);
  const std::int64_t mixed = testing::oracle_satd(crop(a, {0, 0, 8, 8}), crop(b, {0, 0, 8, 8})) +
                             testing::oracle_satd(crop(a, {8, 0, 4, 8}), crop(b, {8, 0, 4, 8}));
  CHECK(satd(a, b) == mixed);
  CHECK_THROWS_AS(satd(Plane(8, 8), Plane(8, 4)), ArgumentError);
  CHECK_THROWS_AS(satd(Plane(6, 8), Plane(6, 8)), ArgumentError);
}

TEST_CASE("ssd and sad") {
  std::mt19937 rng(2);
  Plane a(8, 8, 10), b(8, 8, 10);
  CHECK(ssd(a, b) == 0);
  b.at(3, 5) = 13;
  CHECK(ssd(a, b) == 9);
  CHECK(sad(a, b) == 3);
  for (int t = 0; t < 20; ++t) {
    std::array<Plane, 3> x{random_plane(16, 16, rng), random_plane(8, 8, rng), random_plane(8, 8, rng)};
    std::array<Plane, 3> y{random_plane(16, 16, rng), random_plane(8, 8, rng), random_plane(8, 8, rng)};
    std::int64_t naive = 0;
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < x[c].size(); ++i) {
        const std::int64_t d = static_cast<int>(x[c].data()[i]) - y[c].data()[i];
        naive += d * d;
      }
    CHECK(ssd(x, y) == naive);
  }
  CHECK_THROWS_AS(ssd(Plane(4, 4), Plane(8, 4)), ArgumentError);
}

TEST_CASE("lambda") {
  CHECK(lambda_for_qp(12) == doctest::Approx(0.57));
  CHECK(lambda_for_qp(27) == doctest::Approx(0.57 * 32));
  for (int qp : {22, 27, 32, 37}) {
    const RdoParams p = RdoParams::for_qp(qp);
    CHECK(p.lambda > 0);
    CHECK(p.lambda_satd == doctest::Approx(std::sqrt(p.lambda)));
    CHECK(p.stage2_keep == 4);
    CHECK(lambda_for_qp(qp + 3) == doctest::Approx(2 * lambda_for_qp(qp)));
  }
}

TEST_CASE("transform layout and round trip") {
  const auto big = tu_layout(64, 64);
  int luma = 0, chroma = 0;
  for (const auto& t : big) (t.comp == 0 ? luma : chroma)++;
  CHECK(luma == 4);
  CHECK(chroma == 2);
  const auto small = tu_layout(16, 16);
  REQUIRE(small.size() == 3);
  CHECK(small[0].area.w == 16);
  CHECK(small[1].area.w == 8);
  CHECK(small[2].comp == 2);
  CHECK_THROWS_AS(tu_layout(16, 8), ArgumentError);

  for (int n : {4, 8, 16, 32}) {
    const auto& m = dct_matrix(n);
    for (int k = 0; k < n; ++k) CHECK(m[k] == 64);
  }

  std::mt19937 rng(3);
  for (int n : {4, 8, 16, 32}) {
    Residual r(n, n);
    for (auto& v : r.data()) v = static_cast<std::int32_t>(rng() % 121) - 60;
    const Residual back = inverse_transform(forward_transform(r, 8), 8);
    int worst = 0;
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(back.data()[i] - r.data()[i]));
    CHECK(worst <= 1);
  }
}

TEST_CASE("stage counters with early termination off") {
  std::mt19937 rng(4);
  for (int t = 0; t < 6; ++t) {
    const BlockArea cu{16, 16, 8 << (t % 3), 8 << (t % 3)};
    Rig rig(rng, cu, false);
    mc::CuPredictor pred(rig.scene.store, cu);
    const auto res = search_saip_uni(pred, 0, rig.scene.cands[0], rig.rc);
    CHECK(res.counters.stage1 == 994);
    CHECK(res.counters.stage2 == 8);
    CHECK(res.counters.stage1_skipped == 0);
    REQUIRE(res.found);
    REQUIRE(res.stage1_best.size() == 4);
    for (std::size_t i = 1; i < res.stage1_best.size(); ++i)
      CHECK(res.stage1_best[i - 1].stage1_cost <= res.stage1_best[i].stage1_cost);
    for (const auto& c : res.stage1_best)
      CHECK(c.stage1_cost == static_cast<double>(c.satd_cost) + rig.rc.params.lambda_satd * (c.r_alpha + c.r_j + c.r_beta));
    CHECK(res.best.rd_cost == res.coded.cost);
  }
}

TEST_CASE("early termination only removes evaluations") {
  std::mt19937 rng(5);
  for (int t = 0; t < 6; ++t) {
    const BlockArea cu{24, 16, 16, 16};
    Rig rig(rng, cu, true);
    mc::CuPredictor pred(rig.scene.store, cu);
    const auto on = search_saip_uni(pred, 0, rig.scene.cands[0], rig.rc);
    CHECK(on.counters.stage1 <= 994);
    CHECK(on.counters.stage2 <= 8);
    CHECK(on.counters.stage1 + on.counters.stage1_skipped == 994);
    CHECK(on.counters.stage2 + on.counters.stage2_skipped == 8);

    RdContext off_rc = rig.rc;
    off_rc.params.et_enabled = false;
    const auto off = search_saip_uni(pred, 0, rig.scene.cands[0], off_rc);
    CHECK(off.coded.cost <= on.coded.cost);
  }
}

TEST_CASE("stage-1 cost of each combo matches a fresh prediction") {
  std::mt19937 rng(6);
  const BlockArea cu{16, 16, 16, 16};
  Rig rig(rng, cu, false);
  mc::CuPredictor pred(rig.scene.store, cu);
  const auto res = search_saip_uni(pred, 0, rig.scene.cands[0], rig.rc);
  std::array<mvc::CandidateLists, 2> both;
  both[0] = rig.scene.cands[0];
  for (const auto& c : res.stage1_best) {
    mc::CuPredictor fresh(rig.scene.store, cu);
    const MotionPair mp = combo_motion(c, InterDir::Forward, fresh, both);
    const mc::Prediction p = fresh.saip(mp, mc::FusionMode::TwoStep, true);
    CHECK(c.satd_cost == satd(p.planes[0], rig.rc.src[0]));
  }
}

TEST_CASE("mode decision") {
  std::mt19937 rng(7);
  SUBCASE("adding SAIP never raises the selected cost") {
    for (int t = 0; t < 8; ++t) {
      const BlockArea cu{16, 16, 16, 16};
      Rig rig(rng, cu, true);
      const Frame& recon = rig.scene.orig;
      mc::CuPredictor pred(rig.scene.store, cu);
      CuSearchOptions with, without;
      without.saip = false;
      const auto a = search_cu_modes(pred, rig.scene.cands, rig.rc, recon, with);
      const auto b = search_cu_modes(pred, rig.scene.cands, rig.rc, recon, without);
      CHECK(a[mode_decide(a)].coded.cost <= b[mode_decide(b)].coded.cost);
      for (const auto& m : b) CHECK(m.kind != ModeKind::SaipMerge);
      for (const auto& m : b) CHECK(m.kind != ModeKind::SaipMmvd);
    }
  }
  SUBCASE("I slices are intra only") {
    const BlockArea cu{16, 16, 16, 16};
    Rig rig(rng, cu, true);
    rig.rc.syntax.slice = bs::SliceType::I;
    mc::CuPredictor pred(rig.scene.store, cu);
    const auto modes = search_cu_modes(pred, rig.scene.cands, rig.rc, rig.scene.orig, {});
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].kind == ModeKind::IntraDc);
  }
  SUBCASE("ties go to the earlier mode kind") {
    CodedCu c;
    c.valid = true;
    c.cost = 10;
    std::vector<ModeCandidate> v = {{ModeKind::Skip, c}, {ModeKind::BaselineInter, c}, {ModeKind::SaipMerge, c}};
    CHECK(mode_decide(v) == 1);
    v[2].coded.cost = 9;
    CHECK(mode_decide(v) == 2);
    CHECK_THROWS_AS(mode_decide({}), ArgumentError);
  }
}

TEST_CASE("static content is coded as skip") {
  std::mt19937 rng(8);
  const BlockArea cu{16, 16, 16, 16};
  Rig rig(rng, cu, true, 32, false);
  // Current picture identical to the reference: zero motion, nothing to code.
  rig.scene.orig = rig.scene.store.entry(0, 0).frame;
  rig.scene.orig.set_poc(1);
  rig.rc = RdContext::make(rig.scene.orig, cu, RdoParams::for_qp(32), rig.syntax, rig.state);
  mvc::MotionGrid empty(64, 64);
  std::array<mvc::CandidateLists, 2> cands;
  for (int l = 0; l < 2; ++l) cands[l] = mvc::build_candidate_lists(empty, cu, l, rig.scene.store, 1);
  mc::CuPredictor pred(rig.scene.store, cu);
  const auto modes = search_cu_modes(pred, cands, rig.rc, rig.scene.orig, {});
  const auto& best = modes[mode_decide(modes)];
  CHECK(best.kind == ModeKind::Skip);
  CHECK(best.coded.distortion == 0);
}

TEST_CASE("bi search falls back to one direction when a list is empty") {
  std::mt19937 rng(9);
  const BlockArea cu{16, 16, 8, 8};
  Rig rig(rng, cu, false);
  mc::CuPredictor pred(rig.scene.store, cu);
  std::array<mvc::CandidateLists, 2> cands = rig.scene.cands;
  cands[1] = mvc::CandidateLists{};
  const auto bi = search_saip_bi(pred, cands, rig.rc);
  const auto uni = search_saip_uni(pred, 0, cands[0], rig.rc);
  CHECK(bi.counters.uni_fallback);
  CHECK(bi.best.alpha == uni.best.alpha);
  CHECK(bi.best.beta == uni.best.beta);
  CHECK(bi.coded.cost == uni.coded.cost);
  cands[0] = mvc::CandidateLists{};
  CHECK_THROWS_AS(search_saip_bi(pred, cands, rig.rc), ArgumentError);
}

TEST_CASE("bi prediction over identical lists equals the one-direction prediction") {
  std::mt19937 rng(10);
  const BlockArea cu{16, 16, 16, 16};
  const testing::CuScene sc = testing::make_scene(rng, 64, cu);
  mc::CuPredictor pred(sc.store, cu);
  MotionPair mp;
  mp.dir = InterDir::Bi;
  mp.primary = {sc.primary, sc.primary};
  mp.secondary = {sc.secondary, sc.secondary};
  MotionPair one = mp;
  one.dir = InterDir::Forward;
  CHECK(pred.saip(mp) == pred.saip(one));
}

TEST_CASE("stage-1 rates are binarization lengths") {
  const bs::SyntaxParams sp;
  CHECK(rate_alpha(0, sp) == 2.0);
  CHECK(rate_alpha(6, sp) == 7.0);
  CHECK(rate_beta(0, sp) == 1.0);
  CHECK(rate_beta(6, sp) == 6.0);
  bs::SyntaxParams one = sp;
  one.max_secondary = 1;
  CHECK(rate_beta(0, one) == 0.0);
}

TEST_CASE("AMVP over identical lists codes list 1 against its own predictors") {
  std::mt19937 rng(11);
  for (int t = 0; t < 8; ++t) {
    const BlockArea cu{16, 16, 16, 16};
    Rig rig(rng, cu, true, 27);
    // A second past picture so the bi trial has two references to pair.
    Frame older = rig.scene.store.entry(0, 0).frame;
    older.set_poc(-1);
    rig.scene.store.add(std::move(older), rig.scene.store.entry(0, 0).mask, mvc::MotionGrid(64, 64));
    rig.scene.store.build_lists(1, 2);
    std::array<mvc::CandidateLists, 2> cands;
    for (int l = 0; l < 2; ++l) cands[l] = mvc::build_candidate_lists(rig.scene.grid, cu, l, rig.scene.store, 2);
    // Make the list-1 predictors differ from the list-0 ones.
    cands[1].merge[0].mv = MotionVector::make(4 * static_cast<int>(rng() % 9) - 16, 4, cands[1].merge[0].mv.ref_idx);
    rig.syntax.slice = bs::SliceType::B;
    rig.syntax.num_refs = 2;
    rig.rc = RdContext::make(rig.scene.orig, cu, rig.rc.params, rig.syntax, rig.state);

    mc::CuPredictor pred(rig.scene.store, cu);
    CuSearchOptions opts;
    opts.saip = false;
    opts.allow_backward = false;
    int checked = 0;
    for (const auto& m : search_cu_modes(pred, cands, rig.rc, rig.scene.orig, opts)) {
      const auto& s = m.coded.syntax;
      if (s.mode != bs::CuMode::Amvp) continue;
      for (int l = 0; l < 2; ++l) {
        if (!uses_list(s.dir, l)) continue;
        const auto mvps = mvc::amvp_predictors(cands[l], s.amvp[l].ref_idx);
        const MotionVector& p = mvps[s.amvp[l].mvp_idx];
        const MotionVector& mv = m.coded.motion.uniform.mv[l];
        CHECK(p.mvx + s.amvp[l].mvd_x == mv.mvx);
        CHECK(p.mvy + s.amvp[l].mvd_y == mv.mvy);
        checked += l == 1;
      }
    }
    CHECK(checked > 0);
  }
}
