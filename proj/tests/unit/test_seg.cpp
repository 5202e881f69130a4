#include <random>
#include <set>

#include "doctest.h"
#include "saip/seg_pipeline.hpp"
#include "synthetic.hpp"

using namespace saip;
using namespace saip::seg;

namespace {

Frame squares_frame(int w, int h, const std::vector<BlockArea>& squares, int value = 220) {
  Frame f = testing::constant_frame(w, h, 8, 0);
  for (const auto& s : squares)
    for (int y = s.y; y < s.y + s.h; ++y)
      for (int x = s.x; x < s.x + s.w; ++x) f.luma().at(x, y) = static_cast<Sample>(value);
  return f;
}

// Flood fill from (x, y) over pixels >= threshold, returns the component.
std::set<std::pair<int, int>> flood(const Plane& p, int x, int y, int threshold) {
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> todo = {{x, y}};
  while (!todo.empty()) {
    auto [cx, cy] = todo.back();
    todo.pop_back();
    if (cx < 0 || cy < 0 || cx >= p.width() || cy >= p.height()) continue;
    if (p.at(cx, cy) < threshold || seen.count({cx, cy})) continue;
    seen.insert({cx, cy});
    todo.insert(todo.end(), {{cx + 1, cy}, {cx - 1, cy}, {cx, cy + 1}, {cx, cy - 1}});
  }
  return seen;
}

}  // namespace

TEST_CASE("binarize is idempotent on random label maps") {
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    LabelPlane l(16, 12);
    for (auto& v : l.data()) v = static_cast<std::uint16_t>(rng() % 4);
    const MaskPlane once = binarize(l);
    LabelPlane again(16, 12);
    for (std::size_t k = 0; k < once.size(); ++k) again.data()[k] = once.data()[k];
    CHECK(binarize(again) == once);
  }
}

TEST_CASE("builtin segmenter on simple scenes") {
  SUBCASE("dark frame gives an empty mask") {
    const SegMask m = builtin_segment(testing::constant_frame(32, 32, 8, 30), 128, 16);
    for (auto v : m.labels.data()) CHECK(v == 0);
  }
  SUBCASE("one bright square becomes label 1 exactly") {
    const SegMask m = builtin_segment(squares_frame(32, 32, {{8, 8, 8, 8}}), 128, 16);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) {
        const bool in = x >= 8 && x < 16 && y >= 8 && y < 16;
        CHECK(m.labels.at(x, y) == (in ? 1 : 0));
      }
  }
  SUBCASE("area filter drops small components") {
    const SegMask m = builtin_segment(squares_frame(32, 32, {{2, 2, 3, 3}, {20, 20, 4, 4}}), 128, 17);
    for (auto v : m.labels.data()) CHECK(v == 0);
  }
  SUBCASE("labels follow raster order of the first pixel") {
    const SegMask m = builtin_segment(squares_frame(32, 32, {{20, 2, 4, 4}, {2, 10, 4, 4}, {10, 10, 4, 4}}), 128, 4);
    CHECK(m.labels.at(21, 3) == 1);
    CHECK(m.labels.at(3, 11) == 2);
    CHECK(m.labels.at(11, 11) == 3);
  }
}

TEST_CASE("builtin components match a flood-fill oracle") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    Frame f = testing::random_frame(24, 24, 8, rng);
    const int threshold = 140, min_area = 5;
    const SegMask m = builtin_segment(f, threshold, min_area);
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x) {
        if (f.luma().at(x, y) < threshold) {
          CHECK(m.labels.at(x, y) == 0);
          continue;
        }
        const auto comp = flood(f.luma(), x, y, threshold);
        const bool kept = static_cast<int>(comp.size()) >= min_area;
        CHECK((m.labels.at(x, y) != 0) == kept);
        if (!kept) continue;
        for (auto [cx, cy] : comp) CHECK(m.labels.at(cx, cy) == m.labels.at(x, y));
      }
  }
}

TEST_CASE("propagation keeps identities by maximal overlap") {
  LabelPlane prev(8, 1), fresh(8, 1);
  // previous: label 2 on x 0..3, label 5 on x 4..7
  for (int x = 0; x < 8; ++x) prev.at(x, 0) = x < 4 ? 2 : 5;
  // fresh: label 1 on x 1..5 (3 px over 2, 2 px over 5), label 2 on x 7
  for (int x = 1; x <= 5; ++x) fresh.at(x, 0) = 1;
  fresh.at(7, 0) = 2;
  const LabelPlane out = propagate_labels(fresh, prev);
  CHECK(out.at(1, 0) == 2);
  CHECK(out.at(5, 0) == 2);
  CHECK(out.at(7, 0) == 5);
  CHECK(out.at(0, 0) == 0);
}

TEST_CASE("propagation ties go to the smaller label and unmatched components vanish") {
  LabelPlane prev(4, 1), fresh(4, 1);
  prev.at(0, 0) = 7;
  prev.at(1, 0) = 3;
  fresh.at(0, 0) = 1;
  fresh.at(1, 0) = 1;
  fresh.at(3, 0) = 2;
  const LabelPlane out = propagate_labels(fresh, prev);
  CHECK(out.at(0, 0) == 3);
  CHECK(out.at(1, 0) == 3);
  CHECK(out.at(3, 0) == 0);
  CHECK_THROWS_AS(propagate_labels(LabelPlane(3, 1), prev), ArgumentError);
}

TEST_CASE("refresh points follow the GOP interval") {
  const auto frames = testing::moving_disc(32, 32, 8).frames;
  SUBCASE("gop 4, refresh 1") {
    MaskPipeline p(MaskSource::builtin(128, 16), {1, 4});
    for (const auto& f : frames) p.next(f);
    CHECK(p.fresh_pocs() == std::vector<int>{0, 4});
  }
  SUBCASE("gop 4, refresh 2") {
    MaskPipeline p(MaskSource::builtin(128, 16), {2, 4});
    for (const auto& f : frames) p.next(f);
    CHECK(p.fresh_pocs() == std::vector<int>{0});
  }
  CHECK_THROWS_AS(SegConfig({0, 4}).validate(), ArgumentError);
}

TEST_CASE("propagated labels come from the interval's first frame") {
  std::mt19937 rng(21);
  std::vector<Frame> frames;
  for (int t = 0; t < 8; ++t) {
    frames.push_back(testing::random_frame(32, 32, 8, rng));
    frames.back().set_poc(t);
  }
  const SegConfig cfg{1, 4};
  const auto masks = run_pipeline(frames, MaskSource::builtin(150, 3), cfg);
  REQUIRE(masks.size() == frames.size());
  std::set<int> allowed;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    CHECK(masks[i].poc == frames[i].poc());
    if (cfg.is_refresh_point(masks[i].poc)) {
      allowed.clear();
      for (auto v : masks[i].labels.data()) allowed.insert(v);
      continue;
    }
    for (auto v : masks[i].labels.data()) CHECK(allowed.count(v) == 1);
  }
}

TEST_CASE("external source is a pure loader") {
  const auto seq = testing::two_rectangles(64, 64, 4);
  const auto dir = testing::scratch_dir("seg_ext");
  testing::write_sequence(seq, dir / "in.yuv", (dir / "m").string());
  const auto masks = run_pipeline(seq.frames, MaskSource::external((dir / "m").string()), {1, 8});
  REQUIRE(masks.size() == 4);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    CHECK(masks[i].binary == binarize(seq.masks[i].labels));
    CHECK(masks[i].poc == static_cast<int>(i));
  }
}

TEST_CASE("external source errors name the poc") {
  const auto seq = testing::two_rectangles(64, 64, 8);
  const auto dir = testing::scratch_dir("seg_missing");
  testing::write_sequence(seq, dir / "in.yuv", (dir / "m").string());
  std::filesystem::remove(mask_path((dir / "m").string(), 5));
  try {
    run_pipeline(seq.frames, MaskSource::external((dir / "m").string()), {1, 8});
    FAIL("expected a missing-file error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("poc 5") != std::string::npos);
  }

  write_mask_pgm(LabelPlane(32, 32), mask_path((dir / "m").string(), 5));
  try {
    run_pipeline(seq.frames, MaskSource::external((dir / "m").string()), {1, 8});
    FAIL("expected a size mismatch");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("poc 5") != std::string::npos);
  }
}
