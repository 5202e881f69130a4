#include "oracles.hpp"

#include <cmath>
#include <cstdlib>

#include "synthetic.hpp"

namespace saip::testing {

int oracle_gradient(const MaskPlane& m, int x, int y, int n) {
  const int r = n / 2;
  std::vector<std::vector<int>> window(n, std::vector<int>(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) window[j][i] = m.clamped(x - r + i, y - r + j);
  std::vector<std::vector<int>> p(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) {
    p[0][i] = -1;
    p[n - 1][i] = 1;
  }
  long vertical = 0, horizontal = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      vertical += window[j][i] * p[j][i];
      horizontal += window[j][i] * p[i][j];
    }
  return static_cast<int>(std::max(std::labs(vertical), std::labs(horizontal)));
}

int oracle_category(const MaskPlane& m, int x, int y) {
  if (oracle_gradient(m, x, y, 3) > 0) return 1;
  if (oracle_gradient(m, x, y, 5) > 0) return 2;
  return 0;
}

int oracle_blend(int p_primary, int p_secondary, int mask_bit, int category) {
  const double w0 = category == 0 ? 1.0 : category == 1 ? 0.5 : 0.75;
  const double w1 = 1.0 - w0;
  const double v = mask_bit ? w0 * p_primary + w1 * p_secondary : w1 * p_primary + w0 * p_secondary;
  return static_cast<int>(std::floor(v + 0.5));
}

namespace {

std::vector<std::vector<int>> hadamard(int n) {
  std::vector<std::vector<int>> h = {{1}};
  while (static_cast<int>(h.size()) < n) {
    const int s = static_cast<int>(h.size());
    std::vector<std::vector<int>> g(2 * s, std::vector<int>(2 * s));
    for (int j = 0; j < s; ++j)
      for (int i = 0; i < s; ++i) {
        g[j][i] = g[j][i + s] = g[j + s][i] = h[j][i];
        g[j + s][i + s] = -h[j][i];
      }
    h = g;
  }
  return h;
}

std::int64_t tile_satd(const Plane& a, const Plane& b, int x0, int y0, int n) {
  const auto h = hadamard(n);
  std::vector<std::vector<long>> d(n, std::vector<long>(n)), t(n, std::vector<long>(n, 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) d[j][i] = static_cast<long>(a.at(x0 + i, y0 + j)) - b.at(x0 + i, y0 + j);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) t[j][i] += h[j][k] * d[k][i];
  std::int64_t sum = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      long c = 0;
      for (int k = 0; k < n; ++k) c += t[j][k] * h[i][k];
      sum += std::labs(c);
    }
  return n == 8 ? (sum + 1) / 2 : sum;
}

}  // namespace

std::int64_t oracle_satd(const Plane& a, const Plane& b) {
  const int n = (a.width() % 8 == 0 && a.height() % 8 == 0) ? 8 : 4;
  std::int64_t total = 0;
  for (int y = 0; y < a.height(); y += n)
    for (int x = 0; x < a.width(); x += n) total += tile_satd(a, b, x, y, n);
  return total;
}

CuScene make_scene(std::mt19937& rng, int size, const BlockArea& cu, bool two_motion, bool consistent_neighbours) {
  CuScene s;
  s.cu = cu;
  Frame ref(size, size, 8, 0);
  const std::uint32_t seed = rng();
  for (int c = 0; c < 3; ++c) {
    Plane& p = ref.plane(c);
    for (int y = 0; y < p.height(); ++y)
      for (int x = 0; x < p.width(); ++x)
        p.at(x, y) = static_cast<Sample>(30 + texture(x, y, seed + static_cast<std::uint32_t>(c), 190));
  }
  // Mask with an edge through the CU so both regions are present.
  MaskPlane bits(size, size, 0);
  std::uniform_int_distribution<int> off(-cu.w / 3, cu.w / 3);
  const int ex = cu.x + cu.w / 2 + off(rng), ey = cu.y + cu.h / 2 + off(rng);
  const int shape = static_cast<int>(rng() % 3);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      bits.at(x, y) = shape == 0 ? x >= ex : shape == 1 ? y >= ey : (x - ex) + (y - ey) >= 0;
  SegMask mask(to_labels(bits), 0);

  std::uniform_int_distribution<int> mvd(-6, 6);
  const MotionVector v1 = MotionVector::make(4 * mvd(rng), 4 * mvd(rng));
  const MotionVector v2 = MotionVector::make(4 * mvd(rng) + static_cast<int>(rng() % 4), 4 * mvd(rng));

  s.primary = v1;
  s.secondary = v2;
  s.orig = Frame(size, size, 8, 1);
  std::uniform_int_distribution<int> noise(-2, 2);
  for (int c = 0; c < 3; ++c) {
    const int sh = c == 0 ? 2 : 3;
    Plane& p = s.orig.plane(c);
    for (int y = 0; y < p.height(); ++y)
      for (int x = 0; x < p.width(); ++x) {
        const int lx = c == 0 ? x : 2 * x, ly = c == 0 ? y : 2 * y;
        const bool first = !two_motion || bits.clamped(lx + v1.mvx / 4, ly + v1.mvy / 4);
        const MotionVector& v = first ? v1 : v2;
        const int sample = ref.plane(c).clamped(x + (v.mvx >> sh), y + (v.mvy >> sh));
        p.at(x, y) = static_cast<Sample>(clip_sample(sample + noise(rng), 255));
      }
  }

  mvc::MotionGrid ref_grid(size, size);
  s.store.add(std::move(ref), std::move(mask), std::move(ref_grid));
  s.store.build_lists(1, 1);

  s.grid = mvc::MotionGrid(size, size);
  const std::array<MotionVector, 4> pool = {v1, v2, MotionVector::make(mvd(rng), mvd(rng)),
                                            MotionVector::make(4 * mvd(rng), 0)};
  for (auto src : {mvc::Source::A0, mvc::Source::A1, mvc::Source::B0, mvc::Source::B1, mvc::Source::B2}) {
    const auto [x, y] = mvc::anchor_position(src, cu);
    if (x < 0 || y < 0 || x >= size || y >= size || (rng() % 6) == 0) continue;
    mvc::MotionInfo info;
    if (consistent_neighbours) {
      const bool first = !two_motion || bits.clamped(x + v1.mvx / 4, y + v1.mvy / 4);
      info.mv[0] = (rng() % 6) == 0 ? pool[2 + rng() % 2] : first ? v1 : v2;
    } else {
      info.mv[0] = pool[rng() % pool.size()];
    }
    mvc::store_uniform(s.grid, {x & ~3, y & ~3, 4, 4}, info, s.store.lists());
  }
  for (int l = 0; l < 2; ++l) s.cands[l] = mvc::build_candidate_lists(s.grid, cu, l, s.store, 1);
  return s;
}

}  // namespace saip::testing
