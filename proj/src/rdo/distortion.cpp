#include <cmath>
#include <cstdlib>

#include "saip/rdo.hpp"

namespace saip::rdo {

namespace {

void check_geometry(const Plane& a, const Plane& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw ArgumentError("block geometry mismatch");
}

}  // namespace

std::int64_t satd_4x4(const int* d, int stride) {
  int m[16], t[16];
  for (int i = 0; i < 4; ++i) {
    const int* r = d + i * stride;
    const int s01 = r[0] + r[1], d01 = r[0] - r[1], s23 = r[2] + r[3], d23 = r[2] - r[3];
    m[i * 4 + 0] = s01 + s23;
    m[i * 4 + 1] = d01 + d23;
    m[i * 4 + 2] = s01 - s23;
    m[i * 4 + 3] = d01 - d23;
  }
  for (int j = 0; j < 4; ++j) {
    const int s01 = m[j] + m[4 + j], d01 = m[j] - m[4 + j], s23 = m[8 + j] + m[12 + j], d23 = m[8 + j] - m[12 + j];
    t[j] = s01 + s23;
    t[4 + j] = d01 + d23;
    t[8 + j] = s01 - s23;
    t[12 + j] = d01 - d23;
  }
  std::int64_t sum = 0;
  for (int v : t) sum += std::abs(v);
  return sum;
}

std::int64_t satd_8x8(const int* d, int stride) {
  int m[64];
  auto h8 = [](const int* in, int step, int* out, int ostep) {
    int a[8], b[8];
    for (int i = 0; i < 4; ++i) {
      a[i] = in[i * step] + in[(i + 4) * step];
      a[i + 4] = in[i * step] - in[(i + 4) * step];
    }
    for (int g = 0; g < 8; g += 4) {
      b[g + 0] = a[g + 0] + a[g + 2];
      b[g + 1] = a[g + 1] + a[g + 3];
      b[g + 2] = a[g + 0] - a[g + 2];
      b[g + 3] = a[g + 1] - a[g + 3];
    }
    for (int g = 0; g < 8; g += 2) {
      out[g * ostep] = b[g] + b[g + 1];
      out[(g + 1) * ostep] = b[g] - b[g + 1];
    }
  };
  for (int i = 0; i < 8; ++i) h8(d + i * stride, 1, m + i * 8, 1);
  int t[64];
  for (int j = 0; j < 8; ++j) h8(m + j, 8, t + j, 8);
  std::int64_t sum = 0;
  for (int v : t) sum += std::abs(v);
  return (sum + 1) >> 1;
}

std::int64_t satd(const Plane& a, const Plane& b) {
  check_geometry(a, b);
  const int w = a.width(), h = a.height();
  if (w % 4 || h % 4) throw ArgumentError("SATD needs dimensions that are multiples of 4");
  std::vector<int> diff(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = static_cast<int>(a.data()[i]) - b.data()[i];
  const int w8 = w / 8 * 8, h8 = h / 8 * 8;
  std::int64_t sum = 0;
  for (int y = 0; y < h8; y += 8)
    for (int x = 0; x < w8; x += 8) sum += satd_8x8(&diff[static_cast<std::size_t>(y) * w + x], w);
  for (int y = 0; y < h; y += 4)
    for (int x = 0; x < w; x += 4)
      if (x >= w8 || y >= h8) sum += satd_4x4(&diff[static_cast<std::size_t>(y) * w + x], w);
  return sum;
}

std::int64_t sad(const Plane& a, const Plane& b) {
  check_geometry(a, b);
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(static_cast<int>(a.data()[i]) - b.data()[i]);
  return s;
}

std::int64_t ssd(const Plane& a, const Plane& b) {
  check_geometry(a, b);
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t d = static_cast<int>(a.data()[i]) - b.data()[i];
    s += d * d;
  }
  return s;
}

std::int64_t ssd(const std::array<Plane, 3>& a, const std::array<Plane, 3>& b) {
  return ssd(a[0], b[0]) + ssd(a[1], b[1]) + ssd(a[2], b[2]);
}

double lambda_for_qp(int qp) { return 0.57 * std::pow(2.0, (qp - 12) / 3.0); }

RdoParams RdoParams::for_qp(int qp, bool et) {
  RdoParams p;
  p.qp = qp;
  p.lambda = lambda_for_qp(qp);
  p.lambda_satd = std::sqrt(p.lambda);
  p.et_enabled = et;
  p.validate();
  return p;
}

void RdoParams::validate() const {
  if (qp < 0 || qp > 51) throw ArgumentError("qp must lie in [0, 51]");
  if (!(lambda > 0) || !(lambda_satd > 0)) throw ArgumentError("lambda must be positive");
  if (stage2_keep < 1) throw ArgumentError("stage-2 candidate count must be positive");
  if (primary_limit < 1 || primary_limit > kPrimaryListSize) throw ArgumentError("primary limit out of range");
  if (secondary_limit < 1 || secondary_limit > kSecondaryListSize) throw ArgumentError("secondary limit out of range");
  if (me_range < 0) throw ArgumentError("search range must be non-negative");
}

}  // namespace saip::rdo
