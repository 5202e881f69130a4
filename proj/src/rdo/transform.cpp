#include <cmath>
#include <numbers>

#include "saip/rdo.hpp"

namespace saip::rdo {

namespace {

constexpr std::array<int, 6> kQuantScale = {26214, 23302, 20560, 18396, 16384, 14564};
constexpr std::array<int, 6> kDequantScale = {40, 45, 51, 57, 64, 72};

int log2_size(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  if ((1 << l) != n || l < 2 || l > 5) throw ArgumentError("transform size must be 4, 8, 16 or 32");
  return l;
}

void check_square(int w, int h) {
  if (w != h) throw ArgumentError("transform blocks must be square");
}

}  // namespace

const std::vector<std::int32_t>& dct_matrix(int n) {
  static const std::array<std::vector<std::int32_t>, 6> mats = [] {
    std::array<std::vector<std::int32_t>, 6> m;
    for (int l = 2; l <= 5; ++l) {
      const int size = 1 << l;
      auto& t = m[l];
      t.resize(static_cast<std::size_t>(size) * size);
      for (int k = 0; k < size; ++k)
        for (int i = 0; i < size; ++i)
          t[k * size + i] =
              k == 0 ? 64
                     : static_cast<std::int32_t>(std::lround(64.0 * std::numbers::sqrt2 *
                                                             std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * size))));
    }
    return m;
  }();
  return mats[log2_size(n)];
}

bs::CoeffBlock forward_transform(const Residual& res, int bit_depth) {
  check_square(res.width(), res.height());
  const int n = res.width();
  const int l = log2_size(n);
  if (bit_depth < 8 || bit_depth > 10) throw ArgumentError("transform supports 8- to 10-bit samples");
  const auto& t = dct_matrix(n);
  const int shift1 = l + bit_depth - 9, shift2 = l + 6;
  const int r1 = shift1 > 0 ? 1 << (shift1 - 1) : 0;
  const int r2 = 1 << (shift2 - 1);

  // 32-bit sums cannot overflow for residuals within the sample range.
  std::vector<std::int32_t> tmp(static_cast<std::size_t>(n) * n);
  // Rows: tmp[k][y] = sum_i T[k][i] * res[y][i]
  for (int y = 0; y < n; ++y) {
    const std::int32_t* r = &res.at(0, y);
    for (int k = 0; k < n; ++k) {
      const std::int32_t* tk = &t[k * n];
      std::int32_t s = 0;
      for (int i = 0; i < n; ++i) s += tk[i] * r[i];
      tmp[k * n + y] = (s + r1) >> shift1;
    }
  }
  bs::CoeffBlock out(n, n);
  // Columns: out[k][x] = sum_y T[k][y] * tmp[x][y]
  for (int k = 0; k < n; ++k) {
    const std::int32_t* tk = &t[k * n];
    for (int x = 0; x < n; ++x) {
      const std::int32_t* c = &tmp[x * n];
      std::int32_t s = 0;
      for (int y = 0; y < n; ++y) s += tk[y] * c[y];
      out.at(x, k) = std::clamp((s + r2) >> shift2, -32768, 32767);
    }
  }
  return out;
}

Residual inverse_transform(const bs::CoeffBlock& coeffs, int bit_depth) {
  check_square(coeffs.width(), coeffs.height());
  const int n = coeffs.width();
  log2_size(n);
  const auto& t = dct_matrix(n);
  const int shift1 = 7, shift2 = 20 - bit_depth;

  // Only the leading rows/columns up to the last nonzero coefficient contribute.
  int rows = 0, cols = 0;
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x)
      if (coeffs.at(x, k) != 0) rows = std::max(rows, k + 1), cols = std::max(cols, x + 1);

  std::vector<std::int32_t> tmp(static_cast<std::size_t>(n) * n, 0);
  // Columns: tmp[i][x] = sum_k T[k][i] * c[k][x]
  for (int i = 0; i < n; ++i)
    for (int x = 0; x < cols; ++x) {
      std::int64_t s = 0;
      for (int k = 0; k < rows; ++k) s += static_cast<std::int64_t>(t[k * n + i]) * coeffs.at(x, k);
      tmp[i * n + x] =
          static_cast<std::int32_t>(std::clamp<std::int64_t>((s + (1 << (shift1 - 1))) >> shift1, -32768, 32767));
    }
  Residual out(n, n);
  const std::int64_t r2 = std::int64_t{1} << (shift2 - 1);
  for (int y = 0; y < n; ++y)
    for (int i = 0; i < n; ++i) {
      std::int64_t s = 0;
      for (int k = 0; k < cols; ++k) s += static_cast<std::int64_t>(t[k * n + i]) * tmp[y * n + k];
      out.at(i, y) = static_cast<std::int32_t>((s + r2) >> shift2);
    }
  return out;
}

bs::CoeffBlock quantize(const bs::CoeffBlock& coeffs, int qp, int bit_depth, bool intra) {
  check_square(coeffs.width(), coeffs.height());
  const int l = log2_size(coeffs.width());
  if (qp < 0 || qp > 51) throw ArgumentError("qp must lie in [0, 51]");
  const int qbits = 14 + qp / 6 + (15 - bit_depth - l);
  const std::int64_t offset = static_cast<std::int64_t>(intra ? 171 : 85) << (qbits - 9);
  const std::int64_t scale = kQuantScale[qp % 6];
  bs::CoeffBlock out(coeffs.width(), coeffs.height());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::int64_t c = coeffs.data()[i];
    const std::int64_t level = std::min<std::int64_t>((std::abs(c) * scale + offset) >> qbits, bs::kMaxCoeff);
    out.data()[i] = static_cast<std::int32_t>(c < 0 ? -level : level);
  }
  return out;
}

bs::CoeffBlock dequantize(const bs::CoeffBlock& levels, int qp, int bit_depth) {
  check_square(levels.width(), levels.height());
  const int l = log2_size(levels.width());
  const int shift = bit_depth + l - 5;
  const std::int64_t scale = static_cast<std::int64_t>(16 * kDequantScale[qp % 6]) << (qp / 6);
  bs::CoeffBlock out(levels.width(), levels.height());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::int64_t v = (levels.data()[i] * scale + (std::int64_t{1} << (shift - 1))) >> shift;
    out.data()[i] = static_cast<std::int32_t>(std::clamp<std::int64_t>(v, -32768, 32767));
  }
  return out;
}

std::vector<TuInfo> tu_layout(int cu_w, int cu_h) {
  if (cu_w != cu_h || cu_w < 8 || cu_w > 64) throw ArgumentError("coding units must be square, 8 to 64");
  std::vector<TuInfo> tus;
  const int ls = std::min(cu_w, kMaxTuSize);
  for (int y = 0; y < cu_h; y += ls)
    for (int x = 0; x < cu_w; x += ls) tus.push_back({0, {x, y, ls, ls}});
  tus.push_back({1, {0, 0, cu_w / 2, cu_h / 2}});
  tus.push_back({2, {0, 0, cu_w / 2, cu_h / 2}});
  return tus;
}

std::vector<bs::CoeffBlock> transform_cu(const Frame& orig, const BlockArea& cu, const std::array<Plane, 3>& pred,
                                         int qp, bool intra) {
  std::vector<bs::CoeffBlock> levels;
  for (const TuInfo& tu : tu_layout(cu.w, cu.h)) {
    const BlockArea pa = mc::plane_area(cu, tu.comp);
    const Plane& src = orig.plane(tu.comp);
    Residual res(tu.area.w, tu.area.h);
    for (int y = 0; y < tu.area.h; ++y)
      for (int x = 0; x < tu.area.w; ++x)
        res.at(x, y) = static_cast<int>(src.at(pa.x + tu.area.x + x, pa.y + tu.area.y + y)) -
                       pred[tu.comp].at(tu.area.x + x, tu.area.y + y);
    levels.push_back(quantize(forward_transform(res, orig.bit_depth()), qp, orig.bit_depth(), intra));
  }
  return levels;
}

std::array<Plane, 3> reconstruct_cu(const std::array<Plane, 3>& pred, const std::vector<bs::CoeffBlock>& levels,
                                    int cu_w, int cu_h, int qp, int bit_depth) {
  std::array<Plane, 3> rec = pred;
  if (levels.empty()) return rec;
  const auto layout = tu_layout(cu_w, cu_h);
  if (levels.size() != layout.size()) throw ArgumentError("transform block count does not match CU");
  const int maxv = (1 << bit_depth) - 1;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& lv = levels[i];
    if (std::all_of(lv.data().begin(), lv.data().end(), [](std::int32_t v) { return v == 0; })) continue;
    const Residual r = inverse_transform(dequantize(lv, qp, bit_depth), bit_depth);
    const TuInfo& tu = layout[i];
    Plane& p = rec[tu.comp];
    for (int y = 0; y < tu.area.h; ++y)
      for (int x = 0; x < tu.area.w; ++x) {
        Sample& s = p.at(tu.area.x + x, tu.area.y + y);
        s = static_cast<Sample>(clip_sample(s + r.at(x, y), maxv));
      }
  }
  return rec;
}

std::array<Plane, 3> intra_dc_predict(const Frame& recon, const BlockArea& cu) {
  std::array<Plane, 3> out;
  for (int c = 0; c < 3; ++c) {
    const BlockArea a = mc::plane_area(cu, c);
    const Plane& p = recon.plane(c);
    std::int64_t sum = 0;
    int count = 0;
    if (a.y > 0)
      for (int x = 0; x < a.w; ++x, ++count) sum += p.at(a.x + x, a.y - 1);
    if (a.x > 0)
      for (int y = 0; y < a.h; ++y, ++count) sum += p.at(a.x - 1, a.y + y);
    const int dc = count ? static_cast<int>((sum + count / 2) / count) : 1 << (recon.bit_depth() - 1);
    out[c] = Plane(a.w, a.h, static_cast<Sample>(dc));
  }
  return out;
}

}  // namespace saip::rdo
