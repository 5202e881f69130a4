#include <algorithm>

#include "saip/motion_comp.hpp"

namespace saip::mc {

const InterpFilter& luma_filter() {
  static const InterpFilter f{8,
                              4,
                              {{{0, 0, 0, 64, 0, 0, 0, 0}},
                               {{-1, 4, -10, 58, 17, -5, 1, 0}},
                               {{-1, 4, -11, 40, 40, -11, 4, -1}},
                               {{0, 1, -5, 17, 58, -10, 4, -1}}},
                              6};
  return f;
}

const InterpFilter& chroma_filter() {
  static const InterpFilter f{4,
                              8,
                              {{{0, 64, 0, 0}},
                               {{-2, 58, 10, -2}},
                               {{-4, 54, 16, -2}},
                               {{-6, 46, 28, -4}},
                               {{-4, 36, 36, -4}},
                               {{-4, 28, 46, -6}},
                               {{-2, 16, 54, -4}},
                               {{-2, 10, 58, -2}}},
                              6};
  return f;
}

Plane fetch_block(const Plane& ref, int x, int y, int w, int h) {
  Plane out(w, h);
  const bool inside = x >= 0 && y >= 0 && x + w <= ref.width() && y + h <= ref.height();
  for (int r = 0; r < h; ++r) {
    if (inside) {
      const auto src = ref.row(y + r).subspan(x, w);
      std::copy(src.begin(), src.end(), out.row(r).begin());
    } else {
      auto dst = out.row(r);
      for (int c = 0; c < w; ++c) dst[c] = ref.clamped(x + c, y + r);
    }
  }
  return out;
}

namespace {

void check_margin(const Plane& src, int margin, int w, int h, const InterpFilter& f) {
  if (margin < f.lo() || src.width() < margin + w + f.hi() || src.height() < margin + h + f.hi())
    throw ArgumentError("interpolation input lacks the filter margin");
}

// Stage shifts: the first pass drops bit_depth - 8 bits so intermediates
// stay within 16 bits; the second pass removes the rest of the 2^12 gain.
struct Shifts {
  int first;
  int second;
};
inline Shifts two_pass_shifts(int bit_depth) { return {bit_depth - 8, 12 - (bit_depth - 8)}; }

}  // namespace

namespace {

template <int N>
void filter_1d(const Plane& src, int margin, int w, int h, const std::array<int, 8>& c, bool horizontal,
               int max_value, Plane& out) {
  constexpr int lo = N / 2 - 1;
  const int stride = src.width();
  const int step = horizontal ? 1 : stride;
  for (int y = 0; y < h; ++y) {
    const Sample* base = &src.at(margin, margin + y) - lo * step;
    Sample* dst = &out.at(0, y);
    for (int x = 0; x < w; ++x) {
      int sum = 0;
      for (int k = 0; k < N; ++k) sum += c[k] * base[x + k * step];
      dst[x] = static_cast<Sample>(clip_sample((sum + 32) >> 6, max_value));
    }
  }
}

template <int N>
void filter_2d(const Plane& src, int margin, int w, int h, const std::array<int, 8>& ch, const std::array<int, 8>& cv,
               int s1, int s2, int max_value, Plane& out) {
  constexpr int lo = N / 2 - 1;
  const int th = h + N - 1;
  std::vector<int> tmp(static_cast<std::size_t>(w) * th);
  for (int r = 0; r < th; ++r) {
    const Sample* row = &src.at(margin - lo, margin - lo + r);
    int* t = &tmp[static_cast<std::size_t>(r) * w];
    for (int x = 0; x < w; ++x) {
      int sum = 0;
      for (int k = 0; k < N; ++k) sum += ch[k] * row[x + k];
      t[x] = sum >> s1;
    }
  }
  const int offset = 1 << (s2 - 1);
  std::vector<int> acc(w);
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), offset);
    for (int k = 0; k < N; ++k) {
      const int* t = &tmp[static_cast<std::size_t>(y + k) * w];
      const int ck = cv[k];
      for (int x = 0; x < w; ++x) acc[x] += ck * t[x];
    }
    Sample* dst = &out.at(0, y);
    for (int x = 0; x < w; ++x) dst[x] = static_cast<Sample>(clip_sample(acc[x] >> s2, max_value));
  }
}

}  // namespace

Plane interpolate(const Plane& src, int margin, int w, int h, int fx, int fy, const InterpFilter& f,
                  int bit_depth) {
  if (fx == 0 && fy == 0) {
    if (src.width() < margin + w || src.height() < margin + h) throw ArgumentError("interpolation input too small");
    return fetch_block(src, margin, margin, w, h);
  }
  check_margin(src, margin, w, h, f);
  if (f.num_taps != 8 && f.num_taps != 4) throw ArgumentError("only 4- and 8-tap filters are supported");
  const int max_value = (1 << bit_depth) - 1;
  Plane out(w, h);

  if (fy == 0 || fx == 0) {
    const bool horizontal = fy == 0;
    const auto& c = f.coeffs[horizontal ? fx : fy];
    if (f.num_taps == 8)
      filter_1d<8>(src, margin, w, h, c, horizontal, max_value, out);
    else
      filter_1d<4>(src, margin, w, h, c, horizontal, max_value, out);
    return out;
  }

  const auto [s1, s2] = two_pass_shifts(bit_depth);
  if (f.num_taps == 8)
    filter_2d<8>(src, margin, w, h, f.coeffs[fx], f.coeffs[fy], s1, s2, max_value, out);
  else
    filter_2d<4>(src, margin, w, h, f.coeffs[fx], f.coeffs[fy], s1, s2, max_value, out);
  return out;
}

int interpolate_at(const Plane& src, int x, int y, int fx, int fy, const InterpFilter& f, int bit_depth) {
  if (fx == 0 && fy == 0) return src.at(x, y);
  const int max_value = (1 << bit_depth) - 1;
  const int n = f.num_taps;
  const int lo = f.lo();
  if (x < lo || y < lo || x + f.hi() >= src.width() || y + f.hi() >= src.height())
    throw ArgumentError("interpolate_at lacks the filter margin");
  if (fy == 0) {
    const auto& c = f.coeffs[fx];
    int sum = 0;
    for (int k = 0; k < n; ++k) sum += c[k] * src.at(x - lo + k, y);
    return clip_sample((sum + 32) >> 6, max_value);
  }
  if (fx == 0) {
    const auto& c = f.coeffs[fy];
    int sum = 0;
    for (int k = 0; k < n; ++k) sum += c[k] * src.at(x, y - lo + k);
    return clip_sample((sum + 32) >> 6, max_value);
  }
  const auto [s1, s2] = two_pass_shifts(bit_depth);
  const auto& ch = f.coeffs[fx];
  const auto& cv = f.coeffs[fy];
  int sum = 0;
  for (int r = 0; r < n; ++r) {
    int hs = 0;
    for (int k = 0; k < n; ++k) hs += ch[k] * src.at(x - lo + k, y - lo + r);
    sum += cv[r] * (hs >> s1);
  }
  return clip_sample((sum + (1 << (s2 - 1))) >> s2, max_value);
}

Plane motion_compensate(const Plane& ref, int comp, const BlockArea& cu, const MotionVector& mv, int bit_depth) {
  const BlockArea pa = plane_area(cu, comp);
  const int shift = comp == 0 ? 2 : 3;
  const int mask = (1 << shift) - 1;
  const int ix = mv.mvx >> shift;
  const int iy = mv.mvy >> shift;
  const int fx = mv.mvx & mask;
  const int fy = mv.mvy & mask;
  if (fx == 0 && fy == 0) return fetch_block(ref, pa.x + ix, pa.y + iy, pa.w, pa.h);
  const InterpFilter& f = filter_for(comp);
  const int lo = f.lo();
  Plane src = fetch_block(ref, pa.x + ix - lo, pa.y + iy - lo, pa.w + f.num_taps - 1, pa.h + f.num_taps - 1);
  return interpolate(src, lo, pa.w, pa.h, fx, fy, f, bit_depth);
}

Prediction fetch_integer_block(const Frame& ref, const BlockArea& area, int dx, int dy) {
  Prediction p{area, {}};
  const MotionVector mv = MotionVector::make(dx * 4, dy * 4);
  for (int c = 0; c < 3; ++c) p.planes[c] = motion_compensate(ref.plane(c), c, area, mv, ref.bit_depth());
  return p;
}

}  // namespace saip::mc
