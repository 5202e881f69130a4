#include "synthetic.hpp"

#include <cmath>

namespace saip::testing {

namespace {

std::uint32_t hash32(std::uint32_t x) {
  x ^= x >> 16;
  x *= 0x7feb352dU;
  x ^= x >> 15;
  x *= 0x846ca68bU;
  x ^= x >> 16;
  return x;
}

double lattice(int x, int y, std::uint32_t seed) {
  const std::uint32_t h = hash32(static_cast<std::uint32_t>(x) * 0x9E3779B1U ^ hash32(static_cast<std::uint32_t>(y) + seed));
  return (h & 0xFFFF) / 65535.0;
}

double value_noise(double x, double y, std::uint32_t seed) {
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  const double sx = fx * fx * (3 - 2 * fx), sy = fy * fy * (3 - 2 * fy);
  const double a = lattice(x0, y0, seed), b = lattice(x0 + 1, y0, seed);
  const double c = lattice(x0, y0 + 1, seed), d = lattice(x0 + 1, y0 + 1, seed);
  return (a + (b - a) * sx) * (1 - sy) + (c + (d - c) * sx) * sy;
}

struct Rect {
  int x, y, w, h;
  bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
};

void fill_chroma_from_luma(Frame& f) {
  for (int c = 1; c < 3; ++c) {
    Plane& p = f.plane(c);
    for (int y = 0; y < p.height(); ++y)
      for (int x = 0; x < p.width(); ++x) {
        const int s = f.luma().at(2 * x, 2 * y) + f.luma().at(2 * x + 1, 2 * y) + f.luma().at(2 * x, 2 * y + 1) +
                      f.luma().at(2 * x + 1, 2 * y + 1);
        const int mid = 1 << (f.bit_depth() - 1);
        const int v = c == 1 ? mid + (s / 4 - mid) / 3 : mid - (s / 4 - mid) / 4;
        p.at(x, y) = static_cast<Sample>(clip_sample(v, f.max_value()));
      }
  }
}

}  // namespace

int texture(int x, int y, std::uint32_t seed, int amplitude) {
  const double v = 0.6 * value_noise(x / 6.0, y / 6.0, seed) + 0.4 * value_noise(x / 2.5, y / 2.5, seed + 17);
  return static_cast<int>(std::lround(v * amplitude));
}

Sequence two_rectangles(int width, int height, int num_frames, int bit_depth) {
  Sequence seq;
  seq.name = "two_rectangles";
  const int scale = 1 << (bit_depth - 8);
  const int rw = width * 5 / 16, rh = height / 4;
  for (int t = 0; t < num_frames; ++t) {
    Frame f(width, height, bit_depth, t);
    LabelPlane labels(width, height, 0);
    const Rect r1{width / 16 + 2 * t, height / 8, rw, rh};
    const Rect r2{width - width / 16 - rw - 2 * t, height * 9 / 16, rw, rh};
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        int v;
        if (r1.contains(x, y)) {
          v = 170 + texture(x - r1.x, y - r1.y, 101, 70);
          labels.at(x, y) = 1;
        } else if (r2.contains(x, y)) {
          v = 20 + texture(x - r2.x, y - r2.y, 202, 70);
          labels.at(x, y) = 2;
        } else {
          v = 80 + texture(x, y, 303, 60);
        }
        f.luma().at(x, y) = static_cast<Sample>(clip_sample(v * scale, f.max_value()));
      }
    fill_chroma_from_luma(f);
    seq.frames.push_back(std::move(f));
    seq.masks.emplace_back(std::move(labels), t);
  }
  return seq;
}

Sequence global_pan(int width, int height, int num_frames, int dx, int dy, int bit_depth) {
  Sequence seq;
  seq.name = "global_pan";
  const int scale = 1 << (bit_depth - 8);
  for (int t = 0; t < num_frames; ++t) {
    Frame f(width, height, bit_depth, t);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        f.luma().at(x, y) = static_cast<Sample>((40 + texture(x + dx * t, y + dy * t, 404, 170)) * scale);
    fill_chroma_from_luma(f);
    seq.frames.push_back(std::move(f));
    seq.masks.emplace_back(LabelPlane(width, height, 0), t);
  }
  return seq;
}

Sequence moving_disc(int width, int height, int num_frames, int bit_depth) {
  Sequence seq;
  seq.name = "moving_disc";
  const int scale = 1 << (bit_depth - 8);
  const double r = std::min(width, height) / 5.0;
  for (int t = 0; t < num_frames; ++t) {
    Frame f(width, height, bit_depth, t);
    LabelPlane labels(width, height, 0);
    const double cx = width / 4.0 + 1.5 * t, cy = height / 4.0 + 1.0 * t;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double ddx = x + 0.5 - cx, ddy = y + 0.5 - cy;
        int v;
        if (ddx * ddx + ddy * ddy <= r * r) {
          v = 200 + texture(x - static_cast<int>(1.5 * t), y - t, 505, 40);
          labels.at(x, y) = 1;
        } else {
          v = 20 + texture(x, y, 606, 60);
        }
        f.luma().at(x, y) = static_cast<Sample>(clip_sample(v * scale, f.max_value()));
      }
    fill_chroma_from_luma(f);
    seq.frames.push_back(std::move(f));
    seq.masks.emplace_back(std::move(labels), t);
  }
  return seq;
}

Frame random_frame(int width, int height, int bit_depth, std::mt19937& rng) {
  Frame f(width, height, bit_depth);
  std::uniform_int_distribution<int> d(0, f.max_value());
  for (int c = 0; c < 3; ++c)
    for (auto& s : f.plane(c).data()) s = static_cast<Sample>(d(rng));
  return f;
}

Frame constant_frame(int width, int height, int bit_depth, int value) {
  Frame f(width, height, bit_depth);
  for (int c = 0; c < 3; ++c) f.plane(c).fill(static_cast<Sample>(value));
  return f;
}

MaskPlane random_mask(int width, int height, std::mt19937& rng) {
  MaskPlane m(width, height, 0);
  std::uniform_int_distribution<int> shapes(1, 4);
  std::uniform_int_distribution<int> px(-width / 2, width + width / 2), py(-height / 2, height + height / 2);
  std::uniform_int_distribution<int> size(2, std::max(width, height));
  const int n = shapes(rng);
  for (int i = 0; i < n; ++i) {
    const bool disc = rng() & 1;
    const int cx = px(rng), cy = py(rng), s = size(rng);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const bool in = disc ? (x - cx) * (x - cx) + (y - cy) * (y - cy) <= s * s / 4
                             : std::abs(x - cx) <= s / 2 && std::abs(y - cy) <= s / 3;
        if (in) m.at(x, y) ^= 1;
      }
  }
  return m;
}

LabelPlane to_labels(const MaskPlane& m) {
  LabelPlane l(m.width(), m.height(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) l.data()[i] = m.data()[i];
  return l;
}

void write_sequence(const Sequence& seq, const std::filesystem::path& yuv, const std::string& mask_prefix) {
  write_yuv(seq.frames, yuv);
  for (const auto& m : seq.masks) write_mask_pgm(m.labels, mask_path(mask_prefix, m.poc));
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("saip_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace saip::testing
