#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "saip/core.hpp"

namespace saip {

namespace {

void read_plane(Plane& plane, const std::vector<char>& buf, std::size_t& pos, bool wide) {
  for (auto& s : plane.data()) {
    if (wide) {
      s = static_cast<Sample>(static_cast<unsigned char>(buf[pos]) |
                              (static_cast<unsigned char>(buf[pos + 1]) << 8));
      pos += 2;
    } else {
      s = static_cast<unsigned char>(buf[pos++]);
    }
  }
}

void write_plane(const Plane& plane, std::ostream& out, bool wide) {
  std::vector<char> row;
  row.reserve(static_cast<std::size_t>(plane.width()) * (wide ? 2 : 1));
  for (int y = 0; y < plane.height(); ++y) {
    row.clear();
    for (Sample s : plane.row(y)) {
      row.push_back(static_cast<char>(s & 0xff));
      if (wide) row.push_back(static_cast<char>(s >> 8));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace

std::vector<Frame> read_yuv(const std::filesystem::path& path, int width, int height, int bit_depth) {
  if (width <= 0 || height <= 0) throw ArgumentError("frame dimensions must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const std::size_t fb = Frame::frame_bytes(width, height, bit_depth);
  const std::size_t whole = buf.size() / fb;
  if (buf.size() % fb != 0) {
    throw IoError(path.string() + ": truncated frame at byte offset " + std::to_string(whole * fb), whole * fb);
  }

  std::vector<Frame> frames;
  frames.reserve(whole);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < whole; ++i) {
    Frame f(width, height, bit_depth, static_cast<int>(i));
    for (int c = 0; c < 3; ++c) read_plane(f.plane(c), buf, pos, bit_depth > 8);
    f.validate();
    frames.push_back(std::move(f));
  }
  return frames;
}

void append_yuv(const Frame& frame, std::ostream& out) {
  for (int c = 0; c < 3; ++c) write_plane(frame.plane(c), out, frame.bit_depth() > 8);
}

std::size_t write_yuv(std::span<const Frame> frames, const std::filesystem::path& path) {
  for (const auto& f : frames) {
    if (f.width() != frames.front().width() || f.height() != frames.front().height() ||
        f.bit_depth() != frames.front().bit_depth())
      throw ArgumentError("frames passed to write_yuv differ in geometry");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  std::size_t bytes = 0;
  for (const auto& f : frames) {
    append_yuv(f, out);
    bytes += Frame::frame_bytes(f.width(), f.height(), f.bit_depth());
  }
  if (!out) throw IoError("write failed on " + path.string(), bytes);
  return bytes;
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {}
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int pgm_int(std::istream& in, const std::string& what, const std::filesystem::path& path) {
  const std::string tok = pgm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path.string() + ": bad PGM " + what + " '" + tok + "'");
  }
}

}  // namespace

SegMask read_mask_pgm(const std::filesystem::path& path, int poc) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mask " + path.string());
  const std::string magic = pgm_token(in);
  if (magic != "P5") throw ParseError(path.string() + ": expected binary PGM (P5), got '" + magic + "'");
  const int w = pgm_int(in, "width", path);
  const int h = pgm_int(in, "height", path);
  const int maxval = pgm_int(in, "maxval", path);
  if (w <= 0 || h <= 0) throw ParseError(path.string() + ": nonpositive PGM dimensions");
  if (maxval <= 0 || maxval > 255) throw ParseError(path.string() + ": PGM maxval must be in 1..255");

  LabelPlane labels(w, h);
  std::vector<char> raw(static_cast<std::size_t>(w) * h);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw ParseError(path.string() + ": PGM pixel data truncated");
  for (std::size_t i = 0; i < raw.size(); ++i) labels.data()[i] = static_cast<unsigned char>(raw[i]);
  return SegMask(std::move(labels), poc);
}

void write_mask_pgm(const LabelPlane& labels, const std::filesystem::path& path) {
  MaskPlane img(labels.width(), labels.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (labels.data()[i] > 255) throw ArgumentError("label exceeds 8-bit PGM range");
    img.data()[i] = static_cast<std::uint8_t>(labels.data()[i]);
  }
  write_pgm(img, path);
}

void write_pgm(const MaskPlane& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data().data()), static_cast<std::streamsize>(image.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

std::filesystem::path mask_path(const std::string& prefix, int poc) {
  char suffix[16];
  std::snprintf(suffix, sizeof suffix, "_%05d.pgm", poc);
  return prefix + suffix;
}

}  // namespace saip
