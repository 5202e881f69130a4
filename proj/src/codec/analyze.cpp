#include <cstdio>
#include <fstream>

#include "saip/codec.hpp"

namespace saip::codec {

namespace {

constexpr std::array<std::uint8_t, kNumModeKinds> kModeGrey = {40, 90, 255, 200, 0};

}  // namespace

MaskPlane mode_map(const std::vector<CuRecord>& cus, int width, int height) {
  MaskPlane img(width, height, 0);
  for (const auto& c : cus) {
    const std::uint8_t g = kModeGrey[static_cast<int>(c.kind)];
    for (int y = c.area.y; y < std::min(c.area.y + c.area.h, height); ++y)
      for (int x = c.area.x; x < std::min(c.area.x + c.area.w, width); ++x) {
        const bool border = x == c.area.x || y == c.area.y;
        img.at(x, y) = border ? 128 : g;
      }
  }
  return img;
}

MaskPlane mask_boundary(const MaskPlane& binary) {
  MaskPlane out(binary.width(), binary.height(), 0);
  for (int y = 0; y < binary.height(); ++y)
    for (int x = 0; x < binary.width(); ++x) {
      const int v = binary.at(x, y);
      const bool edge = (x > 0 && binary.at(x - 1, y) != v) || (y > 0 && binary.at(x, y - 1) != v) ||
                        (x + 1 < binary.width() && binary.at(x + 1, y) != v) ||
                        (y + 1 < binary.height() && binary.at(x, y + 1) != v);
      out.at(x, y) = edge ? 1 : 0;
    }
  return out;
}

double boundary_hit_ratio(const std::vector<CuRecord>& cus, const MaskPlane& boundary) {
  long saip = 0, hits = 0;
  for (const auto& c : cus) {
    if (c.kind != rdo::ModeKind::SaipMerge && c.kind != rdo::ModeKind::SaipMmvd) continue;
    ++saip;
    bool hit = false;
    for (int y = c.area.y; y < c.area.y + c.area.h && !hit; ++y)
      for (int x = c.area.x; x < c.area.x + c.area.w && !hit; ++x) hit = boundary.at(x, y) != 0;
    hits += hit;
  }
  return saip ? static_cast<double>(hits) / static_cast<double>(saip) : 0.0;
}

AnalyzeReport analyze_stream(std::span<const std::uint8_t> data) {
  AnalyzeReport rep;
  rep.header = decode_stream(data, [&](const DecodedFrame& f) {
    FrameStats fs;
    fs.poc = f.header.poc;
    fs.slice = f.header.slice;
    fs.qp = f.header.qp;
    fs.bits = f.bits;
    fs.class_bits = f.class_bits;
    for (int c = 0; c < 3; ++c) fs.psnr.db[c] = std::numeric_limits<double>::quiet_NaN();
    for (const auto& cu : f.cus) ++fs.mode_cus[static_cast<int>(cu.kind)];
    rep.stats.frames.push_back(fs);
    rep.cus.push_back(f.cus);
  });
  std::array<long, kNumModeKinds> counts{};
  long total = 0;
  for (const auto& f : rep.stats.frames) {
    if (f.slice == bs::SliceType::I) continue;
    for (int k = 0; k < kNumModeKinds; ++k) counts[k] += f.mode_cus[k];
    total += f.total_cus();
  }
  for (int k = 0; k < kNumModeKinds; ++k)
    rep.mode_share[k] = total ? static_cast<double>(counts[k]) / static_cast<double>(total) : 0.0;
  return rep;
}

AnalyzeReport analyze_file(const std::filesystem::path& in, const std::filesystem::path& dir) {
  const auto data = read_file(in);
  AnalyzeReport rep = analyze_stream(data);
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < rep.cus.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "modes_%05d.pgm", rep.stats.frames[i].poc);
    write_pgm(mode_map(rep.cus[i], rep.header.width, rep.header.height), dir / name);
  }
  std::ofstream tsv(dir / "frames.tsv");
  if (!tsv) throw IoError("cannot write " + (dir / "frames.tsv").string());
  rep.stats.write_tsv(tsv);

  std::ofstream summary(dir / "summary.tsv");
  if (!summary) throw IoError("cannot write " + (dir / "summary.tsv").string());
  summary << "mode\tshare\n";
  for (int k = 0; k < kNumModeKinds; ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", rep.mode_share[k]);
    summary << rdo::mode_kind_name(static_cast<rdo::ModeKind>(k)) << '\t' << buf << '\n';
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", rep.stats.usage_ratio());
  summary << "usage_ratio\t" << buf << '\n';
  return rep;
}

}  // namespace saip::codec
