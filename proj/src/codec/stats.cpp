#include <cmath>
#include <cstdio>
#include <ostream>

#include "saip/codec.hpp"

namespace saip::codec {

double psnr(const Plane& a, const Plane& b, int bit_depth) {
  if (a.width() != b.width() || a.height() != b.height()) throw ArgumentError("PSNR of planes with different sizes");
  if (a.empty()) throw ArgumentError("PSNR of empty planes");
  std::int64_t sse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t d = static_cast<std::int64_t>(a.data()[i]) - b.data()[i];
    sse += d * d;
  }
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double maxv = (1 << bit_depth) - 1;
  const double mse = static_cast<double>(sse) / static_cast<double>(a.size());
  return 10.0 * std::log10(maxv * maxv / mse);
}

PlanePsnr psnr(const Frame& a, const Frame& b) {
  if (a.bit_depth() != b.bit_depth()) throw ArgumentError("PSNR of frames with different bit depths");
  PlanePsnr out;
  for (int c = 0; c < 3; ++c) out.db[c] = psnr(a.plane(c), b.plane(c), a.bit_depth());
  return out;
}

std::string format_db(double db) {
  if (std::isinf(db)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", db);
  return buf;
}

long FrameStats::total_cus() const {
  long n = 0;
  for (long c : mode_cus) n += c;
  return n;
}

long FrameStats::saip_cus() const {
  return mode_cus[static_cast<int>(rdo::ModeKind::SaipMerge)] + mode_cus[static_cast<int>(rdo::ModeKind::SaipMmvd)];
}

long UsageStats::inter_cus() const {
  long n = 0;
  for (const auto& f : frames)
    if (f.slice != bs::SliceType::I) n += f.total_cus();
  return n;
}

long UsageStats::inter_saip_cus() const {
  long n = 0;
  for (const auto& f : frames)
    if (f.slice != bs::SliceType::I) n += f.saip_cus();
  return n;
}

double UsageStats::usage_ratio() const {
  const long total = inter_cus();
  return total ? static_cast<double>(inter_saip_cus()) / static_cast<double>(total) : 0.0;
}

std::uint64_t UsageStats::total_bits() const {
  std::uint64_t b = 0;
  for (const auto& f : frames) b += f.bits;
  return b;
}

double UsageStats::mean_psnr_y() const {
  double sum = 0;
  int n = 0;
  for (const auto& f : frames)
    if (std::isfinite(f.psnr.db[0])) sum += f.psnr.db[0], ++n;
  if (n == 0) return std::numeric_limits<double>::infinity();
  return sum / n;
}

void UsageStats::write_tsv(std::ostream& out) const {
  static constexpr const char* kSlice[] = {"I", "P", "B"};
  out << "poc\ttype\tqp\tbits\tpsnr_y\tpsnr_u\tpsnr_v\tcus\tsaip_cus\tratio";
  for (int k = 0; k < kNumModeKinds; ++k) out << "\tn_" << rdo::mode_kind_name(static_cast<rdo::ModeKind>(k));
  for (int c = 0; c < bs::kNumSyntaxClasses; ++c)
    out << "\tbits_" << bs::syntax_class_name(static_cast<bs::SyntaxClass>(c));
  out << "\tstage1\tstage2\n";
  for (const auto& f : frames) {
    const long total = f.total_cus();
    const double ratio = total ? static_cast<double>(f.saip_cus()) / static_cast<double>(total) : 0.0;
    char rbuf[32];
    std::snprintf(rbuf, sizeof rbuf, "%.4f", ratio);
    out << f.poc << '\t' << kSlice[static_cast<int>(f.slice)] << '\t' << f.qp << '\t' << f.bits << '\t'
        << format_db(f.psnr.db[0]) << '\t' << format_db(f.psnr.db[1]) << '\t' << format_db(f.psnr.db[2]) << '\t'
        << total << '\t' << f.saip_cus() << '\t' << rbuf;
    for (long n : f.mode_cus) out << '\t' << n;
    for (auto b : f.class_bits) out << '\t' << (b + bs::kOneBit / 2) / bs::kOneBit;
    out << '\t' << f.search.stage1 << '\t' << f.search.stage2 << '\n';
  }
}

}  // namespace saip::codec
