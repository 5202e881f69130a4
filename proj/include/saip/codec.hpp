#pragma once

// Encoder and decoder pipelines, configuration, statistics and the
// stream analysis used by the command-line tool.

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saip/bitstream.hpp"
#include "saip/core.hpp"
#include "saip/rdo.hpp"
#include "saip/seg_pipeline.hpp"

namespace saip::codec {

struct EncoderConfig {
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path stats;
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int frames = -1;  // -1 = every frame in the input
  int gop_size = 8;
  int qp = 32;
  int num_refs = 2;
  bs::Profile profile = bs::Profile::LowDelayP;
  bool saip = true;
  bool et = true;
  seg::MaskSource seg = seg::MaskSource::builtin(128, 16);
  int refresh_interval_gops = 1;
  int ctu_size = 64;
  int min_cu = 8;
  int max_secondary = kSecondaryListSize;
  bool saip_merge = true;
  bool saip_mmvd = true;
  int threads = 1;

  // Applies one `key=value` setting; throws ArgumentError on unknown keys
  // or malformed values.
  void set(const std::string& key, const std::string& value);
  // Reads `key=value` lines; blank lines and lines starting with '#' are skipped.
  static EncoderConfig from_file(const std::filesystem::path& path);
  // SAIP_THREADS caps `threads` when set.
  void apply_environment();

  void validate() const;
  bs::SequenceHeader sequence_header() const;
};

// Parses "WxH".
std::pair<int, int> parse_size(const std::string& text);
bs::Profile parse_profile(const std::string& text);
// "builtin", "builtin:<threshold>:<min_area>" or an external file prefix.
seg::MaskSource parse_mask_source(const std::string& text);

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

inline constexpr int kNumModeKinds = 5;

struct PlanePsnr {
  std::array<double, 3> db{};  // +inf for identical planes
};

// 10 log10(max^2 / MSE), +inf when the planes match.
double psnr(const Plane& a, const Plane& b, int bit_depth);
PlanePsnr psnr(const Frame& a, const Frame& b);
// "inf" for infinite values, otherwise fixed with 4 decimals.
std::string format_db(double db);

struct FrameStats {
  int poc = 0;
  bs::SliceType slice = bs::SliceType::I;
  int qp = 0;
  std::uint64_t bits = 0;
  PlanePsnr psnr;
  std::array<long, kNumModeKinds> mode_cus{};
  std::array<std::uint64_t, bs::kNumSyntaxClasses> class_bits{};
  rdo::SearchCounters search;
  long saip_searches = 0;

  long total_cus() const;
  long saip_cus() const;
};

struct UsageStats {
  std::vector<FrameStats> frames;

  // SAIP CUs over CUs of P/B frames; 0 when there are no inter CUs.
  double usage_ratio() const;
  long inter_cus() const;
  long inter_saip_cus() const;
  std::uint64_t total_bits() const;
  // Mean luma PSNR over frames with finite values; +inf if all are infinite.
  double mean_psnr_y() const;

  // One TSV row per frame after a header row.
  void write_tsv(std::ostream& out) const;
};

// ---------------------------------------------------------------------------
// Coding-unit records
// ---------------------------------------------------------------------------

// Everything the decoder learns about one coded CU.
struct CuRecord {
  BlockArea area;
  bs::SyntaxCU syntax;
  rdo::ModeKind kind = rdo::ModeKind::IntraDc;
  MotionPair saip_motion;  // valid for SAIP CUs
};

struct DecodedFrame {
  Frame recon;
  bs::FrameHeader header;
  std::vector<CuRecord> cus;
  std::uint64_t bits = 0;
  std::array<std::uint64_t, bs::kNumSyntaxClasses> class_bits{};
};

// ---------------------------------------------------------------------------
// Encoder / decoder
// ---------------------------------------------------------------------------

struct EncodeResult {
  std::vector<std::uint8_t> bitstream;
  std::vector<Frame> recon;
  std::vector<std::vector<CuRecord>> cus;  // per frame
  UsageStats stats;
};

// Encodes in-memory frames. The masks come from cfg.seg.
EncodeResult encode_frames(std::span<const Frame> frames, const EncoderConfig& cfg);
// Reads cfg.input, encodes and writes cfg.output (and cfg.stats when set).
EncodeResult encode(const EncoderConfig& cfg);

using FrameSink = std::function<void(const DecodedFrame&)>;

// Decodes `data`, handing each frame to `sink` as soon as it is
// reconstructed. Throws BitstreamError on malformed input.
bs::SequenceHeader decode_stream(std::span<const std::uint8_t> data, const FrameSink& sink);
// Convenience wrapper collecting every frame.
std::vector<DecodedFrame> decode_all(std::span<const std::uint8_t> data, bs::SequenceHeader* header = nullptr);

// Decodes `in` into the YUV file `out`; frames decoded before an error are
// written before the error propagates. Returns the number of frames.
int decode_file(const std::filesystem::path& in, const std::filesystem::path& out);

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

struct AnalyzeReport {
  bs::SequenceHeader header;
  UsageStats stats;
  std::vector<std::vector<CuRecord>> cus;
  // Fraction of CUs per mode over all inter-frame CUs.
  std::array<double, kNumModeKinds> mode_share{};
};

AnalyzeReport analyze_stream(std::span<const std::uint8_t> data);

// Grey-level mode map: CU interiors by mode, CU borders at 128.
MaskPlane mode_map(const std::vector<CuRecord>& cus, int width, int height);

// Pixels where the binary mask differs from a 4-neighbour.
MaskPlane mask_boundary(const MaskPlane& binary);
// Fraction of SAIP CUs containing at least one boundary pixel.
double boundary_hit_ratio(const std::vector<CuRecord>& cus, const MaskPlane& boundary);

// Writes mode maps and the analysis TSV under `dir`.
AnalyzeReport analyze_file(const std::filesystem::path& in, const std::filesystem::path& dir);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace saip::codec
