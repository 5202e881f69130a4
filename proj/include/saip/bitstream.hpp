#pragma once

// Binary arithmetic coder, SAIP syntax and the container format.
//
// The coder is a 9-bit range engine (range kept in [256, 510] after
// renormalization) with 15-bit probabilities adapted by shift 5. Rates are
// reported in 1/32768 bit units so that trial and real encodes agree
// exactly.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "saip/core.hpp"
#include "saip/seg_pipeline.hpp"

namespace saip::bs {

class BitstreamError : public std::runtime_error {
 public:
  BitstreamError(const std::string& what, std::uint64_t bit_offset)
      : std::runtime_error(what + " (bit offset " + std::to_string(bit_offset) + ")"), bit_offset_(bit_offset) {}
  std::uint64_t bit_offset() const { return bit_offset_; }

 private:
  std::uint64_t bit_offset_;
};

inline constexpr int kFracBits = 15;
inline constexpr std::uint64_t kOneBit = 1u << kFracBits;
inline double to_bits(std::uint64_t frac) { return static_cast<double>(frac) / kOneBit; }

struct ContextModel {
  static constexpr int kProbBits = 15;
  static constexpr int kShift = 5;
  std::uint16_t p1 = 1u << (kProbBits - 1);  // probability of a 1 bin

  int mps() const { return p1 >= (1u << (kProbBits - 1)) ? 1 : 0; }
  int lps_prob() const { return mps() ? (1 << kProbBits) - p1 : p1; }
  void update(int bin) {
    if (bin)
      p1 = static_cast<std::uint16_t>(p1 + (((1 << kProbBits) - p1) >> kShift));
    else
      p1 = static_cast<std::uint16_t>(p1 - (p1 >> kShift));
  }
  bool operator==(const ContextModel&) const = default;
};

// Buckets for the analysis bit breakdown.
enum class SyntaxClass : int { Header = 0, Split, Mode, Saip, Motion, Residual, Count };
inline constexpr int kNumSyntaxClasses = static_cast<int>(SyntaxClass::Count);
const char* syntax_class_name(SyntaxClass c);

class ArithEncoder {
 public:
  // A null sink counts rate without producing bytes (trial encoding).
  ArithEncoder() = default;
  explicit ArithEncoder(std::vector<std::uint8_t>* sink) : sink_(sink) {}

  void encode_bin(ContextModel& ctx, int bin);
  void encode_bypass(int bin);
  void encode_bypass_bits(std::uint32_t value, int num_bits);
  // Codes the terminating bin and flushes; the encoder is spent afterwards.
  void finish();

  // Rate so far in 1/32768 bits.
  std::uint64_t frac_bits() const;
  long bins() const { return bins_; }
  std::uint64_t bits_written() const { return bits_written_; }

  void set_class(SyntaxClass c) { class_ = c; }
  const std::array<std::uint64_t, kNumSyntaxClasses>& class_bits() const { return class_bits_; }

  // Detaches the byte sink so the state can be used for a trial encode.
  ArithEncoder trial_copy() const {
    ArithEncoder t(*this);
    t.sink_ = nullptr;
    return t;
  }

 private:
  void renorm();
  void put_bit(int b);
  void write_bit(int b);
  void account(std::uint64_t before);

  std::vector<std::uint8_t>* sink_ = nullptr;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 510;
  std::uint64_t outstanding_ = 0;
  bool first_bit_ = true;
  std::uint64_t shifts_ = 0;
  std::uint64_t bits_written_ = 0;
  std::uint8_t cur_byte_ = 0;
  int cur_bits_ = 0;
  long bins_ = 0;
  SyntaxClass class_ = SyntaxClass::Mode;
  std::array<std::uint64_t, kNumSyntaxClasses> class_bits_{};
};

class ArithDecoder {
 public:
  // `base_bit_offset` positions error reports within the enclosing file.
  explicit ArithDecoder(std::span<const std::uint8_t> data, std::uint64_t base_bit_offset = 0);

  int decode_bin(ContextModel& ctx);
  int decode_bypass();
  std::uint32_t decode_bypass_bits(int num_bits);
  // Decodes the terminating bin; throws if the stream was not terminated.
  void finish();

  std::uint64_t bit_offset() const { return base_ + pos_; }

 private:
  int read_bit();
  void renorm();

  std::span<const std::uint8_t> data_;
  std::uint64_t base_;
  std::uint64_t pos_ = 0;
  std::uint32_t range_ = 510;
  std::uint32_t offset_ = 0;
};

// MSB-first fixed-length / Exp-Golomb writer used for headers.
class BitWriter {
 public:
  void put(std::uint64_t value, int num_bits);
  void put_ue(std::uint32_t value);
  void align();
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::uint64_t bit_count() const { return bytes_.size() * 8 - (bit_pos_ ? 8 - bit_pos_ : 0); }
  // Bit string of everything written, for tests.
  std::string to_string() const;

 private:
  std::vector<std::uint8_t> bytes_;
  int bit_pos_ = 0;  // bits used in the last byte, 0 = byte aligned
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> data, std::uint64_t base_bit_offset = 0)
      : data_(data), base_(base_bit_offset) {}
  std::uint64_t get(int num_bits);
  std::uint32_t get_ue();
  void align();
  std::size_t byte_position() const { return (pos_ + 7) / 8; }
  std::uint64_t bit_offset() const { return base_ + pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::uint64_t base_;
  std::uint64_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Context sets
// ---------------------------------------------------------------------------

struct ContextSet {
  std::array<ContextModel, 3> split_flag{};
  ContextModel skip_flag;
  ContextModel pred_mode_flag;
  std::array<ContextModel, 2> inter_dir{};
  ContextModel merge_flag;
  ContextModel merge_idx;
  ContextModel mvp_idx;
  ContextModel ref_idx;
  std::array<ContextModel, 2> mvd_gt0{};
  std::array<ContextModel, 2> mvd_gt1{};
  ContextModel root_cbf;
  ContextModel mmvd_cand_idx;
  ContextModel mmvd_distance_idx;

  // Contexts dedicated to SAIP mode flags, secondary index and reverse index.
  ContextModel saip_flag;
  ContextModel saip_merge_flag;
  ContextModel saip_back_idx;
  ContextModel saip_reverse_idx;

  // Residual, [0] luma / [1] chroma.
  std::array<ContextModel, 2> cbf{};
  std::array<std::array<ContextModel, 13>, 2> last_prefix{};
  std::array<std::array<ContextModel, 4>, 2> sig{};
  std::array<std::array<ContextModel, 2>, 2> gt1{};
  std::array<ContextModel, 2> gt2{};

  bool operator==(const ContextSet&) const = default;
};

// ---------------------------------------------------------------------------
// Coding-unit syntax
// ---------------------------------------------------------------------------

enum class SliceType : int { I = 0, P = 1, B = 2 };
enum class CuMode : int { Intra = 0, Skip, Merge, Amvp, Saip };

inline constexpr int kMmvdDistances = 8;
inline constexpr int kMmvdDirections = 4;
inline constexpr int kMmvdBases = 2;
inline constexpr int kMergeListSize = 7;

struct AmvpData {
  int ref_idx = 0;
  int mvp_idx = 0;
  int mvd_x = 0;
  int mvd_y = 0;
  bool operator==(const AmvpData&) const = default;
};

struct SyntaxCU {
  CuMode mode = CuMode::Skip;
  InterDir dir = InterDir::Forward;
  int merge_idx = 0;
  std::array<AmvpData, 2> amvp{};
  bool root_cbf = false;

  bool saip_flag = false;
  bool saip_merge_flag = true;
  int saip_merge_idx = 0;
  int saip_mmvd_cand_idx = 0;
  int saip_mmvd_distance_idx = 0;
  int saip_mmvd_direction_idx = 0;
  int saip_back_idx = 0;
  int saip_reverse_idx = 0;

  // Index into the 71-entry primary list.
  int primary_index() const;
  void set_primary_index(int alpha);

  bool operator==(const SyntaxCU&) const = default;
};

struct SyntaxParams {
  SliceType slice = SliceType::P;
  bool saip_merge_enabled = true;
  bool saip_mmvd_enabled = true;
  int max_secondary = kSecondaryListSize;
  int num_refs = 1;

  bool saip_enabled() const { return saip_merge_enabled || saip_mmvd_enabled; }
};

// Table I elements inside merge data (from saip_flag on).
void write_saip_data(ArithEncoder& enc, ContextSet& ctx, const SyntaxCU& cu, const SyntaxParams& p);
void read_saip_data(ArithDecoder& dec, ContextSet& ctx, SyntaxCU& cu, const SyntaxParams& p);

// Prediction syntax of one CU (mode tree, motion data, root cbf).
void write_cu_syntax(ArithEncoder& enc, ContextSet& ctx, const SyntaxCU& cu, const SyntaxParams& p);
SyntaxCU read_cu_syntax(ArithDecoder& dec, ContextSet& ctx, const SyntaxParams& p);

void write_split_flag(ArithEncoder& enc, ContextSet& ctx, int depth, bool split);
bool read_split_flag(ArithDecoder& dec, ContextSet& ctx, int depth);

// Truncated unary: `value` ones then a zero unless value == cmax.
// First bin uses `ctx`, the rest are bypass.
void write_tu(ArithEncoder& enc, ContextModel& ctx, int value, int cmax);
int read_tu(ArithDecoder& dec, ContextModel& ctx, int cmax);
// Bins a truncated unary code of `value` takes.
inline int tu_length(int value, int cmax) { return value < cmax ? value + 1 : cmax; }

// Exp-Golomb order k, bypass coded.
void write_eg_bypass(ArithEncoder& enc, std::uint32_t value, int k);
std::uint32_t read_eg_bypass(ArithDecoder& dec, int k);

// ---------------------------------------------------------------------------
// Residual coefficients
// ---------------------------------------------------------------------------

using CoeffBlock = Plane2D<std::int32_t>;
inline constexpr int kMaxCoeff = 32767;

// Diagonal up-right scan of an n x n block: scan index -> (x, y).
const std::vector<std::pair<int, int>>& diagonal_scan(int n);

void code_residual(ArithEncoder& enc, ContextSet& ctx, const CoeffBlock& coeffs, bool chroma);
CoeffBlock decode_residual(ArithDecoder& dec, ContextSet& ctx, int size, bool chroma);

// ---------------------------------------------------------------------------
// Headers
// ---------------------------------------------------------------------------

inline constexpr std::array<char, 4> kMagic = {'S', 'A', 'I', 'P'};
inline constexpr std::uint8_t kVersion = 1;

enum class Profile : int { LowDelayP = 0, LowDelayB = 1 };

struct SequenceHeader {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int gop_size = 8;
  int qp = 32;
  int num_refs = 2;
  Profile profile = Profile::LowDelayP;
  int ctu_size = 64;
  int min_cu = 8;
  bool enable_saip_merge = true;
  bool enable_saip_mmvd = true;
  int max_secondary_candidates = kSecondaryListSize;
  seg::MaskSource seg_source;
  int refresh_interval_gops = 1;

  void validate() const;
  bool operator==(const SequenceHeader&) const = default;
};

struct FrameHeader {
  int poc = 0;
  SliceType slice = SliceType::I;
  int qp = 32;
  bool operator==(const FrameHeader&) const = default;
};

// Magic, version byte and the byte-aligned sequence header.
std::vector<std::uint8_t> write_header(const SequenceHeader& hdr);
// Parses from the start of `data`; `consumed` receives the header length.
SequenceHeader read_header(std::span<const std::uint8_t> data, std::size_t& consumed);

void write_frame_header(BitWriter& bw, const FrameHeader& fh);
FrameHeader read_frame_header(BitReader& br);

}  // namespace saip::bs
