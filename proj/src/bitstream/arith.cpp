#include <cmath>

#include "saip/bitstream.hpp"

namespace saip::bs {

namespace {

// Cost of sitting at range r in [256, 511], 1/32768 bits: 9 - log2(r).
const std::array<std::uint32_t, 512>& range_cost_table() {
  static const std::array<std::uint32_t, 512> table = [] {
    std::array<std::uint32_t, 512> t{};
    for (int r = 256; r < 512; ++r)
      t[r] = static_cast<std::uint32_t>(std::lround((9.0 - std::log2(static_cast<double>(r))) * kOneBit));
    return t;
  }();
  return table;
}

inline std::uint32_t lps_range(const ContextModel& ctx, std::uint32_t range) {
  return ((static_cast<std::uint32_t>(ctx.lps_prob()) >> 9) * (range >> 5) >> 1) + 4;
}

}  // namespace

const char* syntax_class_name(SyntaxClass c) {
  switch (c) {
    case SyntaxClass::Header: return "header";
    case SyntaxClass::Split: return "split";
    case SyntaxClass::Mode: return "mode";
    case SyntaxClass::Saip: return "saip";
    case SyntaxClass::Motion: return "motion";
    case SyntaxClass::Residual: return "residual";
    default: return "unknown";
  }
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

std::uint64_t ArithEncoder::frac_bits() const {
  return shifts_ * kOneBit + range_cost_table()[range_];
}

void ArithEncoder::account(std::uint64_t before) {
  class_bits_[static_cast<int>(class_)] += frac_bits() - before;
}

void ArithEncoder::write_bit(int b) {
  ++bits_written_;
  cur_byte_ = static_cast<std::uint8_t>((cur_byte_ << 1) | (b & 1));
  if (++cur_bits_ == 8) {
    if (sink_) sink_->push_back(cur_byte_);
    cur_byte_ = 0;
    cur_bits_ = 0;
  }
}

void ArithEncoder::put_bit(int b) {
  if (first_bit_)
    first_bit_ = false;
  else
    write_bit(b);
  for (; outstanding_ > 0; --outstanding_) write_bit(1 - b);
}

void ArithEncoder::renorm() {
  while (range_ < 256) {
    if (low_ < 256) {
      put_bit(0);
    } else if (low_ >= 512) {
      low_ -= 512;
      put_bit(1);
    } else {
      low_ -= 256;
      ++outstanding_;
    }
    range_ <<= 1;
    low_ <<= 1;
    ++shifts_;
  }
}

void ArithEncoder::encode_bin(ContextModel& ctx, int bin) {
  const std::uint64_t before = frac_bits();
  bin = bin ? 1 : 0;
  const std::uint32_t rlps = lps_range(ctx, range_);
  range_ -= rlps;
  if (bin != ctx.mps()) {
    low_ += range_;
    range_ = rlps;
  }
  ctx.update(bin);
  renorm();
  ++bins_;
  account(before);
}

void ArithEncoder::encode_bypass(int bin) {
  const std::uint64_t before = frac_bits();
  low_ <<= 1;
  if (bin) low_ += range_;
  if (low_ >= 1024) {
    put_bit(1);
    low_ -= 1024;
  } else if (low_ < 512) {
    put_bit(0);
  } else {
    low_ -= 512;
    ++outstanding_;
  }
  ++shifts_;
  ++bins_;
  account(before);
}

void ArithEncoder::encode_bypass_bits(std::uint32_t value, int num_bits) {
  for (int i = num_bits - 1; i >= 0; --i) encode_bypass((value >> i) & 1);
}

void ArithEncoder::finish() {
  range_ -= 2;
  low_ += range_;
  range_ = 2;
  renorm();
  put_bit((low_ >> 9) & 1);
  write_bit((low_ >> 8) & 1);
  write_bit(1);
  while (cur_bits_ != 0) write_bit(0);
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

ArithDecoder::ArithDecoder(std::span<const std::uint8_t> data, std::uint64_t base_bit_offset)
    : data_(data), base_(base_bit_offset) {
  for (int i = 0; i < 9; ++i) offset_ = (offset_ << 1) | static_cast<std::uint32_t>(read_bit());
}

int ArithDecoder::read_bit() {
  if (pos_ >= data_.size() * 8) throw BitstreamError("read past end of frame payload", bit_offset());
  const int bit = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
  ++pos_;
  return bit;
}

void ArithDecoder::renorm() {
  while (range_ < 256) {
    range_ <<= 1;
    offset_ = (offset_ << 1) | static_cast<std::uint32_t>(read_bit());
  }
}

int ArithDecoder::decode_bin(ContextModel& ctx) {
  const std::uint32_t rlps = lps_range(ctx, range_);
  range_ -= rlps;
  int bin = ctx.mps();
  if (offset_ >= range_) {
    bin = 1 - bin;
    offset_ -= range_;
    range_ = rlps;
  }
  ctx.update(bin);
  renorm();
  return bin;
}

int ArithDecoder::decode_bypass() {
  offset_ = (offset_ << 1) | static_cast<std::uint32_t>(read_bit());
  if (offset_ >= range_) {
    offset_ -= range_;
    return 1;
  }
  return 0;
}

std::uint32_t ArithDecoder::decode_bypass_bits(int num_bits) {
  std::uint32_t v = 0;
  for (int i = 0; i < num_bits; ++i) v = (v << 1) | static_cast<std::uint32_t>(decode_bypass());
  return v;
}

void ArithDecoder::finish() {
  range_ -= 2;
  if (offset_ < range_) throw BitstreamError("missing end-of-frame terminator", bit_offset());
}

// ---------------------------------------------------------------------------
// Fixed-length bits
// ---------------------------------------------------------------------------

void BitWriter::put(std::uint64_t value, int num_bits) {
  if (num_bits < 0 || num_bits > 64) throw ArgumentError("bit count out of range");
  if (num_bits < 64 && (value >> num_bits) != 0) throw ArgumentError("value does not fit in field");
  for (int i = num_bits - 1; i >= 0; --i) {
    if (bit_pos_ == 0) bytes_.push_back(0);
    if ((value >> i) & 1) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> bit_pos_);
    bit_pos_ = (bit_pos_ + 1) & 7;
  }
}

void BitWriter::put_ue(std::uint32_t value) {
  const std::uint64_t v = static_cast<std::uint64_t>(value) + 1;
  int len = 0;
  while ((v >> (len + 1)) != 0) ++len;
  put(0, len);
  put(v, len + 1);
}

void BitWriter::align() {
  bit_pos_ = 0;
}

std::string BitWriter::to_string() const {
  std::string s;
  const std::uint64_t n = bit_count();
  for (std::uint64_t i = 0; i < n; ++i) s += ((bytes_[i >> 3] >> (7 - (i & 7))) & 1) ? '1' : '0';
  return s;
}

std::uint64_t BitReader::get(int num_bits) {
  std::uint64_t v = 0;
  for (int i = 0; i < num_bits; ++i) {
    if (pos_ >= data_.size() * 8) throw BitstreamError("header truncated", bit_offset());
    v = (v << 1) | ((data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1);
    ++pos_;
  }
  return v;
}

std::uint32_t BitReader::get_ue() {
  int zeros = 0;
  while (get(1) == 0) {
    if (++zeros > 31) throw BitstreamError("Exp-Golomb prefix too long", bit_offset());
  }
  const std::uint64_t v = (std::uint64_t{1} << zeros | get(zeros)) - 1;
  if (v > 0xFFFFFFFFu) throw BitstreamError("Exp-Golomb value overflow", bit_offset());
  return static_cast<std::uint32_t>(v);
}

void BitReader::align() {
  pos_ = (pos_ + 7) & ~std::uint64_t{7};
}

}  // namespace saip::bs
