#include "saip/bitstream.hpp"

namespace saip::bs {

namespace {

int log2_exact(int v) {
  int l = 0;
  while ((1 << l) < v) ++l;
  return (1 << l) == v ? l : -1;
}

}  // namespace

void SequenceHeader::validate() const {
  if (width <= 0 || height <= 0 || width % 8 || height % 8 || width > 65535 || height > 65535)
    throw ArgumentError("frame size must be a positive multiple of 8 below 65536");
  if (bit_depth != 8 && bit_depth != 10) throw ArgumentError("bit depth must be 8 or 10");
  if (gop_size < 1 || gop_size > 65535) throw ArgumentError("gop size out of range");
  if (qp < 0 || qp > 51) throw ArgumentError("qp must lie in [0, 51]");
  if (num_refs < 1 || num_refs > 4) throw ArgumentError("reference count must lie in [1, 4]");
  const int lc = log2_exact(ctu_size), lm = log2_exact(min_cu);
  if (lc < 3 || lc > 6) throw ArgumentError("ctu size must be a power of two in [8, 64]");
  if (lm < 3 || lm > lc) throw ArgumentError("min cu size must be a power of two in [8, ctu size]");
  if (max_secondary_candidates < 1 || max_secondary_candidates > kSecondaryListSize)
    throw ArgumentError("max secondary candidates must lie in [1, 7]");
  if (refresh_interval_gops < 1) throw ArgumentError("refresh interval must be positive");
  if (seg_source.kind == seg::SourceKind::ExternalFiles) {
    if (seg_source.file_prefix.empty() || seg_source.file_prefix.size() > 65535)
      throw ArgumentError("mask prefix length out of range");
  } else if (seg_source.threshold < 0 || seg_source.threshold > 65535 || seg_source.min_area < 0) {
    throw ArgumentError("builtin segmentation parameters out of range");
  }
}

std::vector<std::uint8_t> write_header(const SequenceHeader& h) {
  h.validate();
  BitWriter bw;
  for (char c : kMagic) bw.put(static_cast<std::uint8_t>(c), 8);
  bw.put(kVersion, 8);
  bw.put(h.width, 16);
  bw.put(h.height, 16);
  bw.put(h.bit_depth, 4);
  bw.put(h.gop_size, 16);
  bw.put(h.qp, 6);
  bw.put(h.num_refs, 3);
  bw.put(static_cast<int>(h.profile), 2);
  bw.put(log2_exact(h.ctu_size), 3);
  bw.put(log2_exact(h.min_cu), 3);
  bw.put(h.enable_saip_merge, 1);
  bw.put(h.enable_saip_mmvd, 1);
  bw.put_ue(static_cast<std::uint32_t>(h.max_secondary_candidates));
  bw.put(static_cast<int>(h.seg_source.kind), 1);
  if (h.seg_source.kind == seg::SourceKind::ExternalFiles) {
    bw.put(h.seg_source.file_prefix.size(), 16);
    for (char c : h.seg_source.file_prefix) bw.put(static_cast<std::uint8_t>(c), 8);
  } else {
    bw.put(h.seg_source.threshold, 16);
    bw.put(static_cast<std::uint32_t>(h.seg_source.min_area), 32);
  }
  bw.put_ue(static_cast<std::uint32_t>(h.refresh_interval_gops));
  bw.align();
  return bw.bytes();
}

SequenceHeader read_header(std::span<const std::uint8_t> data, std::size_t& consumed) {
  if (data.size() < kMagic.size() + 1) throw BitstreamError("not a SAIP bitstream", 0);
  for (std::size_t i = 0; i < kMagic.size(); ++i)
    if (data[i] != static_cast<std::uint8_t>(kMagic[i])) throw BitstreamError("not a SAIP bitstream", 0);
  if (data[4] != kVersion) throw BitstreamError("unsupported bitstream version", 32);

  BitReader br(data.subspan(5), 40);
  SequenceHeader h;
  h.width = static_cast<int>(br.get(16));
  h.height = static_cast<int>(br.get(16));
  h.bit_depth = static_cast<int>(br.get(4));
  h.gop_size = static_cast<int>(br.get(16));
  h.qp = static_cast<int>(br.get(6));
  h.num_refs = static_cast<int>(br.get(3));
  const int profile = static_cast<int>(br.get(2));
  if (profile > 1) throw BitstreamError("unknown profile", br.bit_offset());
  h.profile = static_cast<Profile>(profile);
  h.ctu_size = 1 << br.get(3);
  h.min_cu = 1 << br.get(3);
  h.enable_saip_merge = br.get(1);
  h.enable_saip_mmvd = br.get(1);
  h.max_secondary_candidates = static_cast<int>(br.get_ue());
  h.seg_source.kind = static_cast<seg::SourceKind>(br.get(1));
  if (h.seg_source.kind == seg::SourceKind::ExternalFiles) {
    const auto len = br.get(16);
    h.seg_source.file_prefix.clear();
    for (std::uint64_t i = 0; i < len; ++i) h.seg_source.file_prefix += static_cast<char>(br.get(8));
  } else {
    h.seg_source.file_prefix.clear();
    h.seg_source.threshold = static_cast<int>(br.get(16));
    h.seg_source.min_area = static_cast<int>(br.get(32));
  }
  h.refresh_interval_gops = static_cast<int>(br.get_ue());
  br.align();
  try {
    h.validate();
  } catch (const ArgumentError& e) {
    throw BitstreamError(std::string("invalid sequence header: ") + e.what(), br.bit_offset());
  }
  consumed = 5 + br.byte_position();
  return h;
}

void write_frame_header(BitWriter& bw, const FrameHeader& fh) {
  if (fh.poc < 0) throw ArgumentError("negative poc");
  if (fh.qp < 0 || fh.qp > 51) throw ArgumentError("qp must lie in [0, 51]");
  bw.put_ue(static_cast<std::uint32_t>(fh.poc));
  bw.put(static_cast<int>(fh.slice), 2);
  bw.put(fh.qp, 6);
  bw.align();
}

FrameHeader read_frame_header(BitReader& br) {
  FrameHeader fh;
  fh.poc = static_cast<int>(br.get_ue());
  const int slice = static_cast<int>(br.get(2));
  if (slice > 2) throw BitstreamError("unknown slice type", br.bit_offset());
  fh.slice = static_cast<SliceType>(slice);
  fh.qp = static_cast<int>(br.get(6));
  if (fh.qp > 51) throw BitstreamError("qp out of range", br.bit_offset());
  br.align();
  return fh;
}

}  // namespace saip::bs
