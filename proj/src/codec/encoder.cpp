#include <fstream>
#include <memory>

#include "frame_coding.hpp"
#include "saip/codec.hpp"

namespace saip::codec {

namespace {

using detail::inside;
using detail::quadrants;

struct Node {
  BlockArea area;
  bool split = false;
  bool implicit = false;  // split forced by the picture border, no flag coded
  rdo::CodedCu leaf;
  rdo::ModeKind kind = rdo::ModeKind::IntraDc;
  std::vector<std::unique_ptr<Node>> children;
  double cost = 0.0;
  rdo::CodingState after;
};

class FrameEncoder {
 public:
  FrameEncoder(const Frame& orig, const bs::SequenceHeader& hdr, const ReferenceStore& store, bs::SliceType slice,
               const EncoderConfig& cfg)
      : orig_(orig),
        hdr_(hdr),
        store_(store),
        slice_(slice),
        syntax_(detail::syntax_params_for(hdr, slice, store)),
        params_(rdo::RdoParams::for_qp(hdr.qp, cfg.et)),
        recon_(orig.width(), orig.height(), orig.bit_depth(), orig.poc()),
        grid_(orig.width(), orig.height()) {
    opts_.saip = syntax_.saip_enabled();
    opts_.allow_backward = !store.lists_identical();
  }

  // Returns the coded payload (frame header plus arithmetic data).
  std::vector<std::uint8_t> run(FrameStats& stats, std::vector<CuRecord>& records) {
    bs::BitWriter bw;
    bs::write_frame_header(bw, {orig_.poc(), slice_, hdr_.qp});
    std::vector<std::uint8_t> payload = bw.bytes();

    std::vector<std::unique_ptr<Node>> ctus;
    rdo::CodingState chain{bs::ArithEncoder(nullptr), bs::ContextSet{}};
    for (int y = 0; y < orig_.height(); y += hdr_.ctu_size)
      for (int x = 0; x < orig_.width(); x += hdr_.ctu_size) {
        auto node = compress({x, y, hdr_.ctu_size, hdr_.ctu_size}, 0, chain);
        chain = node->after;
        ctus.push_back(std::move(node));
      }

    std::vector<std::uint8_t> arith;
    bs::ArithEncoder enc(&arith);
    bs::ContextSet ctx;
    for (const auto& n : ctus) write_node(*n, 0, enc, ctx, records, stats);
    enc.finish();
    payload.insert(payload.end(), arith.begin(), arith.end());

    stats.poc = orig_.poc();
    stats.slice = slice_;
    stats.qp = hdr_.qp;
    stats.bits = (payload.size() + 4) * 8;
    stats.class_bits = enc.class_bits();
    stats.class_bits[static_cast<int>(bs::SyntaxClass::Header)] += (bw.bytes().size() + 4) * 8 * bs::kOneBit;
    stats.psnr = psnr(orig_, recon_);
    stats.search = search_stats_.saip;
    stats.saip_searches = search_stats_.saip_searches;
    return payload;
  }

  Frame& recon() { return recon_; }
  mvc::MotionGrid& grid() { return grid_; }

 private:
  std::unique_ptr<Node> compress(const BlockArea& a, int depth, const rdo::CodingState& in) {
    auto node = std::make_unique<Node>();
    node->area = a;
    const int w = orig_.width(), h = orig_.height();
    if (!inside(a, w, h)) {
      node->split = node->implicit = true;
      rdo::CodingState chain = in;
      for (const auto& q : quadrants(a, w, h)) {
        auto child = compress(q, depth + 1, chain);
        node->cost += child->cost;
        chain = child->after;
        node->children.push_back(std::move(child));
      }
      node->after = std::move(chain);
      return node;
    }

    const bool can_split = a.w > hdr_.min_cu;
    rdo::CodingState leaf_in = in;
    if (can_split) bs::write_split_flag(leaf_in.enc, leaf_in.ctx, depth, false);
    const double flag_cost = params_.lambda * bs::to_bits(leaf_in.enc.frac_bits() - in.enc.frac_bits());

    mc::CuPredictor predictor(store_, a);
    const auto cands = detail::candidate_lists(grid_, a, store_, orig_.poc(), slice_);
    const rdo::RdContext rc = rdo::RdContext::make(orig_, a, params_, syntax_, leaf_in);
    auto modes = rdo::search_cu_modes(predictor, cands, rc, recon_, opts_, &search_stats_);
    const int best = rdo::mode_decide(modes);
    node->leaf = std::move(modes[best].coded);
    node->kind = modes[best].kind;
    node->cost = node->leaf.cost + flag_cost;
    node->after = node->leaf.after;
    apply_leaf(*node);
    if (!can_split || node->kind == rdo::ModeKind::Skip) return node;

    // Split trial on a cleared motion area so neighbours not yet coded in
    // z-order read as unavailable.
    const auto saved = save_units(a);
    clear_units(a);
    rdo::CodingState chain = in;
    bs::write_split_flag(chain.enc, chain.ctx, depth, true);
    double split_cost = params_.lambda * bs::to_bits(chain.enc.frac_bits() - in.enc.frac_bits());
    std::vector<std::unique_ptr<Node>> children;
    bool complete = true;
    for (const auto& q : quadrants(a, w, h)) {
      auto child = compress(q, depth + 1, chain);
      split_cost += child->cost;
      chain = child->after;
      children.push_back(std::move(child));
      if (split_cost >= node->cost) {
        complete = false;
        break;
      }
    }
    if (complete && split_cost < node->cost) {
      node->split = true;
      node->children = std::move(children);
      node->cost = split_cost;
      node->after = std::move(chain);
      node->leaf = rdo::CodedCu{};
      return node;
    }
    restore_units(a, saved);
    detail::paste_cu(recon_, a, node->leaf.recon);
    return node;
  }

  void apply_leaf(const Node& n) {
    detail::paste_cu(recon_, n.area, n.leaf.recon);
    detail::store_cu_motion(grid_, n.area, n.leaf.motion, store_.lists());
  }

  std::vector<mvc::MotionUnit> save_units(const BlockArea& a) const {
    std::vector<mvc::MotionUnit> out;
    for (int uy = a.y / 4; uy < (a.y + a.h) / 4; ++uy)
      for (int ux = a.x / 4; ux < (a.x + a.w) / 4; ++ux) out.push_back(grid_.unit(ux, uy));
    return out;
  }
  void clear_units(const BlockArea& a) {
    for (int uy = a.y / 4; uy < (a.y + a.h) / 4; ++uy)
      for (int ux = a.x / 4; ux < (a.x + a.w) / 4; ++ux) grid_.unit(ux, uy) = mvc::MotionUnit{};
  }
  void restore_units(const BlockArea& a, const std::vector<mvc::MotionUnit>& units) {
    std::size_t i = 0;
    for (int uy = a.y / 4; uy < (a.y + a.h) / 4; ++uy)
      for (int ux = a.x / 4; ux < (a.x + a.w) / 4; ++ux) grid_.unit(ux, uy) = units[i++];
  }

  void write_node(const Node& n, int depth, bs::ArithEncoder& enc, bs::ContextSet& ctx,
                  std::vector<CuRecord>& records, FrameStats& stats) {
    if (!n.implicit && n.area.w > hdr_.min_cu) bs::write_split_flag(enc, ctx, depth, n.split);
    if (n.split) {
      for (const auto& c : n.children) write_node(*c, depth + 1, enc, ctx, records, stats);
      return;
    }
    bs::write_cu_syntax(enc, ctx, n.leaf.syntax, syntax_);
    if (!n.leaf.levels.empty()) {
      const auto layout = rdo::tu_layout(n.area.w, n.area.h);
      for (std::size_t i = 0; i < layout.size(); ++i)
        bs::code_residual(enc, ctx, n.leaf.levels[i], layout[i].comp != 0);
    }
    CuRecord r{n.area, n.leaf.syntax, n.kind, {}};
    if (n.leaf.motion.saip) r.saip_motion = n.leaf.motion.pair;
    records.push_back(r);
    ++stats.mode_cus[static_cast<int>(n.kind)];
  }

  const Frame& orig_;
  const bs::SequenceHeader& hdr_;
  const ReferenceStore& store_;
  bs::SliceType slice_;
  bs::SyntaxParams syntax_;
  rdo::RdoParams params_;
  rdo::CuSearchOptions opts_;
  rdo::CuSearchStats search_stats_;
  Frame recon_;
  mvc::MotionGrid grid_;
};

}  // namespace

EncodeResult encode_frames(std::span<const Frame> frames, const EncoderConfig& cfg) {
  cfg.validate();
  const bs::SequenceHeader hdr = cfg.sequence_header();
  const int count = cfg.frames < 0 ? static_cast<int>(frames.size()) : std::min<int>(cfg.frames, frames.size());
  EncodeResult res;
  res.bitstream = bs::write_header(hdr);

  seg::MaskPipeline masks(hdr.seg_source, seg::SegConfig{hdr.refresh_interval_gops, hdr.gop_size});
  ReferenceStore store;
  for (int i = 0; i < count; ++i) {
    Frame orig = frames[i];
    if (orig.width() != hdr.width || orig.height() != hdr.height || orig.bit_depth() != hdr.bit_depth)
      throw ArgumentError("frame " + std::to_string(i) + " does not match the configured geometry");
    orig.set_poc(i);
    const bs::SliceType slice = detail::slice_type_for(i, hdr);
    store.build_lists(i, hdr.num_refs);

    FrameEncoder fe(orig, hdr, store, slice, cfg);
    FrameStats fs;
    std::vector<CuRecord> records;
    const auto payload = fe.run(fs, records);
    detail::put_u32(res.bitstream, static_cast<std::uint32_t>(payload.size()));
    res.bitstream.insert(res.bitstream.end(), payload.begin(), payload.end());

    SegMask mask = masks.next(fe.recon());
    store.add(fe.recon(), std::move(mask), std::move(fe.grid()));
    store.retain(static_cast<std::size_t>(hdr.num_refs));
    res.recon.push_back(std::move(fe.recon()));
    res.cus.push_back(std::move(records));
    res.stats.frames.push_back(fs);
  }
  return res;
}

EncodeResult encode(const EncoderConfig& cfg) {
  cfg.validate();
  if (cfg.input.empty() || cfg.output.empty()) throw ArgumentError("encode needs an input and an output path");
  std::vector<Frame> frames = read_yuv(cfg.input, cfg.width, cfg.height, cfg.bit_depth);
  if (cfg.frames > static_cast<int>(frames.size()))
    throw ArgumentError("input holds " + std::to_string(frames.size()) + " frames, " + std::to_string(cfg.frames) +
                        " requested");
  EncodeResult res = encode_frames(frames, cfg);
  write_file(cfg.output, res.bitstream);
  if (!cfg.stats.empty()) {
    std::ofstream out(cfg.stats);
    if (!out) throw IoError("cannot write stats file " + cfg.stats.string());
    res.stats.write_tsv(out);
  }
  return res;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace saip::codec
