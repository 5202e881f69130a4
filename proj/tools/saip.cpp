#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "saip/codec.hpp"

namespace {

using namespace saip;

int run_encode(const std::string& config_path, const std::map<std::string, std::string>& flags, bool no_saip,
               bool no_et) {
  codec::EncoderConfig cfg = config_path.empty() ? codec::EncoderConfig{} : codec::EncoderConfig::from_file(config_path);
  for (const auto& [k, v] : flags) cfg.set(k, v);
  if (no_saip) cfg.saip = false;
  if (no_et) cfg.et = false;
  cfg.apply_environment();
  const auto res = codec::encode(cfg);
  std::printf("frames %zu  bytes %zu  psnr_y %s  saip_ratio %.4f\n", res.recon.size(), res.bitstream.size(),
              codec::format_db(res.stats.mean_psnr_y()).c_str(), res.stats.usage_ratio());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SAIP segmentation-assisted inter prediction codec"};
  app.require_subcommand(1);

  // encode
  auto* enc = app.add_subcommand("encode", "Encode a raw I420 sequence");
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::string input, size, out, stats, profile, masks;
  int frames = 0, qp = 0, gop = 0, refs = 0, bit_depth = 0, refresh = 0;
  bool no_saip = false, no_et = false;
  enc->add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
  enc->add_option("--input", input, "input YUV file");
  enc->add_option("--size", size, "frame size WxH");
  enc->add_option("--frames", frames, "frames to code")->check(CLI::NonNegativeNumber);
  enc->add_option("--qp", qp, "quantization parameter")->check(CLI::Range(0, 51));
  enc->add_option("--gop", gop, "GOP size (intra period)")->check(CLI::PositiveNumber);
  enc->add_option("--refs", refs, "reference pictures per list")->check(CLI::Range(1, 4));
  enc->add_option("--bit-depth", bit_depth, "sample bit depth (8 or 10)");
  enc->add_option("--refresh", refresh, "mask label refresh interval in GOPs")->check(CLI::PositiveNumber);
  enc->add_option("--profile", profile, "ldp or ldb")->check(CLI::IsMember({"ldp", "ldb"}));
  enc->add_option("--masks", masks, "mask file prefix, 'builtin' or builtin:<threshold>:<min_area>");
  enc->add_flag("--no-saip", no_saip, "disable SAIP");
  enc->add_flag("--no-et", no_et, "disable early termination in the SAIP search");
  enc->add_option("--out", out, "output bitstream");
  enc->add_option("--stats", stats, "per-frame statistics TSV");

  // decode
  auto* dec = app.add_subcommand("decode", "Decode a bitstream to raw I420");
  std::string dec_in, dec_out;
  dec->add_option("--in", dec_in, "bitstream")->required()->check(CLI::ExistingFile);
  dec->add_option("--out", dec_out, "output YUV file")->required();

  // analyze
  auto* ana = app.add_subcommand("analyze", "Write mode maps and statistics for a bitstream");
  std::string ana_in, ana_dir;
  ana->add_option("--in", ana_in, "bitstream")->required()->check(CLI::ExistingFile);
  ana->add_option("--out-dir", ana_dir, "output directory")->required();

  // psnr
  auto* ps = app.add_subcommand("psnr", "Per-plane PSNR between two YUV files");
  std::string pa, pb, psize;
  int pdepth = 8;
  ps->add_option("a", pa, "first YUV file")->required()->check(CLI::ExistingFile);
  ps->add_option("b", pb, "second YUV file")->required()->check(CLI::ExistingFile);
  ps->add_option("--size", psize, "frame size WxH")->required();
  ps->add_option("--bit-depth", pdepth, "sample bit depth");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*enc) {
      auto given = [&](const char* name) { return enc->count(name) > 0; };
      if (given("--input")) flags["input"] = input;
      if (given("--size")) flags["size"] = size;
      if (given("--frames")) flags["frames"] = std::to_string(frames);
      if (given("--qp")) flags["qp"] = std::to_string(qp);
      if (given("--gop")) flags["gop"] = std::to_string(gop);
      if (given("--refs")) flags["refs"] = std::to_string(refs);
      if (given("--bit-depth")) flags["bit_depth"] = std::to_string(bit_depth);
      if (given("--refresh")) flags["refresh"] = std::to_string(refresh);
      if (given("--profile")) flags["profile"] = profile;
      if (given("--masks")) flags["masks"] = masks;
      if (given("--out")) flags["output"] = out;
      if (given("--stats")) flags["stats"] = stats;
      return run_encode(config_path, flags, no_saip, no_et);
    }
    if (*dec) {
      const int n = codec::decode_file(dec_in, dec_out);
      std::printf("decoded %d frames\n", n);
      return 0;
    }
    if (*ana) {
      const auto rep = codec::analyze_file(ana_in, ana_dir);
      for (int k = 0; k < codec::kNumModeKinds; ++k)
        std::printf("%-11s %.4f\n", rdo::mode_kind_name(static_cast<rdo::ModeKind>(k)), rep.mode_share[k]);
      std::printf("usage_ratio %.4f\n", rep.stats.usage_ratio());
      return 0;
    }
    if (*ps) {
      const auto [w, h] = codec::parse_size(psize);
      const auto a = read_yuv(pa, w, h, pdepth);
      const auto b = read_yuv(pb, w, h, pdepth);
      if (a.size() != b.size()) throw ArgumentError("files hold different frame counts");
      std::printf("frame\tpsnr_y\tpsnr_u\tpsnr_v\n");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const auto p = codec::psnr(a[i], b[i]);
        std::printf("%zu\t%s\t%s\t%s\n", i, codec::format_db(p.db[0]).c_str(), codec::format_db(p.db[1]).c_str(),
                    codec::format_db(p.db[2]).c_str());
      }
      return 0;
    }
  } catch (const bs::BitstreamError& e) {
    std::fprintf(stderr, "saip: decode error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "saip: %s\n", e.what());
    return 2;
  }
  return 0;
}
