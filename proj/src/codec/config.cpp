#include <charconv>
#include <cstdlib>
#include <fstream>

#include "saip/codec.hpp"

namespace saip::codec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto* end = value.data() + value.size();
  auto [p, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || p != end) throw ArgumentError("invalid integer for " + key + ": '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "on" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "off" || value == "false" || value == "no") return false;
  throw ArgumentError("invalid boolean for " + key + ": '" + value + "'");
}

}  // namespace

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw ArgumentError("size must look like WxH, got '" + text + "'");
  const int w = parse_int("width", text.substr(0, x));
  const int h = parse_int("height", text.substr(x + 1));
  if (w <= 0 || h <= 0) throw ArgumentError("size must be positive, got '" + text + "'");
  return {w, h};
}

bs::Profile parse_profile(const std::string& text) {
  if (text == "ldp") return bs::Profile::LowDelayP;
  if (text == "ldb") return bs::Profile::LowDelayB;
  throw ArgumentError("unknown profile '" + text + "' (expected ldp or ldb)");
}

seg::MaskSource parse_mask_source(const std::string& text) {
  if (text.empty()) throw ArgumentError("empty mask source");
  if (text == "builtin") return seg::MaskSource::builtin(128, 16);
  if (text.rfind("builtin:", 0) == 0) {
    const std::string rest = text.substr(8);
    const auto c = rest.find(':');
    if (c == std::string::npos) throw ArgumentError("builtin mask source must be builtin:<threshold>:<min_area>");
    return seg::MaskSource::builtin(parse_int("threshold", rest.substr(0, c)), parse_int("min_area", rest.substr(c + 1)));
  }
  return seg::MaskSource::external(text);
}

void EncoderConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key), value = trim(raw_value);
  if (key == "input") input = value;
  else if (key == "output" || key == "out") output = value;
  else if (key == "stats") stats = value;
  else if (key == "size") std::tie(width, height) = parse_size(value);
  else if (key == "width") width = parse_int(key, value);
  else if (key == "height") height = parse_int(key, value);
  else if (key == "bit_depth") bit_depth = parse_int(key, value);
  else if (key == "frames") frames = parse_int(key, value);
  else if (key == "gop") gop_size = parse_int(key, value);
  else if (key == "qp") qp = parse_int(key, value);
  else if (key == "refs") num_refs = parse_int(key, value);
  else if (key == "profile") profile = parse_profile(value);
  else if (key == "masks") seg = parse_mask_source(value);
  else if (key == "saip") saip = parse_bool(key, value);
  else if (key == "et") et = parse_bool(key, value);
  else if (key == "refresh") refresh_interval_gops = parse_int(key, value);
  else if (key == "ctu") ctu_size = parse_int(key, value);
  else if (key == "min_cu") min_cu = parse_int(key, value);
  else if (key == "max_secondary") max_secondary = parse_int(key, value);
  else if (key == "saip_merge") saip_merge = parse_bool(key, value);
  else if (key == "saip_mmvd") saip_mmvd = parse_bool(key, value);
  else if (key == "threads") threads = parse_int(key, value);
  else throw ArgumentError("unknown configuration key '" + key + "'");
}

EncoderConfig EncoderConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  EncoderConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    try {
      cfg.set(t.substr(0, eq), t.substr(eq + 1));
    } catch (const ArgumentError& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

void EncoderConfig::apply_environment() {
  if (const char* env = std::getenv("SAIP_THREADS")) {
    const int cap = parse_int("SAIP_THREADS", env);
    if (cap < 1) throw ArgumentError("SAIP_THREADS must be positive");
    threads = std::min(threads, cap);
  }
}

void EncoderConfig::validate() const {
  sequence_header().validate();
  if (frames < -1) throw ArgumentError("frame count must be non-negative");
  if (threads < 1) throw ArgumentError("thread count must be positive");
  if (!saip_merge && !saip_mmvd && saip) throw ArgumentError("SAIP enabled with both candidate kinds disabled");
}

bs::SequenceHeader EncoderConfig::sequence_header() const {
  bs::SequenceHeader h;
  h.width = width;
  h.height = height;
  h.bit_depth = bit_depth;
  h.gop_size = gop_size;
  h.qp = qp;
  h.num_refs = num_refs;
  h.profile = profile;
  h.ctu_size = ctu_size;
  h.min_cu = min_cu;
  h.enable_saip_merge = saip && saip_merge;
  h.enable_saip_mmvd = saip && saip_mmvd;
  h.max_secondary_candidates = max_secondary;
  h.seg_source = seg;
  h.refresh_interval_gops = refresh_interval_gops;
  return h;
}

}  // namespace saip::codec
