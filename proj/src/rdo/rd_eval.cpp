#include "saip/rdo.hpp"

namespace saip::rdo {

RdContext RdContext::make(const Frame& orig, const BlockArea& cu, const RdoParams& params,
                          const bs::SyntaxParams& syntax, const CodingState& state) {
  RdContext rc;
  rc.orig = &orig;
  rc.cu = cu;
  rc.params = params;
  rc.syntax = syntax;
  rc.state = &state;
  for (int c = 0; c < 3; ++c) rc.src[c] = crop(orig.plane(c), mc::plane_area(cu, c));
  return rc;
}

CodedCu evaluate_cu(const RdContext& rc, bs::SyntaxCU syntax, const std::array<Plane, 3>& pred, bool residual) {
  if (!rc.orig || !rc.state) throw ArgumentError("incomplete RD context");
  CodedCu out;
  const bool intra = syntax.mode == bs::CuMode::Intra;
  const int bd = rc.orig->bit_depth();
  if (intra || (residual && syntax.mode != bs::CuMode::Skip)) {
    out.levels = transform_cu(*rc.orig, rc.cu, pred, rc.params.qp, intra);
    if (!intra) {
      const bool any = std::any_of(out.levels.begin(), out.levels.end(), [](const bs::CoeffBlock& b) {
        return std::any_of(b.data().begin(), b.data().end(), [](std::int32_t v) { return v != 0; });
      });
      if (!any) out.levels.clear();
      syntax.root_cbf = any;
    }
  } else {
    syntax.root_cbf = false;
  }
  out.recon = reconstruct_cu(pred, out.levels, rc.cu.w, rc.cu.h, rc.params.qp, bd);
  out.distortion = ssd(rc.src, out.recon);

  out.after = CodingState{rc.state->enc.trial_copy(), rc.state->ctx};
  write_cu_syntax(out.after.enc, out.after.ctx, syntax, rc.syntax);
  if (!out.levels.empty()) {
    const auto layout = tu_layout(rc.cu.w, rc.cu.h);
    for (std::size_t i = 0; i < layout.size(); ++i)
      bs::code_residual(out.after.enc, out.after.ctx, out.levels[i], layout[i].comp != 0);
  }
  out.rate = out.after.enc.frac_bits() - rc.state->enc.frac_bits();
  out.cost = static_cast<double>(out.distortion) + rc.params.lambda * bs::to_bits(out.rate);
  out.syntax = syntax;
  out.valid = true;
  return out;
}

ModeKind kind_of(const bs::SyntaxCU& s) {
  switch (s.mode) {
    case bs::CuMode::Intra: return ModeKind::IntraDc;
    case bs::CuMode::Skip: return ModeKind::Skip;
    case bs::CuMode::Saip: return s.saip_merge_flag ? ModeKind::SaipMerge : ModeKind::SaipMmvd;
    default: return ModeKind::BaselineInter;
  }
}

const char* mode_kind_name(ModeKind k) {
  switch (k) {
    case ModeKind::IntraDc: return "intra";
    case ModeKind::BaselineInter: return "inter";
    case ModeKind::SaipMerge: return "saip_merge";
    case ModeKind::SaipMmvd: return "saip_mmvd";
    case ModeKind::Skip: return "skip";
  }
  return "?";
}

int mode_decide(const std::vector<ModeCandidate>& candidates) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
    const auto& c = candidates[i];
    if (!c.coded.valid) continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const auto& b = candidates[best];
    if (c.coded.cost < b.coded.cost ||
        (c.coded.cost == b.coded.cost && static_cast<int>(c.kind) < static_cast<int>(b.kind)))
      best = i;
  }
  if (best < 0) throw ArgumentError("no valid mode candidate");
  return best;
}

}  // namespace saip::rdo
