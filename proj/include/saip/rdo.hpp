#pragma once

// Encoder-side rate-distortion machinery: distortion metrics, residual
// transform/quantization, the two-stage SAIP candidate search and the
// per-CU mode decision.

#include <array>
#include <cstdint>
#include <vector>

#include "saip/bitstream.hpp"
#include "saip/core.hpp"
#include "saip/mask_ops.hpp"
#include "saip/motion_comp.hpp"
#include "saip/mvc.hpp"

namespace saip::rdo {

// ---------------------------------------------------------------------------
// Distortion
// ---------------------------------------------------------------------------

// Hadamard SATD over 8x8 tiles (halved), 4x4 tiles where 8 does not divide.
std::int64_t satd(const Plane& a, const Plane& b);
std::int64_t satd_4x4(const int* diff, int stride);
std::int64_t satd_8x8(const int* diff, int stride);
std::int64_t sad(const Plane& a, const Plane& b);
std::int64_t ssd(const Plane& a, const Plane& b);
// Sum over the three planes.
std::int64_t ssd(const std::array<Plane, 3>& a, const std::array<Plane, 3>& b);

// ---------------------------------------------------------------------------
// Transform and quantization
// ---------------------------------------------------------------------------

inline constexpr int kMaxTuSize = 32;

using Residual = Plane2D<std::int32_t>;

// Integer DCT-II basis: 64 in the first row, round(64 * sqrt(2) * cos(...)) below.
const std::vector<std::int32_t>& dct_matrix(int n);

bs::CoeffBlock forward_transform(const Residual& res, int bit_depth);
Residual inverse_transform(const bs::CoeffBlock& coeffs, int bit_depth);

bs::CoeffBlock quantize(const bs::CoeffBlock& coeffs, int qp, int bit_depth, bool intra);
bs::CoeffBlock dequantize(const bs::CoeffBlock& levels, int qp, int bit_depth);

// Transform blocks of a CU in coding order: luma blocks in raster order,
// then one block per chroma plane.
struct TuInfo {
  int comp;
  BlockArea area;  // relative to the CU origin in plane samples
};
std::vector<TuInfo> tu_layout(int cu_w, int cu_h);

// Quantized levels of every transform block of a CU.
std::vector<bs::CoeffBlock> transform_cu(const Frame& orig, const BlockArea& cu, const std::array<Plane, 3>& pred,
                                         int qp, bool intra);
// Prediction plus dequantized residual, clipped. `levels` empty = no residual.
std::array<Plane, 3> reconstruct_cu(const std::array<Plane, 3>& pred, const std::vector<bs::CoeffBlock>& levels,
                                    int cu_w, int cu_h, int qp, int bit_depth);

// DC intra prediction from the reconstructed samples above and left.
std::array<Plane, 3> intra_dc_predict(const Frame& recon, const BlockArea& cu);

// ---------------------------------------------------------------------------
// RD context
// ---------------------------------------------------------------------------

double lambda_for_qp(int qp);

struct RdoParams {
  int qp = 32;
  double lambda = 0.0;        // SSD-domain multiplier
  double lambda_satd = 0.0;   // SATD-domain multiplier for stage 1
  int stage2_keep = 4;
  bool et_enabled = true;
  int primary_limit = kPrimaryListSize;
  int secondary_limit = kSecondaryListSize;
  int me_range = 64;          // integer-pel search range

  static RdoParams for_qp(int qp, bool et = true);
  void validate() const;
};

// Entropy state at the start of a CU: trial encodes copy it.
struct CodingState {
  bs::ArithEncoder enc;
  bs::ContextSet ctx;
};

struct CuMotion {
  bool saip = false;
  mvc::MotionInfo uniform;
  MotionPair pair;
  std::array<mask::BlockMask, 2> masks;
};

// A fully evaluated coding of one CU.
struct CodedCu {
  bs::SyntaxCU syntax;
  std::vector<bs::CoeffBlock> levels;
  std::array<Plane, 3> recon;
  CuMotion motion;
  std::int64_t distortion = 0;
  std::uint64_t rate = 0;  // 1/32768 bits
  double cost = 0.0;
  CodingState after;
  bool valid = false;
};

struct RdContext {
  const Frame* orig = nullptr;
  BlockArea cu;
  RdoParams params;
  bs::SyntaxParams syntax;
  const CodingState* state = nullptr;
  std::array<Plane, 3> src;  // original samples of the CU

  static RdContext make(const Frame& orig, const BlockArea& cu, const RdoParams& params,
                        const bs::SyntaxParams& syntax, const CodingState& state);
};

// Codes `syntax` with prediction `pred` and measures SSD + lambda * rate.
// With `residual` set the residual is transformed and root_cbf follows
// from the levels; otherwise root_cbf is 0.
CodedCu evaluate_cu(const RdContext& rc, bs::SyntaxCU syntax, const std::array<Plane, 3>& pred, bool residual);

// ---------------------------------------------------------------------------
// SAIP search
// ---------------------------------------------------------------------------

using ListCandidates = mvc::CandidateLists;

struct CandidateCombo {
  int alpha = 0;
  int j = 0;
  int beta = 0;
  std::int64_t satd_cost = 0;
  double stage1_cost = 0.0;
  double r_alpha = 0.0;
  double r_j = 0.0;
  double r_beta = 0.0;
  std::int64_t ssd_cost = 0;
  double r_full = 0.0;
  double rd_cost = 0.0;
  bool residual = false;
};

// Binarization lengths used as stage-1 rates.
double rate_alpha(int alpha, const bs::SyntaxParams& sp);
double rate_beta(int beta, const bs::SyntaxParams& sp);

struct SearchCounters {
  long stage1 = 0;
  long stage2 = 0;
  long stage1_skipped = 0;
  long stage2_skipped = 0;
  bool uni_fallback = false;
};

struct SaipSearchResult {
  bool found = false;
  CandidateCombo best;
  std::vector<CandidateCombo> stage1_best;  // kept for stage 2, best first
  CodedCu coded;
  SearchCounters counters;
};

SaipSearchResult search_saip_uni(mc::CuPredictor& predictor, int list, const ListCandidates& cands,
                                 const RdContext& rc);
SaipSearchResult search_saip_bi(mc::CuPredictor& predictor, const std::array<ListCandidates, 2>& cands,
                                const RdContext& rc);

// Motion pair of a combo, patterns taken from the predictor's translated masks.
MotionPair combo_motion(const CandidateCombo& combo, InterDir dir, mc::CuPredictor& predictor,
                        const std::array<ListCandidates, 2>& cands);

// ---------------------------------------------------------------------------
// Motion estimation
// ---------------------------------------------------------------------------

// Bins of a motion-vector difference under the AMVP binarization.
int mvd_bins(int dx, int dy);

struct MeResult {
  MotionVector mv;
  int mvp_idx = 0;
  double cost = 0.0;  // luma SATD + lambda_satd * mvd bins
};

// Integer diamond search around the predictors and zero, followed by half-
// and quarter-pel refinement.
MeResult motion_search(mc::CuPredictor& predictor, int list, int ref_idx, const std::array<MotionVector, 2>& mvps,
                       const RdContext& rc);

// ---------------------------------------------------------------------------
// Mode decision
// ---------------------------------------------------------------------------

enum class ModeKind : int { IntraDc = 0, BaselineInter, SaipMerge, SaipMmvd, Skip };
const char* mode_kind_name(ModeKind k);

struct ModeCandidate {
  ModeKind kind;
  CodedCu coded;
};

// Index of the cheapest candidate; ties go to the earlier kind, then to
// the earlier entry.
int mode_decide(const std::vector<ModeCandidate>& candidates);

struct CuSearchStats {
  SearchCounters saip;
  long saip_searches = 0;
};

struct CuSearchOptions {
  bool saip = true;
  bool allow_backward = true;  // false when both lists hold the same pictures
};

// Runs every mode search for one CU and returns the candidates in mode order.
std::vector<ModeCandidate> search_cu_modes(mc::CuPredictor& predictor, const std::array<ListCandidates, 2>& cands,
                                           const RdContext& rc, const Frame& recon, const CuSearchOptions& opts,
                                           CuSearchStats* stats = nullptr);

ModeKind kind_of(const bs::SyntaxCU& syntax);

}  // namespace saip::rdo
