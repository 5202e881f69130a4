#include "syntax_gen.hpp"

namespace saip::testing {

using namespace saip::bs;

SyntaxParams random_params(std::mt19937& rng) {
  SyntaxParams p;
  p.slice = static_cast<SliceType>(rng() % 3);
  const int en = static_cast<int>(rng() % 4);
  p.saip_merge_enabled = en & 1;
  p.saip_mmvd_enabled = en & 2;
  p.max_secondary = 1 + static_cast<int>(rng() % 7);
  p.num_refs = 1 + static_cast<int>(rng() % 4);
  return p;
}

SyntaxCU random_syntax_cu(std::mt19937& rng, const SyntaxParams& p) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  SyntaxCU cu;
  if (p.slice == SliceType::I) {
    cu.mode = CuMode::Intra;
    return cu;
  }
  std::vector<CuMode> modes = {CuMode::Intra, CuMode::Skip, CuMode::Merge, CuMode::Amvp};
  if (p.saip_enabled()) modes.push_back(CuMode::Saip);
  cu.mode = modes[pick(static_cast<int>(modes.size()))];
  if (cu.mode == CuMode::Intra) return cu;
  if (p.slice == SliceType::B) cu.dir = static_cast<InterDir>(pick(3));
  switch (cu.mode) {
    case CuMode::Skip:
    case CuMode::Merge:
      cu.merge_idx = pick(kMergeListSize);
      break;
    case CuMode::Amvp:
      for (int l = 0; l < 2; ++l) {
        if (!uses_list(cu.dir, l)) continue;
        auto& a = cu.amvp[l];
        a.ref_idx = pick(p.num_refs);
        a.mvp_idx = pick(2);
        auto mvd = [&]() {
          const int mag = pick(4) == 0 ? pick(4097) : pick(9);
          return pick(2) ? -mag : mag;
        };
        a.mvd_x = mvd();
        a.mvd_y = mvd();
      }
      break;
    case CuMode::Saip: {
      cu.saip_flag = true;
      bool merge = p.saip_merge_enabled && (!p.saip_mmvd_enabled || pick(2));
      if (merge)
        cu.set_primary_index(pick(kMergeListSize));
      else
        cu.set_primary_index(kMergeListSize + pick(kPrimaryListSize - kMergeListSize));
      cu.saip_back_idx = pick(p.max_secondary);
      cu.saip_reverse_idx = pick(2);
      break;
    }
    default:
      break;
  }
  if (cu.mode != CuMode::Skip) cu.root_cbf = pick(2);
  return cu;
}

CoeffBlock random_sparse_block(std::mt19937& rng, int size) {
  CoeffBlock b(size, size, 0);
  const int n = static_cast<int>(rng() % static_cast<unsigned>(size * size / 2 + 1));
  for (int i = 0; i < n; ++i) {
    const int x = static_cast<int>(rng() % size), y = static_cast<int>(rng() % size);
    int mag;
    switch (rng() % 8) {
      case 0: mag = static_cast<int>(rng() % (kMaxCoeff + 1)); break;
      case 1:
      case 2: mag = static_cast<int>(rng() % 40); break;
      default: mag = 1 + static_cast<int>(rng() % 3);
    }
    b.at(x, y) = (rng() & 1) ? -mag : mag;
  }
  return b;
}

}  // namespace saip::testing
