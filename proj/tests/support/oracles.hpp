#pragma once

// Independent reference implementations used as test oracles. They follow
// the textbook definitions directly and favour clarity over speed.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "saip/core.hpp"
#include "saip/mvc.hpp"
#include "saip/reference_store.hpp"

namespace saip::testing {

// Gradient magnitude of a replicate-padded window around (x, y) using an
// explicit n x n Prewitt matrix: first row -1, last row +1, zeros between,
// together with its transpose.
int oracle_gradient(const MaskPlane& m, int x, int y, int n);

// Edge category straight from the gradient definitions.
int oracle_category(const MaskPlane& m, int x, int y);

// Blend of one pixel with weights as exact fractions, rounded half up.
int oracle_blend(int p_primary, int p_secondary, int mask_bit, int category);

// Hadamard SATD via explicit matrix products, 8x8 tiles halved, 4x4 tiles
// where 8 does not divide the size.
std::int64_t oracle_satd(const Plane& a, const Plane& b);

// A reference picture with a mask and a current picture to code, plus a
// motion grid with random neighbour motion around `cu`.
struct CuScene {
  ReferenceStore store;
  Frame orig;
  mvc::MotionGrid grid;
  BlockArea cu;
  std::array<mvc::CandidateLists, 2> cands;
  // Motion used to compose the current picture: `primary` where the
  // translated mask is set, the integer part of `secondary` elsewhere.
  MotionVector primary;
  MotionVector secondary;
};

// `cu` must lie inside a `size` x `size` picture. With `two_motion` set the
// current picture is composed from two displaced copies of the reference
// split by the reference mask, so SAIP has something to find. Neighbour
// motion is drawn at random from a small pool, or with
// `consistent_neighbours` follows the region each anchor lies in (with an
// occasional outlier), as in real content.
CuScene make_scene(std::mt19937& rng, int size, const BlockArea& cu, bool two_motion = true,
                   bool consistent_neighbours = false);

}  // namespace saip::testing
