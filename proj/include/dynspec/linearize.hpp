#pragma once

#include <vector>

#include "dynspec/map_model.hpp"

namespace dynspec {

// Maximal interval of points whose first `level` branch indices follow the
// given word. Orientation records whether the map restricted to the cylinder
// is increasing (it equals the monotonicity of the first branch).
struct CylinderSet {
    std::vector<int> word;
    Interval interval;
    bool increasing = true;
};

// All B^level cylinders in lexicographic word order; endpoints by backward
// composition of branch inverses, so spatially adjacent cylinders share
// their endpoint values exactly. Rejects B^level > cap (LevelTooDeep).
std::vector<CylinderSet> cylinders(const SmoothFullBranchMap& f, int level, int cap = 4096);

// Piecewise linear map agreeing with f at every level-`level` cylinder
// endpoint: each cylinder becomes one affine branch mapping exactly onto the
// image cylinder one level up, so the result is Markov over the cylinder
// partition and validates as built.
PiecewiseLinearMarkovMap linearize(const SmoothFullBranchMap& f, int level, int cap = 4096);

}  // namespace dynspec
