#pragma once

#include <algorithm>
#include <random>

#include "predprey/params.hpp"

namespace predprey::testing {

// Deterministic draw of parameters satisfying the admissibility conditions.
// mu_mode: 0 -> mu = 0, 1 -> mu > 0 (a positive fraction of its cap).
inline ModelParams random_valid_params(std::mt19937& rng, int mu_mode) {
    std::uniform_real_distribution<double> un(0.0, 1.0);
    ModelParams p;
    p.a = 1.2 + 2.0 * un(rng);
    p.h = 0.05 + 0.9 * un(rng);
    p.k = 0.05 + 0.9 * un(rng);
    p.b = (0.05 + 0.85 * un(rng)) / (2.0 * (p.a - 1.0));
    p.r1 = 0.3 + 2.0 * un(rng);
    p.r2 = 0.3 + 2.0 * un(rng);
    p.r3 = 0.3 + 2.0 * un(rng);
    p.d1 = 0.2 + 2.0 * un(rng);
    p.d2 = 0.2 + 2.0 * un(rng);
    p.d3 = 0.2 + 2.0 * un(rng);
    p.mu = mu_mode == 0
               ? 0.0
               : (0.05 + 0.9 * un(rng)) * 0.5 * (p.a - 1.0) * std::min(p.r1, p.r2);
    return p;
}

} // namespace predprey::testing
