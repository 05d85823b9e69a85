// gradcheck.hpp — central finite-difference verification of analytic
// gradients. Used by the verification command and the test suites; kept
// independent of the training path it checks (it probes parameters directly).

#pragma once

#include "sdfplan/hash_grid.hpp"
#include "sdfplan/mlp.hpp"

namespace sdfplan {

// rel = |a - b| / max(|a|, |b|, floor)
inline double relative_error(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Checks d(dot(upstream, encode(x)))/d(theta) on every touched table row of a
// random query; returns the worst relative error.
double gradcheck_hashgrid(HashGridEncoder& enc, Rng& rng, double fd_step = 1e-5);

// Checks d(output)/d(param) for every head parameter and d(output)/d(feature)
// for every input feature on a random configuration.
double gradcheck_mlp(MlpHead& head, Rng& rng, double fd_step = 1e-5);

} // namespace sdfplan
