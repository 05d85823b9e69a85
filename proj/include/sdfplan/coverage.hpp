// coverage.hpp — incremental total-coverage accounting. A new node's surface
// points are tested against every ancestor observation: a point already seen
// by ancestor i (inside its box with |f_i| < eps) is removed, and the
// survivors extend the trajectory coverage by surviving / |S_E|.

#pragma once

#include "sdfplan/local_sdf.hpp"

namespace sdfplan {

struct CoverageResult {
    double coverage = 0.0;  // prior + surviving / s_e_count
    size_t surviving = 0;
};

struct AncestorObservation {
    const SnappedBoundingBox* box = nullptr;
    const LocalSdf* sdf = nullptr;
};

// Ancestors are evaluated in the given (root-first) order; ancestors whose
// box misses new_box are skipped, which cannot change the outcome because
// membership requires containment anyway.
CoverageResult total_coverage(const SurfacePointSet& new_points,
                              const SnappedBoundingBox& new_box,
                              std::span<const AncestorObservation> ancestors, double prior_cov,
                              size_t s_e_count, double eps);

// Reference variant without the box-intersection skip; the pruning-soundness
// checks compare against it.
CoverageResult total_coverage_unpruned(const SurfacePointSet& new_points,
                                       const SnappedBoundingBox& new_box,
                                       std::span<const AncestorObservation> ancestors,
                                       double prior_cov, size_t s_e_count, double eps);

// True when some ancestor claims the point; the covered/uncovered surface
// export uses this over S_E.
bool point_covered(const Vec3& p, std::span<const AncestorObservation> ancestors, double eps);

} // namespace sdfplan
