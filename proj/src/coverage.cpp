#include "sdfplan/coverage.hpp"

namespace sdfplan {

namespace {

CoverageResult run_total_coverage(const SurfacePointSet& new_points,
                                  const SnappedBoundingBox& new_box,
                                  std::span<const AncestorObservation> ancestors,
                                  double prior_cov, size_t s_e_count, double eps,
                                  bool box_prune) {
    if (eps <= 0.0) throw InvalidInput("coverage eps must be positive");
    if (s_e_count == 0) throw InvalidInput("global surface point count must be positive");

    std::vector<char> removed(new_points.count(), 0);

    // The feature extractor is shared across ancestor heads: compute features
    // per point at most once.
    const EnvField* field = ancestors.empty() ? nullptr : &ancestors.front().sdf->field();
    const size_t fw = field ? field->feature_width() : 0;
    std::vector<double> features(new_points.count() * fw);
    std::vector<char> featured(new_points.count(), 0);

    for (const AncestorObservation& anc : ancestors) {
        if (&anc.sdf->field() != field)
            throw InvalidInput("ancestor heads must share one feature extractor");
        if (box_prune && !anc.box->intersects(new_box)) continue;
        for (size_t i = 0; i < new_points.count(); ++i) {
            if (removed[i]) continue;
            const Vec3& p = new_points.points[i];
            if (!anc.box->contains(p)) continue;
            double* feat = features.data() + i * fw;
            if (!featured[i]) {
                anc.sdf->field().features(p, {feat, fw});
                featured[i] = 1;
            }
            if (std::abs(anc.sdf->eval_on_features({feat, fw})) < eps) removed[i] = 1;
        }
    }

    CoverageResult result;
    for (const char r : removed)
        if (!r) ++result.surviving;
    result.coverage = prior_cov + static_cast<double>(result.surviving) /
                                      static_cast<double>(s_e_count);
    result.coverage = clamp(result.coverage, 0.0, 1.0);
    return result;
}

} // namespace

CoverageResult total_coverage(const SurfacePointSet& new_points,
                              const SnappedBoundingBox& new_box,
                              std::span<const AncestorObservation> ancestors, double prior_cov,
                              size_t s_e_count, double eps) {
    return run_total_coverage(new_points, new_box, ancestors, prior_cov, s_e_count, eps, true);
}

CoverageResult total_coverage_unpruned(const SurfacePointSet& new_points,
                                       const SnappedBoundingBox& new_box,
                                       std::span<const AncestorObservation> ancestors,
                                       double prior_cov, size_t s_e_count, double eps) {
    return run_total_coverage(new_points, new_box, ancestors, prior_cov, s_e_count, eps, false);
}

bool point_covered(const Vec3& p, std::span<const AncestorObservation> ancestors, double eps) {
    for (const AncestorObservation& anc : ancestors)
        if (anc.box->contains(p) && std::abs(anc.sdf->eval(p)) < eps) return true;
    return false;
}

} // namespace sdfplan
