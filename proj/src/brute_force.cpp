#include "sdfplan/brute_force.hpp"

namespace sdfplan::brute {

namespace {

double point_segment_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len_sq = norm_sq(ab);
    if (len_sq == 0.0) return norm_sq(p - a);
    const double t = clamp(dot(p - a, ab) / len_sq, 0.0, 1.0);
    return norm_sq(p - (a + ab * t));
}

} // namespace

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = cross(b - a, c - a);
    const double n_sq = norm_sq(n);
    if (n_sq > 0.0) {
        // Barycentric coordinates of the plane projection.
        const Vec3 ap = p - a;
        const double u = dot(cross(b - a, ap), n) / n_sq; // weight of c
        const double v = dot(cross(ap, c - a), n) / n_sq; // weight of b
        const double w = 1.0 - u - v;                     // weight of a
        if (u >= 0.0 && v >= 0.0 && w >= 0.0) {
            const double dist_plane = dot(ap, n) / std::sqrt(n_sq);
            return std::abs(dist_plane);
        }
    }
    const double d_sq = std::min({point_segment_distance_sq(p, a, b),
                                  point_segment_distance_sq(p, b, c),
                                  point_segment_distance_sq(p, c, a)});
    return std::sqrt(d_sq);
}

double unsigned_distance(const TriangleMesh& mesh, const Vec3& p) {
    double best = std::numeric_limits<double>::max();
    for (size_t f = 0; f < mesh.faces.size(); ++f)
        best = std::min(best, point_triangle_distance(p, mesh.face_vertex(f, 0),
                                                      mesh.face_vertex(f, 1),
                                                      mesh.face_vertex(f, 2)));
    return best;
}

std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                                   const Vec3& c, double eps) {
    const Vec3 n = cross(b - a, c - a);
    const double denom = dot(d, n);
    if (std::abs(denom) < 1e-16) return std::nullopt; // parallel
    const double t = dot(a - o, n) / denom;
    if (t <= eps) return std::nullopt;
    const Vec3 q = o + d * t;
    // Same-side tests against each edge.
    const double s0 = dot(cross(b - a, q - a), n);
    const double s1 = dot(cross(c - b, q - b), n);
    const double s2 = dot(cross(a - c, q - c), n);
    const double tol = -1e-13 * norm_sq(n);
    if (s0 >= tol && s1 >= tol && s2 >= tol) return t;
    return std::nullopt;
}

std::optional<double> ray_cast(const TriangleMesh& mesh, const Vec3& o, const Vec3& d,
                               double max_range) {
    std::optional<double> best;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto t = ray_triangle(o, d, mesh.face_vertex(f, 0), mesh.face_vertex(f, 1),
                                    mesh.face_vertex(f, 2));
        if (t && *t <= max_range && (!best || *t < *best)) best = t;
    }
    return best;
}

double parity_sign(const TriangleMesh& mesh, const Vec3& p) {
    // Slightly irrational directions to avoid exact edge/vertex grazing.
    static const Vec3 dirs[] = {
        normalized({0.5377397218899372, 0.6215772161575422, 0.5694328386694086}),
        normalized({-0.4182397111842271, 0.7312181120612819, 0.5391723947168813}),
        normalized({0.2812871301031264, -0.5190342917351294, 0.8071126405489214}),
    };
    for (const Vec3& d : dirs) {
        size_t crossings = 0;
        bool grazing = false;
        for (size_t f = 0; f < mesh.faces.size() && !grazing; ++f) {
            const Vec3 a = mesh.face_vertex(f, 0), b = mesh.face_vertex(f, 1),
                       c = mesh.face_vertex(f, 2);
            const Vec3 n = cross(b - a, c - a);
            const double denom = dot(d, n);
            if (std::abs(denom) < 1e-12 * norm(n)) continue;
            const double t = dot(a - p, n) / denom;
            if (t <= 0.0) continue;
            const Vec3 q = p + d * t;
            const double s0 = dot(cross(b - a, q - a), n);
            const double s1 = dot(cross(c - b, q - b), n);
            const double s2 = dot(cross(a - c, q - c), n);
            const double edge_tol = 1e-10 * norm_sq(n);
            if (s0 > edge_tol && s1 > edge_tol && s2 > edge_tol) {
                ++crossings;
            } else if (s0 > -edge_tol && s1 > -edge_tol && s2 > -edge_tol) {
                grazing = true; // too close to an edge to trust parity
            }
        }
        if (!grazing) return (crossings % 2 == 1) ? -1.0 : 1.0;
    }
    return 1.0; // every direction grazed; treat as outside
}

double signed_distance(const TriangleMesh& mesh, const Vec3& p) {
    return parity_sign(mesh, p) * unsigned_distance(mesh, p);
}

} // namespace sdfplan::brute
