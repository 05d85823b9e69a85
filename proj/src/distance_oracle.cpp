#include "sdfplan/distance_oracle.hpp"

#include <numeric>

namespace sdfplan {

namespace {

constexpr size_t kLeafSize = 4;

// Closest point on a triangle (region walk, Ericson).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

// Moller-Trumbore with barycentric output.
bool ray_triangle_mt(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c,
                     double& t, double& u, double& v) {
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 pvec = cross(d, e2);
    const double det = dot(e1, pvec);
    if (std::abs(det) < 1e-16) return false;
    const double inv_det = 1.0 / det;
    const Vec3 tvec = o - a;
    u = dot(tvec, pvec) * inv_det;
    if (u < -1e-12 || u > 1.0 + 1e-12) return false;
    const Vec3 qvec = cross(tvec, e1);
    v = dot(d, qvec) * inv_det;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return false;
    t = dot(e2, qvec) * inv_det;
    return true;
}

bool ray_box(const Vec3& o, const Vec3& inv_d, const Aabb& b, double t_max) {
    double t0 = 0.0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
        const double near = (b.min[a] - o[a]) * inv_d[a];
        const double far = (b.max[a] - o[a]) * inv_d[a];
        t0 = std::max(t0, std::min(near, far));
        t1 = std::min(t1, std::max(near, far));
    }
    return t0 <= t1;
}

} // namespace

DistanceOracle::DistanceOracle(const TriangleMesh& mesh, SignMode mode)
    : mesh_(mesh), mode_(mode) {
    mesh_.validate();
    tri_order_.resize(mesh_.face_count());
    std::iota(tri_order_.begin(), tri_order_.end(), 0u);
    std::vector<Vec3> centroids(mesh_.face_count());
    for (size_t f = 0; f < mesh_.face_count(); ++f)
        centroids[f] =
            (mesh_.face_vertex(f, 0) + mesh_.face_vertex(f, 1) + mesh_.face_vertex(f, 2)) / 3.0;
    nodes_.reserve(2 * mesh_.face_count());
    build(tri_order_, centroids);
}

int32_t DistanceOracle::build(std::vector<uint32_t>& tris, std::vector<Vec3>& centroids) {
    struct Range { uint32_t first, count; int32_t node; };
    // Iterative build over [first, first+count) ranges of tri_order_.
    const auto tri_box = [&](uint32_t f) {
        Aabb b;
        b.expand(mesh_.face_vertex(f, 0));
        b.expand(mesh_.face_vertex(f, 1));
        b.expand(mesh_.face_vertex(f, 2));
        return b;
    };

    nodes_.push_back({});
    std::vector<Range> stack{{0, static_cast<uint32_t>(tris.size()), 0}};
    while (!stack.empty()) {
        const Range r = stack.back();
        stack.pop_back();
        Aabb box;
        for (uint32_t i = r.first; i < r.first + r.count; ++i) box.expand(tri_box(tris[i]));
        Node& node = nodes_[static_cast<size_t>(r.node)];
        node.box = box;
        if (r.count <= kLeafSize) {
            node.first = r.first;
            node.count = r.count;
            continue;
        }
        Aabb cbox;
        for (uint32_t i = r.first; i < r.first + r.count; ++i) cbox.expand(centroids[tris[i]]);
        const Vec3 ext = cbox.size();
        int axis = 0;
        if (ext.y > ext.x) axis = 1;
        if (ext.z > ext[axis]) axis = 2;
        const uint32_t mid = r.first + r.count / 2;
        std::nth_element(tris.begin() + r.first, tris.begin() + mid,
                         tris.begin() + r.first + r.count,
                         [&](uint32_t a, uint32_t b) { return centroids[a][axis] < centroids[b][axis]; });
        const auto li = static_cast<int32_t>(nodes_.size());
        nodes_.push_back({});
        const auto ri = static_cast<int32_t>(nodes_.size());
        nodes_.push_back({});
        nodes_[static_cast<size_t>(r.node)].left = li;
        nodes_[static_cast<size_t>(r.node)].right = ri;
        stack.push_back({r.first, mid - r.first, li});
        stack.push_back({mid, r.first + r.count - mid, ri});
    }
    return 0;
}

void DistanceOracle::closest_recursive(int32_t ni, const Vec3& p, Closest& best) const {
    const Node& n = nodes_[static_cast<size_t>(ni)];
    if (n.box.dist_sq(p) >= best.dist_sq) return;
    if (n.left < 0) {
        for (uint32_t i = n.first; i < n.first + n.count; ++i) {
            const uint32_t f = tri_order_[i];
            const Vec3 cp = closest_point_on_triangle(p, mesh_.face_vertex(f, 0),
                                                      mesh_.face_vertex(f, 1),
                                                      mesh_.face_vertex(f, 2));
            const double d_sq = norm_sq(p - cp);
            if (d_sq < best.dist_sq) best = {d_sq, cp, f};
        }
        return;
    }
    // Visit the nearer child first for tighter pruning.
    const double dl = nodes_[static_cast<size_t>(n.left)].box.dist_sq(p);
    const double dr = nodes_[static_cast<size_t>(n.right)].box.dist_sq(p);
    if (dl <= dr) {
        closest_recursive(n.left, p, best);
        closest_recursive(n.right, p, best);
    } else {
        closest_recursive(n.right, p, best);
        closest_recursive(n.left, p, best);
    }
}

double DistanceOracle::unsigned_distance(const Vec3& p) const {
    Closest best{std::numeric_limits<double>::max(), {}, 0};
    closest_recursive(0, p, best);
    return std::sqrt(best.dist_sq);
}

size_t DistanceOracle::count_crossings(const Vec3& p, const Vec3& d, bool& grazing) const {
    const Vec3 inv_d{1.0 / d.x, 1.0 / d.y, 1.0 / d.z};
    const double t_max = std::numeric_limits<double>::max();
    size_t crossings = 0;
    grazing = false;
    std::vector<int32_t> stack{0};
    while (!stack.empty()) {
        const Node& n = nodes_[static_cast<size_t>(stack.back())];
        stack.pop_back();
        if (!ray_box(p, inv_d, n.box, t_max)) continue;
        if (n.left >= 0) {
            stack.push_back(n.left);
            stack.push_back(n.right);
            continue;
        }
        for (uint32_t i = n.first; i < n.first + n.count; ++i) {
            const uint32_t f = tri_order_[i];
            double t, u, v;
            if (!ray_triangle_mt(p, d, mesh_.face_vertex(f, 0), mesh_.face_vertex(f, 1),
                                 mesh_.face_vertex(f, 2), t, u, v))
                continue;
            if (t <= 0.0) continue;
            const double w = 1.0 - u - v;
            if (u < 1e-10 || v < 1e-10 || w < 1e-10) {
                grazing = true;
                return crossings;
            }
            ++crossings;
        }
    }
    return crossings;
}

double DistanceOracle::parity_sign(const Vec3& p) const {
    static const Vec3 dirs[] = {
        normalized({0.5377397218899372, 0.6215772161575422, 0.5694328386694086}),
        normalized({-0.4182397111842271, 0.7312181120612819, 0.5391723947168813}),
        normalized({0.2812871301031264, -0.5190342917351294, 0.8071126405489214}),
        normalized({0.8204118152637442, 0.1378841133642113, -0.5548813950313147}),
    };
    for (const Vec3& d : dirs) {
        bool grazing = false;
        const size_t crossings = count_crossings(p, d, grazing);
        if (!grazing) return (crossings % 2 == 1) ? -1.0 : 1.0;
    }
    return 1.0;
}

double DistanceOracle::vote_sign(const Vec3& p, const Closest& best) const {
    // Vote across every triangle whose closest point ties with the winner;
    // ties happen on edges and vertices where a single face normal misleads.
    const double tie_sq = best.dist_sq + 2e-9 * std::sqrt(best.dist_sq) + 1e-18;
    double score = 0.0;
    std::vector<int32_t> stack{0};
    while (!stack.empty()) {
        const Node& n = nodes_[static_cast<size_t>(stack.back())];
        stack.pop_back();
        if (n.box.dist_sq(p) > tie_sq) continue;
        if (n.left >= 0) {
            stack.push_back(n.left);
            stack.push_back(n.right);
            continue;
        }
        for (uint32_t i = n.first; i < n.first + n.count; ++i) {
            const uint32_t f = tri_order_[i];
            const Vec3 a = mesh_.face_vertex(f, 0);
            const Vec3 cp = closest_point_on_triangle(p, a, mesh_.face_vertex(f, 1),
                                                      mesh_.face_vertex(f, 2));
            if (norm_sq(p - cp) > tie_sq) continue;
            const Vec3 fn = cross(mesh_.face_vertex(f, 1) - a, mesh_.face_vertex(f, 2) - a);
            score += dot(p - cp, normalized(fn));
        }
    }
    return score >= 0.0 ? 1.0 : -1.0;
}

double DistanceOracle::signed_distance(const Vec3& p) const {
    Closest best{std::numeric_limits<double>::max(), {}, 0};
    closest_recursive(0, p, best);
    const double dist = std::sqrt(best.dist_sq);
    const double sign = mode_ == SignMode::RayParity ? parity_sign(p) : vote_sign(p, best);
    return sign * dist;
}

std::optional<RayHit> DistanceOracle::ray_cast_hit(const Vec3& origin, const Vec3& dir,
                                                   double max_range) const {
    if (std::abs(norm(dir) - 1.0) > 1e-9) throw InvalidInput("ray direction must be normalized");
    const Vec3 inv_d{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    std::optional<RayHit> best;
    double t_max = max_range;
    std::vector<int32_t> stack{0};
    while (!stack.empty()) {
        const Node& n = nodes_[static_cast<size_t>(stack.back())];
        stack.pop_back();
        if (!ray_box(origin, inv_d, n.box, t_max)) continue;
        if (n.left >= 0) {
            stack.push_back(n.left);
            stack.push_back(n.right);
            continue;
        }
        for (uint32_t i = n.first; i < n.first + n.count; ++i) {
            const uint32_t f = tri_order_[i];
            double t, u, v;
            if (ray_triangle_mt(origin, dir, mesh_.face_vertex(f, 0), mesh_.face_vertex(f, 1),
                                mesh_.face_vertex(f, 2), t, u, v) &&
                t > 1e-12 && t <= t_max) {
                best = RayHit{t, f};
                t_max = t;
            }
        }
    }
    return best;
}

std::optional<double> DistanceOracle::ray_cast(const Vec3& origin, const Vec3& dir,
                                               double max_range) const {
    const auto hit = ray_cast_hit(origin, dir, max_range);
    if (!hit) return std::nullopt;
    return hit->t;
}

} // namespace sdfplan
