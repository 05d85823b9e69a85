// core.hpp — small math types, deterministic RNG, error taxonomy and hashing
// shared by every module. Double precision throughout; float32 only appears at
// the checkpoint serialization boundary.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdfplan {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto exit codes (2 config, 3 data, 4 numeric).

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidInput : Error {       // bad arguments / violated preconditions
    using Error::Error;
};
struct DataError : Error {          // unreadable or malformed external data
    using Error::Error;
};
struct TrainingError : Error {      // numeric failure during optimization
    using Error::Error;
};
struct EmptyObservation : Error {   // depth image with zero hit pixels
    using Error::Error;
};
struct DegenerateField : Error {    // field with no extractable isosurface
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Vec3 / Aabb

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm_sq(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return n > 0.0 ? v / n : Vec3{0.0, 0.0, 0.0};
}
inline Vec3 cwise_min(const Vec3& a, const Vec3& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 cwise_max(const Vec3& a, const Vec3& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

struct Aabb {
    Vec3 min{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
             std::numeric_limits<double>::max()};
    Vec3 max{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
             std::numeric_limits<double>::lowest()};

    void expand(const Vec3& p) { min = cwise_min(min, p); max = cwise_max(max, p); }
    void expand(const Aabb& b) { min = cwise_min(min, b.min); max = cwise_max(max, b.max); }
    bool valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }
    Vec3 size() const { return max - min; }
    Vec3 center() const { return (min + max) * 0.5; }
    bool contains(const Vec3& p, double tol = 0.0) const {
        return p.x >= min.x - tol && p.x <= max.x + tol && p.y >= min.y - tol &&
               p.y <= max.y + tol && p.z >= min.z - tol && p.z <= max.z + tol;
    }
    bool intersects(const Aabb& b) const {
        return min.x <= b.max.x && max.x >= b.min.x && min.y <= b.max.y && max.y >= b.min.y &&
               min.z <= b.max.z && max.z >= b.min.z;
    }
    Vec3 clamp(const Vec3& p) const { return cwise_min(cwise_max(p, min), max); }
    // Squared distance from p to the box (0 inside).
    double dist_sq(const Vec3& p) const {
        double d = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double v = p[a];
            if (v < min[a]) d += (min[a] - v) * (min[a] - v);
            else if (v > max[a]) d += (v - max[a]) * (v - max[a]);
        }
        return d;
    }
};

// ---------------------------------------------------------------------------
// Rng — SplitMix64. Hand-rolled distributions so that sequences are identical
// across standard libraries and platforms; every seeded artifact in the
// toolkit is bit-reproducible.

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t uniform_int(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % n;
    }

    Vec3 uniform_in(const Aabb& b) {
        return {uniform(b.min.x, b.max.x), uniform(b.min.y, b.max.y), uniform(b.min.z, b.max.z)};
    }

    // Uniform direction on the unit sphere (area-preserving cylindrical map).
    Vec3 unit_vector() {
        const double z = uniform(-1.0, 1.0);
        const double phi = uniform(0.0, 2.0 * kPi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    // Uniform point in the unit ball (rejection).
    Vec3 in_unit_ball() {
        for (;;) {
            Vec3 p{uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
            if (norm_sq(p) <= 1.0) return p;
        }
    }

    // Fork an independent stream; used to give sub-tasks (per-node heads,
    // per-epoch shuffles) their own deterministic sequence.
    Rng fork(uint64_t salt) {
        return Rng(next_u64() ^ (salt * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull));
    }

private:
    uint64_t state_;
};

// ---------------------------------------------------------------------------
// FNV-1a 64-bit — payload checksums and config hashes.

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xCBF29CE484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::string to_hex(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) { s[static_cast<size_t>(i)] = digits[v & 0xF]; v >>= 4; }
    return s;
}

inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Shortest-arc difference a-b wrapped into [-pi, pi).
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

} // namespace sdfplan
