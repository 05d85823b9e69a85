#include <doctest.h>

#include <fstream>

#include "sdfplan/adamw.hpp"
#include "sdfplan/checkpoint.hpp"
#include "sdfplan/gradcheck.hpp"
#include "sdfplan/hash_grid.hpp"
#include "sdfplan/mlp.hpp"
#include "sdfplan/oneblob.hpp"

using namespace sdfplan;

namespace {
const Aabb kUnit{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
}

// ---------------------------------------------------------------------------
// OneBlob

TEST_CASE("oneblob output shape and range") {
    const OneBlobEncoder enc(7, kUnit);
    std::vector<double> out(enc.output_width());
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        enc.encode(rng.uniform_in(kUnit), out);
        for (double v : out) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("oneblob peaks at the bin center") {
    const int k = 5;
    const OneBlobEncoder enc(k, kUnit);
    std::vector<double> out(enc.output_width());
    const int j = 2;
    const double center = (j + 0.5) / k;
    enc.encode({center, 0.1, 0.9}, out);
    for (int b = 0; b < k; ++b)
        if (b != j) CHECK(out[static_cast<size_t>(j)] > out[static_cast<size_t>(b)]);
    CHECK(out[static_cast<size_t>(j)] == doctest::Approx(1.0));
}

TEST_CASE("oneblob symmetry reverses the activation vector") {
    const int k = 6;
    const OneBlobEncoder enc(k, kUnit);
    std::vector<double> a(enc.output_width()), b(enc.output_width());
    const double u = 0.22;
    enc.encode({u, 0.5, 0.5}, a);
    enc.encode({1.0 - u, 0.5, 0.5}, b);
    for (int i = 0; i < k; ++i)
        CHECK(a[static_cast<size_t>(i)] ==
              doctest::Approx(b[static_cast<size_t>(k - 1 - i)]).epsilon(1e-12));
}

TEST_CASE("oneblob matches the direct formula") {
    const int k = 7;
    const OneBlobEncoder enc(k, kUnit);
    std::vector<double> out(enc.output_width());
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 x = rng.uniform_in(kUnit);
        enc.encode(x, out);
        const double sigma = 1.0 / k;
        for (int axis = 0; axis < 3; ++axis) {
            for (int j = 0; j < k; ++j) {
                const double t = (x[axis] - (j + 0.5) / k) / sigma;
                CHECK(out[static_cast<size_t>(axis * k + j)] ==
                      doctest::Approx(std::exp(-0.5 * t * t)).epsilon(1e-12));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Hash grid

namespace {

HashGridConfig tiny_grid_config() {
    HashGridConfig cfg;
    cfg.levels = 4;
    cfg.features_per_level = 2;
    cfg.table_size_log2 = 9;
    cfg.base_resolution = 3;
    cfg.growth = 1.7;
    return cfg;
}

// Naive re-derivation of the encoding: same definition, written directly from
// the interpolation formula without the tape machinery.
std::vector<double> naive_encode(const HashGridEncoder& enc, const Vec3& x) {
    const HashGridConfig& cfg = enc.config();
    const Aabb& box = enc.domain();
    std::vector<double> out(enc.output_width(), 0.0);
    const Vec3 p = box.clamp(x);
    for (int l = 0; l < cfg.levels; ++l) {
        const int res = enc.level_resolution(l);
        double u[3], frac[3];
        int64_t base[3];
        for (int a = 0; a < 3; ++a) {
            u[a] = (p[a] - box.min[a]) / (box.max[a] - box.min[a]);
            const double pos = u[a] * res;
            base[a] = std::min<int64_t>(std::max<int64_t>((int64_t)std::floor(pos), 0), res - 1);
            frac[a] = pos - (double)base[a];
        }
        const size_t table = cfg.table_size();
        const size_t level_offset = (size_t)l * table * (size_t)cfg.features_per_level;
        const bool dense = (size_t)(res + 1) * (res + 1) * (res + 1) <= table;
        for (int dx = 0; dx <= 1; ++dx)
            for (int dy = 0; dy <= 1; ++dy)
                for (int dz = 0; dz <= 1; ++dz) {
                    const int64_t i = base[0] + dx, j = base[1] + dy, k = base[2] + dz;
                    size_t idx;
                    if (dense) {
                        idx = ((size_t)i * (res + 1) + (size_t)j) * (res + 1) + (size_t)k;
                    } else {
                        idx = ((uint32_t)i * HashGridEncoder::kPrimes[0] ^
                               (uint32_t)j * HashGridEncoder::kPrimes[1] ^
                               (uint32_t)k * HashGridEncoder::kPrimes[2]) &
                              (table - 1);
                    }
                    const double w = (dx ? frac[0] : 1 - frac[0]) * (dy ? frac[1] : 1 - frac[1]) *
                                     (dz ? frac[2] : 1 - frac[2]);
                    for (int f = 0; f < cfg.features_per_level; ++f)
                        out[(size_t)l * cfg.features_per_level + (size_t)f] +=
                            w * enc.params()[level_offset + idx * cfg.features_per_level +
                                             (size_t)f];
                }
    }
    return out;
}

} // namespace

TEST_CASE("hash grid on a corner returns the stored feature row") {
    HashGridConfig cfg = tiny_grid_config();
    cfg.levels = 1;
    cfg.base_resolution = 4; // dense level: 125 corners < 512 rows
    HashGridEncoder enc(cfg, kUnit);
    Rng rng(3);
    enc.init_params(rng, 0.5);
    // corner (1, 2, 3) of the level-0 grid at resolution 4
    const Vec3 x{1.0 / 4.0, 2.0 / 4.0, 3.0 / 4.0};
    std::vector<double> out(enc.output_width());
    enc.encode(x, out);
    const size_t idx = ((size_t)1 * 5 + 2) * 5 + 3;
    CHECK(out[0] == doctest::Approx(enc.params()[idx * 2]).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(enc.params()[idx * 2 + 1]).epsilon(1e-12));
}

TEST_CASE("hash grid at a cell center averages the 8 corners") {
    HashGridConfig cfg = tiny_grid_config();
    cfg.levels = 1;
    cfg.base_resolution = 2;
    HashGridEncoder enc(cfg, kUnit);
    Rng rng(4);
    enc.init_params(rng, 0.5);
    const Vec3 center{0.25, 0.25, 0.25}; // center of cell (0,0,0) at resolution 2
    std::vector<double> out(enc.output_width());
    enc.encode(center, out);
    double mean0 = 0.0;
    for (int dx = 0; dx <= 1; ++dx)
        for (int dy = 0; dy <= 1; ++dy)
            for (int dz = 0; dz <= 1; ++dz) {
                const size_t idx = ((size_t)dx * 3 + (size_t)dy) * 3 + (size_t)dz;
                mean0 += enc.params()[idx * 2] / 8.0;
            }
    CHECK(out[0] == doctest::Approx(mean0).epsilon(1e-12));
}

TEST_CASE("hash grid matches the naive corner enumeration") {
    HashGridEncoder enc(tiny_grid_config(), kUnit);
    Rng rng(5);
    enc.init_params(rng, 0.5);
    std::vector<double> out(enc.output_width());
    for (int i = 0; i < 100; ++i) {
        const Vec3 x = rng.uniform_in(kUnit);
        enc.encode(x, out);
        const std::vector<double> expect = naive_encode(enc, x);
        for (size_t f = 0; f < out.size(); ++f)
            CHECK(out[f] == doctest::Approx(expect[f]).epsilon(1e-12));
    }
}

TEST_CASE("hash grid encoding is continuous in the input") {
    HashGridEncoder enc(tiny_grid_config(), kUnit);
    Rng rng(6);
    enc.init_params(rng, 0.5);
    std::vector<double> a(enc.output_width()), b(enc.output_width());
    double max_feat = 0.0;
    for (double p : enc.params()) max_feat = std::max(max_feat, std::abs(p));
    for (int i = 0; i < 200; ++i) {
        const Vec3 x{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
        const double delta = 1e-5;
        const Vec3 x2{x.x + delta, x.y, x.z};
        enc.encode(x, a);
        enc.encode(x2, b);
        for (int l = 0; l < enc.config().levels; ++l) {
            const double bound =
                2.0 * enc.level_resolution(l) * max_feat * delta + 1e-12; // Lipschitz in-cell
            for (int f = 0; f < enc.config().features_per_level; ++f) {
                const size_t k = (size_t)l * 2 + (size_t)f;
                CHECK(std::abs(a[k] - b[k]) <= bound);
            }
        }
    }
}

TEST_CASE("hash grid backward: zero upstream, corner collapse, finite differences") {
    HashGridEncoder enc(tiny_grid_config(), kUnit);
    Rng rng(7);
    enc.init_params(rng, 0.5);

    std::vector<double> out(enc.output_width());
    std::vector<HashGridEncoder::Touch> tape;
    enc.encode_with_tape({0.3, 0.6, 0.9}, out, tape);

    SUBCASE("zero upstream gives a zero gradient") {
        std::vector<double> grad(enc.param_count(), 0.0);
        const std::vector<double> upstream(enc.output_width(), 0.0);
        enc.accumulate_gradient(tape, upstream, grad);
        for (const auto& t : tape) CHECK(grad[t.row_base] == 0.0);
    }

    SUBCASE("a corner point touches one row per level with weight 1") {
        HashGridConfig cfg = tiny_grid_config();
        cfg.levels = 1;
        cfg.base_resolution = 4;
        HashGridEncoder dense(cfg, kUnit);
        dense.init_params(rng, 0.5);
        std::vector<double> o(dense.output_width());
        std::vector<HashGridEncoder::Touch> tp;
        dense.encode_with_tape({0.25, 0.5, 0.75}, o, tp);
        int nonzero = 0;
        for (const auto& t : tp)
            if (t.weight > 1e-15) {
                ++nonzero;
                CHECK(t.weight == doctest::Approx(1.0).epsilon(1e-12));
            }
        CHECK(nonzero == 1);
    }

    SUBCASE("analytic gradient matches central finite differences") {
        Rng check_rng(8);
        for (int i = 0; i < 10; ++i) CHECK(gradcheck_hashgrid(enc, check_rng) < 1e-4);
    }
}

// ---------------------------------------------------------------------------
// MLP

TEST_CASE("mlp zero parameters give zero output") {
    MlpHead head({5, 4, 1});
    std::vector<double> f(5, 1.3);
    CHECK(head.forward(f) == 0.0);
}

TEST_CASE("mlp identity single layer") {
    MlpHead head({1, 1});
    head.params()[0] = 1.0; // weight
    head.params()[1] = 0.0; // bias
    std::vector<double> f{0.7321};
    CHECK(head.forward(f) == doctest::Approx(0.7321));
}

TEST_CASE("mlp matches a hand-computed matrix chain") {
    MlpHead head({2, 3, 1});
    Rng rng(9);
    head.init_params(rng);
    const std::vector<double> x{0.4, -1.2};
    // layer 0: W (3x2) rows then b (3); layer 1: W (1x3) then b (1)
    const double* w0 = head.params().data();
    const double* b0 = w0 + 6;
    const double* w1 = b0 + 3;
    const double* b1 = w1 + 3;
    double h[3];
    for (int o = 0; o < 3; ++o)
        h[o] = MlpHead::softplus(w0[o * 2] * x[0] + w0[o * 2 + 1] * x[1] + b0[o]);
    const double expect = w1[0] * h[0] + w1[1] * h[1] + w1[2] * h[2] + b1[0];
    CHECK(head.forward(x) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mlp rejects short feature vectors") {
    MlpHead head({5, 1});
    std::vector<double> f(3, 0.0);
    CHECK_THROWS_AS(head.forward(f), InvalidInput);
}

TEST_CASE("mlp backward: zero upstream, linear head, finite differences") {
    SUBCASE("zero upstream gives zero gradients") {
        MlpHead head({3, 4, 1});
        Rng rng(10);
        head.init_params(rng);
        MlpWorkspace ws;
        const std::vector<double> f{0.1, 0.2, 0.3};
        head.forward_cached(f, ws);
        std::vector<double> gp(head.param_count(), 0.0), gf(3, 0.0);
        head.backward(ws, 0.0, gp, gf);
        for (double g : gp) CHECK(g == 0.0);
        for (double g : gf) CHECK(g == 0.0);
    }
    SUBCASE("linear head gradient equals the features") {
        MlpHead head({4, 1});
        Rng rng(11);
        head.init_params(rng);
        MlpWorkspace ws;
        const std::vector<double> f{0.5, -0.25, 2.0, 1.0};
        head.forward_cached(f, ws);
        std::vector<double> gp(head.param_count(), 0.0);
        head.backward(ws, 2.0, gp, {});
        for (int i = 0; i < 4; ++i)
            CHECK(gp[static_cast<size_t>(i)] ==
                  doctest::Approx(2.0 * f[static_cast<size_t>(i)]).epsilon(1e-12));
        CHECK(gp[4] == doctest::Approx(2.0)); // bias
    }
    SUBCASE("finite-difference sweep over random heads") {
        Rng rng(12);
        for (int trial = 0; trial < 10; ++trial) {
            MlpHead head({6, 8, 5, 1});
            head.init_params(rng);
            CHECK(gradcheck_mlp(head, rng) < 1e-4);
        }
    }
}

TEST_CASE("exact parameter-count targets") {
    MlpHead h505 = MlpHead::with_param_target(37, 505);
    CHECK(h505.param_count() == 505);
    CHECK(h505.widths() == std::vector<int>{37, 8, 20, 1});

    MlpHead h761 = MlpHead::with_param_target(37, 761);
    CHECK(h761.param_count() == 761);
    CHECK(h761.widths() == std::vector<int>{37, 17, 6, 1});

    CHECK_THROWS_AS(MlpHead::with_param_target(37, 40), InvalidInput);
}

// ---------------------------------------------------------------------------
// AdamW

TEST_CASE("adamw zero gradient and zero decay leave parameters unchanged") {
    AdamWParams hp;
    hp.weight_decay = 0.0;
    AdamW opt(3, hp);
    std::vector<double> p{1.0, -2.0, 0.5};
    const std::vector<double> g(3, 0.0);
    opt.step(p, g);
    CHECK(p == std::vector<double>{1.0, -2.0, 0.5});
}

TEST_CASE("adamw descends a quadratic") {
    AdamWParams hp;
    hp.lr = 3e-3;
    hp.weight_decay = 0.0;
    AdamW opt(1, hp);
    std::vector<double> w{1.0};
    double prev = 1.0;
    bool monotone = true;
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> g{2.0 * w[0]};
        opt.step(w, g);
        if (std::abs(w[0]) > std::abs(prev) + 1e-12) monotone = false;
        prev = w[0];
    }
    CHECK(monotone);
    CHECK(std::abs(w[0]) < 1.0);
}

TEST_CASE("adamw matches a reference trace of the published update rule") {
    AdamWParams hp; // lr 3e-3, betas 0.9/0.999, eps 1e-8, wd 1e-2
    AdamW opt(2, hp);
    std::vector<double> p{0.5, -1.5};
    // independent reference implementation
    double rp[2] = {0.5, -1.5}, m[2] = {0, 0}, v[2] = {0, 0};
    Rng rng(13);
    for (int t = 1; t <= 20; ++t) {
        std::vector<double> g{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        opt.step(p, g);
        for (int i = 0; i < 2; ++i) {
            m[i] = hp.beta1 * m[i] + (1 - hp.beta1) * g[static_cast<size_t>(i)];
            v[i] = hp.beta2 * v[i] + (1 - hp.beta2) * g[static_cast<size_t>(i)] *
                                         g[static_cast<size_t>(i)];
            const double mh = m[i] / (1 - std::pow(hp.beta1, t));
            const double vh = v[i] / (1 - std::pow(hp.beta2, t));
            rp[i] -= hp.lr * (mh / (std::sqrt(vh) + hp.eps) + hp.weight_decay * rp[i]);
        }
    }
    CHECK(std::abs(p[0] - rp[0]) < 1e-9);
    CHECK(std::abs(p[1] - rp[1]) < 1e-9);
}

TEST_CASE("adamw rejects non-finite gradients") {
    AdamW opt(1, {});
    std::vector<double> p{1.0};
    const std::vector<double> g{std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(opt.step(p, g), TrainingError);
}

// ---------------------------------------------------------------------------
// Checkpoints

TEST_CASE("checkpoint round trip is bit-exact") {
    const std::string path = "/tmp/sdfplan_test_ckpt.bin";
    Rng rng(14);
    std::vector<double> params(257);
    for (double& p : params) p = rng.uniform(-2.0, 2.0);
    save_checkpoint(path, {{"kind", "test"}}, params);
    const Checkpoint a = load_checkpoint(path);
    CHECK(a.params.size() == params.size());

    // re-saving the loaded parameters reproduces the same payload
    const std::string path2 = "/tmp/sdfplan_test_ckpt2.bin";
    save_checkpoint(path2, {{"kind", "test"}}, a.params);
    const Checkpoint b = load_checkpoint(path2);
    for (size_t i = 0; i < a.params.size(); ++i) CHECK(a.params[i] == b.params[i]);
    CHECK(a.header.at("payload_fnv1a64") == b.header.at("payload_fnv1a64"));
}

TEST_CASE("corrupted checkpoint fails the checksum") {
    const std::string path = "/tmp/sdfplan_test_ckpt3.bin";
    std::vector<double> params(64, 0.25);
    save_checkpoint(path, {{"kind", "test"}}, params);
    // flip one payload byte
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-1, std::ios::end);
    f.put('\x7f');
    f.close();
    CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("checksum"), DataError);
}
