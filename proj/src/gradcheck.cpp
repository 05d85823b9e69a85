#include "sdfplan/gradcheck.hpp"

#include <unordered_map>

namespace sdfplan {

double gradcheck_hashgrid(HashGridEncoder& enc, Rng& rng, double fd_step) {
    const size_t width = enc.output_width();
    const Vec3 x = rng.uniform_in(enc.domain());
    std::vector<double> upstream(width);
    for (double& u : upstream) u = rng.uniform(-1.0, 1.0);

    std::vector<double> out(width);
    std::vector<HashGridEncoder::Touch> tape;
    enc.encode_with_tape(x, out, tape);

    std::vector<double> grad(enc.param_count(), 0.0);
    enc.accumulate_gradient(tape, upstream, grad);

    // Collapse tape entries onto unique parameter indices (collisions within
    // one query must sum before comparing).
    std::unordered_map<size_t, double> analytic;
    const auto f_per = static_cast<size_t>(enc.config().features_per_level);
    for (const auto& t : tape)
        for (size_t f = 0; f < f_per; ++f) analytic[t.row_base + f] = grad[t.row_base + f];

    const auto objective = [&]() {
        enc.encode(x, out);
        double dot = 0.0;
        for (size_t i = 0; i < width; ++i) dot += upstream[i] * out[i];
        return dot;
    };

    double worst = 0.0;
    for (const auto& [idx, g] : analytic) {
        double& p = enc.params()[idx];
        const double saved = p;
        p = saved + fd_step;
        const double hi = objective();
        p = saved - fd_step;
        const double lo = objective();
        p = saved;
        worst = std::max(worst, relative_error(g, (hi - lo) / (2.0 * fd_step)));
    }
    return worst;
}

double gradcheck_mlp(MlpHead& head, Rng& rng, double fd_step) {
    std::vector<double> features(static_cast<size_t>(head.input_width()));
    for (double& f : features) f = rng.uniform(-1.0, 1.0);

    MlpWorkspace ws;
    head.forward_cached(features, ws);
    std::vector<double> grad_params(head.param_count(), 0.0);
    std::vector<double> grad_features(features.size(), 0.0);
    head.backward(ws, 1.0, grad_params, grad_features);

    double worst = 0.0;
    for (size_t i = 0; i < head.param_count(); ++i) {
        double& p = head.params()[i];
        const double saved = p;
        p = saved + fd_step;
        const double hi = head.forward(features);
        p = saved - fd_step;
        const double lo = head.forward(features);
        p = saved;
        worst = std::max(worst, relative_error(grad_params[i], (hi - lo) / (2.0 * fd_step)));
    }
    for (size_t i = 0; i < features.size(); ++i) {
        const double saved = features[i];
        features[i] = saved + fd_step;
        const double hi = head.forward(features);
        features[i] = saved - fd_step;
        const double lo = head.forward(features);
        features[i] = saved;
        worst = std::max(worst, relative_error(grad_features[i], (hi - lo) / (2.0 * fd_step)));
    }
    return worst;
}

} // namespace sdfplan
