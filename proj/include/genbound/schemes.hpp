#pragma once

#include "genbound/model.hpp"
#include "genbound/train_config.hpp"

namespace genbound {

struct ClipState {
    double g_min;
    explicit ClipState(double g_init = std::numeric_limits<double>::infinity())
        : g_min(g_init) {}
};

// One step of the running-minimum clipping rule. Inactive steps pass the
// gradient through untouched and leave the state alone. Active steps either
// shrink an over-long gradient to alpha * g_min (state unchanged) or accept a
// shorter one as the new minimum (gradient unchanged).
inline ParamVector clip_transform(ParamVector g, ClipState& state, bool active, double alpha) {
    if (!active) return g;
    double norm = g.norm();
    if (norm > state.g_min) {
        g *= alpha * state.g_min / norm;
    } else {
        state.g_min = norm;
    }
    return g;
}

namespace detail {

inline double batch_mean_loss(const Model& model, const ParamVector& w,
                              const std::vector<Example>& pool,
                              const std::vector<std::size_t>& batch) {
    double acc = 0.0;
    for (std::size_t idx : batch) acc += model.loss(w, pool[idx]);
    return acc / static_cast<double>(batch.size());
}

}  // namespace detail

// Perturbed-gradient blend with caller-supplied noise vectors. plain_grad must
// be the batch gradient at w. The default variant averages gradients at the
// perturbed weights; the abs variant adds gradient differences signed by
// whether the perturbation raised or lowered the batch loss.
inline ParamVector gmp_gradient_with_deltas(const Model& model, const ParamVector& w,
                                            const std::vector<Example>& pool,
                                            const std::vector<std::size_t>& batch,
                                            const GmpConfig& cfg, const ParamVector& plain_grad,
                                            const std::vector<ParamVector>& deltas) {
    cfg.validate();
    if (deltas.size() != cfg.k)
        throw std::invalid_argument("gmp_gradient: need exactly k noise vectors");
    if (cfg.rho == 0.0) return plain_grad;

    double scale = cfg.rho / static_cast<double>(cfg.k);
    if (!cfg.abs_variant) {
        ParamVector out = plain_grad;
        out *= 1.0 - cfg.rho;
        for (const ParamVector& delta : deltas) {
            ParamVector shifted = w + delta;
            ParamVector g = batch_grad(model, shifted, pool, batch);
            out.axpy(scale, g);
        }
        return out;
    }

    ParamVector out = plain_grad;
    double base_loss = detail::batch_mean_loss(model, w, pool, batch);
    for (const ParamVector& delta : deltas) {
        ParamVector shifted = w + delta;
        double diff = detail::batch_mean_loss(model, shifted, pool, batch) - base_loss;
        double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        if (sign == 0.0) continue;
        ParamVector g = batch_grad(model, shifted, pool, batch);
        g -= plain_grad;
        out.axpy(scale * sign, g);
    }
    return out;
}

// Stream-drawing front end: always consumes exactly k Gaussian vectors so a
// rho = 0 run stays bit-aligned with any other rho on the same seed.
inline ParamVector gmp_gradient(const Model& model, const ParamVector& w,
                                const std::vector<Example>& pool,
                                const std::vector<std::size_t>& batch, const GmpConfig& cfg,
                                const ParamVector& plain_grad, SeededStream& stream) {
    cfg.validate();
    double sigma = cfg.sigma;
    if (cfg.sigma_scaled)
        sigma *= std::sqrt(w.squared_norm() / static_cast<double>(w.dim()));
    std::vector<ParamVector> deltas;
    deltas.reserve(cfg.k);
    for (std::size_t j = 0; j < cfg.k; ++j)
        deltas.push_back(gaussian_vector(stream, w.dim(), sigma));
    return gmp_gradient_with_deltas(model, w, pool, batch, cfg, plain_grad, deltas);
}

}  // namespace genbound
