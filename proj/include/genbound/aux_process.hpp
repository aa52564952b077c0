#pragma once

#include "genbound/trainer.hpp"

namespace genbound {

// Simulates the noise-smoothed companion of a recorded plain-SGD run:
//   W~_t = W~_{t-1} - lr_t * g(W_{t-1}, B_t) + N_t
// where the gradients are recomputed at the *recorded* weights, and returns
// max_t |W~_t - (W_t + sum_{tau<=t} N_tau)|_inf. Algebraically the two sides
// coincide, so anything beyond accumulated rounding means the replay
// machinery (batch schedule, checkpoints, gradient evaluation) drifted from
// the run that produced the trace.
//
// Needs a checkpoint at every step 0..T; train with checkpoint_interval = 1.
inline double auxiliary_consistency(const Model& model, const Dataset& train,
                                    const TrainConfig& cfg, const TrainTrace& trace,
                                    const std::vector<ParamVector>& noise) {
    if (cfg.scheme != Scheme::plain)
        throw std::invalid_argument("auxiliary_consistency: plain SGD traces only");
    std::int64_t total = trace.total_steps;
    if (static_cast<std::int64_t>(noise.size()) != total)
        throw std::invalid_argument("auxiliary_consistency: need one noise vector per step");
    for (std::int64_t s = 0; s <= total; ++s)
        if (!trace.checkpoints.count(s))
            throw InsufficientTraceError("auxiliary_consistency: missing checkpoint at step " +
                                         std::to_string(s));

    BatchTrajectory traj(train.n(), cfg.batch_size, cfg.seed_batch);
    const std::size_t m = traj.batches_per_epoch();

    ParamVector shadow = trace.checkpoints.at(0);
    ParamVector noise_sum(model.dim());
    double worst = 0.0;

    std::int64_t t = 0;
    for (std::size_t epoch = 1; t < total; ++epoch) {
        auto batches = traj.batches(epoch);
        for (std::size_t k = 0; k < m && t < total; ++k) {
            ++t;
            const ParamVector& w_prev = trace.checkpoints.at(t - 1);
            ParamVector g = batch_grad(model, w_prev, train.examples, batches[k]);
            shadow.axpy(-cfg.lr.at(t), g);
            shadow += noise[static_cast<std::size_t>(t - 1)];
            noise_sum += noise[static_cast<std::size_t>(t - 1)];

            const ParamVector& w_t = trace.checkpoints.at(t);
            for (std::size_t i = 0; i < shadow.dim(); ++i) {
                double dev = std::fabs(shadow[i] - (w_t[i] + noise_sum[i]));
                worst = std::max(worst, dev);
            }
        }
    }
    return worst;
}

// Convenience overload drawing N_t ~ N(0, sigma_t^2 I) from a stream.
inline double auxiliary_consistency(const Model& model, const Dataset& train,
                                    const TrainConfig& cfg, const TrainTrace& trace,
                                    const std::vector<double>& sigmas, SeededStream& stream) {
    if (static_cast<std::int64_t>(sigmas.size()) != trace.total_steps)
        throw std::invalid_argument("auxiliary_consistency: need one sigma per step");
    std::vector<ParamVector> noise;
    noise.reserve(sigmas.size());
    for (double s : sigmas) noise.push_back(gaussian_vector(stream, model.dim(), s));
    return auxiliary_consistency(model, train, cfg, trace, noise);
}

}  // namespace genbound
