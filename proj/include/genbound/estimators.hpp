#pragma once

#include <fstream>

#include "genbound/csv.hpp"
#include "genbound/models.hpp"
#include "genbound/trainer.hpp"

namespace genbound {

struct EstimatorResult {
    double value = 0.0;
    double stderr_ = std::numeric_limits<double>::quiet_NaN();
    std::size_t samples = 0;
};

// Mean gradient over the whole set, in index order. Deliberately the same
// accumulation as batch_grad so that a batch equal to the full set produces a
// bitwise-identical vector and therefore exactly zero dispersion.
inline ParamVector reference_mean_gradient(const Model& model, const ParamVector& w,
                                           const std::vector<Example>& examples) {
    return batch_grad(model, w, examples);
}

// Squared deviation of one mini-batch gradient from the reference mean.
inline double dispersion(const Model& model, const ParamVector& w,
                         const std::vector<Example>& pool,
                         const std::vector<std::size_t>& batch, const ParamVector& reference) {
    ParamVector g = batch_grad(model, w, pool, batch);
    g -= reference;
    return g.squared_norm();
}

// Multi-seed variant: weights[k] and batches[k] come from independent runs
// aligned at the same step. The reference is the mean of the per-run full-set
// gradients, so batch deviations include the spread of the trajectories
// themselves, not just within-run sampling noise.
inline double dispersion_multi_seed(const Model& model, const std::vector<ParamVector>& weights,
                                    const std::vector<std::vector<std::size_t>>& batches,
                                    const std::vector<Example>& pool) {
    if (weights.empty() || weights.size() != batches.size())
        throw std::invalid_argument("dispersion_multi_seed: need one batch per weight vector");
    ParamVector reference(model.dim());
    for (const ParamVector& w : weights) reference += reference_mean_gradient(model, w, pool);
    reference *= 1.0 / static_cast<double>(weights.size());

    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        ParamVector g = batch_grad(model, weights[k], pool, batches[k]);
        g -= reference;
        acc += g.squared_norm();
    }
    return acc / static_cast<double>(weights.size());
}

// Mean squared shift of the reference gradient under a Gaussian weight kick
// with the given accumulated variance.
inline EstimatorResult sensitivity_psi(const Model& model, const ParamVector& w,
                                       const std::vector<Example>& pool, double cum_var,
                                       std::size_t k, SeededStream& stream) {
    if (!(cum_var >= 0.0) || !std::isfinite(cum_var))
        throw std::invalid_argument("sensitivity_psi: cum_var must be finite and >= 0");
    if (k < 1) throw std::invalid_argument("sensitivity_psi: need k >= 1");
    ParamVector base = reference_mean_gradient(model, w, pool);
    double sd = std::sqrt(cum_var);

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        ParamVector shifted_w = w + gaussian_vector(stream, w.dim(), sd);
        ParamVector g = reference_mean_gradient(model, shifted_w, pool);
        g -= base;
        double v = g.squared_norm();
        sum += v;
        sum_sq += v * v;
    }
    EstimatorResult out;
    out.samples = k;
    out.value = sum / static_cast<double>(k);
    if (k > 1) {
        double var = (sum_sq - sum * sum / static_cast<double>(k)) / static_cast<double>(k - 1);
        out.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(k));
    }
    return out;
}

namespace detail {

// q = v^T H v for the mean-loss Hessian, via a central difference of the mean
// gradient along v. Exact for quadratics since the third derivative vanishes.
inline double hvp_quadratic_form(const Model& model, const ParamVector& w,
                                 const std::vector<Example>& examples, const ParamVector& v,
                                 double eps) {
    ParamVector up = w;
    up.axpy(eps, v);
    ParamVector down = w;
    down.axpy(-eps, v);
    ParamVector diff = batch_grad(model, up, examples);
    diff -= batch_grad(model, down, examples);
    double q = v.dot(diff) / (2.0 * eps);
    if (!std::isfinite(q)) throw NumericError("hutchinson_trace: non-finite quadratic form");
    return q;
}

inline bool probe_clears_kinks(const Model& model, const ParamVector& w,
                               const std::vector<Example>& examples, const ParamVector& v,
                               double eps, double margin) {
    for (int side = 0; side < 2; ++side) {
        ParamVector probe = w;
        probe.axpy(side == 0 ? eps : -eps, v);
        for (const Example& z : examples) {
            double m = model.kink_margin(probe, z);
            if (std::isinf(m)) return true;  // kink-free model, nothing to check
            if (m < margin) return false;
        }
    }
    return true;
}

}  // namespace detail

// Hutchinson estimate of the mean-loss Hessian trace with Rademacher probes.
// Probes whose +-eps evaluations land within kink_margin of a ReLU corner are
// redrawn from the stream, at most max_redraws times each, then used as-is.
inline EstimatorResult hutchinson_trace(const Model& model, const ParamVector& w,
                                        const std::vector<Example>& examples,
                                        std::size_t probes, double eps, SeededStream& stream,
                                        double kink_margin = 1e-6, int max_redraws = 32) {
    if (probes < 1) throw std::invalid_argument("hutchinson_trace: need probes >= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("hutchinson_trace: eps must be positive");
    if (examples.empty()) throw std::invalid_argument("hutchinson_trace: empty example set");

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t j = 0; j < probes; ++j) {
        ParamVector v = rademacher_vector(stream, w.dim());
        for (int tries = 0; tries < max_redraws; ++tries) {
            if (detail::probe_clears_kinks(model, w, examples, v, eps, kink_margin)) break;
            v = rademacher_vector(stream, w.dim());
        }
        double q = detail::hvp_quadratic_form(model, w, examples, v, eps);
        sum += q;
        sum_sq += q * q;
    }
    EstimatorResult out;
    out.samples = probes;
    out.value = sum / static_cast<double>(probes);
    if (probes > 1) {
        double var =
            (sum_sq - sum * sum / static_cast<double>(probes)) / static_cast<double>(probes - 1);
        out.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(probes));
    }
    return out;
}

// Averages v^T H v over all 2^d sign vectors. The off-diagonal terms cancel in
// that average, so for quadratic losses the result is the trace up to rounding.
inline double hutchinson_trace_enumerate(const Model& model, const ParamVector& w,
                                         const std::vector<Example>& examples, double eps = 1e-4) {
    std::size_t d = model.dim();
    if (d > 16)
        throw std::invalid_argument("hutchinson_trace_enumerate: 2^d probes infeasible past d=16");
    if (examples.empty())
        throw std::invalid_argument("hutchinson_trace_enumerate: empty example set");
    double sum = 0.0;
    std::size_t count = std::size_t{1} << d;
    ParamVector v(d);
    for (std::size_t mask = 0; mask < count; ++mask) {
        for (std::size_t i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? 1.0 : -1.0;
        sum += detail::hvp_quadratic_form(model, w, examples, v, eps);
    }
    return sum / static_cast<double>(count);
}

// Monte Carlo estimate of E[L(w + delta) - L(w)] under delta ~ N(0, total_var I).
inline EstimatorResult gamma_mc(const Model& model, const ParamVector& w,
                                const std::vector<Example>& examples, double total_var,
                                std::size_t samples, SeededStream& stream) {
    if (!(total_var >= 0.0) || !std::isfinite(total_var))
        throw std::invalid_argument("gamma_mc: total_var must be finite and >= 0");
    if (samples < 1) throw std::invalid_argument("gamma_mc: need samples >= 1");
    double base = mean_loss(model, w, examples);
    double sd = std::sqrt(total_var);

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        ParamVector shifted = w + gaussian_vector(stream, w.dim(), sd);
        double diff = mean_loss(model, shifted, examples) - base;
        sum += diff;
        sum_sq += diff * diff;
    }
    EstimatorResult out;
    out.samples = samples;
    out.value = sum / static_cast<double>(samples);
    if (samples > 1) {
        double var = (sum_sq - sum * sum / static_cast<double>(samples)) /
                     static_cast<double>(samples - 1);
        out.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
    }
    return out;
}

struct GammaPair {
    double train_value = 0.0;
    double heldout_value = 0.0;
    double diff_mean = 0.0;    // mean over draws of (train shift - heldout shift)
    double diff_abs = 0.0;     // |diff_mean|, the empirical flatness term
    double diff_stderr = std::numeric_limits<double>::quiet_NaN();
    std::size_t samples = 0;
};

// Perturbation gap between two datasets under common random draws. Sharing
// the draws cancels the noise that would otherwise dominate the difference;
// with heldout == train every sample difference is identically zero.
inline GammaPair gamma_pair(const Model& model, const ParamVector& w,
                            const std::vector<Example>& train,
                            const std::vector<Example>& heldout, double total_var,
                            std::size_t samples, SeededStream& stream) {
    if (!(total_var >= 0.0) || !std::isfinite(total_var))
        throw std::invalid_argument("gamma_pair: total_var must be finite and >= 0");
    if (samples < 1) throw std::invalid_argument("gamma_pair: need samples >= 1");
    double base_train = mean_loss(model, w, train);
    double base_held = mean_loss(model, w, heldout);
    double sd = std::sqrt(total_var);

    double sum_t = 0.0, sum_h = 0.0, sum_d = 0.0, sum_d_sq = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
        ParamVector shifted = w + gaussian_vector(stream, w.dim(), sd);
        double dt = mean_loss(model, shifted, train) - base_train;
        double dh = mean_loss(model, shifted, heldout) - base_held;
        sum_t += dt;
        sum_h += dh;
        double d = dt - dh;
        sum_d += d;
        sum_d_sq += d * d;
    }
    GammaPair out;
    out.samples = samples;
    out.train_value = sum_t / static_cast<double>(samples);
    out.heldout_value = sum_h / static_cast<double>(samples);
    out.diff_mean = sum_d / static_cast<double>(samples);
    out.diff_abs = std::fabs(out.diff_mean);
    if (samples > 1) {
        double var = (sum_d_sq - sum_d * sum_d / static_cast<double>(samples)) /
                     static_cast<double>(samples - 1);
        out.diff_stderr = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
    }
    return out;
}

// Half the range of per-example losses observed along the trajectory.
inline double estimate_R(double loss_min, double loss_max) {
    if (!std::isfinite(loss_min) || !std::isfinite(loss_max) || loss_max < loss_min)
        throw std::invalid_argument("estimate_R: need finite loss_max >= loss_min");
    return 0.5 * (loss_max - loss_min);
}

inline double estimate_R(const TrainTrace& trace) {
    return estimate_R(trace.loss_min, trace.loss_max);
}

struct EstimatorReport {
    std::int64_t step = 0;
    std::string estimator;
    double value = 0.0;
    double stderr_ = std::numeric_limits<double>::quiet_NaN();
    std::size_t samples = 0;
    std::string mode;
};

inline void write_estimator_reports(const std::string& path,
                                    const std::vector<EstimatorReport>& reports) {
    std::ofstream out(path);
    if (!out) throw IoError("write_estimator_reports: cannot open " + path);
    out << "step,estimator,value,stderr,samples,mode\n";
    for (const EstimatorReport& r : reports)
        out << r.step << ',' << r.estimator << ',' << format_double(r.value) << ','
            << (std::isnan(r.stderr_) ? std::string() : format_double(r.stderr_)) << ','
            << r.samples << ',' << r.mode << '\n';
}

}  // namespace genbound
