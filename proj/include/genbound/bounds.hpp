#pragma once

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

#include "genbound/csv.hpp"
#include "genbound/errors.hpp"

namespace genbound {

// Generalization bound formulas. Shared inputs: R is half the observed loss
// range, n the training set size, T the step count, lr[t] and the per-step
// statistics run over t = 0..T-1, sigma[t] the auxiliary noise schedule.
// Every function returns a value in loss units and is monotone in each of its
// per-step statistics.

namespace detail {

inline void check_steps(std::size_t T, std::initializer_list<std::size_t> sizes,
                        const char* who) {
    if (T == 0) throw std::invalid_argument(std::string(who) + ": need at least one step");
    for (std::size_t s : sizes)
        if (s != T)
            throw std::invalid_argument(std::string(who) + ": per-step vectors disagree on T");
}

inline void check_scalars(double R, std::size_t n, const char* who) {
    if (!(R >= 0.0) || !std::isfinite(R))
        throw std::invalid_argument(std::string(who) + ": R must be finite and >= 0");
    if (n == 0) throw std::invalid_argument(std::string(who) + ": n must be positive");
}

inline void check_positive_sigma(const std::vector<double>& sigma, const char* who) {
    for (double s : sigma)
        if (!(s > 0.0) || !std::isfinite(s))
            throw std::invalid_argument(std::string(who) + ": sigma_t must be positive");
}

inline void check_nonnegative(const std::vector<double>& v, const char* who, const char* what) {
    for (double x : v)
        if (!(x >= 0.0) || !std::isfinite(x))
            throw std::invalid_argument(std::string(who) + ": " + what +
                                        " must be finite and >= 0");
}

}  // namespace detail

// sqrt( (R^2 d / n) * sum_t log( lr_t^2 vhat_t / (d sigma_t^2) + 1 ) )
inline double trajectory_log_term(double R, std::size_t d, std::size_t n,
                                  const std::vector<double>& lr,
                                  const std::vector<double>& vhat,
                                  const std::vector<double>& sigma) {
    detail::check_scalars(R, n, "trajectory_log_term");
    detail::check_steps(lr.size(), {vhat.size(), sigma.size()}, "trajectory_log_term");
    detail::check_positive_sigma(sigma, "trajectory_log_term");
    detail::check_nonnegative(vhat, "trajectory_log_term", "dispersion");
    if (d == 0) throw std::invalid_argument("trajectory_log_term: d must be positive");
    double dd = static_cast<double>(d);
    double sum = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t)
        sum += std::log1p(lr[t] * lr[t] * vhat[t] / (dd * sigma[t] * sigma[t]));
    return std::sqrt(R * R * dd / static_cast<double>(n) * sum);
}

// The log(1+x) <= x relaxation of the same sum: sqrt( (R^2/n) sum lr^2 vhat / sigma^2 )
inline double trajectory_linear_term(double R, std::size_t n, const std::vector<double>& lr,
                                     const std::vector<double>& vhat,
                                     const std::vector<double>& sigma) {
    detail::check_scalars(R, n, "trajectory_linear_term");
    detail::check_steps(lr.size(), {vhat.size(), sigma.size()}, "trajectory_linear_term");
    detail::check_positive_sigma(sigma, "trajectory_linear_term");
    detail::check_nonnegative(vhat, "trajectory_linear_term", "dispersion");
    double sum = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t)
        sum += lr[t] * lr[t] * vhat[t] / (sigma[t] * sigma[t]);
    return std::sqrt(R * R / static_cast<double>(n) * sum);
}

struct OptimalBound {
    double total = 0.0;
    double sigma_star = 0.0;
    double trajectory_part = 0.0;  // A / sigma*, twice the flatness part at the optimum
    double flatness_part = 0.0;    // B * sigma*^2
    std::string note;
};

// Closed-form minimum over constant sigma of A/sigma + B sigma^2 with
//   A = sqrt((R^2/n) sum lr^2 vhat),  B = T * trace_mean / 2.
// The minimum sits at sigma* = (A/2B)^(1/3) and equals
//   (3/2) * ((R^2 T / n) * sum lr^2 vhat * trace_mean)^(1/3).
inline OptimalBound optimal_bound(double R, std::size_t n, const std::vector<double>& lr,
                                  const std::vector<double>& vhat, double trace_mean) {
    detail::check_scalars(R, n, "optimal_bound");
    detail::check_steps(lr.size(), {vhat.size()}, "optimal_bound");
    detail::check_nonnegative(vhat, "optimal_bound", "dispersion");
    if (!std::isfinite(trace_mean)) throw std::invalid_argument("optimal_bound: bad trace_mean");

    double T = static_cast<double>(lr.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t) sum += lr[t] * lr[t] * vhat[t];

    OptimalBound out;
    double A = std::sqrt(R * R / static_cast<double>(n) * sum);
    double B = T * trace_mean / 2.0;
    if (trace_mean <= 0.0) {
        out.note = "trace_mean <= 0: flatness favors unbounded sigma, bound reported as-is";
        out.total = std::cbrt(R * R * T / static_cast<double>(n) * sum * trace_mean) * 1.5;
        out.sigma_star = std::numeric_limits<double>::infinity();
        return out;
    }
    if (A == 0.0) {
        out.note = "zero trajectory mass: optimal sigma is 0";
        return out;
    }
    out.sigma_star = std::cbrt(A / (2.0 * B));
    out.trajectory_part = A / out.sigma_star;
    out.flatness_part = B * out.sigma_star * out.sigma_star;
    out.total = 1.5 * std::cbrt(R * R * T / static_cast<double>(n) * sum * trace_mean);
    return out;
}

// 2 sqrt( (2 R^2 / n) sum (lr^2/sigma^2) (psi + vtilde) )
inline double neu_trajectory_term(double R, std::size_t n, const std::vector<double>& lr,
                                  const std::vector<double>& psi,
                                  const std::vector<double>& vtilde,
                                  const std::vector<double>& sigma) {
    detail::check_scalars(R, n, "neu_trajectory_term");
    detail::check_steps(lr.size(), {psi.size(), vtilde.size(), sigma.size()},
                        "neu_trajectory_term");
    detail::check_positive_sigma(sigma, "neu_trajectory_term");
    detail::check_nonnegative(psi, "neu_trajectory_term", "sensitivity");
    detail::check_nonnegative(vtilde, "neu_trajectory_term", "dispersion");
    double sum = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t)
        sum += lr[t] * lr[t] / (sigma[t] * sigma[t]) * (psi[t] + vtilde[t]);
    return 2.0 * std::sqrt(2.0 * R * R / static_cast<double>(n) * sum);
}

// sqrt( (2 R^2 / n) sum (lr^2/sigma^2) (3 psi + 2 vtilde) )
inline double corollary_trajectory_term(double R, std::size_t n, const std::vector<double>& lr,
                                        const std::vector<double>& psi,
                                        const std::vector<double>& vtilde,
                                        const std::vector<double>& sigma) {
    detail::check_scalars(R, n, "corollary_trajectory_term");
    detail::check_steps(lr.size(), {psi.size(), vtilde.size(), sigma.size()},
                        "corollary_trajectory_term");
    detail::check_positive_sigma(sigma, "corollary_trajectory_term");
    detail::check_nonnegative(psi, "corollary_trajectory_term", "sensitivity");
    detail::check_nonnegative(vtilde, "corollary_trajectory_term", "dispersion");
    double sum = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t)
        sum += lr[t] * lr[t] / (sigma[t] * sigma[t]) * (3.0 * psi[t] + 2.0 * vtilde[t]);
    return std::sqrt(2.0 * R * R / static_cast<double>(n) * sum);
}

// Flatness term for beta-smooth losses: beta * d * sum_t sigma_t^2.
inline double smooth_flatness_term(double beta, std::size_t d, double total_var) {
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("smooth_flatness_term: beta must be finite and >= 0");
    if (!(total_var >= 0.0))
        throw std::invalid_argument("smooth_flatness_term: total_var must be >= 0");
    return beta * static_cast<double>(d) * total_var;
}

// (3/2) ((R^2 T / n) sum lr^2 E|g|^2 * trace_mean)^(1/3): the dispersion in the
// optimal bound replaced by the full squared gradient norm.
inline double norm_based_bound(double R, std::size_t n, const std::vector<double>& lr,
                               const std::vector<double>& gnorm_sq, double trace_mean) {
    detail::check_scalars(R, n, "norm_based_bound");
    detail::check_steps(lr.size(), {gnorm_sq.size()}, "norm_based_bound");
    detail::check_nonnegative(gnorm_sq, "norm_based_bound", "gradient norms");
    if (!std::isfinite(trace_mean))
        throw std::invalid_argument("norm_based_bound: bad trace_mean");
    double T = static_cast<double>(lr.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t) sum += lr[t] * lr[t] * gnorm_sq[t];
    return 1.5 * std::cbrt(R * R * T / static_cast<double>(n) * sum * trace_mean);
}

// 3 ( (R^2 T / 4n) sum lr^2 Lbar_t )^(1/3): specializes the norm-based bound
// to unit-norm linear regression, where |grad l|^2 = 2 l and the trace is 1.
inline double linear_net_bound(double R, std::size_t n, const std::vector<double>& lr,
                               const std::vector<double>& mean_loss) {
    detail::check_scalars(R, n, "linear_net_bound");
    detail::check_steps(lr.size(), {mean_loss.size()}, "linear_net_bound");
    detail::check_nonnegative(mean_loss, "linear_net_bound", "mean loss");
    double T = static_cast<double>(lr.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t) sum += lr[t] * lr[t] * mean_loss[t];
    return 3.0 * std::cbrt(R * R * T / (4.0 * static_cast<double>(n)) * sum);
}

// ReLU analogue: the per-step loss is weighted by each example's active
// fraction, and the final activation fraction multiplies the whole sum.
inline double relu_net_bound(double R, std::size_t n, const std::vector<double>& lr,
                             const std::vector<double>& act_weighted_loss,
                             double final_act_fraction) {
    detail::check_scalars(R, n, "relu_net_bound");
    detail::check_steps(lr.size(), {act_weighted_loss.size()}, "relu_net_bound");
    detail::check_nonnegative(act_weighted_loss, "relu_net_bound", "weighted loss");
    if (!(final_act_fraction >= 0.0 && final_act_fraction <= 1.0))
        throw std::invalid_argument("relu_net_bound: activation fraction must lie in [0,1]");
    double T = static_cast<double>(lr.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < lr.size(); ++t) sum += lr[t] * lr[t] * act_weighted_loss[t];
    return 3.0 * std::cbrt(final_act_fraction * R * R * T / (4.0 * static_cast<double>(n)) * sum);
}

struct BoundReport {
    std::string variant;
    double trajectory_term = 0.0;
    double flatness_term = 0.0;
    double total = 0.0;
    double R = 0.0;
    std::size_t d = 0;
    std::size_t n = 0;
    std::int64_t T = 0;
    double sigma_used = std::numeric_limits<double>::quiet_NaN();
    double trace_mean = std::numeric_limits<double>::quiet_NaN();
    std::string notes;
};

inline void write_bound_reports(const std::string& path,
                                const std::vector<BoundReport>& reports) {
    std::ofstream out(path);
    if (!out) throw IoError("write_bound_reports: cannot open " + path);
    out << "variant,trajectory_term,flatness_term,total,R,d,n,T,sigma_used,trace_mean,notes\n";
    for (const BoundReport& r : reports)
        out << r.variant << ',' << format_double(r.trajectory_term) << ','
            << format_double(r.flatness_term) << ',' << format_double(r.total) << ','
            << format_double(r.R) << ',' << r.d << ',' << r.n << ',' << r.T << ','
            << (std::isnan(r.sigma_used) ? std::string() : format_double(r.sigma_used)) << ','
            << (std::isnan(r.trace_mean) ? std::string() : format_double(r.trace_mean)) << ','
            << r.notes << '\n';
}

}  // namespace genbound
