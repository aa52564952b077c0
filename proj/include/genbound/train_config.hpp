#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace genbound {

// Piecewise-constant learning rate: knot (s, v) means lr = v from step s on.
// Steps are 1-based; a single knot at step 1 is a constant schedule.
class LrSchedule {
  public:
    LrSchedule() : knots_{{1, 0.1}} {}
    explicit LrSchedule(std::vector<std::pair<std::int64_t, double>> knots)
        : knots_(std::move(knots)) {
        validate();
    }

    static LrSchedule constant(double lr) { return LrSchedule({{1, lr}}); }

    double at(std::int64_t step) const {
        double lr = knots_.front().second;
        for (const auto& [from, value] : knots_) {
            if (from > step) break;
            lr = value;
        }
        return lr;
    }

    const std::vector<std::pair<std::int64_t, double>>& knots() const { return knots_; }

    void validate() const {
        if (knots_.empty()) throw std::invalid_argument("LrSchedule: no knots");
        if (knots_.front().first != 1)
            throw std::invalid_argument("LrSchedule: first knot must start at step 1");
        std::int64_t prev = 0;
        for (const auto& [from, value] : knots_) {
            if (from <= prev) throw std::invalid_argument("LrSchedule: knots must be increasing");
            if (!(value > 0.0) || !std::isfinite(value))
                throw std::invalid_argument("LrSchedule: learning rates must be positive");
            prev = from;
        }
    }

  private:
    std::vector<std::pair<std::int64_t, double>> knots_;
};

// Dynamic gradient clipping: after start_step, gradients longer than the
// running minimum norm are shrunk to alpha times it; shorter ones lower the
// minimum. start_step < 0 requests auto-detection, which arms clipping at the
// end of the first epoch whose mean gradient norm exceeds the previous one's.
struct ClipConfig {
    double alpha = 0.1;
    std::int64_t start_step = -1;
    double g_init = std::numeric_limits<double>::infinity();

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("ClipConfig: alpha must lie in (0,1)");
        if (!(g_init > 0.0)) throw std::invalid_argument("ClipConfig: g_init must be positive");
    }
};

// Gaussian model perturbation: blend the batch gradient with gradients taken
// at k Gaussian-perturbed copies of the weights. sigma_scaled multiplies sigma
// by the RMS weight magnitude so the kick tracks the parameter scale.
struct GmpConfig {
    double rho = 0.5;
    double sigma = 0.03;
    std::size_t k = 3;
    bool abs_variant = false;
    bool sigma_scaled = false;

    void validate() const {
        if (!(rho >= 0.0 && rho <= 1.0))
            throw std::invalid_argument("GmpConfig: rho must lie in [0,1]");
        if (!(sigma >= 0.0) || !std::isfinite(sigma))
            throw std::invalid_argument("GmpConfig: sigma must be finite and >= 0");
        if (k < 1) throw std::invalid_argument("GmpConfig: k must be >= 1");
    }
};

enum class Scheme { plain, clip, gmp };

struct TrainConfig {
    LrSchedule lr;
    std::size_t epochs = 1;
    std::size_t batch_size = 1;
    Scheme scheme = Scheme::plain;
    ClipConfig clip;
    GmpConfig gmp;

    std::uint64_t seed_init = 1;
    std::uint64_t seed_batch = 2;
    std::uint64_t seed_scheme = 3;
    double init_std = 1.0;
    double divergence_threshold = 1e6;

    // instrumentation: dispersion and activation stats every log_interval
    // steps (0 = off), full per-step statistics for bound evaluation when
    // bound_stats is set, weight snapshots every checkpoint_interval steps
    // (0 = initial and final only).
    std::int64_t log_interval = 0;
    bool bound_stats = false;
    std::int64_t checkpoint_interval = 0;

    // stop after the first epoch whose full-train loss drops below this
    // threshold (0 = run all epochs)
    double stop_train_loss = 0.0;

    void validate() const {
        lr.validate();
        if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
        if (!(divergence_threshold > 0.0))
            throw std::invalid_argument("TrainConfig: divergence_threshold must be positive");
        if (log_interval < 0 || checkpoint_interval < 0)
            throw std::invalid_argument("TrainConfig: intervals must be >= 0");
        if (stop_train_loss < 0.0 || !std::isfinite(stop_train_loss))
            throw std::invalid_argument("TrainConfig: stop_train_loss must be finite and >= 0");
        if (init_std < 0.0 || !std::isfinite(init_std))
            throw std::invalid_argument("TrainConfig: init_std must be finite and >= 0");
        clip.validate();
        gmp.validate();
    }
};

}  // namespace genbound
