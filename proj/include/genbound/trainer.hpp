#pragma once

#include <functional>
#include <map>

#include "genbound/batching.hpp"
#include "genbound/dataset.hpp"
#include "genbound/models.hpp"
#include "genbound/schemes.hpp"

namespace genbound {

struct StepRecord {
    std::int64_t step = 0;
    std::size_t epoch = 0;
    double lr = 0.0;
    double grad_norm = 0.0;  // raw batch gradient, before any scheme transform
    double dispersion = std::numeric_limits<double>::quiet_NaN();
    double activation_frac = std::numeric_limits<double>::quiet_NaN();
    double batch_loss = 0.0;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_acc = std::numeric_limits<double>::quiet_NaN();
    double test_loss = std::numeric_limits<double>::quiet_NaN();
    double test_acc = std::numeric_limits<double>::quiet_NaN();
    double mean_grad_norm = 0.0;
    double loss_min_so_far = 0.0;  // running per-example loss extrema, for R
    double loss_max_so_far = 0.0;
};

// Full per-step statistics needed to evaluate bounds after the run.
struct BoundStatsRecord {
    std::int64_t step = 0;
    double mean_loss = 0.0;  // train mean loss at the pre-update weights
    double act_weighted_loss = std::numeric_limits<double>::quiet_NaN();
    double act_fraction = std::numeric_limits<double>::quiet_NaN();
    double gnorm_sq = 0.0;
};

struct TrainTrace {
    std::vector<StepRecord> steps;
    std::vector<EpochRecord> epochs;
    std::vector<BoundStatsRecord> bound_stats;
    std::map<std::int64_t, ParamVector> checkpoints;  // always holds 0 and T
    ParamVector final_weights;
    double loss_min = std::numeric_limits<double>::infinity();
    double loss_max = -std::numeric_limits<double>::infinity();
    std::int64_t total_steps = 0;
    std::size_t n_train = 0;
    std::size_t batch_size = 0;
    std::int64_t clip_start_step = -1;  // resolved T_c, -1 if clipping never armed
};

struct StepContext {
    std::int64_t step;
    std::size_t epoch;
    const ParamVector& weights;  // pre-update
    const ParamVector& grad;     // raw batch gradient
    const std::vector<std::size_t>& batch;
    double lr;
};
using StepHook = std::function<void(const StepContext&)>;

// Mean loss plus accuracy (classification only) over a dataset.
inline std::pair<double, double> evaluate(const Model& model, const ParamVector& w,
                                          const Dataset& ds) {
    if (ds.n() == 0) throw EmptyDatasetError("evaluate: no examples");
    double loss_acc = 0.0;
    std::size_t correct = 0;
    for (const Example& z : ds.examples) {
        loss_acc += model.loss(w, z);
        if (ds.task == TaskKind::classification && model.predict_label(w, z) == z.label)
            ++correct;
    }
    double loss = loss_acc / static_cast<double>(ds.n());
    double acc = ds.task == TaskKind::classification
                     ? static_cast<double>(correct) / static_cast<double>(ds.n())
                     : std::numeric_limits<double>::quiet_NaN();
    return {loss, acc};
}

// Mini-batch SGD over the shuffled epoch schedule, with optional clipping or
// perturbation schemes and the instrumentation the estimators consume later.
// The hook fires at logged steps before the weight update.
inline TrainTrace sgd_train(const Model& model, const Dataset& train, const Dataset* test,
                            const TrainConfig& cfg, const StepHook& hook = {}) {
    cfg.validate();
    if (train.n() == 0) throw EmptyDatasetError("sgd_train: empty training set");
    if (train.input_dim != model.input_dim())
        throw std::invalid_argument("sgd_train: dataset and model disagree on input dim");

    BatchTrajectory traj(train.n(), cfg.batch_size, cfg.seed_batch);
    SeededStream init_stream = SeededStream(cfg.seed_init).derive("init");
    SeededStream scheme_stream = SeededStream(cfg.seed_scheme).derive("scheme");

    ParamVector w = model.init_weights(init_stream, cfg.init_std);
    const bool has_relu = model.kind() != "linear";

    TrainTrace trace;
    trace.n_train = train.n();
    trace.batch_size = cfg.batch_size;
    trace.checkpoints.emplace(0, w);

    constexpr std::int64_t kNotArmed = std::numeric_limits<std::int64_t>::max();
    std::int64_t clip_start = kNotArmed;
    if (cfg.scheme == Scheme::clip && cfg.clip.start_step >= 0) clip_start = cfg.clip.start_step;
    ClipState clip_state(cfg.clip.g_init);

    const std::size_t m = traj.batches_per_epoch();
    std::int64_t t = 0;
    double prev_epoch_mean_norm = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto batches = traj.batches(epoch);
        double norm_sum = 0.0;
        for (const std::vector<std::size_t>& batch : batches) {
            ++t;
            double lr = cfg.lr.at(t);

            double batch_loss = 0.0;
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t idx : batch) {
                double l = model.loss(w, train.examples[idx]);
                batch_loss += l;
                lo = std::min(lo, l);
                hi = std::max(hi, l);
            }
            batch_loss /= static_cast<double>(batch.size());
            if (!std::isfinite(batch_loss) || batch_loss > cfg.divergence_threshold)
                throw DivergenceError(t, w.values());
            trace.loss_min = std::min(trace.loss_min, lo);
            trace.loss_max = std::max(trace.loss_max, hi);

            ParamVector g = batch_grad(model, w, train.examples, batch);
            double gnorm = g.norm();
            norm_sum += gnorm;

            StepRecord rec;
            rec.step = t;
            rec.epoch = epoch;
            rec.lr = lr;
            rec.grad_norm = gnorm;
            rec.batch_loss = batch_loss;

            bool logged = cfg.log_interval > 0 && t % cfg.log_interval == 0;
            if (logged) {
                ParamVector ref = batch_grad(model, w, train.examples);
                rec.dispersion = (g - ref).squared_norm();
                if (has_relu) {
                    std::size_t active = 0, total = 0;
                    for (std::size_t idx : batch) {
                        auto [a, u] = model.active_units(w, train.examples[idx]);
                        active += a;
                        total += u;
                    }
                    rec.activation_frac =
                        static_cast<double>(active) / static_cast<double>(total);
                }
            }
            if (cfg.bound_stats) {
                BoundStatsRecord bs;
                bs.step = t;
                bs.gnorm_sq = gnorm * gnorm;
                double loss_sum = 0.0, frac_sum = 0.0, weighted_sum = 0.0;
                const bool relu2 = model.kind() == "relu2";
                for (const Example& z : train.examples) {
                    double l = model.loss(w, z);
                    loss_sum += l;
                    if (relu2) {
                        auto [a, u] = model.active_units(w, z);
                        double frac = static_cast<double>(a) / static_cast<double>(u);
                        frac_sum += frac;
                        weighted_sum += frac * l;
                    }
                }
                bs.mean_loss = loss_sum / static_cast<double>(train.n());
                if (relu2) {
                    bs.act_fraction = frac_sum / static_cast<double>(train.n());
                    bs.act_weighted_loss = weighted_sum / static_cast<double>(train.n());
                }
                trace.bound_stats.push_back(bs);
            }
            if (logged && hook) hook(StepContext{t, epoch, w, g, batch, lr});
            trace.steps.push_back(rec);

            switch (cfg.scheme) {
                case Scheme::plain:
                    break;
                case Scheme::clip:
                    g = clip_transform(std::move(g), clip_state, t > clip_start, cfg.clip.alpha);
                    break;
                case Scheme::gmp:
                    g = gmp_gradient(model, w, train.examples, batch, cfg.gmp, g, scheme_stream);
                    break;
            }
            w.axpy(-lr, g);

            if (cfg.checkpoint_interval > 0 && t % cfg.checkpoint_interval == 0)
                trace.checkpoints.emplace(t, w);
        }

        EpochRecord er;
        er.epoch = epoch;
        auto [tr_loss, tr_acc] = evaluate(model, w, train);
        er.train_loss = tr_loss;
        er.train_acc = tr_acc;
        if (test && test->n() > 0) {
            auto [te_loss, te_acc] = evaluate(model, w, *test);
            er.test_loss = te_loss;
            er.test_acc = te_acc;
        }
        er.mean_grad_norm = norm_sum / static_cast<double>(m);
        er.loss_min_so_far = trace.loss_min;
        er.loss_max_so_far = trace.loss_max;
        trace.epochs.push_back(er);

        // auto-arm clipping when the epoch mean gradient norm turns upward
        if (cfg.scheme == Scheme::clip && cfg.clip.start_step < 0 && clip_start == kNotArmed &&
            epoch >= 2 && er.mean_grad_norm > prev_epoch_mean_norm) {
            clip_start = t;
        }
        prev_epoch_mean_norm = er.mean_grad_norm;

        if (cfg.stop_train_loss > 0.0 && er.train_loss < cfg.stop_train_loss) break;
    }

    trace.total_steps = t;
    trace.final_weights = w;
    trace.checkpoints.insert_or_assign(t, std::move(w));
    trace.clip_start_step = clip_start == kNotArmed ? -1 : clip_start;
    return trace;
}

}  // namespace genbound
