#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "genbound/batching.hpp"
#include "genbound/bounds.hpp"
#include "genbound/checkpoint.hpp"
#include "genbound/cli/config.hpp"
#include "genbound/dataset.hpp"
#include "genbound/estimators.hpp"
#include "genbound/generator.hpp"
#include "genbound/linear_net.hpp"
#include "genbound/mlp_classifier.hpp"
#include "genbound/models.hpp"
#include "genbound/trace_io.hpp"
#include "genbound/trainer.hpp"
#include "genbound/two_layer_relu.hpp"

namespace genbound::cli {

namespace fs = std::filesystem;

struct ResolvedData {
    Dataset train;
    Dataset test;
};

inline ResolvedData resolve_data(const ExperimentConfig& cfg) {
    if (cfg.data.source == "generate") {
        GeneratedData gd = gen_teacher_student(cfg.data.gen, cfg.data_seed);
        return {std::move(gd.train), std::move(gd.test)};
    }
    ResolvedData out;
    out.train = load_csv_dataset(cfg.data.train_csv, cfg.data.gen.task, cfg.data.has_header);
    if (!cfg.data.test_csv.empty()) {
        out.test = load_csv_dataset(cfg.data.test_csv, cfg.data.gen.task, cfg.data.has_header);
    } else {
        out.test.task = out.train.task;
        out.test.input_dim = out.train.input_dim;
        out.test.num_classes = out.train.num_classes;
    }
    if (cfg.data.gen.noise_level > 0.0) {
        SeededStream noise = SeededStream(cfg.data_seed).derive("label-noise");
        inject_label_noise(out.train, cfg.data.gen.noise_level, noise);
    }
    return out;
}

inline std::unique_ptr<Model> build_model(const ExperimentConfig& cfg, const Dataset& train) {
    std::size_t d0 = cfg.model.input_dim ? cfg.model.input_dim : train.input_dim;
    if (d0 == 0) throw ConfigError("cannot determine the model input dimension");
    if (cfg.model.kind == "linear") return std::make_unique<LinearNet>(d0);
    if (cfg.model.kind == "relu2")
        return std::make_unique<TwoLayerRelu>(d0, cfg.model.width, cfg.signs_seed);
    if (train.num_classes < 2) throw ConfigError("classification dataset must have >= 2 classes");
    std::vector<std::size_t> dims;
    dims.push_back(d0);
    for (std::size_t h : cfg.model.hidden) dims.push_back(h);
    dims.push_back(train.num_classes);
    return std::make_unique<MlpClassifier>(dims);
}

inline std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline void write_manifest(const std::string& out_dir, const std::string& command,
                           const ExperimentConfig& cfg) {
    std::ofstream out(fs::path(out_dir) / "manifest.txt");
    if (!out) throw IoError("cannot write manifest in " + out_dir);
    out << "command=" << command << "\n"
        << "config_hash=" << hex16(cfg.config_hash) << "\n"
        << "seed=" << cfg.seed << "\n";
    std::ofstream dump(fs::path(out_dir) / "config.resolved.txt");
    if (!dump) throw IoError("cannot write resolved config in " + out_dir);
    dump << cfg.canonical;
}

inline int cmd_gen_data(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.data.source != "generate")
        throw ConfigError("gen-data needs data.source = generate");
    GeneratedData gd = gen_teacher_student(cfg.data.gen, cfg.data_seed);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    save_csv_dataset((fs::path(out_dir) / "train.csv").string(), gd.train);
    save_csv_dataset((fs::path(out_dir) / "test.csv").string(), gd.test);
    write_manifest(out_dir, "gen-data", cfg);
    return 0;
}

inline int cmd_train(const ExperimentConfig& cfg, const std::string& out_dir) {
    ResolvedData data = resolve_data(cfg);
    std::unique_ptr<Model> model = build_model(cfg, data.train);
    TrainTrace trace = sgd_train(*model, data.train, &data.test, cfg.train);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    write_trace(out_dir, *model, trace);
    write_manifest(out_dir, "train", cfg);
    return 0;
}

namespace detail {

// Per-step series assembled from a loaded trace. Dispersion and bound stats
// are logged every log_interval steps; values are carried forward across the
// gaps so the sums run over every step.
struct StepSeries {
    std::vector<double> lr;
    std::vector<double> gnorm_sq;
    bool filled_gaps = false;
};

inline StepSeries step_series(const LoadedTrace& trace) {
    StepSeries s;
    for (const StepRecord& r : trace.steps) {
        s.lr.push_back(r.lr);
        s.gnorm_sq.push_back(r.grad_norm * r.grad_norm);
    }
    return s;
}

inline std::vector<double> carry_forward(const std::vector<std::pair<std::size_t, double>>& logged,
                                         std::size_t T, const char* what) {
    if (logged.empty())
        throw InsufficientTraceError(std::string("trace has no logged ") + what);
    std::vector<double> out(T);
    std::size_t next = 0;
    double current = logged.front().second;  // first logged value carried back
    for (std::size_t t = 0; t < T; ++t) {
        if (next < logged.size() && logged[next].first == t + 1) current = logged[next++].second;
        out[t] = current;
    }
    return out;
}

// Dispersion for every step, either from the logged column or recomputed from
// per-step checkpoints (pre-update weights) and the replayed batch order.
inline std::vector<double> dispersion_series(const LoadedTrace& trace, const Model& model,
                                             const Dataset& train,
                                             const ExperimentConfig& cfg, bool* filled) {
    std::vector<std::pair<std::size_t, double>> logged;
    for (const StepRecord& r : trace.steps)
        if (!std::isnan(r.dispersion))
            logged.emplace_back(static_cast<std::size_t>(r.step), r.dispersion);

    std::size_t T = trace.steps.size();
    if (!logged.empty()) {
        *filled = logged.size() < T;
        return carry_forward(logged, T, "dispersion");
    }

    if (!trace.has_all_checkpoints())
        throw InsufficientTraceError(
            "dispersion: no logged values and no per-step checkpoints; rerun training with "
            "log_interval >= 1 or checkpoint_interval = 1");

    *filled = false;
    BatchTrajectory batches(train.n(), trace.batch_size, cfg.train.seed_batch);
    std::size_t per_epoch = train.n() / trace.batch_size;
    std::vector<double> out(T);
    for (std::size_t t = 1; t <= T; ++t) {
        std::size_t epoch = (t - 1) / per_epoch + 1;
        std::size_t index = (t - 1) % per_epoch;
        Checkpoint ck = load_checkpoint(checkpoint_file(trace.dir, static_cast<std::int64_t>(t) - 1));
        ParamVector ref = reference_mean_gradient(model, ck.weights, train.examples);
        out[t - 1] = dispersion(model, ck.weights, train.examples,
                                batches.batches(epoch)[index], ref);
    }
    return out;
}

// Per-epoch local gradient sensitivity, evaluated at epoch-start checkpoints
// with the noise variance accumulated up to that point, then expanded to one
// value per step.
inline std::vector<double> psi_series(const LoadedTrace& trace, const Model& model,
                                      const Dataset& train, double sigma,
                                      std::size_t psi_samples, SeededStream& estimators) {
    std::size_t T = trace.steps.size();
    std::size_t per_epoch = train.n() / trace.batch_size;
    std::size_t epochs = trace.epochs.size();
    std::vector<double> per_epoch_psi(epochs);
    for (std::size_t e = 1; e <= epochs; ++e) {
        std::int64_t start = static_cast<std::int64_t>((e - 1) * per_epoch);
        std::string file = checkpoint_file(trace.dir, start);
        if (!fs::exists(file))
            throw InsufficientTraceError(
                "sensitivity: missing epoch-start checkpoint " + file +
                "; rerun training with checkpoint_interval = steps per epoch");
        Checkpoint ck = load_checkpoint(file);
        double cum_var = sigma * sigma * static_cast<double>(start);
        SeededStream sub = estimators.derive("psi", e);
        per_epoch_psi[e - 1] =
            sensitivity_psi(model, ck.weights, train.examples, cum_var, psi_samples, sub).value;
    }
    std::vector<double> out(T);
    for (std::size_t t = 1; t <= T; ++t) out[t - 1] = per_epoch_psi[(t - 1) / per_epoch];
    return out;
}

inline std::vector<double> bound_stats_series(const LoadedTrace& trace, std::size_t T,
                                              double BoundStatsRecord::* field,
                                              const char* what) {
    std::vector<std::pair<std::size_t, double>> logged;
    for (const BoundStatsRecord& r : trace.bound_stats)
        if (!std::isnan(r.*field)) logged.emplace_back(static_cast<std::size_t>(r.step), r.*field);
    if (logged.empty())
        throw InsufficientTraceError(std::string("trace has no ") + what +
                                     "; rerun training with bound_stats = true");
    return carry_forward(logged, T, what);
}

// keep free text out of the CSV structure
inline std::string sanitize_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

// Splits a cube-root bound 1.5*(2 A^2 B)^(1/3) back into its two terms at the
// implied optimal sigma: A/sigma* carries two thirds, B sigma*^2 one third.
inline void fill_cuberoot_parts(BoundReport& row, double a_sq, double b) {
    if (row.total > 0.0 && a_sq > 0.0 && b > 0.0) {
        row.trajectory_term = row.total * 2.0 / 3.0;
        row.flatness_term = row.total / 3.0;
        row.sigma_used = std::cbrt(std::sqrt(a_sq) / (2.0 * b));
    } else if (row.total < 0.0) {
        row.notes = "negative flatness estimate, bound reported as-is";
    }
}

}  // namespace detail

inline int cmd_bound(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.bound.trace_dir.empty()) throw ConfigError("bound.trace_dir is required");
    LoadedTrace trace = load_trace(cfg.bound.trace_dir);
    std::unique_ptr<Model> model = make_model(trace.model_spec);
    ResolvedData data = resolve_data(cfg);
    if (data.train.n() != trace.n_train)
        throw ConfigError("data section does not reproduce the trace's training set (n_train " +
                          std::to_string(data.train.n()) + " vs " +
                          std::to_string(trace.n_train) + ")");

    std::size_t T = trace.steps.size();
    std::size_t n = trace.n_train;
    std::size_t d = model->dim();
    double R = estimate_R(trace.loss_min, trace.loss_max);
    double sigma = cfg.bound.sigma;
    double total_var = static_cast<double>(T) * sigma * sigma;
    const std::vector<Example>& eval_pool =
        data.test.n() > 0 ? data.test.examples : data.train.examples;

    detail::StepSeries series = detail::step_series(trace);
    std::vector<double> sigma_vec(T, sigma);
    SeededStream estimators(cfg.estimator_seed);

    // lazily computed shared ingredients
    std::optional<std::vector<double>> vhat;
    bool vhat_filled = false;
    auto ensure_vhat = [&]() -> const std::vector<double>& {
        if (!vhat) vhat = detail::dispersion_series(trace, *model, data.train, cfg, &vhat_filled);
        return *vhat;
    };
    std::optional<double> trace_mean;
    auto ensure_trace_mean = [&]() {
        if (!trace_mean) {
            SeededStream sub = estimators.derive("trace", 0);
            trace_mean = hutchinson_trace(*model, trace.final_weights, eval_pool,
                                          cfg.bound.probes, cfg.bound.hvp_eps, sub)
                             .value;
        }
        return *trace_mean;
    };
    std::optional<std::vector<double>> psi;
    auto ensure_psi = [&]() -> const std::vector<double>& {
        if (!psi)
            psi = detail::psi_series(trace, *model, data.train, sigma, cfg.bound.psi_samples,
                                     estimators);
        return *psi;
    };

    // flatness shared by the fixed-sigma variants
    std::optional<double> flatness;
    std::string flatness_note;
    auto ensure_flatness = [&]() {
        if (!flatness) {
            if (cfg.bound.flatness == "empirical") {
                if (data.test.n() == 0)
                    throw ConfigError("bound.flatness = empirical needs a held-out test set");
                SeededStream sub = estimators.derive("gamma", 0);
                flatness = gamma_pair(*model, trace.final_weights, data.train.examples,
                                      data.test.examples, total_var, cfg.bound.gamma_samples, sub)
                               .diff_abs;
                flatness_note = "empirical flatness";
            } else {
                double tm = ensure_trace_mean();
                flatness = total_var / 2.0 * tm;
                if (tm < 0.0) flatness_note = "negative trace estimate, reported as-is";
            }
        }
        return *flatness;
    };

    std::vector<BoundReport> rows;
    auto base_row = [&](const std::string& variant) {
        BoundReport row;
        row.variant = variant;
        row.R = R;
        row.d = d;
        row.n = n;
        row.T = static_cast<std::int64_t>(T);
        return row;
    };
    auto append_note = [](BoundReport& row, const std::string& note) {
        if (note.empty()) return;
        if (!row.notes.empty()) row.notes += "; ";
        row.notes += note;
    };

    for (const std::string& variant : cfg.bound.variants) {
        BoundReport row = base_row(variant);
        if (variant == "log" || variant == "linear" || variant == "neu" ||
            variant == "corollary") {
            const std::vector<double>& v = ensure_vhat();
            if (variant == "log") {
                row.trajectory_term = trajectory_log_term(R, d, n, series.lr, v, sigma_vec);
            } else if (variant == "linear") {
                row.trajectory_term = trajectory_linear_term(R, n, series.lr, v, sigma_vec);
            } else if (variant == "neu") {
                row.trajectory_term =
                    neu_trajectory_term(R, n, series.lr, ensure_psi(), v, sigma_vec);
            } else {
                row.trajectory_term =
                    corollary_trajectory_term(R, n, series.lr, ensure_psi(), v, sigma_vec);
            }
            row.flatness_term = ensure_flatness();
            row.total = row.trajectory_term + row.flatness_term;
            row.sigma_used = sigma;
            if (trace_mean) row.trace_mean = *trace_mean;
            append_note(row, flatness_note);
            if (vhat_filled) append_note(row, "dispersion carried forward between logged steps");
        } else if (variant == "optimal") {
            const std::vector<double>& v = ensure_vhat();
            OptimalBound ob = optimal_bound(R, n, series.lr, v, ensure_trace_mean());
            row.trajectory_term = ob.trajectory_part;
            row.flatness_term = ob.flatness_part;
            row.total = ob.total;
            row.sigma_used = ob.sigma_star;
            row.trace_mean = *trace_mean;
            append_note(row, ob.note);
            if (vhat_filled) append_note(row, "dispersion carried forward between logged steps");
        } else if (variant == "norm") {
            double tm = ensure_trace_mean();
            row.total = norm_based_bound(R, n, series.lr, series.gnorm_sq, tm);
            row.trace_mean = tm;
            double a_sq = 0.0;
            for (std::size_t t = 0; t < T; ++t)
                a_sq += series.lr[t] * series.lr[t] * series.gnorm_sq[t];
            a_sq *= R * R / static_cast<double>(n);
            detail::fill_cuberoot_parts(row, a_sq, static_cast<double>(T) * tm / 2.0);
        } else if (variant == "linear_net") {
            if (trace.model_spec.kind != "linear")
                throw UnsupportedModelError("linear_net bound needs a linear-model trace, got " +
                                            trace.model_spec.kind);
            std::vector<double> mean_losses = detail::bound_stats_series(
                trace, T, &BoundStatsRecord::mean_loss, "per-step mean loss");
            row.total = linear_net_bound(R, n, series.lr, mean_losses);
            row.trace_mean = 1.0;
            double a_sq = 0.0;
            for (std::size_t t = 0; t < T; ++t)
                a_sq += series.lr[t] * series.lr[t] * 2.0 * mean_losses[t];
            a_sq *= R * R / static_cast<double>(n);
            detail::fill_cuberoot_parts(row, a_sq, static_cast<double>(T) / 2.0);
        } else if (variant == "relu_net") {
            if (trace.model_spec.kind != "relu2")
                throw UnsupportedModelError("relu_net bound needs a two-layer ReLU trace, got " +
                                            trace.model_spec.kind);
            std::vector<double> weighted = detail::bound_stats_series(
                trace, T, &BoundStatsRecord::act_weighted_loss, "activation-weighted loss");
            double a_frac =
                activation_fraction(*model, trace.final_weights, data.train.examples);
            row.total = relu_net_bound(R, n, series.lr, weighted, a_frac);
            row.trace_mean = a_frac;
            append_note(row, "trace_mean column holds the final activation fraction");
            double a_sq = 0.0;
            for (std::size_t t = 0; t < T; ++t)
                a_sq += series.lr[t] * series.lr[t] * 2.0 * weighted[t];
            a_sq *= R * R / static_cast<double>(n);
            detail::fill_cuberoot_parts(row, a_sq,
                                        static_cast<double>(T) * a_frac / 2.0);
        }
        rows.push_back(std::move(row));
    }

    if (cfg.bound.beta > 0.0) {
        BoundReport row = base_row("smooth");
        row.trajectory_term = trajectory_log_term(R, d, n, series.lr, ensure_vhat(), sigma_vec);
        row.flatness_term = smooth_flatness_term(cfg.bound.beta, d, total_var);
        row.total = row.trajectory_term + row.flatness_term;
        row.sigma_used = sigma;
        append_note(row, "beta-smooth flatness, beta=" + format_double(cfg.bound.beta));
        rows.push_back(std::move(row));
    }

    {
        BoundReport row = base_row("gap");
        const EpochRecord& last = trace.epochs.back();
        row.total = last.test_loss - last.train_loss;
        row.notes = "test_loss - train_loss";
        if (std::isnan(last.test_loss)) row.notes = "no test metrics in trace";
        rows.push_back(std::move(row));
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    write_bound_reports((fs::path(out_dir) / "bounds.csv").string(), rows);
    write_manifest(out_dir, "bound", cfg);
    return 0;
}

// Trains in the deterministic single-run setting and reports, epoch by epoch,
// the log-form trajectory term next to the two baseline terms computed from
// the same per-step dispersions and per-epoch sensitivities.
inline int cmd_compare_trajectory(const ExperimentConfig& cfg, const std::string& out_dir) {
    ResolvedData data = resolve_data(cfg);
    std::unique_ptr<Model> model = build_model(cfg, data.train);

    TrainConfig tc = cfg.train;
    if (data.train.n() % tc.batch_size != 0)
        throw ConfigError("train.batch_size must divide the training set size");
    std::size_t per_epoch = data.train.n() / tc.batch_size;
    tc.log_interval = 1;  // the comparison needs dispersion at every step
    tc.checkpoint_interval = static_cast<std::int64_t>(per_epoch);

    TrainTrace trace = sgd_train(*model, data.train, &data.test, tc);

    std::size_t n = data.train.n();
    std::size_t d = model->dim();
    double sigma = cfg.bound.sigma;
    SeededStream estimators(cfg.estimator_seed);

    std::size_t T = trace.steps.size();
    std::vector<double> lr(T), vhat(T), sig(T, sigma), psi(T);
    for (std::size_t t = 0; t < T; ++t) {
        lr[t] = trace.steps[t].lr;
        vhat[t] = trace.steps[t].dispersion;
    }
    std::size_t epochs = trace.epochs.size();
    std::vector<double> psi_epoch(epochs);
    for (std::size_t e = 1; e <= epochs; ++e) {
        std::int64_t start = static_cast<std::int64_t>((e - 1) * per_epoch);
        const ParamVector& w = trace.checkpoints.at(start);
        double cum_var = sigma * sigma * static_cast<double>(start);
        SeededStream sub = estimators.derive("psi", e);
        psi_epoch[e - 1] =
            sensitivity_psi(*model, w, data.train.examples, cum_var, cfg.bound.psi_samples, sub)
                .value;
    }
    for (std::size_t t = 0; t < T; ++t) psi[t] = psi_epoch[t / per_epoch];

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    std::ofstream out(fs::path(out_dir) / "compare.csv");
    if (!out) throw IoError("cannot write compare.csv in " + out_dir);
    out << "epoch,ours_log_term,neu_term,corollary_term,psi_hat,R\n";
    for (std::size_t e = 1; e <= epochs; ++e) {
        std::size_t upto = e * per_epoch;
        std::vector<double> lr_e(lr.begin(), lr.begin() + upto);
        std::vector<double> vhat_e(vhat.begin(), vhat.begin() + upto);
        std::vector<double> sig_e(sig.begin(), sig.begin() + upto);
        std::vector<double> psi_e(psi.begin(), psi.begin() + upto);
        double R = estimate_R(trace.epochs[e - 1].loss_min_so_far,
                              trace.epochs[e - 1].loss_max_so_far);
        out << e << ',' << format_double(trajectory_log_term(R, d, n, lr_e, vhat_e, sig_e)) << ','
            << format_double(neu_trajectory_term(R, n, lr_e, psi_e, vhat_e, sig_e)) << ','
            << format_double(corollary_trajectory_term(R, n, lr_e, psi_e, vhat_e, sig_e)) << ','
            << format_double(psi_epoch[e - 1]) << ',' << format_double(R) << '\n';
    }
    out.close();
    write_manifest(out_dir, "compare-trajectory", cfg);
    return 0;
}

// Grid over learning rate and batch size. Every cell shares the dataset and
// seeds, trains until the loss threshold or the epoch cap, and reports the
// optimal-sigma bound decomposition next to the empirical gap. Cell failures
// are recorded in-row so the rest of the grid still completes.
inline int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
    ResolvedData data = resolve_data(cfg);
    const std::vector<Example>& eval_pool =
        data.test.n() > 0 ? data.test.examples : data.train.examples;
    SeededStream estimators(cfg.estimator_seed);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    std::ofstream out(fs::path(out_dir) / "sweep.csv");
    if (!out) throw IoError("cannot write sweep.csv in " + out_dir);
    out << "lr,batch_size,epochs_run,steps,R,trace_mean,trajectory_term,flatness_term,total,gap,"
           "status\n";

    std::size_t cell = 0;
    for (double lr : cfg.sweep.lrs) {
        for (std::size_t b : cfg.sweep.batch_sizes) {
            out << format_double(lr) << ',' << b << ',';
            TrainConfig tc = cfg.train;
            tc.lr = LrSchedule::constant(lr);
            tc.batch_size = b;
            tc.epochs = cfg.sweep.max_epochs;
            tc.stop_train_loss = cfg.sweep.loss_threshold;
            tc.log_interval = 1;
            tc.bound_stats = false;
            tc.checkpoint_interval = 0;
            try {
                std::unique_ptr<Model> model = build_model(cfg, data.train);
                TrainTrace trace = sgd_train(*model, data.train, &data.test, tc);
                double R = estimate_R(trace.loss_min, trace.loss_max);
                std::size_t T = trace.steps.size();
                std::vector<double> lrv(T), vhat(T);
                for (std::size_t t = 0; t < T; ++t) {
                    lrv[t] = trace.steps[t].lr;
                    vhat[t] = trace.steps[t].dispersion;
                }
                SeededStream sub = estimators.derive("trace", cell);
                double tm = hutchinson_trace(*model, trace.final_weights, eval_pool,
                                             cfg.bound.probes, cfg.bound.hvp_eps, sub)
                                .value;
                OptimalBound ob = optimal_bound(R, trace.n_train, lrv, vhat, tm);
                const EpochRecord& last = trace.epochs.back();
                out << trace.epochs.size() << ',' << T << ',' << format_double(R) << ','
                    << format_double(tm) << ',' << format_double(ob.trajectory_part) << ','
                    << format_double(ob.flatness_part) << ',' << format_double(ob.total) << ','
                    << format_double(last.test_loss - last.train_loss) << ','
                    << (ob.note.empty() ? "ok" : detail::sanitize_status(ob.note)) << '\n';
            } catch (const DivergenceError& e) {
                out << ",,,,,,,," << "diverged at step " << e.step << '\n';
            } catch (const std::invalid_argument& e) {
                out << ",,,,,,,,"
                    << detail::sanitize_status(std::string("error: ") + e.what()) << '\n';
            }
            ++cell;
        }
    }
    out.close();
    write_manifest(out_dir, "sweep", cfg);
    return 0;
}

}  // namespace genbound::cli
