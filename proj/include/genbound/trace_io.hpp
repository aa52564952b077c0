#pragma once

#include <filesystem>

#include "genbound/checkpoint.hpp"
#include "genbound/csv.hpp"
#include "genbound/trainer.hpp"

namespace genbound {

// On-disk layout of a training run:
//   steps.csv        step,epoch,lr,grad_norm,dispersion,activation_frac,batch_loss
//   epochs.csv       epoch,train_loss,train_acc,test_loss,test_acc
//   extrema.csv      epoch,loss_min,loss_max,mean_grad_norm
//   bound_stats.csv  step,mean_loss,act_weighted_loss,act_fraction,gnorm_sq (optional)
//   trace_meta.txt   key=value pairs
//   ckpt_<t>.ckpt    weight snapshots, always including 0; final.ckpt = last step
// Unavailable values serialize as empty cells and load back as NaN.

namespace detail {

inline std::string cell(double v) {
    return std::isnan(v) ? std::string() : format_double(v);
}

inline double cell_value(const std::string& s, int line) {
    return s.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(s, line);
}

inline void expect_header(const std::string& got, const std::string& want,
                          const std::string& path) {
    if (got != want) throw SchemaError(path + ": expected header '" + want + "', got '" + got + "'");
}

}  // namespace detail

inline std::string checkpoint_file(const std::string& dir, std::int64_t step) {
    return (std::filesystem::path(dir) / ("ckpt_" + std::to_string(step) + ".ckpt")).string();
}

inline void write_trace(const std::string& dir, const Model& model, const TrainTrace& trace) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
        std::ofstream out(fs::path(dir) / "steps.csv");
        if (!out) throw IoError("write_trace: cannot open steps.csv in " + dir);
        out << "step,epoch,lr,grad_norm,dispersion,activation_frac,batch_loss\n";
        for (const StepRecord& r : trace.steps)
            out << r.step << ',' << r.epoch << ',' << format_double(r.lr) << ','
                << format_double(r.grad_norm) << ',' << detail::cell(r.dispersion) << ','
                << detail::cell(r.activation_frac) << ',' << format_double(r.batch_loss) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "epochs.csv");
        out << "epoch,train_loss,train_acc,test_loss,test_acc\n";
        for (const EpochRecord& r : trace.epochs)
            out << r.epoch << ',' << format_double(r.train_loss) << ','
                << detail::cell(r.train_acc) << ',' << detail::cell(r.test_loss) << ','
                << detail::cell(r.test_acc) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "extrema.csv");
        out << "epoch,loss_min,loss_max,mean_grad_norm\n";
        for (const EpochRecord& r : trace.epochs)
            out << r.epoch << ',' << format_double(r.loss_min_so_far) << ','
                << format_double(r.loss_max_so_far) << ',' << format_double(r.mean_grad_norm)
                << '\n';
    }
    if (!trace.bound_stats.empty()) {
        std::ofstream out(fs::path(dir) / "bound_stats.csv");
        out << "step,mean_loss,act_weighted_loss,act_fraction,gnorm_sq\n";
        for (const BoundStatsRecord& r : trace.bound_stats)
            out << r.step << ',' << format_double(r.mean_loss) << ','
                << detail::cell(r.act_weighted_loss) << ',' << detail::cell(r.act_fraction)
                << ',' << format_double(r.gnorm_sq) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "trace_meta.txt");
        out << "total_steps=" << trace.total_steps << "\n"
            << "n_train=" << trace.n_train << "\n"
            << "batch_size=" << trace.batch_size << "\n"
            << "clip_start_step=" << trace.clip_start_step << "\n"
            << "loss_min=" << format_double(trace.loss_min) << "\n"
            << "loss_max=" << format_double(trace.loss_max) << "\n";
    }
    for (const auto& [step, weights] : trace.checkpoints)
        save_checkpoint(checkpoint_file(dir, step), model, weights);
    save_checkpoint((fs::path(dir) / "final.ckpt").string(), model, trace.final_weights);
}

struct LoadedTrace {
    std::vector<StepRecord> steps;
    std::vector<EpochRecord> epochs;
    std::vector<BoundStatsRecord> bound_stats;
    double loss_min = 0.0;
    double loss_max = 0.0;
    std::int64_t total_steps = 0;
    std::size_t n_train = 0;
    std::size_t batch_size = 0;
    std::int64_t clip_start_step = -1;
    ModelSpec model_spec;
    ParamVector final_weights;
    std::string dir;

    bool has_step_dispersion() const {
        if (steps.empty()) return false;
        for (const StepRecord& r : steps)
            if (std::isnan(r.dispersion)) return false;
        return true;
    }

    bool has_all_checkpoints() const {
        for (std::int64_t s = 0; s <= total_steps; ++s)
            if (!std::filesystem::exists(checkpoint_file(dir, s))) return false;
        return true;
    }
};

inline LoadedTrace load_trace(const std::string& dir) {
    namespace fs = std::filesystem;
    LoadedTrace trace;
    trace.dir = dir;

    std::vector<std::string> missing;
    for (const char* name : {"steps.csv", "epochs.csv", "extrema.csv", "trace_meta.txt",
                             "final.ckpt"})
        if (!fs::exists(fs::path(dir) / name)) missing.emplace_back(name);
    if (!missing.empty()) {
        std::string what = "load_trace: " + dir + " is missing";
        for (const std::string& name : missing) what += " " + name;
        throw InsufficientTraceError(what);
    }

    {
        std::ifstream in(fs::path(dir) / "steps.csv");
        std::string line;
        std::getline(in, line);
        detail::expect_header(line, "step,epoch,lr,grad_norm,dispersion,activation_frac,batch_loss",
                              "steps.csv");
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto cells = split_line(line);
            if (cells.size() != 7) throw ParseError("steps.csv: want 7 cells", line_no);
            StepRecord r;
            r.step = parse_int(cells[0], line_no);
            r.epoch = static_cast<std::size_t>(parse_int(cells[1], line_no));
            r.lr = parse_double(cells[2], line_no);
            r.grad_norm = parse_double(cells[3], line_no);
            r.dispersion = detail::cell_value(cells[4], line_no);
            r.activation_frac = detail::cell_value(cells[5], line_no);
            r.batch_loss = parse_double(cells[6], line_no);
            trace.steps.push_back(r);
        }
    }
    {
        std::ifstream in(fs::path(dir) / "epochs.csv");
        std::string line;
        std::getline(in, line);
        detail::expect_header(line, "epoch,train_loss,train_acc,test_loss,test_acc", "epochs.csv");
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto cells = split_line(line);
            if (cells.size() != 5) throw ParseError("epochs.csv: want 5 cells", line_no);
            EpochRecord r;
            r.epoch = static_cast<std::size_t>(parse_int(cells[0], line_no));
            r.train_loss = parse_double(cells[1], line_no);
            r.train_acc = detail::cell_value(cells[2], line_no);
            r.test_loss = detail::cell_value(cells[3], line_no);
            r.test_acc = detail::cell_value(cells[4], line_no);
            trace.epochs.push_back(r);
        }
    }
    {
        std::ifstream in(fs::path(dir) / "extrema.csv");
        std::string line;
        std::getline(in, line);
        detail::expect_header(line, "epoch,loss_min,loss_max,mean_grad_norm", "extrema.csv");
        int line_no = 1;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto cells = split_line(line);
            if (cells.size() != 4) throw ParseError("extrema.csv: want 4 cells", line_no);
            if (row >= trace.epochs.size())
                throw SchemaError("extrema.csv has more rows than epochs.csv");
            trace.epochs[row].loss_min_so_far = parse_double(cells[1], line_no);
            trace.epochs[row].loss_max_so_far = parse_double(cells[2], line_no);
            trace.epochs[row].mean_grad_norm = parse_double(cells[3], line_no);
            ++row;
        }
    }
    if (fs::exists(fs::path(dir) / "bound_stats.csv")) {
        std::ifstream in(fs::path(dir) / "bound_stats.csv");
        std::string line;
        std::getline(in, line);
        detail::expect_header(line, "step,mean_loss,act_weighted_loss,act_fraction,gnorm_sq",
                              "bound_stats.csv");
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto cells = split_line(line);
            if (cells.size() != 5) throw ParseError("bound_stats.csv: want 5 cells", line_no);
            BoundStatsRecord r;
            r.step = parse_int(cells[0], line_no);
            r.mean_loss = parse_double(cells[1], line_no);
            r.act_weighted_loss = detail::cell_value(cells[2], line_no);
            r.act_fraction = detail::cell_value(cells[3], line_no);
            r.gnorm_sq = parse_double(cells[4], line_no);
            trace.bound_stats.push_back(r);
        }
    }
    {
        std::ifstream in(fs::path(dir) / "trace_meta.txt");
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError("trace_meta.txt: want key=value", line_no);
            std::string key = line.substr(0, eq), val = line.substr(eq + 1);
            if (key == "total_steps") trace.total_steps = parse_int(val, line_no);
            else if (key == "n_train") trace.n_train = static_cast<std::size_t>(parse_int(val, line_no));
            else if (key == "batch_size") trace.batch_size = static_cast<std::size_t>(parse_int(val, line_no));
            else if (key == "clip_start_step") trace.clip_start_step = parse_int(val, line_no);
            else if (key == "loss_min") trace.loss_min = parse_double(val, line_no);
            else if (key == "loss_max") trace.loss_max = parse_double(val, line_no);
        }
    }
    Checkpoint final = load_checkpoint((fs::path(dir) / "final.ckpt").string());
    trace.model_spec = std::move(final.spec);
    trace.final_weights = std::move(final.weights);
    return trace;
}

}  // namespace genbound
