#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "genbound/errors.hpp"
#include "genbound/generator.hpp"
#include "genbound/seeded_stream.hpp"
#include "genbound/train_config.hpp"

namespace genbound::cli {

// Flat-section key=value config file. Sections are [name] headers, values are
// plain strings typed at read time, '#' and ';' start comments. Reads are
// tracked so that keys nobody consumed can be rejected as typos.
class ConfigFile {
public:
    ConfigFile() = default;

    static ConfigFile from_string(const std::string& text, const std::string& origin = "<string>") {
        ConfigFile cfg;
        std::istringstream in(text);
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string s = trim(line);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            if (s.front() == '[') {
                if (s.back() != ']' || s.size() < 3)
                    throw ConfigError(origin + ":" + std::to_string(line_no) +
                                      ": malformed section header");
                section = trim(s.substr(1, s.size() - 2));
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": expected key = value");
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": key outside any [section]");
            std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
            if (!cfg.sections_[section].emplace(key, value).second)
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key " +
                                  section + "." + key);
        }
        return cfg;
    }

    static ConfigFile from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot read config file " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_string(buf.str(), path);
    }

    // command-line override, "section.key=value"; overrides win over the file
    void set(const std::string& assignment) {
        auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set wants section.key=value, got " + assignment);
        std::string key = trim(assignment.substr(0, eq));
        auto dot = key.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
            throw ConfigError("--set wants section.key=value, got " + assignment);
        sections_[key.substr(0, dot)][key.substr(dot + 1)] = trim(assignment.substr(eq + 1));
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        consumed_.insert(section + "." + key);
        auto s = sections_.find(section);
        if (s == sections_.end()) return fallback;
        auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        std::string raw = get_string(section, key, "");
        if (raw.empty()) return fallback;
        try {
            std::size_t pos = 0;
            double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(section + "." + key + ": not a number: " + raw);
        }
    }

    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const {
        std::string raw = get_string(section, key, "");
        if (raw.empty()) return fallback;
        try {
            std::size_t pos = 0;
            std::int64_t v = std::stoll(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(section + "." + key + ": not an integer: " + raw);
        }
    }

    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const {
        std::string raw = get_string(section, key, "");
        if (raw.empty()) return fallback;
        try {
            std::size_t pos = 0;
            std::uint64_t v = std::stoull(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(section + "." + key + ": not an unsigned integer: " + raw);
        }
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        std::string raw = get_string(section, key, "");
        if (raw.empty()) return fallback;
        if (raw == "true" || raw == "yes" || raw == "1") return true;
        if (raw == "false" || raw == "no" || raw == "0") return false;
        throw ConfigError(section + "." + key + ": not a boolean: " + raw);
    }

    std::vector<std::string> get_list(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
        std::string raw = get_string(section, key, fallback);
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(raw);
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    // stable serialized form: sorted sections and keys, one assignment a line
    std::string canonical_dump() const {
        std::ostringstream out;
        for (const auto& [section, keys] : sections_) {
            out << '[' << section << "]\n";
            for (const auto& [key, value] : keys) out << key << " = " << value << '\n';
        }
        return out.str();
    }

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : canonical_dump()) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    void ensure_all_consumed() const {
        std::vector<std::string> unknown;
        for (const auto& [section, keys] : sections_)
            for (const auto& [key, value] : keys)
                if (!consumed_.count(section + "." + key)) unknown.push_back(section + "." + key);
        if (!unknown.empty()) {
            std::string msg = "unknown config keys:";
            for (const std::string& k : unknown) msg += " " + k;
            throw ConfigError(msg);
        }
    }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
    mutable std::set<std::string> consumed_;
};

// "0.1" for a constant rate, "1:0.1,51:0.01" for a step schedule
inline LrSchedule parse_lr_schedule(const std::string& raw) {
    if (raw.find(':') == std::string::npos) {
        try {
            return LrSchedule::constant(std::stod(raw));
        } catch (const std::invalid_argument&) {
            throw ConfigError("train.lr: not a rate or schedule: " + raw);
        }
    }
    std::vector<std::pair<std::int64_t, double>> knots;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("train.lr: schedule knots want step:rate, got " + item);
        try {
            knots.push_back({std::stoll(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw ConfigError("train.lr: bad schedule knot: " + item);
        }
    }
    try {
        return LrSchedule(knots);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("train.lr: ") + e.what());
    }
}

struct DataConfig {
    std::string source = "generate";  // generate | csv
    GenConfig gen;
    std::string train_csv;
    std::string test_csv;
    bool has_header = false;
};

struct ModelConfig {
    std::string kind;           // linear | relu2 | mlp
    std::size_t input_dim = 0;  // 0: use the dataset's dimension
    std::size_t width = 50;     // relu2 hidden units
    std::vector<std::size_t> hidden = {32};  // mlp hidden layer sizes
};

struct BoundConfig {
    double sigma = 0.01;  // constant auxiliary noise level
    std::vector<std::string> variants = {"optimal", "log", "linear", "norm"};
    std::string trace_dir;  // trace to evaluate (bound command)
    std::size_t probes = 64;
    double hvp_eps = 1e-3;
    std::size_t psi_samples = 20;
    std::size_t gamma_samples = 100;
    std::string flatness = "taylor";  // taylor | empirical
    double beta = 0.0;                // adds a beta-smooth variant when > 0
};

struct SweepConfig {
    std::vector<double> lrs = {0.1};
    std::vector<std::size_t> batch_sizes = {100};
    double loss_threshold = 1e-4;
    std::size_t max_epochs = 200;
};

struct ExperimentConfig {
    DataConfig data;
    ModelConfig model;
    TrainConfig train;
    BoundConfig bound;
    SweepConfig sweep;
    std::uint64_t seed = 1;

    // resolved from the master seed so each consumer has its own stream
    std::uint64_t data_seed = 0;
    std::uint64_t signs_seed = 0;
    std::uint64_t estimator_seed = 0;

    std::uint64_t config_hash = 0;
    std::string canonical;
};

inline const std::set<std::string> kKnownVariants = {
    "optimal", "log", "linear", "neu", "corollary", "norm", "linear_net", "relu_net"};

// Reads every recognized key, applies defaults, validates, and fans the
// master seed out to labeled sub-streams so that e.g. changing an estimator's
// sampling never perturbs training.
inline ExperimentConfig load_experiment_config(const ConfigFile& file) {
    ExperimentConfig cfg;

    cfg.data.source = file.get_string("data", "source", "generate");
    if (cfg.data.source != "generate" && cfg.data.source != "csv")
        throw ConfigError("data.source must be generate or csv");
    std::string task = file.get_string("data", "task", "regression");
    if (task == "regression") {
        cfg.data.gen.task = TaskKind::regression;
    } else if (task == "classification") {
        cfg.data.gen.task = TaskKind::classification;
    } else {
        throw ConfigError("data.task must be regression or classification");
    }
    cfg.data.gen.d0 = static_cast<std::size_t>(file.get_int("data", "d0", 20));
    cfg.data.gen.teacher_width =
        static_cast<std::size_t>(file.get_int("data", "teacher_width", 1000));
    cfg.data.gen.n_train = static_cast<std::size_t>(file.get_int("data", "n_train", 2000));
    cfg.data.gen.n_test = static_cast<std::size_t>(file.get_int("data", "n_test", 2000));
    cfg.data.gen.classes = static_cast<std::size_t>(file.get_int("data", "classes", 2));
    cfg.data.gen.noise_level = file.get_double("data", "noise_level", 0.0);
    cfg.data.train_csv = file.get_string("data", "train_csv", "");
    cfg.data.test_csv = file.get_string("data", "test_csv", "");
    cfg.data.has_header = file.get_bool("data", "has_header", false);
    if (cfg.data.source == "generate") {
        if (cfg.data.gen.d0 < 1) throw ConfigError("data.d0 must be >= 1");
        if (cfg.data.gen.teacher_width < 1) throw ConfigError("data.teacher_width must be >= 1");
        if (cfg.data.gen.n_train < 1) throw ConfigError("data.n_train must be >= 1");
        if (cfg.data.gen.task == TaskKind::classification && cfg.data.gen.classes < 2)
            throw ConfigError("data.classes must be >= 2");
        if (cfg.data.gen.noise_level < 0.0 || cfg.data.gen.noise_level > 1.0)
            throw ConfigError("data.noise_level must lie in [0,1]");
    } else if (cfg.data.train_csv.empty()) {
        throw ConfigError("data.train_csv is required when data.source = csv");
    }

    std::string default_kind = cfg.data.gen.task == TaskKind::classification ? "mlp" : "linear";
    cfg.model.kind = file.get_string("model", "kind", default_kind);
    if (cfg.model.kind != "linear" && cfg.model.kind != "relu2" && cfg.model.kind != "mlp")
        throw ConfigError("model.kind must be linear, relu2 or mlp");
    if (cfg.data.gen.task == TaskKind::classification && cfg.model.kind != "mlp")
        throw ConfigError("classification tasks need model.kind = mlp");
    if (cfg.data.gen.task == TaskKind::regression && cfg.model.kind == "mlp")
        throw ConfigError("model.kind = mlp needs data.task = classification");
    cfg.model.input_dim = static_cast<std::size_t>(file.get_int("model", "input_dim", 0));
    cfg.model.width = static_cast<std::size_t>(file.get_int("model", "width", 50));
    if (cfg.model.kind == "relu2" && cfg.model.width < 1)
        throw ConfigError("model.width must be >= 1");
    cfg.model.hidden.clear();
    for (const std::string& item : file.get_list("model", "hidden", "32")) {
        std::int64_t h = 0;
        try {
            h = std::stoll(item);
        } catch (const std::exception&) {
            throw ConfigError("model.hidden: not an integer: " + item);
        }
        if (h < 1) throw ConfigError("model.hidden entries must be >= 1");
        cfg.model.hidden.push_back(static_cast<std::size_t>(h));
    }

    cfg.train.lr = parse_lr_schedule(file.get_string("train", "lr", "0.1"));
    cfg.train.epochs = static_cast<std::size_t>(file.get_int("train", "epochs", 10));
    cfg.train.batch_size = static_cast<std::size_t>(file.get_int("train", "batch_size", 100));
    std::string scheme = file.get_string("train", "scheme", "plain");
    if (scheme == "plain") {
        cfg.train.scheme = Scheme::plain;
    } else if (scheme == "clip") {
        cfg.train.scheme = Scheme::clip;
    } else if (scheme == "gmp") {
        cfg.train.scheme = Scheme::gmp;
    } else {
        throw ConfigError("train.scheme must be plain, clip or gmp");
    }
    cfg.train.log_interval = file.get_int("train", "log_interval", 1);
    cfg.train.bound_stats = file.get_bool("train", "bound_stats", false);
    cfg.train.checkpoint_interval = file.get_int("train", "checkpoint_interval", 0);
    cfg.train.divergence_threshold = file.get_double("train", "divergence_threshold", 1e6);
    cfg.train.init_std = file.get_double("train", "init_std", 1.0);
    cfg.train.stop_train_loss = file.get_double("train", "stop_train_loss", 0.0);

    cfg.train.clip.alpha = file.get_double("clip", "alpha", 0.1);
    cfg.train.clip.start_step = file.get_int("clip", "start_step", -1);
    cfg.train.gmp.rho = file.get_double("gmp", "rho", 0.5);
    cfg.train.gmp.sigma = file.get_double("gmp", "sigma", 0.03);
    cfg.train.gmp.k = static_cast<std::size_t>(file.get_int("gmp", "k", 3));
    cfg.train.gmp.abs_variant = file.get_bool("gmp", "abs_variant", false);
    cfg.train.gmp.sigma_scaled = file.get_bool("gmp", "sigma_scaled", false);

    cfg.bound.sigma = file.get_double("bound", "sigma", 0.01);
    if (!(cfg.bound.sigma > 0.0)) throw ConfigError("bound.sigma must be positive");
    cfg.bound.variants = file.get_list("bound", "variants", "optimal,log,linear,norm");
    for (const std::string& v : cfg.bound.variants)
        if (!kKnownVariants.count(v)) throw ConfigError("bound.variants: unknown variant " + v);
    cfg.bound.trace_dir = file.get_string("bound", "trace_dir", "");
    cfg.bound.probes = static_cast<std::size_t>(file.get_int("bound", "probes", 64));
    if (cfg.bound.probes < 1) throw ConfigError("bound.probes must be >= 1");
    cfg.bound.hvp_eps = file.get_double("bound", "hvp_eps", 1e-3);
    if (!(cfg.bound.hvp_eps > 0.0)) throw ConfigError("bound.hvp_eps must be positive");
    cfg.bound.psi_samples = static_cast<std::size_t>(file.get_int("bound", "psi_samples", 20));
    if (cfg.bound.psi_samples < 1) throw ConfigError("bound.psi_samples must be >= 1");
    cfg.bound.gamma_samples =
        static_cast<std::size_t>(file.get_int("bound", "gamma_samples", 100));
    if (cfg.bound.gamma_samples < 1) throw ConfigError("bound.gamma_samples must be >= 1");
    cfg.bound.flatness = file.get_string("bound", "flatness", "taylor");
    if (cfg.bound.flatness != "taylor" && cfg.bound.flatness != "empirical")
        throw ConfigError("bound.flatness must be taylor or empirical");
    cfg.bound.beta = file.get_double("bound", "beta", 0.0);
    if (cfg.bound.beta < 0.0) throw ConfigError("bound.beta must be >= 0");

    cfg.sweep.lrs.clear();
    for (const std::string& item : file.get_list("sweep", "lrs", "0.1")) {
        try {
            cfg.sweep.lrs.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("sweep.lrs: not a number: " + item);
        }
    }
    cfg.sweep.batch_sizes.clear();
    for (const std::string& item : file.get_list("sweep", "batch_sizes", "100")) {
        std::int64_t b = 0;
        try {
            b = std::stoll(item);
        } catch (const std::exception&) {
            throw ConfigError("sweep.batch_sizes: not an integer: " + item);
        }
        if (b < 1) throw ConfigError("sweep.batch_sizes entries must be >= 1");
        cfg.sweep.batch_sizes.push_back(static_cast<std::size_t>(b));
    }
    if (cfg.sweep.lrs.empty() || cfg.sweep.batch_sizes.empty())
        throw ConfigError("sweep axes must be nonempty");
    cfg.sweep.loss_threshold = file.get_double("sweep", "loss_threshold", 1e-4);
    cfg.sweep.max_epochs = static_cast<std::size_t>(file.get_int("sweep", "max_epochs", 200));
    if (cfg.sweep.max_epochs < 1) throw ConfigError("sweep.max_epochs must be >= 1");

    cfg.seed = file.get_u64("run", "seed", 1);

    SeededStream master(cfg.seed);
    cfg.data_seed = master.derive("data").seed();
    cfg.signs_seed = master.derive("signs").seed();
    cfg.estimator_seed = master.derive("estimators").seed();
    cfg.train.seed_init = master.derive("init").seed();
    cfg.train.seed_batch = master.derive("batching").seed();
    cfg.train.seed_scheme = master.derive("scheme").seed();

    try {
        cfg.train.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("train config: ") + e.what());
    }

    file.ensure_all_consumed();
    cfg.config_hash = file.hash();
    cfg.canonical = file.canonical_dump();
    return cfg;
}

}  // namespace genbound::cli
