#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "genbound/cli/commands.hpp"
#include "genbound/cli/config.hpp"

namespace {

// Exit codes: 0 success, 2 config validation, 3 I/O or data parsing,
// 4 training divergence, 5 incomplete trace, 6 unsupported model, 1 other.
enum ExitCode {
    kOk = 0,
    kOther = 1,
    kConfig = 2,
    kIo = 3,
    kDivergence = 4,
    kInsufficientTrace = 5,
    kUnsupportedModel = 6,
};

std::string resolve_out_dir(const std::string& out_flag, const std::string& command,
                            const genbound::cli::ExperimentConfig& cfg) {
    if (!out_flag.empty()) return out_flag;
    const char* root = std::getenv("GENBOUND_OUT_ROOT");
    if (root && *root)
        return std::string(root) + "/" + command + "-" + genbound::cli::hex16(cfg.config_hash);
    throw genbound::ConfigError("no --out given and GENBOUND_OUT_ROOT is unset");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"instrumented SGD training with generalization-bound reporting"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;

    const std::pair<const char*, const char*> commands[] = {
        {"gen-data", "generate a teacher-student dataset and write train/test CSVs"},
        {"train", "run instrumented SGD and write the trace directory"},
        {"bound", "evaluate bound variants on a recorded trace"},
        {"compare-trajectory", "train and compare trajectory terms epoch by epoch"},
        {"sweep", "train a learning-rate/batch-size grid and tabulate bounds vs gap"},
    };
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--set", overrides, "override a key, section.key=value (repeatable)");
        sub->add_option("--out", out_dir, "output directory (default $GENBOUND_OUT_ROOT/<run>)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        genbound::cli::ConfigFile file = genbound::cli::ConfigFile::from_file(config_path);
        for (const std::string& assignment : overrides) file.set(assignment);
        genbound::cli::ExperimentConfig cfg = genbound::cli::load_experiment_config(file);
        std::string out = resolve_out_dir(out_dir, command, cfg);

        if (command == "gen-data") return genbound::cli::cmd_gen_data(cfg, out);
        if (command == "train") return genbound::cli::cmd_train(cfg, out);
        if (command == "bound") return genbound::cli::cmd_bound(cfg, out);
        if (command == "compare-trajectory")
            return genbound::cli::cmd_compare_trajectory(cfg, out);
        if (command == "sweep") return genbound::cli::cmd_sweep(cfg, out);
        std::cerr << "error: unknown command " << command << "\n";
        return kOther;
    } catch (const genbound::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const genbound::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDivergence;
    } catch (const genbound::InsufficientTraceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInsufficientTrace;
    } catch (const genbound::UnsupportedModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUnsupportedModel;
    } catch (const genbound::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const genbound::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const genbound::EmptyDatasetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const genbound::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
}
