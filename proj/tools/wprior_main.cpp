#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "wprior/experiment.hpp"
#include "wprior/families.hpp"
#include "wprior/mc.hpp"
#include "wprior/selection.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    cmd->add_option("--config", opts.config_path, "experiment config file")
        ->required(config_required);
    cmd->add_option("--seed", opts.seed, "override the master seed");
    cmd->add_option("--out", opts.out_dir, "override the output directory");
    cmd->add_option("--jobs", opts.jobs, "worker threads (0 = library default)");
}

wprior::ExperimentConfig load(const CommonOpts& opts, const std::string& forced_kind = "") {
    wprior::ExperimentConfig cfg = wprior::load_config(opts.config_path);
    if (!forced_kind.empty()) cfg.kind = forced_kind;
    if (opts.seed) cfg.master_seed = *opts.seed;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.jobs > 0) cfg.jobs = opts.jobs;
    return cfg;
}

int run(const wprior::ExperimentConfig& cfg) {
    const wprior::ExperimentResult result = wprior::run_experiment(cfg);
    std::size_t passed = 0, failed = 0, na = 0;
    for (const wprior::ResultRow& row : result.rows) {
        if (row.pass == "pass") ++passed;
        else if (row.pass == "fail") ++failed;
        else ++na;
    }
    std::cout << result.rows.size() << " rows (" << passed << " pass, " << failed << " fail, "
              << na << " n/a)\n"
              << "wrote " << result.csv_path << "\n"
              << "wrote " << result.summary_path << "\n";
    for (const std::string& f : result.extra_files) std::cout << "wrote " << f << "\n";
    return result.exit_code;
}

int run_validate(const CommonOpts& opts) {
    const wprior::ExperimentConfig cfg = wprior::load_config(opts.config_path);
    const std::vector<std::string> problems = cfg.validate();
    if (!problems.empty()) {
        for (const std::string& p : problems) std::cerr << "error: " << p << "\n";
        return 2;
    }
    std::cout << "ok\n" << cfg.to_ini();
    return 0;
}

int run_select_direct(const std::string& data_path, const std::string& family_id, int k_max,
                      const std::string& out_dir) {
    const wprior::ModelFamily& family = wprior::family_registry(family_id);
    const wprior::Dataset data = wprior::read_csv_file(data_path);
    const wprior::ComplexityReport report = wprior::total_partition(family, data, k_max);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    std::ofstream((dir / "complexity_report.json").string()) << report.to_json().dump(2) << '\n';
    std::ofstream((dir / "complexity_report.csv").string()) << report.to_csv();
    std::cout << report.to_csv();
    std::cout << "total_log_z = " << report.total_log_z << "\n";
    if (report.truncation_warning)
        std::cout << "warning: truncation tail share " << report.tail_share << " above 1e-6\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"w-prior inference toolkit: evidence, multiplicity, entropy and"
                 " complexity-selection experiments"};
    app.require_subcommand(1);

    CommonOpts opts;

    CLI::App* validate_cmd = app.add_subcommand("validate", "check a config without running it");
    add_common(validate_cmd, opts);

    CLI::App* run_cmd = app.add_subcommand("run", "run the experiment described by the config");
    add_common(run_cmd, opts);

    const std::pair<const char*, const char*> kinds[] = {
        {"multiplicity", "log predictive multiplicity over a (theta0, N) grid"},
        {"entropy", "disorder-averaged Gibbs entropy over a (theta0, N) grid"},
        {"coding-info", "parameter-coding information against log N_Theta"},
        {"optimality", "true-prior performance/predictivity table"},
        {"density", "density of distinguishable models against the volume oracle"},
    };
    for (const auto& [name, help] : kinds) add_common(app.add_subcommand(name, help), opts);

    CLI::App* select_cmd =
        app.add_subcommand("select", "complexity selection: per-K free energies and weights");
    std::string select_data, select_family = "poly", select_out = "out";
    int select_k_max = 10;
    select_cmd->add_option("--config", opts.config_path, "experiment config file");
    select_cmd->add_option("--data", select_data, "dataset CSV (one observation per row)");
    select_cmd->add_option("--family", select_family, "family id for --data mode");
    select_cmd->add_option("--kmax", select_k_max, "largest complexity for --data mode");
    select_cmd->add_option("--seed", opts.seed, "override the master seed");
    select_cmd->add_option("--out", select_out, "output directory");
    select_cmd->add_option("--jobs", opts.jobs, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (opts.jobs > 0) wprior::set_parallel_workers(opts.jobs);
        if (validate_cmd->parsed()) return run_validate(opts);
        if (run_cmd->parsed()) return run(load(opts));
        for (const auto& [name, help] : kinds) {
            (void)help;
            if (app.get_subcommand(name)->parsed()) {
                std::string kind = name;
                if (kind == "coding-info") kind = "coding_info";
                return run(load(opts, kind));
            }
        }
        if (select_cmd->parsed()) {
            if (!select_data.empty())
                return run_select_direct(select_data, select_family, select_k_max, select_out);
            if (opts.config_path.empty()) {
                std::cerr << "error: select needs --data or --config\n";
                return 2;
            }
            opts.out_dir = opts.out_dir.empty() ? "" : opts.out_dir;
            return run(load(opts, "select"));
        }
    } catch (const wprior::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
