#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wprior/experiment.hpp"
#include "wprior/families.hpp"

#include "json.hpp"

using namespace wprior;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig = R"(
[experiment]
kind = multiplicity
family = gauss_mean
prior = wprior
theta0 = 0
n = 10
master_seed = 20260809

[budgets]
outer = 16
inner = 16
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("wprior_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(WPRIOR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("minimal config validates and resolves defaults") {
    const ExperimentConfig cfg = parse_config(kMinimalConfig);
    CHECK(cfg.validate().empty());
    CHECK(cfg.kind == "multiplicity");
    CHECK(cfg.budgets.n_outer == 16);
    CHECK(cfg.budgets.n_theta0 == 64);  // untouched default
    CHECK(cfg.mult_form == "direct");
    // canonical serialization parses back to the same canonical form
    const ExperimentConfig round = parse_config(cfg.to_ini());
    CHECK(round.to_ini() == cfg.to_ini());
}

TEST_CASE("validation names the offending fields") {
    ExperimentConfig cfg = parse_config(kMinimalConfig);
    cfg.master_seed.reset();
    bool found = false;
    for (const std::string& e : cfg.validate())
        found = found || e.find("[experiment].master_seed") != std::string::npos;
    CHECK(found);

    ExperimentConfig zero_n = parse_config(kMinimalConfig);
    zero_n.n_grid = {0};
    found = false;
    for (const std::string& e : zero_n.validate())
        found = found || e.find("must be >= 1") != std::string::npos;
    CHECK(found);

    ExperimentConfig bad_family = parse_config(kMinimalConfig);
    bad_family.family = "weibull";
    found = false;
    for (const std::string& e : bad_family.validate())
        found = found || e.find("unknown family 'weibull'") != std::string::npos;
    CHECK(found);

    CHECK_THROWS_AS(parse_config("[experiment]\nkindd = multiplicity\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n"), ConfigError);
}

TEST_CASE("multiplicity run: rows, determinism and the summary round-trip") {
    ExperimentConfig cfg = parse_config(kMinimalConfig);
    const fs::path dir_a = temp_dir("mult_a");
    const fs::path dir_b = temp_dir("mult_b");

    cfg.out_dir = dir_a.string();
    const ExperimentResult a = run_experiment(cfg);
    REQUIRE(a.rows.size() == 1);
    CHECK(a.rows[0].experiment == "multiplicity:direct");
    CHECK(a.rows[0].pass == "pass");  // w-prior at these budgets: wide tolerance
    CHECK(a.exit_code == 0);

    cfg.out_dir = dir_b.string();
    run_experiment(cfg);
    // byte-identical outputs up to the configured directory
    CHECK(slurp((dir_a / "results.csv").string()) == slurp((dir_b / "results.csv").string()));

    // rerunning from the resolved config embedded in the summary reproduces
    // the results byte for byte
    const nlohmann::json summary = nlohmann::json::parse(slurp((dir_a / "summary.json").string()));
    ExperimentConfig embedded = parse_config(summary["resolved_config"].get<std::string>());
    const fs::path dir_c = temp_dir("mult_c");
    embedded.out_dir = dir_c.string();
    run_experiment(embedded);
    CHECK(slurp((dir_a / "results.csv").string()) == slurp((dir_c / "results.csv").string()));
}

TEST_CASE("csv rows carry the fixed column set") {
    ExperimentConfig cfg = parse_config(kMinimalConfig);
    cfg.out_dir = temp_dir("cols").string();
    const ExperimentResult r = run_experiment(cfg);
    const std::string csv = slurp(r.csv_path);
    CHECK(csv.find("experiment,family,prior,theta0,N,estimate,std_error,tolerance,pass") == 0);
}

TEST_CASE("invalid config makes run_experiment throw before any work") {
    ExperimentConfig cfg = parse_config(kMinimalConfig);
    cfg.n_grid = {};
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("selection experiment: fraction row and exit code 3 on a failed threshold") {
    std::ostringstream config;
    config << "[experiment]\nkind = select\nfamily = poly\nn = 200\nmaster_seed = 7\n"
           << "[select]\ntrue_theta = 0.5 1.0\nreplicates = 12\nk_max = 5\npass_fraction = 1.01\n"
           << "[output]\ndir = " << temp_dir("select").string() << "\n";
    const ExperimentConfig cfg = parse_config(config.str());
    REQUIRE(cfg.validate().empty());
    const ExperimentResult r = run_experiment(cfg);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].pass == "fail");  // no fraction can reach 1.01
    CHECK(r.exit_code == 3);
    CHECK(r.rows[0].extra["true_k"] == 2);
}

TEST_CASE("cli: validate, run, determinism and exit codes") {
    const fs::path dir = temp_dir("cli");
    const fs::path config_path = dir / "exp.ini";
    {
        std::ofstream out(config_path);
        out << kMinimalConfig << "\n[output]\ndir = " << (dir / "out").string() << "\n";
    }
    CHECK(run_cli("validate --config " + config_path.string()) == 0);
    CHECK(run_cli("run --config " + config_path.string()) == 0);
    CHECK(fs::exists(dir / "out" / "results.csv"));
    CHECK(fs::exists(dir / "out" / "summary.json"));

    // seed override changes the outputs; the same override reproduces them
    const std::string csv_a = slurp((dir / "out" / "results.csv").string());
    CHECK(run_cli("run --config " + config_path.string() + " --seed 99 --out " +
                  (dir / "out99a").string()) == 0);
    CHECK(run_cli("run --config " + config_path.string() + " --seed 99 --out " +
                  (dir / "out99b").string()) == 0);
    const std::string csv_99a = slurp((dir / "out99a" / "results.csv").string());
    CHECK(csv_99a == slurp((dir / "out99b" / "results.csv").string()));
    CHECK(csv_99a != csv_a);

    // broken config: validation exit code
    const fs::path broken_path = dir / "broken.ini";
    {
        std::ofstream out(broken_path);
        out << "[experiment]\nkind = multiplicity\nfamily = gauss_mean\ntheta0 = 0\nn = 10\n";
    }
    CHECK(run_cli("validate --config " + broken_path.string()) == 2);
    CHECK(run_cli("run --config " + broken_path.string()) == 2);
}

TEST_CASE("cli: select reads a dataset csv and writes the complexity report") {
    const fs::path dir = temp_dir("cli_select");
    const fs::path data_path = dir / "data.csv";
    {
        const auto& poly = family_registry("poly");
        RngStream s(99);
        const Dataset data =
            poly.sample(Parameterization{"poly", {0.2, 1.0, -0.5}}, 300, s);
        write_csv_file(data_path.string(), data, ObsSpace::RealPair);
    }
    CHECK(run_cli("select --data " + data_path.string() + " --kmax 6 --out " +
                  (dir / "rep").string()) == 0);
    CHECK(fs::exists(dir / "rep" / "complexity_report.json"));
    CHECK(fs::exists(dir / "rep" / "complexity_report.csv"));
    const nlohmann::json rep =
        nlohmann::json::parse(slurp((dir / "rep" / "complexity_report.json").string()));
    CHECK(rep["rows"].size() == 6);
}
