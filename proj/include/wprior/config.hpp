#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wprior/estimators.hpp"

namespace wprior {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Declarative description of one experiment run. Parsed from a small
/// sectioned key-value format; unknown keys are validation errors so typos
/// cannot silently change a run.
struct ExperimentConfig {
    // [experiment]
    std::string kind;                  // multiplicity | entropy | coding_info | select | optimality | density
    std::string family;
    std::string prior = "wprior";
    std::vector<double> theta0_grid;
    std::vector<std::size_t> n_grid;
    std::optional<std::uint64_t> master_seed;

    // [budgets]
    Budgets budgets;

    // [entropy]
    std::vector<double> taus{0.9, 0.95, 1.0, 1.05, 1.1};
    int stencil = 5;

    // [multiplicity]
    std::string mult_form = "direct";  // direct | cv | both

    // [coding_info]
    double domain_scale = 1.0;         // stretches the default truncation box

    // [select]
    std::string select_data;           // dataset CSV; empty -> generate replicates
    std::vector<double> select_true_theta{0.5, 1.0, -0.8};
    std::size_t select_replicates = 200;
    int select_k_max = 10;
    double select_pass_fraction = 0.9;

    // [optimality]
    std::string opt_true_prior = "gauss:0,1";
    std::vector<std::string> opt_candidates{"gauss:0,1", "gauss:1,1", "gauss:0,4"};

    // [density]
    std::vector<double> density_d{0.25, 0.5, 1.0};

    // [output]
    std::string out_dir = "out";
    int jobs = 0;

    /// Field-path-labelled validation problems; empty means runnable.
    std::vector<std::string> validate() const;

    /// Canonical serialization with every resolved value; parsing it back
    /// reproduces this config exactly.
    std::string to_ini() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace wprior
