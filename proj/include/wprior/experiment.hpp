#pragma once

#include <string>
#include <vector>

#include "wprior/config.hpp"

#include "json.hpp"

namespace wprior {

/// One fixed-format output row. pass is tri-state: criteria that do not
/// apply to a row (e.g. a zero-multiplicity claim under a non-w prior)
/// record "na".
struct ResultRow {
    std::string experiment;
    std::string family;
    std::string prior;
    std::string theta0;
    std::size_t n = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double tolerance = 0.0;
    std::string pass;   // "pass" | "fail" | "na"
    nlohmann::json extra;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    int exit_code = 0;          // 0 ok, 3 tolerance failure, 4 runtime/quality failure
    std::string csv_path;
    std::string summary_path;
    std::vector<std::string> extra_files;
};

std::string rows_to_csv(const std::vector<ResultRow>& rows);

/// Runs the configured experiment grid and writes results.csv plus a JSON
/// summary embedding the fully resolved config (rerunning from that embedded
/// config reproduces the outputs byte for byte). Grid points execute in
/// parallel; files are written once after the reduction.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace wprior
