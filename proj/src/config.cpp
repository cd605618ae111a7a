#include "wprior/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wprior/family.hpp"
#include "wprior/prior.hpp"

namespace wprior {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string token;
    for (char c : s) {
        if (c == ' ' || c == ',' || c == '\t') {
            if (!token.empty()) out.push_back(token);
            token.clear();
        } else {
            token.push_back(c);
        }
    }
    if (!token.empty()) out.push_back(token);
    return out;
}

double parse_double(const std::string& where, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not a number: '" + s + "'");
    }
}

long long parse_int(const std::string& where, const std::string& s) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not an integer: '" + s + "'");
    }
}

std::vector<double> parse_doubles(const std::string& where, const std::string& s) {
    std::vector<double> out;
    for (const std::string& tok : split_list(s)) out.push_back(parse_double(where, tok));
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.taus.clear();           // distinguish "unset" from defaults while parsing
    bool taus_set = false;

    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string where = "[" + section + "]." + key;

        if (section == "experiment") {
            if (key == "kind") cfg.kind = value;
            else if (key == "family") cfg.family = value;
            else if (key == "prior") cfg.prior = value;
            else if (key == "theta0") cfg.theta0_grid = parse_doubles(where, value);
            else if (key == "n") {
                cfg.n_grid.clear();
                for (const std::string& tok : split_list(value)) {
                    const long long v = parse_int(where, tok);
                    if (v < 0) throw ConfigError(where + ": negative observation count");
                    cfg.n_grid.push_back(static_cast<std::size_t>(v));
                }
            } else if (key == "master_seed") {
                cfg.master_seed = static_cast<std::uint64_t>(parse_int(where, value));
            } else throw ConfigError(where + ": unknown key");
        } else if (section == "budgets") {
            const long long v = parse_int(where, value);
            if (v < 2) throw ConfigError(where + ": budgets must be >= 2");
            if (key == "outer") cfg.budgets.n_outer = static_cast<std::size_t>(v);
            else if (key == "inner") cfg.budgets.n_inner = static_cast<std::size_t>(v);
            else if (key == "theta0_draws") cfg.budgets.n_theta0 = static_cast<std::size_t>(v);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "entropy") {
            if (key == "taus") {
                cfg.taus = parse_doubles(where, value);
                taus_set = true;
            } else if (key == "stencil") cfg.stencil = static_cast<int>(parse_int(where, value));
            else throw ConfigError(where + ": unknown key");
        } else if (section == "multiplicity") {
            if (key == "form") cfg.mult_form = value;
            else throw ConfigError(where + ": unknown key");
        } else if (section == "coding_info") {
            if (key == "domain_scale") cfg.domain_scale = parse_double(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "select") {
            if (key == "data") cfg.select_data = value;
            else if (key == "true_theta") cfg.select_true_theta = parse_doubles(where, value);
            else if (key == "replicates") cfg.select_replicates =
                static_cast<std::size_t>(parse_int(where, value));
            else if (key == "k_max") cfg.select_k_max = static_cast<int>(parse_int(where, value));
            else if (key == "pass_fraction") cfg.select_pass_fraction = parse_double(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "optimality") {
            if (key == "true_prior") cfg.opt_true_prior = value;
            else if (key == "candidates") cfg.opt_candidates = split_list(value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "density") {
            if (key == "d_ball") cfg.density_d = parse_doubles(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = value;
            else if (key == "jobs") cfg.jobs = static_cast<int>(parse_int(where, value));
            else throw ConfigError(where + ": unknown key");
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
        }
    }
    if (!taus_set) cfg.taus = {0.9, 0.95, 1.0, 1.05, 1.1};
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> errs;
    const auto known_kind = [&] {
        return kind == "multiplicity" || kind == "entropy" || kind == "coding_info" ||
               kind == "select" || kind == "optimality" || kind == "density";
    };
    if (kind.empty())
        errs.push_back("[experiment].kind: required");
    else if (!known_kind())
        errs.push_back("[experiment].kind: unknown kind '" + kind + "'");
    if (family.empty()) {
        errs.push_back("[experiment].family: required");
    } else {
        try {
            family_registry(family);
        } catch (const std::exception&) {
            errs.push_back("[experiment].family: unknown family '" + family + "'");
        }
    }
    if (!master_seed) errs.push_back("[experiment].master_seed: required");

    const bool needs_grid = kind == "multiplicity" || kind == "entropy" || kind == "coding_info";
    if (needs_grid) {
        if (theta0_grid.empty()) errs.push_back("[experiment].theta0: required for kind " + kind);
        if (n_grid.empty()) errs.push_back("[experiment].n: required for kind " + kind);
    }
    if ((needs_grid || kind == "density") && !family.empty()) {
        try {
            if (family_registry(family).complexity_range().first != 1)
                errs.push_back("[experiment].family: kind " + kind +
                               " needs a one-parameter family for its theta0 grid");
        } catch (const std::exception&) {
        }
    }
    for (std::size_t n : n_grid)
        if (n == 0) errs.push_back("[experiment].n: observation counts must be >= 1");

    if (!family.empty()) {
        try {
            const ModelFamily& fam = family_registry(family);
            const std::size_t n_ref = n_grid.empty() ? 100 : n_grid.front();
            parse_prior_spec(fam, fam.complexity_range().first, static_cast<double>(n_ref), prior);
        } catch (const ConfigError&) {
        } catch (const std::invalid_argument& e) {
            if (std::string(e.what()).find("unknown family") == std::string::npos)
                errs.push_back("[experiment].prior: " + std::string(e.what()));
        }
    }

    if (kind == "entropy") {
        TemperSchedule sched{taus, stencil};
        try {
            sched.validate();
        } catch (const std::exception& e) {
            errs.push_back("[entropy]: " + std::string(e.what()));
        }
    }
    if (kind == "multiplicity" && mult_form != "direct" && mult_form != "cv" && mult_form != "both")
        errs.push_back("[multiplicity].form: must be direct, cv or both");
    if (kind == "coding_info" && !(domain_scale > 0.0))
        errs.push_back("[coding_info].domain_scale: must be positive");
    if (kind == "select") {
        if (select_data.empty() && select_true_theta.empty())
            errs.push_back("[select]: need either data or true_theta");
        if (select_k_max < 1) errs.push_back("[select].k_max: must be >= 1");
        if (select_data.empty() && select_replicates < 1)
            errs.push_back("[select].replicates: must be >= 1");
        if (select_data.empty() && n_grid.empty())
            errs.push_back("[experiment].n: required to generate selection replicates");
    }
    if (kind == "optimality" && opt_candidates.empty())
        errs.push_back("[optimality].candidates: required");
    if (kind == "density") {
        if (density_d.empty()) errs.push_back("[density].d_ball: required");
        for (double d : density_d)
            if (!(d > 0.0)) errs.push_back("[density].d_ball: cutoffs must be positive");
        if (theta0_grid.empty()) errs.push_back("[experiment].theta0: required for kind density");
        if (n_grid.empty()) errs.push_back("[experiment].n: required for kind density");
    }
    if (kind == "optimality" && n_grid.empty())
        errs.push_back("[experiment].n: required for kind optimality");
    return errs;
}

std::string ExperimentConfig::to_ini() const {
    std::ostringstream os;
    os.precision(17);
    const auto list = [](const auto& values) {
        std::ostringstream ls;
        ls.precision(17);
        bool first = true;
        for (const auto& v : values) {
            if (!first) ls << ' ';
            ls << v;
            first = false;
        }
        return ls.str();
    };
    os << "[experiment]\n";
    os << "kind = " << kind << '\n';
    os << "family = " << family << '\n';
    os << "prior = " << prior << '\n';
    if (!theta0_grid.empty()) os << "theta0 = " << list(theta0_grid) << '\n';
    if (!n_grid.empty()) os << "n = " << list(n_grid) << '\n';
    if (master_seed) os << "master_seed = " << *master_seed << '\n';
    os << "\n[budgets]\n";
    os << "outer = " << budgets.n_outer << '\n';
    os << "inner = " << budgets.n_inner << '\n';
    os << "theta0_draws = " << budgets.n_theta0 << '\n';
    if (kind == "entropy") {
        os << "\n[entropy]\n";
        os << "taus = " << list(taus) << '\n';
        os << "stencil = " << stencil << '\n';
    }
    if (kind == "multiplicity") {
        os << "\n[multiplicity]\n";
        os << "form = " << mult_form << '\n';
    }
    if (kind == "coding_info") {
        os << "\n[coding_info]\n";
        os << "domain_scale = " << domain_scale << '\n';
    }
    if (kind == "select") {
        os << "\n[select]\n";
        if (!select_data.empty()) os << "data = " << select_data << '\n';
        else os << "true_theta = " << list(select_true_theta) << '\n';
        os << "replicates = " << select_replicates << '\n';
        os << "k_max = " << select_k_max << '\n';
        os << "pass_fraction = " << select_pass_fraction << '\n';
    }
    if (kind == "optimality") {
        os << "\n[optimality]\n";
        os << "true_prior = " << opt_true_prior << '\n';
        os << "candidates = " << list(opt_candidates) << '\n';
    }
    if (kind == "density") {
        os << "\n[density]\n";
        os << "d_ball = " << list(density_d) << '\n';
    }
    os << "\n[output]\n";
    os << "dir = " << out_dir << '\n';
    os << "jobs = " << jobs << '\n';
    return os.str();
}

}  // namespace wprior
