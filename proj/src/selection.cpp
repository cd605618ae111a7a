#include "wprior/selection.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "wprior/families.hpp"
#include "wprior/math.hpp"
#include "wprior/mc.hpp"

namespace wprior {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double g_k(const ModelFamily& family, const Dataset& data, int k) {
    const MleResult fit = family.mle(data, k);
    return -fit.log_likelihood + static_cast<double>(k);
}

nlohmann::json ComplexityReport::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const ComplexityRow& r : rows)
        rows_json.push_back({{"k", r.k},
                             {"log_z_k", r.log_z_k},
                             {"g_k", r.g_k},
                             {"aic_k", r.aic_k},
                             {"weight", r.weight},
                             {"mle_clamped", r.mle_clamped}});
    nlohmann::json j{{"rows", rows_json},
                     {"total_log_z", total_log_z},
                     {"k_max", k_max},
                     {"tail_share", tail_share},
                     {"truncation_warning", truncation_warning},
                     {"n_obs", n_obs}};
    if (g0) j["g0"] = *g0;
    return j;
}

std::string ComplexityReport::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "k,log_z_k,g_k,aic_k,weight,mle_clamped\n";
    if (g0) os << "0," << -*g0 << ',' << *g0 << ',' << *g0 << ",," << "\n";
    for (const ComplexityRow& r : rows)
        os << r.k << ',' << r.log_z_k << ',' << r.g_k << ',' << r.aic_k << ',' << r.weight << ','
           << (r.mle_clamped ? 1 : 0) << '\n';
    return os.str();
}

ComplexityReport total_partition(const ModelFamily& family, const Dataset& data, int k_max,
                                 bool include_null_row) {
    const auto [fam_k_min, fam_k_max] = family.complexity_range();
    if (k_max < fam_k_min) throw std::invalid_argument("total_partition: k_max below the family range");
    k_max = std::min(k_max, fam_k_max);

    ComplexityReport report;
    report.k_max = k_max;
    report.n_obs = data.n();
    report.rows.resize(static_cast<std::size_t>(k_max - fam_k_min + 1));
    // Per-complexity fits are independent; deterministic keyed reduction.
    parallel_for(report.rows.size(), [&](std::size_t idx) {
        const int k = fam_k_min + static_cast<int>(idx);
        ComplexityRow row;
        row.k = k;
        const MleResult fit = family.mle(data, k);
        row.g_k = -fit.log_likelihood + static_cast<double>(k);
        row.aic_k = row.g_k;
        row.log_z_k = -row.g_k;
        row.mle_clamped = fit.clamped;
        report.rows[idx] = row;
    });

    std::vector<double> log_terms;
    for (const ComplexityRow& r : report.rows) log_terms.push_back(r.log_z_k);
    report.total_log_z = log_sum_exp(log_terms);
    for (ComplexityRow& r : report.rows) r.weight = std::exp(r.log_z_k - report.total_log_z);
    report.tail_share = report.rows.back().weight;
    report.truncation_warning = report.tail_share > 1e-6;

    if (include_null_row) {
        if (family.id() == "poly") {
            const auto& poly = static_cast<const PolynomialFamily&>(family);
            double acc = 0.0;
            for (const Observation& p : data.points) acc += poly.null_model_log_density(p);
            report.g0 = -acc;
        } else {
            throw std::invalid_argument("total_partition: no empty-model density for family " +
                                        family.id());
        }
    }
    return report;
}

DensityOfModels density_of_models(const ModelFamily& family, const Parameterization& theta0,
                                  double n_obs, double d_ball) {
    family.require_in_domain(theta0);
    if (!(d_ball > 0.0)) throw std::invalid_argument("density_of_models: cutoff must be positive");
    const Eigen::MatrixXd info = family.fisher_information(theta0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(min_eig > 0.0))
        throw SingularityError("density_of_models: Fisher information is singular at theta0");
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < info.rows(); ++i) log_det += std::log(eig.eigenvalues()(i));
    const double k = static_cast<double>(theta0.complexity());
    DensityOfModels out;
    out.value = std::exp(0.5 * log_det + 0.5 * k * std::log(n_obs / (2.0 * kPi)) -
                         0.5 * k * std::log(d_ball));
    out.fisher_min_eigenvalue = min_eig;
    return out;
}

KlBallVolume kl_ball_volume(const ModelFamily& family, const Parameterization& theta0,
                            double n_obs, double d_ball, const GridSpec& grid) {
    family.require_in_domain(theta0);
    if (!(d_ball > 0.0)) throw std::invalid_argument("kl_ball_volume: cutoff must be positive");
    const std::size_t k = theta0.complexity();
    if (k > 2) throw std::invalid_argument("kl_ball_volume: grid oracle is limited to K <= 2");
    const auto domain = family.parameter_domain(static_cast<int>(k));

    const auto inside = [&](const std::vector<double>& values) {
        Parameterization theta{family.id(), values};
        if (!family.in_domain(theta)) return false;
        return n_obs * family.kl_divergence(theta0, theta) <= d_ball;
    };

    // Initial half-width from the quadratic shape, then expand until the
    // indicator vanishes on the boundary shell (or the domain clips it).
    const Eigen::MatrixXd info = family.fisher_information(theta0);
    std::vector<double> half(k);
    for (std::size_t d = 0; d < k; ++d)
        half[d] = 3.0 * std::sqrt(2.0 * d_ball / (n_obs * info(static_cast<Eigen::Index>(d),
                                                               static_cast<Eigen::Index>(d))));

    KlBallVolume out;
    for (int expansion = 0; expansion < 60; ++expansion) {
        std::vector<double> lo(k), hi(k);
        bool clipped = false;
        for (std::size_t d = 0; d < k; ++d) {
            lo[d] = theta0.values[d] - half[d];
            hi[d] = theta0.values[d] + half[d];
            if (lo[d] <= domain[d].lo) {
                lo[d] = std::nextafter(domain[d].lo, kInf);
                clipped = true;
            }
            if (hi[d] >= domain[d].hi) {
                hi[d] = std::nextafter(domain[d].hi, -kInf);
                clipped = true;
            }
        }
        const std::size_t m = grid.points_per_dim;
        bool shell_hit = false;
        double volume = 0.0;
        std::size_t used = 0;
        if (k == 1) {
            const double step = (hi[0] - lo[0]) / static_cast<double>(m - 1);
            for (std::size_t i = 0; i < m; ++i) {
                const bool in = inside({lo[0] + step * static_cast<double>(i)});
                used++;
                if (in) {
                    volume += step;
                    if (i == 0 || i == m - 1) shell_hit = true;
                }
            }
        } else {
            const std::size_t m2 = 401;  // per-dim resolution for the 2-D oracle
            const double sx = (hi[0] - lo[0]) / static_cast<double>(m2 - 1);
            const double sy = (hi[1] - lo[1]) / static_cast<double>(m2 - 1);
            for (std::size_t i = 0; i < m2; ++i)
                for (std::size_t j = 0; j < m2; ++j) {
                    const bool in = inside({lo[0] + sx * static_cast<double>(i),
                                            lo[1] + sy * static_cast<double>(j)});
                    used++;
                    if (in) {
                        volume += sx * sy;
                        if (i == 0 || i == m2 - 1 || j == 0 || j == m2 - 1) shell_hit = true;
                    }
                }
        }
        out.grid_points = used;
        out.volume = volume;
        out.partial = clipped && shell_hit;
        if (!shell_hit || out.partial) return out;
        for (double& h : half) h *= 1.5;
    }
    throw std::runtime_error("kl_ball_volume: ball failed to close under expansion");
}

}  // namespace wprior
