#include "gasfc/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "gasfc/errors.hpp"
#include "gasfc/util.hpp"

namespace gasfc::ensemble {

namespace {

constexpr double kStationarityTol = 1e-8;
constexpr int kMaxPgdIterations = 100000;

void check_panel(const ForecastPanel& panel, bool need_target) {
    if (panel.model_count() < 1) throw ValidationError("panel has no model columns");
    if (panel.size() < 1) throw ValidationError("panel has no rows");
    if (!panel.forecasts.allFinite()) throw ValidationError("panel has non-finite forecasts");
    if (need_target) {
        if (panel.target.size() != panel.size())
            throw ValidationError("panel target length does not match rows");
        if (!panel.target.allFinite()) throw ValidationError("panel has non-finite target");
    }
}

/// Euclidean projection onto the probability simplex (sort-based).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    const Eigen::Index m = v.size();
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double tau = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        cumsum += u[static_cast<std::size_t>(i)];
        const double candidate = (cumsum - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - candidate > 0.0) tau = candidate;
    }
    return (v.array() - tau).max(0.0);
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double ma = a.mean();
    const double mb = b.mean();
    const Eigen::ArrayXd da = a.array() - ma;
    const Eigen::ArrayXd db = b.array() - mb;
    const double va = (da * da).sum();
    const double vb = (db * db).sum();
    if (va <= 0.0 || vb <= 0.0) return 0.0;  // constant forecaster
    return (da * db).sum() / std::sqrt(va * vb);
}

}  // namespace

Eigen::VectorXd simple_average(const ForecastPanel& panel) {
    check_panel(panel, false);
    // Evaluated as F * w_uniform, the same product the other aggregators
    // use, so subset_average with a full subset reproduces it bit-exactly.
    const Eigen::Index m = panel.model_count();
    return panel.forecasts * Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
}

EnsembleWeights fit_weighted_average(const ForecastPanel& panel) {
    check_panel(panel, true);
    const Eigen::Index m = panel.model_count();
    const Eigen::MatrixXd& F = panel.forecasts;
    const Eigen::VectorXd& y = panel.target;

    EnsembleWeights result;
    result.subset_size = static_cast<int>(m);
    if (m == 1) {
        result.w = Eigen::VectorXd::Ones(1);
        return result;
    }

    // Work on the scale-free problem min (1/n) |y~ - F~ w|^2 with y~, F~
    // divided by std(y), so the stationarity threshold means the same thing
    // for 1-MSCM and 100-MSCM panels.
    const double n = static_cast<double>(F.rows());
    const double y_mean = y.mean();
    const double y_var = (y.array() - y_mean).square().sum() / n;
    const double scale = y_var > 0.0 ? std::sqrt(y_var) : 1.0;

    const Eigen::MatrixXd gram = (F.transpose() * F) / (n * scale * scale);
    const Eigen::VectorXd fty = (F.transpose() * y) / (n * scale * scale);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lips = std::max(2.0 * eig.eigenvalues().maxCoeff(), 1e-12);
    const double step = 1.0 / lips;

    // First-order stationarity residual: the displacement of one projected
    // gradient step (zero exactly at stationary points).
    Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kMaxPgdIterations; ++iter) {
        const Eigen::VectorXd grad = 2.0 * (gram * w - fty);
        const Eigen::VectorXd next = project_simplex(w - step * grad);
        residual = (next - w).lpNorm<Eigen::Infinity>();
        if (residual < kStationarityTol) {
            result.w = next;
            return result;
        }
        w = next;
    }
    throw ConvergenceError("weighted average: projected gradient did not reach stationarity " +
                               std::to_string(kStationarityTol) + " in " +
                               std::to_string(kMaxPgdIterations) + " iterations",
                           residual);
}

EnsembleWeights fit_subset_average(const ForecastPanel& panel, int subset_size) {
    check_panel(panel, true);
    const Eigen::Index m = panel.model_count();
    if (subset_size < 1 || subset_size > m)
        throw ValidationError("subset_size must be in [1, M]");

    std::vector<Eigen::Index> alive(static_cast<std::size_t>(m));
    std::iota(alive.begin(), alive.end(), 0);

    std::vector<double> mae(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j)
        mae[static_cast<std::size_t>(j)] =
            (panel.forecasts.col(j) - panel.target).cwiseAbs().mean();

    while (static_cast<int>(alive.size()) > subset_size) {
        double best_corr = -std::numeric_limits<double>::infinity();
        std::size_t best_a = 0, best_b = 1;
        for (std::size_t a = 0; a + 1 < alive.size(); ++a) {
            for (std::size_t b = a + 1; b < alive.size(); ++b) {
                const double corr =
                    pearson(panel.forecasts.col(alive[a]), panel.forecasts.col(alive[b]));
                if (corr > best_corr) {  // strict: ties keep the lowest-index pair
                    best_corr = corr;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        // Drop the higher-MAE member; on a tie the higher column index goes.
        const double mae_a = mae[static_cast<std::size_t>(alive[best_a])];
        const double mae_b = mae[static_cast<std::size_t>(alive[best_b])];
        const std::size_t drop = mae_a > mae_b ? best_a : best_b;
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(drop));
    }

    EnsembleWeights result;
    result.subset_size = subset_size;
    result.w = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j : alive) result.w[j] = 1.0 / static_cast<double>(alive.size());
    return result;
}

std::shared_ptr<const models::SvrModel> fit_svr_stack(const ForecastPanel& panel,
                                                      const models::SvrSpec& spec) {
    check_panel(panel, true);
    return models::fit_svr(panel.forecasts, panel.target, spec);
}

void write_panel_csv(const ForecastPanel& panel, std::ostream& out) {
    out << "date";
    for (const auto& name : panel.model_names) out << ',' << name;
    out << ",target\n";
    for (Eigen::Index r = 0; r < panel.size(); ++r) {
        out << format_date(panel.dates[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < panel.model_count(); ++c)
            out << ',' << format_double(panel.forecasts(r, c));
        out << ',' << (panel.target.size() > r ? format_double(panel.target[r]) : "");
        out << "\n";
    }
}

}  // namespace gasfc::ensemble
