#include "gasfc/models/linear.hpp"

#include <cmath>

#include "gasfc/errors.hpp"

namespace gasfc::models {

namespace {

constexpr double kCdTolerance = 1e-8;
constexpr int kMaxSweeps = 10000;

void check_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() == 0 || X.rows() != y.size())
        throw ValidationError("fit: X and y sizes disagree or are empty");
    if (!X.allFinite() || !y.allFinite()) throw ValidationError("fit: non-finite inputs");
}

struct CenteredProblem {
    Eigen::MatrixXd Xc;      // standardized then column-centered
    Eigen::VectorXd yc;      // centered target
    Eigen::VectorXd col_mean;
    double y_mean = 0.0;
};

/// Centering all transformed columns (indicators included) makes the
/// intercept unpenalized: intercept = mean(y) - col_mean . beta.
CenteredProblem center(const ColumnScaler& scaler, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y) {
    CenteredProblem prob;
    prob.Xc = scaler.transform(X);
    prob.col_mean = prob.Xc.colwise().mean();
    prob.Xc.rowwise() -= prob.col_mean.transpose();
    prob.y_mean = y.mean();
    prob.yc = y.array() - prob.y_mean;
    return prob;
}

double intercept_for(const CenteredProblem& prob, const Eigen::VectorXd& beta) {
    return prob.y_mean - prob.col_mean.dot(beta);
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

/// Cyclic coordinate descent for |yc - Xc b|^2 + lam*alpha*|b|^2
/// + lam*(1-alpha)*|b|_1 (alpha = 0 is the lasso).
struct CdResult {
    Eigen::VectorXd beta;
    double kkt = 0.0;
    int sweeps = 0;
};

double kkt_residual(const CenteredProblem& prob, const Eigen::VectorXd& beta,
                    const Eigen::VectorXd& residual, double lambda, double alpha) {
    // Smooth part gradient: -2 Xc^T r + 2 lam alpha b; subgradient bound
    // lam (1 - alpha) on each coordinate.
    const double bound = lambda * (1.0 - alpha);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double g = -2.0 * prob.Xc.col(j).dot(residual) + 2.0 * lambda * alpha * beta[j];
        const double viol =
            beta[j] != 0.0 ? std::abs(g + bound * (beta[j] > 0 ? 1.0 : -1.0))
                           : std::max(std::abs(g) - bound, 0.0);
        worst = std::max(worst, viol);
    }
    return worst;
}

CdResult coordinate_descent(const CenteredProblem& prob, double lambda, double alpha) {
    const Eigen::Index p = prob.Xc.cols();
    CdResult res;
    res.beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd col_sq(p);
    for (Eigen::Index j = 0; j < p; ++j) col_sq[j] = prob.Xc.col(j).squaredNorm();
    Eigen::VectorXd residual = prob.yc;

    const double l1 = lambda * (1.0 - alpha) / 2.0;
    auto sweep = [&]() {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double denom = col_sq[j] + lambda * alpha;
            if (denom <= 0.0) continue;  // constant column, keep beta 0
            const double old = res.beta[j];
            const double z = prob.Xc.col(j).dot(residual) + col_sq[j] * old;
            const double updated = soft_threshold(z, l1) / denom;
            if (updated != old) {
                residual += prob.Xc.col(j) * (old - updated);
                res.beta[j] = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        return max_change;
    };

    for (res.sweeps = 1; res.sweeps <= kMaxSweeps; ++res.sweeps) {
        if (sweep() < kCdTolerance) {
            // Polish: refresh the residual (the incremental one drifts) and
            // sweep a few more times so the KKT conditions hold tightly, not
            // just the coordinate-change criterion.
            for (int extra = 0; extra < 50 && res.sweeps <= kMaxSweeps; ++extra, ++res.sweeps) {
                residual = prob.yc - prob.Xc * res.beta;
                res.kkt = kkt_residual(prob, res.beta, residual, lambda, alpha);
                if (res.kkt < 1e-6) return res;
                sweep();
            }
            residual = prob.yc - prob.Xc * res.beta;
            res.kkt = kkt_residual(prob, res.beta, residual, lambda, alpha);
            return res;
        }
    }
    residual = prob.yc - prob.Xc * res.beta;
    res.kkt = kkt_residual(prob, res.beta, residual, lambda, alpha);
    throw ConvergenceError("coordinate descent did not converge in " +
                               std::to_string(kMaxSweeps) + " sweeps (KKT residual " +
                               std::to_string(res.kkt) + ")",
                           res.kkt);
}

std::shared_ptr<const LinearModel> make_linear(ForecasterSpec spec, const Eigen::MatrixXd& X,
                                               const Eigen::VectorXd& y,
                                               const std::vector<bool>& indicator) {
    check_spec(spec);
    check_inputs(X, y);
    ColumnScaler scaler = ColumnScaler::fit(X, indicator);
    CenteredProblem prob = center(scaler, X, y);

    LinearCoefficients coef;
    double kkt = 0.0;
    int sweeps = 0;
    if (const auto* ridge = std::get_if<RidgeSpec>(&spec)) {
        Eigen::MatrixXd gram = prob.Xc.transpose() * prob.Xc;
        gram.diagonal().array() += ridge->lambda;
        coef.beta = gram.ldlt().solve(prob.Xc.transpose() * prob.yc);
    } else {
        double lambda = 0.0, alpha = 0.0;
        if (const auto* lasso = std::get_if<LassoSpec>(&spec)) {
            lambda = lasso->lambda;
        } else {
            const auto& enet = std::get<ElasticNetSpec>(spec);
            lambda = enet.lambda;
            alpha = enet.alpha;
        }
        CdResult res = coordinate_descent(prob, lambda, alpha);
        coef.beta = std::move(res.beta);
        kkt = res.kkt;
        sweeps = res.sweeps;
    }
    coef.intercept = intercept_for(prob, coef.beta);
    return std::make_shared<LinearModel>(std::move(spec), std::move(scaler), std::move(coef), kkt,
                                         sweeps);
}

}  // namespace

Eigen::VectorXd LinearModel::predict_scaled(const Eigen::MatrixXd& Xs) const {
    return (Xs * coef_.beta).array() + coef_.intercept;
}

void LinearModel::save_state(nlohmann::json& j) const {
    j["intercept"] = coef_.intercept;
    j["beta"] = std::vector<double>(coef_.beta.begin(), coef_.beta.end());
}

TrainedPtr LinearModel::from_json(const nlohmann::json& j) {
    LinearCoefficients coef;
    coef.intercept = j.at("state").at("intercept").get<double>();
    const auto beta = j.at("state").at("beta").get<std::vector<double>>();
    coef.beta =
        Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    return std::make_shared<LinearModel>(spec_from_json(j.at("spec")),
                                         ColumnScaler::from_json(j.at("scaler")), std::move(coef),
                                         0.0, 0);
}

std::shared_ptr<const LinearModel> fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                             double lambda, const std::vector<bool>& indicator) {
    return make_linear(RidgeSpec{lambda}, X, y, indicator);
}

std::shared_ptr<const LinearModel> fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                             double lambda, const std::vector<bool>& indicator) {
    return make_linear(LassoSpec{lambda}, X, y, indicator);
}

std::shared_ptr<const LinearModel> fit_elastic_net(const Eigen::MatrixXd& X,
                                                   const Eigen::VectorXd& y, double lambda,
                                                   double alpha,
                                                   const std::vector<bool>& indicator) {
    return make_linear(ElasticNetSpec{lambda, alpha}, X, y, indicator);
}

}  // namespace gasfc::models
