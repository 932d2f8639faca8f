#include "gasfc/models/svr.hpp"

#include <cmath>
#include <limits>

#include "gasfc/errors.hpp"

namespace gasfc::models {

namespace {

constexpr double kKktTolerance = 1e-7;  // on the standardized problem
constexpr int kMaxIterations = 100000;

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B) {
    if (kernel.type == KernelSpec::Type::Linear) return A * B.transpose();
    // |a-b|^2 = |a|^2 + |b|^2 - 2 a.b, evaluated blockwise.
    Eigen::VectorXd a2 = A.rowwise().squaredNorm();
    Eigen::VectorXd b2 = B.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * (A * B.transpose());
    d2.colwise() += a2;
    d2.rowwise() += b2.transpose();
    return (-kernel.gamma * d2.array().max(0.0)).exp();
}

/// SMO over the 2n dual variables (alpha_i, alpha*_i), box [0, c], equality
/// constraint sum(alpha_i - alpha*_i) = 0. Each iteration picks the maximal
/// violating pair and solves the two-variable subproblem exactly, so the
/// dual objective never increases.
struct SmoResult {
    Eigen::VectorXd theta;  // alpha - alpha*
    Eigen::VectorXd alpha;
    Eigen::VectorXd alpha_star;
    double bias = 0.0;
    std::vector<double> objective;
    double kkt_violation = 0.0;
    int iterations = 0;
};

SmoResult solve_smo(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double c, double eps) {
    const Eigen::Index n = y.size();
    SmoResult res;
    res.alpha = Eigen::VectorXd::Zero(n);
    res.alpha_star = Eigen::VectorXd::Zero(n);
    res.theta = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd k_theta = Eigen::VectorXd::Zero(n);

    // Dual objective: 1/2 theta'K theta + eps*sum(alpha+alpha*) - y'theta.
    double objective = 0.0;
    res.objective.reserve(256);
    res.objective.push_back(objective);

    // phi is the candidate bias each variable implies; a variable u with
    // constraint sign p_u has phi_u = -p_u * grad_u.
    //   alpha  side: phi = y - eps - (K theta)
    //   alpha* side: phi = y + eps - (K theta)
    auto phi_pos = [&](Eigen::Index i) { return y[i] - eps - k_theta[i]; };
    auto phi_neg = [&](Eigen::Index i) { return y[i] + eps - k_theta[i]; };

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // Maximal violating pair across both variable blocks.
        double up_best = -std::numeric_limits<double>::infinity();
        double low_best = std::numeric_limits<double>::infinity();
        Eigen::Index up_idx = -1, low_idx = -1;
        bool up_is_pos = true, low_is_pos = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double fp = phi_pos(i);
            const double fn = phi_neg(i);
            // up-movable: alpha_i can grow, or alpha*_i can shrink
            if (res.alpha[i] < c && fp > up_best) {
                up_best = fp;
                up_idx = i;
                up_is_pos = true;
            }
            if (res.alpha_star[i] > 0 && fn > up_best) {
                up_best = fn;
                up_idx = i;
                up_is_pos = false;
            }
            // down-movable: alpha_i can shrink, or alpha*_i can grow
            if (res.alpha[i] > 0 && fp < low_best) {
                low_best = fp;
                low_idx = i;
                low_is_pos = true;
            }
            if (res.alpha_star[i] < c && fn < low_best) {
                low_best = fn;
                low_idx = i;
                low_is_pos = false;
            }
        }

        const double violation = up_best - low_best;
        res.kkt_violation = violation;
        res.iterations = iter;
        if (violation < kKktTolerance) {
            // Bias from free variables when any exist, else the midpoint of
            // the feasible interval.
            double sum = 0.0;
            int count = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (res.alpha[i] > 0 && res.alpha[i] < c) {
                    sum += phi_pos(i);
                    ++count;
                }
                if (res.alpha_star[i] > 0 && res.alpha_star[i] < c) {
                    sum += phi_neg(i);
                    ++count;
                }
            }
            res.bias = count > 0 ? sum / count : 0.5 * (up_best + low_best);
            return res;
        }

        const Eigen::Index si = up_idx;
        const Eigen::Index sj = low_idx;
        const double eta_raw = K(si, si) + K(sj, sj) - 2.0 * K(si, sj);
        const double eta = std::max(eta_raw, 1e-12);
        double step = violation / eta;

        // Box limits: the up variable moves toward its growing bound, the
        // down variable toward its shrinking bound.
        // Both rooms are strictly positive: the selection only admits
        // variables that can still move in the required direction.
        const double up_room = up_is_pos ? c - res.alpha[si] : res.alpha_star[si];
        const double low_room = low_is_pos ? res.alpha[sj] : c - res.alpha_star[sj];
        step = std::min(step, std::min(up_room, low_room));

        if (up_is_pos) res.alpha[si] += step; else res.alpha_star[si] -= step;
        if (low_is_pos) res.alpha[sj] -= step; else res.alpha_star[sj] += step;
        res.theta[si] += step;
        res.theta[sj] -= step;
        k_theta += step * (K.col(si) - K.col(sj));

        objective += -violation * step + 0.5 * eta_raw * step * step;
        res.objective.push_back(objective);
    }

    throw ConvergenceError("SVR SMO stopped after " + std::to_string(kMaxIterations) +
                               " iterations with KKT violation " +
                               std::to_string(res.kkt_violation),
                           res.kkt_violation);
}

}  // namespace

double kernel_eval(const KernelSpec& kernel, const Eigen::RowVectorXd& a,
                   const Eigen::RowVectorXd& b) {
    if (kernel.type == KernelSpec::Type::Linear) return a.dot(b);
    return std::exp(-kernel.gamma * (a - b).squaredNorm());
}

std::shared_ptr<const SvrModel> fit_svr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const SvrSpec& spec, const std::vector<bool>& indicator) {
    check_spec(ForecasterSpec{spec});
    if (X.rows() == 0 || X.rows() != y.size())
        throw ValidationError("fit_svr: X and y sizes disagree or are empty");
    if (!X.allFinite() || !y.allFinite()) throw ValidationError("fit_svr: non-finite inputs");

    ColumnScaler scaler = ColumnScaler::fit(X, indicator);
    const Eigen::MatrixXd Xs = scaler.transform(X);

    const double y_mean = y.mean();
    const double y_var = (y.array() - y_mean).square().sum() / static_cast<double>(y.size());
    const double y_scale = y_var > 0.0 ? std::sqrt(y_var) : 1.0;
    const Eigen::VectorXd ys = (y.array() - y_mean) / y_scale;
    const double eps_scaled = spec.epsilon / y_scale;

    const Eigen::MatrixXd K = kernel_matrix(spec.kernel, Xs, Xs);
    SmoResult smo = solve_smo(K, ys, spec.c, eps_scaled);

    // Keep only rows with nonzero dual coefficient.
    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < smo.theta.size(); ++i)
        if (smo.theta[i] != 0.0) sv.push_back(i);
    Eigen::MatrixXd support(static_cast<Eigen::Index>(sv.size()), Xs.cols());
    Eigen::VectorXd dual(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) {
        support.row(static_cast<Eigen::Index>(k)) = Xs.row(sv[k]);
        dual[static_cast<Eigen::Index>(k)] = smo.theta[sv[k]];
    }

    SvrModel::FitDiagnostics diag;
    diag.alpha = std::move(smo.alpha);
    diag.alpha_star = std::move(smo.alpha_star);
    diag.objective = std::move(smo.objective);
    diag.kkt_violation = smo.kkt_violation;
    diag.iterations = smo.iterations;

    return std::make_shared<SvrModel>(spec, std::move(scaler), std::move(support), std::move(dual),
                                      smo.bias, y_mean, y_scale, std::move(diag));
}

Eigen::VectorXd SvrModel::predict_scaled(const Eigen::MatrixXd& Xs) const {
    const SvrSpec& s = svr_spec();
    Eigen::VectorXd out(Xs.rows());
    if (support_vectors_.rows() == 0) {
        out.setConstant(bias_);
    } else {
        const Eigen::MatrixXd Kq = kernel_matrix(s.kernel, Xs, support_vectors_);
        out = Kq * dual_coef_;
        out.array() += bias_;
    }
    return (out.array() * y_scale_ + y_mean_).matrix();
}

void SvrModel::save_state(nlohmann::json& j) const {
    std::vector<std::vector<double>> sv(static_cast<std::size_t>(support_vectors_.rows()));
    for (Eigen::Index i = 0; i < support_vectors_.rows(); ++i)
        sv[static_cast<std::size_t>(i)] = std::vector<double>(
            support_vectors_.row(i).begin(), support_vectors_.row(i).end());
    j["support_vectors"] = sv;
    j["dual_coef"] = std::vector<double>(dual_coef_.begin(), dual_coef_.end());
    j["bias"] = bias_;
    j["y_mean"] = y_mean_;
    j["y_scale"] = y_scale_;
}

TrainedPtr SvrModel::from_json(const nlohmann::json& j) {
    const auto& st = j.at("state");
    const auto sv = st.at("support_vectors").get<std::vector<std::vector<double>>>();
    const auto dual = st.at("dual_coef").get<std::vector<double>>();
    ColumnScaler scaler = ColumnScaler::from_json(j.at("scaler"));
    Eigen::MatrixXd support(static_cast<Eigen::Index>(sv.size()), scaler.cols());
    for (std::size_t i = 0; i < sv.size(); ++i)
        support.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(
            sv[i].data(), static_cast<Eigen::Index>(sv[i].size()));
    const ForecasterSpec spec = spec_from_json(j.at("spec"));
    return std::make_shared<SvrModel>(
        std::get<SvrSpec>(spec), std::move(scaler), std::move(support),
        Eigen::Map<const Eigen::VectorXd>(dual.data(), static_cast<Eigen::Index>(dual.size())),
        st.at("bias").get<double>(), st.at("y_mean").get<double>(),
        st.at("y_scale").get<double>(), SvrModel::FitDiagnostics{});
}

}  // namespace gasfc::models
