#include "gasfc/models/gp.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "gasfc/errors.hpp"

namespace gasfc::models {

namespace {

Eigen::MatrixXd rbf_kernel(double gamma, double signal_var, const Eigen::MatrixXd& A,
                           const Eigen::MatrixXd& B) {
    Eigen::VectorXd a2 = A.rowwise().squaredNorm();
    Eigen::VectorXd b2 = B.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * (A * B.transpose());
    d2.colwise() += a2;
    d2.rowwise() += b2.transpose();
    return signal_var * (-gamma * d2.array().max(0.0)).exp();
}

}  // namespace

std::shared_ptr<const GpModel> fit_gp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      const GpSpec& spec, const std::vector<bool>& indicator) {
    check_spec(ForecasterSpec{spec});
    if (X.rows() == 0 || X.rows() != y.size())
        throw ValidationError("fit_gp: X and y sizes disagree or are empty");
    if (!X.allFinite() || !y.allFinite()) throw ValidationError("fit_gp: non-finite inputs");

    ColumnScaler scaler = ColumnScaler::fit(X, indicator);
    Eigen::MatrixXd Xs = scaler.transform(X);

    const double y_mean = y.mean();
    const double y_var = (y.array() - y_mean).square().sum() / static_cast<double>(y.size());
    const double y_scale = y_var > 0.0 ? std::sqrt(y_var) : 1.0;
    const Eigen::VectorXd ys = (y.array() - y_mean) / y_scale;

    Eigen::MatrixXd K = rbf_kernel(spec.gamma, spec.signal_var, Xs, Xs);
    K.diagonal().array() += spec.noise_var;

    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) {
        K.diagonal().array() += 1e-8;  // jitter retry
        llt.compute(K);
        if (llt.info() != Eigen::Success)
            throw Error("fit_gp: Cholesky factorization failed even with jitter");
    }
    Eigen::VectorXd weights = llt.solve(ys);
    Eigen::MatrixXd L = llt.matrixL();
    return std::make_shared<GpModel>(spec, std::move(scaler), std::move(Xs), std::move(weights),
                                     std::move(L), y_mean, y_scale);
}

Eigen::MatrixXd GpModel::cross_kernel(const Eigen::MatrixXd& Xs) const {
    const auto& s = std::get<GpSpec>(spec_);
    return rbf_kernel(s.gamma, s.signal_var, Xs, train_x_);
}

Eigen::VectorXd GpModel::predict_scaled(const Eigen::MatrixXd& Xs) const {
    return (cross_kernel(Xs) * weights_).array() * y_scale_ + y_mean_;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> GpModel::predict_with_variance(
    const Eigen::MatrixXd& X) const {
    const auto& s = std::get<GpSpec>(spec_);
    const Eigen::MatrixXd Xs = scaler_.transform(X);
    const Eigen::MatrixXd Kq = cross_kernel(Xs);
    Eigen::VectorXd mean = (Kq * weights_).array() * y_scale_ + y_mean_;

    if (chol_lower_.size() == 0)
        throw Error("GP variance unavailable: factor not retained after deserialization");
    // var = k** - k*' (K + noise I)^-1 k* via triangular solves.
    Eigen::MatrixXd V =
        chol_lower_.triangularView<Eigen::Lower>().solve(Kq.transpose());
    Eigen::VectorXd var(Xs.rows());
    for (Eigen::Index i = 0; i < Xs.rows(); ++i)
        var[i] = (s.signal_var - V.col(i).squaredNorm()) * y_scale_ * y_scale_;
    return {std::move(mean), std::move(var)};
}

void GpModel::save_state(nlohmann::json& j) const {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(train_x_.rows()));
    for (Eigen::Index i = 0; i < train_x_.rows(); ++i)
        rows[static_cast<std::size_t>(i)] =
            std::vector<double>(train_x_.row(i).begin(), train_x_.row(i).end());
    j["train_x"] = rows;
    j["weights"] = std::vector<double>(weights_.begin(), weights_.end());
    j["y_mean"] = y_mean_;
    j["y_scale"] = y_scale_;
    // The Cholesky factor is O(n^2) and only needed for variances, which no
    // persisted path consumes; deserialized models predict means only.
}

TrainedPtr GpModel::from_json(const nlohmann::json& j) {
    const auto& st = j.at("state");
    const auto rows = st.at("train_x").get<std::vector<std::vector<double>>>();
    const auto ws = st.at("weights").get<std::vector<double>>();
    ColumnScaler scaler = ColumnScaler::from_json(j.at("scaler"));
    Eigen::MatrixXd Xs(static_cast<Eigen::Index>(rows.size()), scaler.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        Xs.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(
            rows[i].data(), static_cast<Eigen::Index>(rows[i].size()));
    const ForecasterSpec spec = spec_from_json(j.at("spec"));
    return std::make_shared<GpModel>(
        std::get<GpSpec>(spec), std::move(scaler), std::move(Xs),
        Eigen::Map<const Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size())),
        Eigen::MatrixXd(), st.at("y_mean").get<double>(), st.at("y_scale").get<double>());
}

}  // namespace gasfc::models
