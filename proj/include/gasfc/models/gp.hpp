#pragma once

#include "gasfc/models/model.hpp"

namespace gasfc::models {

/// Exact Gaussian-process regression with an RBF kernel. The target is
/// standardized internally; signal_var and noise_var act on that unit scale.
/// The factorization K + noise*I is Cholesky; a failure retries once with
/// 1e-8 jitter on the diagonal before giving up.
class GpModel final : public TrainedForecaster {
public:
    GpModel(GpSpec spec, ColumnScaler scaler, Eigen::MatrixXd train_x, Eigen::VectorXd weights,
            Eigen::MatrixXd chol_lower, double y_mean, double y_scale)
        : TrainedForecaster(std::move(scaler)),
          spec_(spec),
          train_x_(std::move(train_x)),
          weights_(std::move(weights)),
          chol_lower_(std::move(chol_lower)),
          y_mean_(y_mean),
          y_scale_(y_scale) {}

    ModelKind kind() const override { return ModelKind::Gp; }
    const ForecasterSpec& spec() const override { return spec_; }

    /// Posterior mean and variance in raw target units. Variance is the
    /// latent-function variance (no observation noise added).
    std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_with_variance(
        const Eigen::MatrixXd& X) const;

    static TrainedPtr from_json(const nlohmann::json& j);

protected:
    Eigen::VectorXd predict_scaled(const Eigen::MatrixXd& Xs) const override;
    void save_state(nlohmann::json& j) const override;

private:
    ForecasterSpec spec_;
    Eigen::MatrixXd train_x_;    // standardized
    Eigen::VectorXd weights_;    // (K + noise I)^-1 y_std
    Eigen::MatrixXd chol_lower_; // L with L L^T = K + noise I; empty after deserialize
    double y_mean_;
    double y_scale_;

    Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& Xs) const;
};

std::shared_ptr<const GpModel> fit_gp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      const GpSpec& spec,
                                      const std::vector<bool>& indicator = {});

}  // namespace gasfc::models
