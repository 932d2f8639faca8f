#pragma once

#include "gasfc/models/model.hpp"

namespace gasfc::models {

struct LinearCoefficients {
    double intercept = 0.0;
    Eigen::VectorXd beta;  // on standardized columns
};

/// Ridge, lasso and elastic net behind one class. All three minimize
/// |y - Xb|^2 plus their penalty on centered, standardized data with an
/// unpenalized intercept; ridge solves the normal equations, the others run
/// cyclic coordinate descent.
class LinearModel final : public TrainedForecaster {
public:
    LinearModel(ForecasterSpec spec, ColumnScaler scaler, LinearCoefficients coef,
                double kkt_residual, int sweeps)
        : TrainedForecaster(std::move(scaler)),
          spec_(std::move(spec)),
          coef_(std::move(coef)),
          kkt_residual_(kkt_residual),
          sweeps_(sweeps) {}

    ModelKind kind() const override { return kind_of(spec_); }
    const ForecasterSpec& spec() const override { return spec_; }
    const LinearCoefficients& coefficients() const { return coef_; }

    /// Zero for ridge; max KKT-condition violation at the solution for the
    /// coordinate-descent fits.
    double kkt_residual() const { return kkt_residual_; }
    int sweeps() const { return sweeps_; }

    static TrainedPtr from_json(const nlohmann::json& j);

protected:
    Eigen::VectorXd predict_scaled(const Eigen::MatrixXd& Xs) const override;
    void save_state(nlohmann::json& j) const override;

private:
    ForecasterSpec spec_;
    LinearCoefficients coef_;
    double kkt_residual_;
    int sweeps_;
};

std::shared_ptr<const LinearModel> fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                             double lambda,
                                             const std::vector<bool>& indicator = {});
std::shared_ptr<const LinearModel> fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                             double lambda,
                                             const std::vector<bool>& indicator = {});
std::shared_ptr<const LinearModel> fit_elastic_net(const Eigen::MatrixXd& X,
                                                   const Eigen::VectorXd& y, double lambda,
                                                   double alpha,
                                                   const std::vector<bool>& indicator = {});

}  // namespace gasfc::models
