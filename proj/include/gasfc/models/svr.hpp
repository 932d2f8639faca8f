#pragma once

#include "gasfc/models/model.hpp"

namespace gasfc::models {

double kernel_eval(const KernelSpec& kernel, const Eigen::RowVectorXd& a,
                   const Eigen::RowVectorXd& b);

/// Epsilon-insensitive support vector regression, fitted by SMO-style
/// pairwise coordinate optimization of the dual. The target is standardized
/// internally; epsilon is taken in raw target units and rescaled.
class SvrModel final : public TrainedForecaster {
public:
    struct FitDiagnostics {
        Eigen::VectorXd alpha;          // positive-side duals, in [0, c]
        Eigen::VectorXd alpha_star;     // negative-side duals, in [0, c]
        std::vector<double> objective;  // dual objective after every update
        double kkt_violation = 0.0;     // max violating-pair gap at the stop point
        int iterations = 0;
    };

    SvrModel(SvrSpec spec, ColumnScaler scaler, Eigen::MatrixXd support_vectors,
             Eigen::VectorXd dual_coef, double bias, double y_mean, double y_scale,
             FitDiagnostics diagnostics)
        : TrainedForecaster(std::move(scaler)),
          spec_(spec),
          support_vectors_(std::move(support_vectors)),
          dual_coef_(std::move(dual_coef)),
          bias_(bias),
          y_mean_(y_mean),
          y_scale_(y_scale),
          diag_(std::move(diagnostics)) {}

    ModelKind kind() const override { return ModelKind::Svr; }
    const ForecasterSpec& spec() const override { return spec_; }
    const SvrSpec& svr_spec() const { return std::get<SvrSpec>(spec_); }

    Eigen::Index support_vector_count() const { return support_vectors_.rows(); }
    double bias() const { return bias_; }

    /// Solver diagnostics; not preserved across serialization.
    const FitDiagnostics& diagnostics() const { return diag_; }

    static TrainedPtr from_json(const nlohmann::json& j);

protected:
    Eigen::VectorXd predict_scaled(const Eigen::MatrixXd& Xs) const override;
    void save_state(nlohmann::json& j) const override;

private:
    ForecasterSpec spec_;
    Eigen::MatrixXd support_vectors_;  // standardized rows with nonzero duals
    Eigen::VectorXd dual_coef_;        // theta_i = alpha_i - alpha*_i (standardized y)
    double bias_;
    double y_mean_;
    double y_scale_;
    FitDiagnostics diag_;
};

std::shared_ptr<const SvrModel> fit_svr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const SvrSpec& spec,
                                        const std::vector<bool>& indicator = {});

}  // namespace gasfc::models
