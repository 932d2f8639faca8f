#pragma once

#include "gasfc/models/model.hpp"

namespace gasfc::models {

/// Feed-forward network with tanh hidden layers and a linear output unit,
/// exposed separately from the model wrapper so tests can difference the
/// loss directly against backprop gradients.
class MlpNetwork {
public:
    MlpNetwork(int inputs, const std::vector<int>& hidden_sizes);

    Eigen::Index parameter_count() const;
    Eigen::VectorXd parameters() const;              // flattened [W1,b1,W2,b2,...]
    void set_parameters(const Eigen::VectorXd& p);

    Eigen::VectorXd forward(const Eigen::MatrixXd& X) const;

    /// Mean squared error over the batch and its gradient w.r.t. the
    /// flattened parameters.
    double loss_and_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             Eigen::VectorXd& grad) const;

    const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
    std::vector<Eigen::MatrixXd>& weights() { return weights_; }
    std::vector<Eigen::VectorXd>& biases() { return biases_; }

private:
    std::vector<Eigen::MatrixXd> weights_;  // layer l: (out_l x in_l)
    std::vector<Eigen::VectorXd> biases_;
};

/// Single-output MLP trained by seeded mini-batch gradient descent on the
/// standardized target.
class MlpModel final : public TrainedForecaster {
public:
    MlpModel(MlpSpec spec, ColumnScaler scaler, MlpNetwork network, double y_mean, double y_scale)
        : TrainedForecaster(std::move(scaler)),
          spec_(std::move(spec)),
          network_(std::move(network)),
          y_mean_(y_mean),
          y_scale_(y_scale) {}

    ModelKind kind() const override { return ModelKind::Mlp; }
    const ForecasterSpec& spec() const override { return spec_; }
    const MlpNetwork& network() const { return network_; }

    static TrainedPtr from_json(const nlohmann::json& j);

protected:
    Eigen::VectorXd predict_scaled(const Eigen::MatrixXd& Xs) const override;
    void save_state(nlohmann::json& j) const override;

private:
    ForecasterSpec spec_;
    MlpNetwork network_;
    double y_mean_;
    double y_scale_;
};

std::shared_ptr<const MlpModel> fit_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const MlpSpec& spec,
                                        const std::vector<bool>& indicator = {});

}  // namespace gasfc::models
