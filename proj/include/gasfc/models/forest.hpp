#pragma once

#include "gasfc/models/model.hpp"

namespace gasfc::models {

/// Regression tree stored as a flat node array; feature < 0 marks a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

using Tree = std::vector<TreeNode>;

/// Random forest of variance-reduction CARTs with data bagging (bootstrap
/// resampling per tree) and feature bagging (mtry features per split).
class RandomForestModel final : public TrainedForecaster {
public:
    RandomForestModel(RandomForestSpec spec, ColumnScaler scaler, std::vector<Tree> trees)
        : TrainedForecaster(std::move(scaler)), spec_(spec), trees_(std::move(trees)) {}

    ModelKind kind() const override { return ModelKind::RandomForest; }
    const ForecasterSpec& spec() const override { return spec_; }
    const std::vector<Tree>& trees() const { return trees_; }

    static TrainedPtr from_json(const nlohmann::json& j);

protected:
    Eigen::VectorXd predict_scaled(const Eigen::MatrixXd& Xs) const override;
    void save_state(nlohmann::json& j) const override;

private:
    ForecasterSpec spec_;
    std::vector<Tree> trees_;
};

std::shared_ptr<const RandomForestModel> fit_random_forest(const Eigen::MatrixXd& X,
                                                           const Eigen::VectorXd& y,
                                                           const RandomForestSpec& spec,
                                                           const std::vector<bool>& indicator = {});

}  // namespace gasfc::models
