#pragma once

#include "gasfc/models/model.hpp"

namespace gasfc::models {

/// k-nearest-neighbour regression: mean target of the k closest training
/// rows under Euclidean distance on standardized features. Distance ties
/// break on the lower training-row index.
class KnnModel final : public TrainedForecaster {
public:
    KnnModel(KnnSpec spec, ColumnScaler scaler, Eigen::MatrixXd train_x, Eigen::VectorXd train_y)
        : TrainedForecaster(std::move(scaler)),
          spec_(spec),
          train_x_(std::move(train_x)),
          train_y_(std::move(train_y)) {}

    ModelKind kind() const override { return ModelKind::Knn; }
    const ForecasterSpec& spec() const override { return spec_; }

    static TrainedPtr from_json(const nlohmann::json& j);

protected:
    Eigen::VectorXd predict_scaled(const Eigen::MatrixXd& Xs) const override;
    void save_state(nlohmann::json& j) const override;

private:
    ForecasterSpec spec_;
    Eigen::MatrixXd train_x_;  // standardized
    Eigen::VectorXd train_y_;  // raw
};

std::shared_ptr<const KnnModel> fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k,
                                        const std::vector<bool>& indicator = {});

}  // namespace gasfc::models
