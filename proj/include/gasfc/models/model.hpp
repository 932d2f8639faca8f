#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include <json.hpp>

#include "gasfc/models/scaler.hpp"
#include "gasfc/models/spec.hpp"

namespace gasfc::models {

/// Uniform fit/predict contract for the eight base forecasters. Fitted state
/// is immutable; predict is deterministic and safe to call concurrently.
class TrainedForecaster {
public:
    virtual ~TrainedForecaster() = default;

    virtual ModelKind kind() const = 0;
    virtual const ForecasterSpec& spec() const = 0;

    /// Raw (unscaled) feature rows with the training column count.
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

    Eigen::Index feature_count() const { return scaler_.cols(); }
    const ColumnScaler& scaler() const { return scaler_; }

    /// Self-describing JSON blob; round-trips losslessly through load_model.
    nlohmann::json to_json() const;

protected:
    explicit TrainedForecaster(ColumnScaler scaler) : scaler_(std::move(scaler)) {}

    virtual Eigen::VectorXd predict_scaled(const Eigen::MatrixXd& Xs) const = 0;
    virtual void save_state(nlohmann::json& j) const = 0;

    ColumnScaler scaler_;
};

using TrainedPtr = std::shared_ptr<const TrainedForecaster>;

/// Dispatches to the per-model fit routines. `indicator` marks dummy columns
/// the scaler must leave alone; empty means standardize every column.
TrainedPtr fit(const ForecasterSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<bool>& indicator = {});

TrainedPtr load_model(const nlohmann::json& j);

}  // namespace gasfc::models
