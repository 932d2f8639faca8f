#pragma once

#include <Eigen/Dense>
#include <vector>

#include <json.hpp>

namespace gasfc::models {

/// Per-column affine transform u = (x - offset) / scale, fitted on the
/// training range only and stored inside every model, so test-time rows are
/// scaled with training statistics. Continuous columns get zero mean and
/// unit variance (population std; constant columns keep scale 1); indicator
/// columns pass through untouched.
struct ColumnScaler {
    Eigen::VectorXd offset;
    Eigen::VectorXd scale;

    static ColumnScaler fit(const Eigen::MatrixXd& X, const std::vector<bool>& indicator = {});

    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const {
        return (X.rowwise() - offset.transpose()).array().rowwise() /
               scale.transpose().array();
    }

    Eigen::Index cols() const { return offset.size(); }

    nlohmann::json to_json() const;
    static ColumnScaler from_json(const nlohmann::json& j);
};

}  // namespace gasfc::models
