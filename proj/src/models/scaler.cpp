#include "gasfc/models/scaler.hpp"

#include <cmath>

#include "gasfc/errors.hpp"

namespace gasfc::models {

ColumnScaler ColumnScaler::fit(const Eigen::MatrixXd& X, const std::vector<bool>& indicator) {
    if (X.rows() == 0) throw ValidationError("cannot fit scaler on empty matrix");
    const Eigen::Index p = X.cols();
    ColumnScaler s;
    s.offset = Eigen::VectorXd::Zero(p);
    s.scale = Eigen::VectorXd::Ones(p);
    const double n = static_cast<double>(X.rows());
    for (Eigen::Index j = 0; j < p; ++j) {
        if (j < static_cast<Eigen::Index>(indicator.size()) && indicator[j]) continue;
        const double mean = X.col(j).mean();
        const double var = (X.col(j).array() - mean).square().sum() / n;
        s.offset[j] = mean;
        s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

nlohmann::json ColumnScaler::to_json() const {
    return {{"offset", std::vector<double>(offset.begin(), offset.end())},
            {"scale", std::vector<double>(scale.begin(), scale.end())}};
}

ColumnScaler ColumnScaler::from_json(const nlohmann::json& j) {
    ColumnScaler s;
    const auto off = j.at("offset").get<std::vector<double>>();
    const auto sc = j.at("scale").get<std::vector<double>>();
    s.offset = Eigen::Map<const Eigen::VectorXd>(off.data(), static_cast<Eigen::Index>(off.size()));
    s.scale = Eigen::Map<const Eigen::VectorXd>(sc.data(), static_cast<Eigen::Index>(sc.size()));
    return s;
}

}  // namespace gasfc::models
