#include "gasfc/models/knn.hpp"

#include <algorithm>

#include "gasfc/errors.hpp"

namespace gasfc::models {

std::shared_ptr<const KnnModel> fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k,
                                        const std::vector<bool>& indicator) {
    check_spec(ForecasterSpec{KnnSpec{k}});
    if (X.rows() == 0 || X.rows() != y.size())
        throw ValidationError("fit_knn: X and y sizes disagree or are empty");
    if (k > X.rows())
        throw ValidationError("fit_knn: k = " + std::to_string(k) + " exceeds sample count");
    ColumnScaler scaler = ColumnScaler::fit(X, indicator);
    Eigen::MatrixXd Xs = scaler.transform(X);
    return std::make_shared<KnnModel>(KnnSpec{k}, std::move(scaler), std::move(Xs), y);
}

Eigen::VectorXd KnnModel::predict_scaled(const Eigen::MatrixXd& Xs) const {
    const int k = std::get<KnnSpec>(spec_).k;
    const Eigen::Index n = train_x_.rows();
    Eigen::VectorXd out(Xs.rows());
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < Xs.rows(); ++r) {
        for (Eigen::Index i = 0; i < n; ++i)
            dist[static_cast<std::size_t>(i)] = {(train_x_.row(i) - Xs.row(r)).squaredNorm(), i};
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        double sum = 0.0;
        for (int j = 0; j < k; ++j) sum += train_y_[dist[static_cast<std::size_t>(j)].second];
        out[r] = sum / k;
    }
    return out;
}

void KnnModel::save_state(nlohmann::json& j) const {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(train_x_.rows()));
    for (Eigen::Index i = 0; i < train_x_.rows(); ++i)
        rows[static_cast<std::size_t>(i)] =
            std::vector<double>(train_x_.row(i).begin(), train_x_.row(i).end());
    j["train_x"] = rows;
    j["train_y"] = std::vector<double>(train_y_.begin(), train_y_.end());
}

TrainedPtr KnnModel::from_json(const nlohmann::json& j) {
    const auto& st = j.at("state");
    const auto rows = st.at("train_x").get<std::vector<std::vector<double>>>();
    const auto ys = st.at("train_y").get<std::vector<double>>();
    ColumnScaler scaler = ColumnScaler::from_json(j.at("scaler"));
    Eigen::MatrixXd Xs(static_cast<Eigen::Index>(rows.size()), scaler.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        Xs.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(
            rows[i].data(), static_cast<Eigen::Index>(rows[i].size()));
    const ForecasterSpec spec = spec_from_json(j.at("spec"));
    return std::make_shared<KnnModel>(
        std::get<KnnSpec>(spec), std::move(scaler), std::move(Xs),
        Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())));
}

}  // namespace gasfc::models
