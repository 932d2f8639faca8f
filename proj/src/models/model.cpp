#include "gasfc/models/model.hpp"

#include "gasfc/errors.hpp"
#include "gasfc/models/forest.hpp"
#include "gasfc/models/gp.hpp"
#include "gasfc/models/knn.hpp"
#include "gasfc/models/linear.hpp"
#include "gasfc/models/mlp.hpp"
#include "gasfc/models/svr.hpp"
#include "gasfc/version.hpp"

namespace gasfc::models {

Eigen::VectorXd TrainedForecaster::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != scaler_.cols())
        throw ValidationError("predict: expected " + std::to_string(scaler_.cols()) +
                              " feature columns, got " + std::to_string(X.cols()));
    if (!X.allFinite()) throw ValidationError("predict: non-finite features");
    Eigen::VectorXd out = predict_scaled(scaler_.transform(X));
    if (!out.allFinite()) throw Error("predict: produced non-finite forecast");
    return out;
}

nlohmann::json TrainedForecaster::to_json() const {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["model"] = to_string(kind());
    j["spec"] = spec_to_json(spec());
    j["scaler"] = scaler_.to_json();
    nlohmann::json state;
    save_state(state);
    j["state"] = std::move(state);
    return j;
}

TrainedPtr fit(const ForecasterSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<bool>& indicator) {
    return std::visit(
        [&](const auto& s) -> TrainedPtr {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RidgeSpec>)
                return fit_ridge(X, y, s.lambda, indicator);
            else if constexpr (std::is_same_v<T, LassoSpec>)
                return fit_lasso(X, y, s.lambda, indicator);
            else if constexpr (std::is_same_v<T, ElasticNetSpec>)
                return fit_elastic_net(X, y, s.lambda, s.alpha, indicator);
            else if constexpr (std::is_same_v<T, SvrSpec>)
                return fit_svr(X, y, s, indicator);
            else if constexpr (std::is_same_v<T, RandomForestSpec>)
                return fit_random_forest(X, y, s, indicator);
            else if constexpr (std::is_same_v<T, KnnSpec>)
                return fit_knn(X, y, s.k, indicator);
            else if constexpr (std::is_same_v<T, GpSpec>)
                return fit_gp(X, y, s, indicator);
            else
                return fit_mlp(X, y, s, indicator);
        },
        spec);
}

TrainedPtr load_model(const nlohmann::json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
        throw ValidationError("unsupported model format version " + std::to_string(version));
    const ModelKind kind = model_kind_from_string(j.at("model").get<std::string>());
    switch (kind) {
        case ModelKind::Ridge:
        case ModelKind::Lasso:
        case ModelKind::ElasticNet: return LinearModel::from_json(j);
        case ModelKind::Svr: return SvrModel::from_json(j);
        case ModelKind::RandomForest: return RandomForestModel::from_json(j);
        case ModelKind::Knn: return KnnModel::from_json(j);
        case ModelKind::Gp: return GpModel::from_json(j);
        case ModelKind::Mlp: return MlpModel::from_json(j);
    }
    throw ValidationError("unreachable model kind");
}

}  // namespace gasfc::models
