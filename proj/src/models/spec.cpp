#include "gasfc/models/spec.hpp"

#include <cmath>

#include "gasfc/errors.hpp"

namespace gasfc::models {

namespace {

using nlohmann::json;

json kernel_to_json(const KernelSpec& k) {
    if (k.type == KernelSpec::Type::Linear) return json{{"type", "linear"}};
    return json{{"type", "rbf"}, {"gamma", k.gamma}};
}

KernelSpec kernel_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "linear") return KernelSpec::linear();
    if (type == "rbf") return KernelSpec::rbf(j.at("gamma").get<double>());
    throw ValidationError("unknown kernel type '" + type + "'");
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError("bad spec: " + msg);
}

}  // namespace

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Ridge: return "ridge";
        case ModelKind::Lasso: return "lasso";
        case ModelKind::ElasticNet: return "elastic_net";
        case ModelKind::Svr: return "svr";
        case ModelKind::RandomForest: return "random_forest";
        case ModelKind::Knn: return "knn";
        case ModelKind::Gp: return "gp";
        case ModelKind::Mlp: return "mlp";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    for (ModelKind k : {ModelKind::Ridge, ModelKind::Lasso, ModelKind::ElasticNet, ModelKind::Svr,
                        ModelKind::RandomForest, ModelKind::Knn, ModelKind::Gp, ModelKind::Mlp})
        if (to_string(k) == s) return k;
    throw ValidationError("unknown model '" + s + "'");
}

ModelKind kind_of(const ForecasterSpec& spec) {
    return std::visit(
        [](const auto& s) -> ModelKind {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RidgeSpec>) return ModelKind::Ridge;
            else if constexpr (std::is_same_v<T, LassoSpec>) return ModelKind::Lasso;
            else if constexpr (std::is_same_v<T, ElasticNetSpec>) return ModelKind::ElasticNet;
            else if constexpr (std::is_same_v<T, SvrSpec>) return ModelKind::Svr;
            else if constexpr (std::is_same_v<T, RandomForestSpec>) return ModelKind::RandomForest;
            else if constexpr (std::is_same_v<T, KnnSpec>) return ModelKind::Knn;
            else if constexpr (std::is_same_v<T, GpSpec>) return ModelKind::Gp;
            else return ModelKind::Mlp;
        },
        spec);
}

std::string describe(const ForecasterSpec& spec) {
    return spec_to_json(spec).dump();
}

void check_spec(const ForecasterSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RidgeSpec> || std::is_same_v<T, LassoSpec>) {
                require(s.lambda > 0, "lambda must be > 0");
            } else if constexpr (std::is_same_v<T, ElasticNetSpec>) {
                require(s.lambda > 0, "lambda must be > 0");
                require(s.alpha >= 0 && s.alpha <= 1, "alpha must be in [0,1]");
            } else if constexpr (std::is_same_v<T, SvrSpec>) {
                require(s.c > 0, "c must be > 0");
                require(s.epsilon >= 0, "epsilon must be >= 0");
                if (s.kernel.type == KernelSpec::Type::Rbf)
                    require(s.kernel.gamma > 0, "rbf gamma must be > 0");
            } else if constexpr (std::is_same_v<T, RandomForestSpec>) {
                require(s.n_trees >= 1, "n_trees must be >= 1");
                require(s.min_leaf >= 1, "min_leaf must be >= 1");
                require(s.mtry >= 0, "mtry must be >= 0");
            } else if constexpr (std::is_same_v<T, KnnSpec>) {
                require(s.k >= 1, "k must be >= 1");
            } else if constexpr (std::is_same_v<T, GpSpec>) {
                require(s.gamma > 0, "gamma must be > 0");
                require(s.signal_var > 0, "signal_var must be > 0");
                require(s.noise_var > 0, "noise_var must be > 0");
            } else if constexpr (std::is_same_v<T, MlpSpec>) {
                require(!s.hidden_sizes.empty(), "hidden_sizes must be non-empty");
                for (int h : s.hidden_sizes) require(h >= 1, "hidden sizes must be >= 1");
                require(s.learning_rate > 0, "learning_rate must be > 0");
                require(s.epochs >= 1, "epochs must be >= 1");
                require(s.batch >= 1, "batch must be >= 1");
            }
        },
        spec);
}

ForecasterSpec with_seed(ForecasterSpec spec, std::uint64_t seed) {
    if (auto* rf = std::get_if<RandomForestSpec>(&spec)) rf->seed = seed;
    if (auto* mlp = std::get_if<MlpSpec>(&spec)) mlp->seed = seed;
    return spec;
}

nlohmann::json spec_to_json(const ForecasterSpec& spec) {
    json j;
    j["model"] = to_string(kind_of(spec));
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RidgeSpec> || std::is_same_v<T, LassoSpec>) {
                j["lambda"] = s.lambda;
            } else if constexpr (std::is_same_v<T, ElasticNetSpec>) {
                j["lambda"] = s.lambda;
                j["alpha"] = s.alpha;
            } else if constexpr (std::is_same_v<T, SvrSpec>) {
                j["c"] = s.c;
                j["epsilon"] = s.epsilon;
                j["kernel"] = kernel_to_json(s.kernel);
            } else if constexpr (std::is_same_v<T, RandomForestSpec>) {
                j["n_trees"] = s.n_trees;
                j["max_depth"] = s.max_depth;
                j["min_leaf"] = s.min_leaf;
                j["mtry"] = s.mtry;
                j["bootstrap"] = s.bootstrap;
                j["seed"] = s.seed;
            } else if constexpr (std::is_same_v<T, KnnSpec>) {
                j["k"] = s.k;
            } else if constexpr (std::is_same_v<T, GpSpec>) {
                j["gamma"] = s.gamma;
                j["signal_var"] = s.signal_var;
                j["noise_var"] = s.noise_var;
            } else if constexpr (std::is_same_v<T, MlpSpec>) {
                j["hidden_sizes"] = s.hidden_sizes;
                j["learning_rate"] = s.learning_rate;
                j["epochs"] = s.epochs;
                j["batch"] = s.batch;
                j["seed"] = s.seed;
            }
        },
        spec);
    return j;
}

ForecasterSpec spec_from_json(const nlohmann::json& j) {
    const ModelKind kind = model_kind_from_string(j.at("model").get<std::string>());
    switch (kind) {
        case ModelKind::Ridge: return RidgeSpec{j.at("lambda").get<double>()};
        case ModelKind::Lasso: return LassoSpec{j.at("lambda").get<double>()};
        case ModelKind::ElasticNet:
            return ElasticNetSpec{j.at("lambda").get<double>(), j.at("alpha").get<double>()};
        case ModelKind::Svr:
            return SvrSpec{j.at("c").get<double>(), j.at("epsilon").get<double>(),
                           kernel_from_json(j.at("kernel"))};
        case ModelKind::RandomForest: {
            RandomForestSpec s;
            s.n_trees = j.at("n_trees").get<int>();
            s.max_depth = j.at("max_depth").get<int>();
            s.min_leaf = j.at("min_leaf").get<int>();
            s.mtry = j.at("mtry").get<int>();
            s.bootstrap = j.at("bootstrap").get<bool>();
            s.seed = j.at("seed").get<std::uint64_t>();
            return s;
        }
        case ModelKind::Knn: return KnnSpec{j.at("k").get<int>()};
        case ModelKind::Gp:
            return GpSpec{j.at("gamma").get<double>(), j.at("signal_var").get<double>(),
                          j.at("noise_var").get<double>()};
        case ModelKind::Mlp: {
            MlpSpec s;
            s.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
            s.learning_rate = j.at("learning_rate").get<double>();
            s.epochs = j.at("epochs").get<int>();
            s.batch = j.at("batch").get<int>();
            s.seed = j.at("seed").get<std::uint64_t>();
            return s;
        }
    }
    throw ValidationError("unreachable model kind");
}

std::vector<ForecasterSpec> default_grid(ModelKind kind, int p, double y_std) {
    std::vector<ForecasterSpec> grid;
    const std::vector<double> lambdas = {1e3, 1e2, 1e1, 1.0, 1e-1, 1e-2, 1e-3};
    const std::vector<double> alphas = {0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> cs = {0.1, 1.0, 10.0, 100.0};
    const std::vector<double> eps_rel = {0.1, 0.05, 0.01};
    const std::vector<double> gamma_rel = {0.01, 0.1, 1.0};
    const double pd = static_cast<double>(p);

    switch (kind) {
        case ModelKind::Ridge:
            for (double l : lambdas) grid.push_back(RidgeSpec{l});
            break;
        case ModelKind::Lasso:
            for (double l : lambdas) grid.push_back(LassoSpec{l});
            break;
        case ModelKind::ElasticNet:
            for (double l : lambdas)
                for (double a : alphas) grid.push_back(ElasticNetSpec{l, a});
            break;
        case ModelKind::Svr:
            for (double c : cs)
                for (double e : eps_rel)
                    for (double g : gamma_rel)
                        grid.push_back(SvrSpec{c, e * y_std, KernelSpec::rbf(g / pd)});
            break;
        case ModelKind::RandomForest:
            for (int depth : {6, 10, -1})
                for (int mtry : {(p + 2) / 3, static_cast<int>(std::ceil(std::sqrt(pd)))}) {
                    RandomForestSpec s;
                    s.n_trees = 200;
                    s.max_depth = depth;
                    s.min_leaf = 1;
                    s.mtry = mtry;
                    grid.push_back(s);
                }
            break;
        case ModelKind::Knn:
            for (int k : {20, 10, 5, 3}) grid.push_back(KnnSpec{k});
            break;
        case ModelKind::Gp:
            for (double g : gamma_rel)
                for (double noise : {0.2, 0.05}) grid.push_back(GpSpec{g / pd, 1.0, noise});
            break;
        case ModelKind::Mlp:
            grid.push_back(MlpSpec{});
            break;
    }
    return grid;
}

}  // namespace gasfc::models
