#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace gasfc::models {

enum class ModelKind { Ridge, Lasso, ElasticNet, Svr, RandomForest, Knn, Gp, Mlp };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct KernelSpec {
    enum class Type { Linear, Rbf };
    Type type = Type::Rbf;
    double gamma = 0.1;  // Rbf only: k(a,b) = exp(-gamma * |a-b|^2)

    static KernelSpec linear() { return {Type::Linear, 0.0}; }
    static KernelSpec rbf(double gamma) { return {Type::Rbf, gamma}; }
};

struct RidgeSpec {
    double lambda = 1.0;
};

struct LassoSpec {
    double lambda = 1.0;
};

/// Penalty follows the source convention lambda * (alpha*|b|^2 + (1-alpha)*|b|_1):
/// alpha = 1 recovers ridge, alpha = 0 recovers lasso. Note this is the
/// reverse of the glmnet/scikit-learn mixing convention.
struct ElasticNetSpec {
    double lambda = 1.0;
    double alpha = 0.5;
};

struct SvrSpec {
    double c = 1.0;
    double epsilon = 0.1;  // in target units
    KernelSpec kernel = KernelSpec::rbf(0.1);
};

struct RandomForestSpec {
    int n_trees = 200;
    int max_depth = -1;  // -1 = unlimited
    int min_leaf = 1;
    int mtry = 0;  // features sampled per split; 0 = all
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct KnnSpec {
    int k = 5;  // Euclidean metric on standardized features
};

/// RBF-kernel GP regression on the standardized target; signal_var and
/// noise_var are variances on that unit scale.
struct GpSpec {
    double gamma = 0.1;
    double signal_var = 1.0;
    double noise_var = 0.1;
};

struct MlpSpec {
    std::vector<int> hidden_sizes = {16};  // tanh units
    double learning_rate = 1e-2;
    int epochs = 500;
    int batch = 32;
    std::uint64_t seed = 0;
};

using ForecasterSpec = std::variant<RidgeSpec, LassoSpec, ElasticNetSpec, SvrSpec,
                                    RandomForestSpec, KnnSpec, GpSpec, MlpSpec>;

ModelKind kind_of(const ForecasterSpec& spec);

/// One-line description for logs and error messages.
std::string describe(const ForecasterSpec& spec);

/// Validates hyperparameter ranges; throws ValidationError.
void check_spec(const ForecasterSpec& spec);

/// Plants the seed used by randomized models; no-op for the others.
ForecasterSpec with_seed(ForecasterSpec spec, std::uint64_t seed);

nlohmann::json spec_to_json(const ForecasterSpec& spec);
ForecasterSpec spec_from_json(const nlohmann::json& j);

/// Default cross-validation grid for a model kind, ordered from strongest to
/// weakest regularization (the CV tie-break picks the earliest grid entry).
/// `p` is the feature count (RBF gammas scale as 1/p) and `y_std` the target
/// standard deviation on the tuning range (SVR epsilons scale with it).
std::vector<ForecasterSpec> default_grid(ModelKind kind, int p, double y_std);

}  // namespace gasfc::models
