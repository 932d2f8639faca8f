#include <doctest.h>

#include <Eigen/Dense>

#include "gasfc/errors.hpp"
#include "gasfc/models/model.hpp"
#include "gasfc/rng.hpp"

using namespace gasfc;
using namespace gasfc::models;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index n, Eigen::Index p) {
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.next_gaussian();
    return X;
}

}  // namespace

TEST_CASE("every model kind round-trips through JSON with bitwise-equal predictions") {
    Rng rng(777);
    const Eigen::MatrixXd X = random_matrix(rng, 40, 4);
    Eigen::VectorXd y = X.col(0) * 2.0 - X.col(2);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += 0.1 * rng.next_gaussian();
    const Eigen::MatrixXd Q = random_matrix(rng, 15, 4);

    RandomForestSpec rf;
    rf.n_trees = 10;
    rf.mtry = 2;
    rf.seed = 5;
    MlpSpec mlp;
    mlp.epochs = 30;
    mlp.seed = 6;
    const std::vector<ForecasterSpec> specs = {
        RidgeSpec{0.5},
        LassoSpec{0.2},
        ElasticNetSpec{0.3, 0.5},
        SvrSpec{5.0, 0.1, KernelSpec::rbf(0.25)},
        rf,
        KnnSpec{3},
        GpSpec{0.5, 1.0, 0.1},
        mlp,
    };

    for (const auto& spec : specs) {
        CAPTURE(to_string(kind_of(spec)));
        const TrainedPtr original = fit(spec, X, y);
        const Eigen::VectorXd before = original->predict(Q);

        // Through a serialized string, as the model store does on disk.
        const std::string blob = original->to_json().dump();
        const TrainedPtr restored = load_model(nlohmann::json::parse(blob));
        CHECK(restored->kind() == original->kind());
        const Eigen::VectorXd after = restored->predict(Q);
        CHECK(before == after);
    }
}

TEST_CASE("model blobs carry and check a format version") {
    Rng rng(778);
    const Eigen::MatrixXd X = random_matrix(rng, 10, 2);
    const Eigen::VectorXd y = X.col(0);
    const TrainedPtr model = fit(RidgeSpec{1.0}, X, y);
    nlohmann::json j = model->to_json();
    CHECK(j.at("format_version").get<int>() >= 1);
    j["format_version"] = 999;
    CHECK_THROWS_AS(load_model(j), ValidationError);
}

TEST_CASE("predict rejects a column-count mismatch") {
    Rng rng(779);
    const Eigen::MatrixXd X = random_matrix(rng, 10, 3);
    const Eigen::VectorXd y = X.col(0);
    const TrainedPtr model = fit(RidgeSpec{1.0}, X, y);
    CHECK_THROWS_AS(model->predict(random_matrix(rng, 4, 2)), ValidationError);
}

TEST_CASE("duplicated query rows give identical outputs for every model") {
    Rng rng(780);
    const Eigen::MatrixXd X = random_matrix(rng, 30, 3);
    Eigen::VectorXd y = X.col(1) * 3.0;

    Eigen::MatrixXd Q(6, 3);
    const Eigen::RowVectorXd row = X.row(4);
    for (Eigen::Index i = 0; i < 6; ++i) Q.row(i) = row;

    RandomForestSpec rf;
    rf.n_trees = 8;
    rf.seed = 2;
    for (const ForecasterSpec& spec :
         std::vector<ForecasterSpec>{RidgeSpec{0.1}, SvrSpec{1.0, 0.05, KernelSpec::linear()},
                                     rf, KnnSpec{4}, GpSpec{0.3, 1.0, 0.05}}) {
        const TrainedPtr model = fit(spec, X, y);
        const Eigen::VectorXd pred = model->predict(Q);
        for (Eigen::Index i = 1; i < 6; ++i) CHECK(pred[i] == pred[0]);
    }
}
