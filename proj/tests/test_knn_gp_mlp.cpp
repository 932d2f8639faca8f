#include <doctest.h>

#include <Eigen/Dense>

#include "gasfc/errors.hpp"
#include "gasfc/models/gp.hpp"
#include "gasfc/models/knn.hpp"
#include "gasfc/models/mlp.hpp"
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

// ---------------------------------------------------------------------------
// KNN
// ---------------------------------------------------------------------------

TEST_CASE("knn with k=1 returns the training target at training points") {
    Rng rng(201);
    const Eigen::MatrixXd X = random_matrix(rng, 15, 3);
    const Eigen::VectorXd y = random_matrix(rng, 15, 1);
    const auto model = fit_knn(X, y, 1);
    const Eigen::VectorXd pred = model->predict(X);
    for (Eigen::Index i = 0; i < 15; ++i) CHECK(pred[i] == y[i]);
}

TEST_CASE("knn with k=n predicts the global mean everywhere") {
    Rng rng(202);
    const Eigen::MatrixXd X = random_matrix(rng, 12, 2);
    const Eigen::VectorXd y = random_matrix(rng, 12, 1);
    const auto model = fit_knn(X, y, 12);
    const Eigen::VectorXd pred = model->predict(random_matrix(rng, 5, 2));
    for (Eigen::Index i = 0; i < 5; ++i)
        CHECK(pred[i] == doctest::Approx(y.mean()).epsilon(1e-12));
}

TEST_CASE("knn predictions stay within [min(y), max(y)]") {
    Rng rng(203);
    const Eigen::MatrixXd X = random_matrix(rng, 40, 3);
    const Eigen::VectorXd y = random_matrix(rng, 40, 1);
    const auto model = fit_knn(X, y, 5);
    const Eigen::VectorXd pred = model->predict(random_matrix(rng, 100, 3) * 2.0);
    CHECK(pred.minCoeff() >= y.minCoeff());
    CHECK(pred.maxCoeff() <= y.maxCoeff());
}

TEST_CASE("knn rejects k above the sample count") {
    Rng rng(204);
    const Eigen::MatrixXd X = random_matrix(rng, 5, 2);
    const Eigen::VectorXd y = random_matrix(rng, 5, 1);
    CHECK_THROWS_AS(fit_knn(X, y, 6), ValidationError);
}

// ---------------------------------------------------------------------------
// GP
// ---------------------------------------------------------------------------

TEST_CASE("gp with tiny noise interpolates the training targets") {
    Rng rng(211);
    const Eigen::MatrixXd X = random_matrix(rng, 10, 2) * 2.0;
    Eigen::VectorXd y(10);
    for (Eigen::Index i = 0; i < 10; ++i) y[i] = std::sin(X(i, 0)) + 0.5 * X(i, 1);
    const auto model = fit_gp(X, y, GpSpec{1.0, 1.0, 1e-10});
    const Eigen::VectorXd pred = model->predict(X);
    for (Eigen::Index i = 0; i < 10; ++i) CHECK(std::abs(pred[i] - y[i]) < 1e-4);
}

TEST_CASE("gp posterior mean on two points matches the closed form") {
    // Hand-evaluated k*' (K + s2 I)^-1 y for two training points.
    Eigen::MatrixXd X(2, 1);
    X << -1.0, 1.0;  // standardizes to the same +-1 values
    Eigen::VectorXd y(2);
    y << 1.0, 3.0;

    const double gamma = 0.5;
    const double noise = 0.1;
    const auto model = fit_gp(X, y, GpSpec{gamma, 1.0, noise});

    // Internal scale: ys = (y - 2)/1 = [-1, +1]; K = [[1, k],[k, 1]] + noise I,
    // with k = exp(-gamma * (2)^2) (standardized points at -1 and 1).
    const double k = std::exp(-gamma * 4.0);
    Eigen::Matrix2d K;
    K << 1.0 + noise, k, k, 1.0 + noise;
    Eigen::Vector2d ys(-1.0, 1.0);
    const Eigen::Vector2d weights = K.inverse() * ys;

    // Query at raw x = 0, standardized 0: k* = [exp(-gamma), exp(-gamma)].
    Eigen::MatrixXd q(1, 1);
    q << 0.0;
    const double kq = std::exp(-gamma * 1.0);
    const double expected = 2.0 + 1.0 * (kq * weights[0] + kq * weights[1]);
    CHECK(model->predict(q)[0] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("gp posterior variance is non-negative and shrinks at the data") {
    Rng rng(212);
    const Eigen::MatrixXd X = random_matrix(rng, 25, 2);
    Eigen::VectorXd y = X.col(0) * 2.0;
    const auto gp = fit_gp(X, y, GpSpec{0.5, 1.0, 0.05});

    const auto [mean_at_train, var_at_train] = gp->predict_with_variance(X);
    const auto [mean_far, var_far] = gp->predict_with_variance(random_matrix(rng, 10, 2) * 10.0);
    CHECK(var_at_train.minCoeff() >= -1e-9);
    CHECK(var_far.minCoeff() >= -1e-9);
    // Far from the data the posterior reverts toward the prior variance.
    CHECK(var_far.mean() > var_at_train.mean());
    CHECK(mean_at_train.size() == 25);
    CHECK(mean_far.size() == 10);
}

TEST_CASE("gp jitter retry handles duplicated rows with near-zero noise") {
    Eigen::MatrixXd X(4, 1);
    X << 0.0, 0.0, 1.0, 2.0;  // duplicated input makes K singular at noise ~ 0
    Eigen::VectorXd y(4);
    y << 1.0, 1.0, 2.0, 3.0;
    const auto model = fit_gp(X, y, GpSpec{1.0, 1.0, 1e-12});
    CHECK(model->predict(X).allFinite());
}

// ---------------------------------------------------------------------------
// MLP
// ---------------------------------------------------------------------------

TEST_CASE("mlp backprop gradient matches central finite differences") {
    Rng rng(221);
    const Eigen::MatrixXd X = random_matrix(rng, 12, 4);
    const Eigen::VectorXd y = random_matrix(rng, 12, 1);

    MlpNetwork net(4, {5, 3});
    Rng init(99);
    Eigen::VectorXd params(net.parameter_count());
    const double step = 1e-5;

    for (int point = 0; point < 20; ++point) {
        for (Eigen::Index i = 0; i < params.size(); ++i)
            params[i] = init.next_gaussian() * 0.6;
        net.set_parameters(params);

        Eigen::VectorXd analytic;
        net.loss_and_gradient(X, y, analytic);

        double max_rel = 0.0;
        MlpNetwork probe = net;
        for (Eigen::Index i = 0; i < params.size(); ++i) {
            Eigen::VectorXd shifted = params;
            Eigen::VectorXd unused;
            shifted[i] = params[i] + step;
            probe.set_parameters(shifted);
            const double up = probe.loss_and_gradient(X, y, unused);
            shifted[i] = params[i] - step;
            probe.set_parameters(shifted);
            const double down = probe.loss_and_gradient(X, y, unused);
            const double numeric = (up - down) / (2.0 * step);
            const double scale = std::max(1.0, std::abs(numeric));
            max_rel = std::max(max_rel, std::abs(analytic[i] - numeric) / scale);
        }
        CHECK(max_rel < 1e-4);
    }
}

TEST_CASE("mlp learns a smooth function to reasonable accuracy") {
    Rng rng(222);
    const Eigen::MatrixXd X = random_matrix(rng, 200, 2);
    Eigen::VectorXd y(200);
    for (Eigen::Index i = 0; i < 200; ++i) y[i] = 2.0 * X(i, 0) - X(i, 1);

    MlpSpec spec;
    spec.hidden_sizes = {16};
    spec.epochs = 300;
    spec.seed = 4;
    const auto model = fit_mlp(X, y, spec);
    const double err = (model->predict(X) - y).cwiseAbs().mean();
    CHECK(err < 0.25 * std::sqrt((y.array() - y.mean()).square().mean()));
}

TEST_CASE("mlp training is reproducible for a fixed seed") {
    Rng rng(223);
    const Eigen::MatrixXd X = random_matrix(rng, 60, 3);
    const Eigen::VectorXd y = X.col(0);
    MlpSpec spec;
    spec.epochs = 50;
    spec.seed = 12;
    const auto a = fit_mlp(X, y, spec);
    const auto b = fit_mlp(X, y, spec);
    CHECK(a->predict(X) == b->predict(X));
}

TEST_CASE("mlp divergence is reported") {
    Rng rng(224);
    const Eigen::MatrixXd X = random_matrix(rng, 40, 2) * 5.0;
    const Eigen::VectorXd y = X.col(0) * 100.0;
    MlpSpec spec;
    spec.learning_rate = 50.0;  // guaranteed blow-up
    spec.epochs = 200;
    spec.seed = 1;
    CHECK_THROWS_AS(fit_mlp(X, y, spec), ConvergenceError);
}
