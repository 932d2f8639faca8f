#include "gasfc/models/mlp.hpp"

#include <cmath>
#include <numeric>

#include "gasfc/errors.hpp"
#include "gasfc/rng.hpp"

namespace gasfc::models {

MlpNetwork::MlpNetwork(int inputs, const std::vector<int>& hidden_sizes) {
    int in = inputs;
    for (int h : hidden_sizes) {
        weights_.emplace_back(Eigen::MatrixXd::Zero(h, in));
        biases_.emplace_back(Eigen::VectorXd::Zero(h));
        in = h;
    }
    weights_.emplace_back(Eigen::MatrixXd::Zero(1, in));
    biases_.emplace_back(Eigen::VectorXd::Zero(1));
}

Eigen::Index MlpNetwork::parameter_count() const {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l)
        n += weights_[l].size() + biases_[l].size();
    return n;
}

Eigen::VectorXd MlpNetwork::parameters() const {
    Eigen::VectorXd p(parameter_count());
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        p.segment(at, weights_[l].size()) =
            Eigen::Map<const Eigen::VectorXd>(weights_[l].data(), weights_[l].size());
        at += weights_[l].size();
        p.segment(at, biases_[l].size()) = biases_[l];
        at += biases_[l].size();
    }
    return p;
}

void MlpNetwork::set_parameters(const Eigen::VectorXd& p) {
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        Eigen::Map<Eigen::VectorXd>(weights_[l].data(), weights_[l].size()) =
            p.segment(at, weights_[l].size());
        at += weights_[l].size();
        biases_[l] = p.segment(at, biases_[l].size());
        at += biases_[l].size();
    }
}

Eigen::VectorXd MlpNetwork::forward(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd a = X.transpose();  // columns = samples
    for (std::size_t l = 0; l + 1 < weights_.size(); ++l)
        a = ((weights_[l] * a).colwise() + biases_[l]).array().tanh();
    return ((weights_.back() * a).colwise() + biases_.back()).row(0).transpose();
}

double MlpNetwork::loss_and_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                     Eigen::VectorXd& grad) const {
    const Eigen::Index m = X.rows();
    const std::size_t layers = weights_.size();

    std::vector<Eigen::MatrixXd> activations(layers + 1);
    activations[0] = X.transpose();
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = (weights_[l] * activations[l]).colwise() + biases_[l];
        activations[l + 1] = l + 1 < layers ? z.array().tanh().matrix() : z;
    }

    const Eigen::RowVectorXd pred = activations[layers].row(0);
    const Eigen::RowVectorXd err = pred - y.transpose();
    const double loss = err.squaredNorm() / static_cast<double>(m);

    // delta_l = dLoss/dz_l, propagated backwards; tanh'(z) = 1 - a^2.
    std::vector<Eigen::MatrixXd> grad_w(layers);
    std::vector<Eigen::VectorXd> grad_b(layers);
    Eigen::MatrixXd delta = (2.0 / static_cast<double>(m)) * err;
    for (std::size_t l = layers; l-- > 0;) {
        grad_w[l] = delta * activations[l].transpose();
        grad_b[l] = delta.rowwise().sum();
        if (l > 0)
            delta = (weights_[l].transpose() * delta).array() *
                    (1.0 - activations[l].array().square());
    }

    grad.resize(parameter_count());
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        grad.segment(at, grad_w[l].size()) =
            Eigen::Map<const Eigen::VectorXd>(grad_w[l].data(), grad_w[l].size());
        at += grad_w[l].size();
        grad.segment(at, grad_b[l].size()) = grad_b[l];
        at += grad_b[l].size();
    }
    return loss;
}

std::shared_ptr<const MlpModel> fit_mlp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const MlpSpec& spec, const std::vector<bool>& indicator) {
    check_spec(ForecasterSpec{spec});
    if (X.rows() == 0 || X.rows() != y.size())
        throw ValidationError("fit_mlp: X and y sizes disagree or are empty");
    if (!X.allFinite() || !y.allFinite()) throw ValidationError("fit_mlp: non-finite inputs");

    ColumnScaler scaler = ColumnScaler::fit(X, indicator);
    const Eigen::MatrixXd Xs = scaler.transform(X);
    const Eigen::Index n = Xs.rows();

    const double y_mean = y.mean();
    const double y_var = (y.array() - y_mean).square().sum() / static_cast<double>(n);
    const double y_scale = y_var > 0.0 ? std::sqrt(y_var) : 1.0;
    const Eigen::VectorXd ys = (y.array() - y_mean) / y_scale;

    MlpNetwork net(static_cast<int>(Xs.cols()), spec.hidden_sizes);
    Rng rng(mix_seed(spec.seed, 0x6d6c70));

    // Glorot-uniform init.
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        Eigen::MatrixXd& W = net.weights()[l];
        const double limit = std::sqrt(6.0 / static_cast<double>(W.rows() + W.cols()));
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j)
                W(i, j) = (2.0 * rng.next_double() - 1.0) * limit;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Eigen::VectorXd grad;
    const Eigen::Index batch = std::min<Eigen::Index>(spec.batch, n);

    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        rng.shuffle(order);
        for (Eigen::Index start = 0; start < n; start += batch) {
            const Eigen::Index count = std::min(batch, n - start);
            Eigen::MatrixXd bx(count, Xs.cols());
            Eigen::VectorXd by(count);
            for (Eigen::Index i = 0; i < count; ++i) {
                bx.row(i) = Xs.row(order[static_cast<std::size_t>(start + i)]);
                by[i] = ys[order[static_cast<std::size_t>(start + i)]];
            }
            const double loss = net.loss_and_gradient(bx, by, grad);
            if (!std::isfinite(loss))
                throw ConvergenceError("fit_mlp: training diverged (non-finite loss)", loss);
            net.set_parameters(net.parameters() - spec.learning_rate * grad);
        }
    }
    return std::make_shared<MlpModel>(spec, std::move(scaler), std::move(net), y_mean, y_scale);
}

Eigen::VectorXd MlpModel::predict_scaled(const Eigen::MatrixXd& Xs) const {
    return (network_.forward(Xs).array() * y_scale_ + y_mean_).matrix();
}

void MlpModel::save_state(nlohmann::json& j) const {
    const Eigen::VectorXd p = network_.parameters();
    j["parameters"] = std::vector<double>(p.begin(), p.end());
    j["y_mean"] = y_mean_;
    j["y_scale"] = y_scale_;
}

TrainedPtr MlpModel::from_json(const nlohmann::json& j) {
    const ForecasterSpec spec = spec_from_json(j.at("spec"));
    const auto& mlp_spec = std::get<MlpSpec>(spec);
    ColumnScaler scaler = ColumnScaler::from_json(j.at("scaler"));
    MlpNetwork net(static_cast<int>(scaler.cols()), mlp_spec.hidden_sizes);
    const auto ps = j.at("state").at("parameters").get<std::vector<double>>();
    net.set_parameters(
        Eigen::Map<const Eigen::VectorXd>(ps.data(), static_cast<Eigen::Index>(ps.size())));
    return std::make_shared<MlpModel>(mlp_spec, std::move(scaler), std::move(net),
                                      j.at("state").at("y_mean").get<double>(),
                                      j.at("state").at("y_scale").get<double>());
}

}  // namespace gasfc::models
