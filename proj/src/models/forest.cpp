#include "gasfc/models/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gasfc/errors.hpp"
#include "gasfc/rng.hpp"

namespace gasfc::models {

namespace {

struct SplitCandidate {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();  // SSE_left + SSE_right
};

struct TreeBuilder {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    const RandomForestSpec& spec;
    Rng& rng;
    Tree nodes;
    std::vector<int> feature_pool;           // reused per split
    std::vector<std::pair<double, double>> sorted;  // (x, y) pairs, reused

    TreeBuilder(const Eigen::MatrixXd& X_, const Eigen::VectorXd& y_,
                const RandomForestSpec& spec_, Rng& rng_)
        : X(X_), y(y_), spec(spec_), rng(rng_) {
        feature_pool.resize(static_cast<std::size_t>(X.cols()));
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
    }

    /// Best exhaustive split over one feature: sort the node samples by the
    /// feature value, scan thresholds between consecutive distinct values,
    /// score by the summed SSE of the two sides via prefix sums.
    void best_split_on_feature(const std::vector<int>& samples, int feature,
                               SplitCandidate& best) {
        sorted.clear();
        for (int idx : samples) sorted.emplace_back(X(idx, feature), y[idx]);
        std::sort(sorted.begin(), sorted.end());

        const std::size_t m = sorted.size();
        double total_sum = 0.0, total_sq = 0.0;
        for (const auto& [_, t] : sorted) {
            total_sum += t;
            total_sq += t * t;
        }
        double left_sum = 0.0, left_sq = 0.0;
        const std::size_t min_leaf = static_cast<std::size_t>(spec.min_leaf);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            left_sum += sorted[i].second;
            left_sq += sorted[i].second * sorted[i].second;
            if (sorted[i].first == sorted[i + 1].first) continue;  // no cut between equals
            const std::size_t left_n = i + 1;
            const std::size_t right_n = m - left_n;
            if (left_n < min_leaf || right_n < min_leaf) continue;
            const double right_sum = total_sum - left_sum;
            const double right_sq = total_sq - left_sq;
            const double sse = (left_sq - left_sum * left_sum / double(left_n)) +
                               (right_sq - right_sum * right_sum / double(right_n));
            if (sse < best.score) {
                best.found = true;
                best.score = sse;
                best.feature = feature;
                best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
            }
        }
    }

    int build(std::vector<int>&& samples, int depth) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();

        double sum = 0.0;
        for (int idx : samples) sum += y[idx];
        const double mean = sum / static_cast<double>(samples.size());
        nodes[node_id].value = mean;

        bool constant = true;
        for (int idx : samples)
            if (y[idx] != y[samples.front()]) {
                constant = false;
                break;
            }
        const bool depth_capped = spec.max_depth >= 0 && depth >= spec.max_depth;
        if (constant || depth_capped ||
            samples.size() < 2 * static_cast<std::size_t>(spec.min_leaf))
            return node_id;

        // Feature bagging: draw mtry distinct features for this split. With
        // mtry = p every feature is tried in natural order (plain CART).
        const int p = static_cast<int>(X.cols());
        const int mtry = spec.mtry > 0 ? std::min(spec.mtry, p) : p;
        if (mtry < p) {
            for (int i = 0; i < mtry; ++i) {
                const int j =
                    i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p - i)));
                std::swap(feature_pool[i], feature_pool[j]);
            }
        } else {
            std::iota(feature_pool.begin(), feature_pool.end(), 0);
        }

        SplitCandidate best;
        for (int i = 0; i < mtry; ++i) best_split_on_feature(samples, feature_pool[i], best);
        if (!best.found) return node_id;

        std::vector<int> left, right;
        left.reserve(samples.size());
        right.reserve(samples.size());
        for (int idx : samples)
            (X(idx, best.feature) <= best.threshold ? left : right).push_back(idx);
        samples.clear();
        samples.shrink_to_fit();

        nodes[node_id].feature = best.feature;
        nodes[node_id].threshold = best.threshold;
        nodes[node_id].left = build(std::move(left), depth + 1);
        nodes[node_id].right = build(std::move(right), depth + 1);
        return node_id;
    }
};

double tree_predict(const Tree& tree, const Eigen::RowVectorXd& x) {
    int node = 0;
    while (tree[node].feature >= 0)
        node = x[tree[node].feature] <= tree[node].threshold ? tree[node].left : tree[node].right;
    return tree[node].value;
}

}  // namespace

std::shared_ptr<const RandomForestModel> fit_random_forest(const Eigen::MatrixXd& X,
                                                           const Eigen::VectorXd& y,
                                                           const RandomForestSpec& spec,
                                                           const std::vector<bool>& indicator) {
    check_spec(ForecasterSpec{spec});
    if (X.rows() < 2 || X.rows() != y.size())
        throw ValidationError("fit_random_forest: need at least 2 samples");
    if (!X.allFinite() || !y.allFinite())
        throw ValidationError("fit_random_forest: non-finite inputs");

    ColumnScaler scaler = ColumnScaler::fit(X, indicator);
    const Eigen::MatrixXd Xs = scaler.transform(X);
    const Eigen::Index n = Xs.rows();

    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(spec.n_trees));
    for (int t = 0; t < spec.n_trees; ++t) {
        Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(t) + 1));
        std::vector<int> samples(static_cast<std::size_t>(n));
        if (spec.bootstrap) {
            for (auto& s : samples)
                s = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        } else {
            std::iota(samples.begin(), samples.end(), 0);
        }
        TreeBuilder builder(Xs, y, spec, rng);
        builder.nodes.reserve(static_cast<std::size_t>(2 * n));
        builder.build(std::move(samples), 0);
        trees.push_back(std::move(builder.nodes));
    }
    return std::make_shared<RandomForestModel>(spec, std::move(scaler), std::move(trees));
}

Eigen::VectorXd RandomForestModel::predict_scaled(const Eigen::MatrixXd& Xs) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Xs.rows());
    for (Eigen::Index r = 0; r < Xs.rows(); ++r) {
        double sum = 0.0;
        for (const Tree& tree : trees_) sum += tree_predict(tree, Xs.row(r));
        out[r] = sum / static_cast<double>(trees_.size());
    }
    return out;
}

void RandomForestModel::save_state(nlohmann::json& j) const {
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : trees_) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& n : tree)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
        trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
}

TrainedPtr RandomForestModel::from_json(const nlohmann::json& j) {
    std::vector<Tree> trees;
    for (const auto& tj : j.at("state").at("trees")) {
        Tree tree;
        for (const auto& nj : tj) {
            TreeNode n;
            n.feature = nj.at(0).get<int>();
            n.threshold = nj.at(1).get<double>();
            n.left = nj.at(2).get<int>();
            n.right = nj.at(3).get<int>();
            n.value = nj.at(4).get<double>();
            tree.push_back(n);
        }
        trees.push_back(std::move(tree));
    }
    const ForecasterSpec spec = spec_from_json(j.at("spec"));
    return std::make_shared<RandomForestModel>(std::get<RandomForestSpec>(spec),
                                               ColumnScaler::from_json(j.at("scaler")),
                                               std::move(trees));
}

}  // namespace gasfc::models
