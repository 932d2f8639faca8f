#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gasfc/calendar.hpp"
#include "gasfc/models/svr.hpp"

namespace gasfc::ensemble {

/// Base-model forecasts aligned on one date index; column i holds model i's
/// forecast. `target` carries actuals on validation panels and may be empty
/// at apply time.
struct ForecastPanel {
    std::vector<CivilDate> dates;
    std::vector<std::string> model_names;
    Eigen::MatrixXd forecasts;  // n x M
    Eigen::VectorXd target;

    Eigen::Index size() const { return forecasts.rows(); }
    Eigen::Index model_count() const { return forecasts.cols(); }
};

/// Convex combination weights over the base models. For the subset method
/// subset_size records how many columns carry weight 1/subset_size.
struct EnsembleWeights {
    Eigen::VectorXd w;
    int subset_size = 0;

    Eigen::VectorXd apply(const Eigen::MatrixXd& forecasts) const { return forecasts * w; }
};

/// Row-wise arithmetic mean of the base forecasts.
Eigen::VectorXd simple_average(const ForecastPanel& panel);

/// Least-squares weights on the probability simplex, found by projected
/// gradient descent from the uniform start (step 1/L, exact Euclidean
/// projection) down to a 1e-8 first-order stationarity residual.
EnsembleWeights fit_weighted_average(const ForecastPanel& panel);

/// Iterative pruning: while more than subset_size columns survive, take the
/// pair of surviving forecast columns with the highest Pearson correlation
/// (ties: lowest column-index pair) and drop the member with the higher
/// validation MAE (ties: higher index). Survivors share uniform weight.
/// Zero-variance columns correlate as 0 with everything.
EnsembleWeights fit_subset_average(const ForecastPanel& panel, int subset_size);

/// Second-level SVR on the base forecasts as features.
std::shared_ptr<const models::SvrModel> fit_svr_stack(const ForecastPanel& panel,
                                                      const models::SvrSpec& spec);

/// Panel CSV: date,<model names...>,target.
void write_panel_csv(const ForecastPanel& panel, std::ostream& out);

}  // namespace gasfc::ensemble
