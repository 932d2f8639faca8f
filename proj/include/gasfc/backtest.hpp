#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gasfc/dataset.hpp"
#include "gasfc/ensemble.hpp"
#include "gasfc/features.hpp"
#include "gasfc/models/model.hpp"

namespace gasfc::backtest {

/// Mean absolute error, (1/n) sum |y_i - yhat_i|.
double mae(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat);

/// Five contiguous, chronological, equal-as-possible row blocks of the
/// training range (time-respecting folds, never shuffled).
struct CvPlan {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;  // (begin, count)

    static CvPlan contiguous(Eigen::Index n_rows, int folds = 5);
};

struct CvOutcome {
    models::ForecasterSpec best;
    double best_mae = 0.0;
    std::vector<double> grid_mae;  // per grid entry; NaN where disqualified
};

/// Picks the grid entry with the lowest mean out-of-fold MAE; ties go to the
/// earliest entry (grids run from strongest to weakest regularization). A
/// spec whose fit fails on any fold is disqualified; all-disqualified is an
/// error. `seed_base` feeds the per-fold seeds of randomized models.
CvOutcome grid_search_cv(const std::vector<models::ForecasterSpec>& grid,
                         const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<bool>& indicator, const CvPlan& plan,
                         std::uint64_t seed_base);

struct BacktestConfig {
    std::map<SeriesKind, std::string> series_paths;  // all three kinds required
    std::vector<int> test_years;
    std::vector<models::ModelKind> model_kinds;  // base models to run
    std::map<std::string, std::vector<models::ForecasterSpec>> grid_overrides;
    std::uint64_t seed = 0;
    int jobs = 0;           // worker threads; 0 = hardware concurrency
    std::string out_dir;    // forecasts/ and report.csv location; empty = keep in memory

    static BacktestConfig from_json(const nlohmann::json& j);
};

inline constexpr const char* kEnsembleNames[] = {"simple_average", "subset_average",
                                                 "weighted_average", "svr_stack"};

struct ReportRow {
    std::string series;  // RGD, IGD, TGD or GD
    std::string model;
    int test_year = 0;
    double mae_mscm = 0.0;
};

/// Test-year forecasts of every model (base and ensemble) for one series.
struct SeriesYearForecasts {
    std::vector<CivilDate> dates;
    Eigen::VectorXd actual;
    std::map<std::string, Eigen::VectorXd> by_model;
};

struct BacktestReport {
    std::vector<ReportRow> rows;
    std::map<std::pair<std::string, int>, SeriesYearForecasts> forecasts;  // (series, year)

    std::string to_csv() const;  // series,model,test_year,mae_mscm
    const ReportRow& row(const std::string& series, const std::string& model, int year) const;
};

struct NationalResult {
    std::vector<CivilDate> dates;
    Eigen::VectorXd forecast;
    Eigen::VectorXd actual;
    double mae_mscm = 0.0;
};

/// Element-wise sum of the three component forecasts; MAE on the sums.
NationalResult compose_national(const SeriesYearForecasts& rgd, const SeriesYearForecasts& igd,
                                const SeriesYearForecasts& tgd, const std::string& model);

/// Full rolling protocol: per series and test year, tune base specs by CV on
/// the training rows, fit on train and forecast the validation year to build
/// the ensemble panel, fit the four aggregators on that panel, refit base
/// models on train + validation, forecast the test year, pass those base
/// forecasts through the fitted aggregators, and record MAEs (plus composed
/// national rows). Deterministic for a given config, whatever `jobs` is.
BacktestReport run_backtest(const BacktestConfig& config);

}  // namespace gasfc::backtest
