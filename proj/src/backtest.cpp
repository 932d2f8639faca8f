#include "gasfc/backtest.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "gasfc/errors.hpp"
#include "gasfc/rng.hpp"
#include "gasfc/util.hpp"

namespace gasfc::backtest {

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Small deterministic task pool: tasks write into preassigned slots, so the
// outcome is independent of scheduling order and of the worker count.
// ---------------------------------------------------------------------------

void run_tasks(std::vector<std::function<void()>>& tasks, int jobs) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));

    if (jobs == 1) {
        for (auto& task : tasks) task();
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                tasks[i]();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Seed contexts, mixed into per-task seeds in a scheduling-independent way.
constexpr std::uint64_t kCtxTrainFit = 100;
constexpr std::uint64_t kCtxUnionFit = 101;

std::uint64_t task_seed(std::uint64_t base, int series_id, int year, int model_id) {
    std::uint64_t s = mix_seed(base, static_cast<std::uint64_t>(series_id) + 1);
    s = mix_seed(s, static_cast<std::uint64_t>(year));
    return mix_seed(s, static_cast<std::uint64_t>(model_id) + 1);
}

// ---------------------------------------------------------------------------
// Per-(series, year, model) pipeline
// ---------------------------------------------------------------------------

struct FoldViews {
    Eigen::MatrixXd fit_x;
    Eigen::VectorXd fit_y;
    Eigen::MatrixXd val_x;
    Eigen::VectorXd val_y;
};

FoldViews fold_views(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     std::pair<Eigen::Index, Eigen::Index> block) {
    const auto [begin, count] = block;
    const Eigen::Index n = X.rows();
    FoldViews v;
    v.fit_x.resize(n - count, X.cols());
    v.fit_y.resize(n - count);
    v.fit_x.topRows(begin) = X.topRows(begin);
    v.fit_y.head(begin) = y.head(begin);
    v.fit_x.bottomRows(n - begin - count) = X.bottomRows(n - begin - count);
    v.fit_y.tail(n - begin - count) = y.tail(n - begin - count);
    v.val_x = X.middleRows(begin, count);
    v.val_y = y.segment(begin, count);
    return v;
}

struct BaseModelOutcome {
    models::ForecasterSpec tuned;
    Eigen::VectorXd validation_forecast;
    Eigen::VectorXd test_forecast;
};

/// Guards the no-leakage invariant: every row a fit consumes must predate
/// the test year.
void assert_before(const std::vector<CivilDate>& dates, const CivilDate& cutoff,
                   const char* what) {
    for (const auto& d : dates)
        if (!(d < cutoff))
            throw Error(std::string("leakage guard: ") + what + " contains " + format_date(d) +
                        " on or after " + format_date(cutoff));
}

BaseModelOutcome run_base_model(const FeatureMatrix& full, const SplitPlan& plan,
                                models::ModelKind kind,
                                const std::vector<models::ForecasterSpec>* override_grid,
                                std::uint64_t seed) {
    const auto [train_begin, train_count] = full.row_range(plan.train);
    const auto [val_begin, val_count] = full.row_range(plan.validation);
    const auto [test_begin, test_count] = full.row_range(plan.test);
    if (train_count < 10)
        throw ValidationError("test year " + std::to_string(plan.test_year) +
                              ": only " + std::to_string(train_count) +
                              " training rows after history consumption");
    if (val_count == 0 || test_count == 0)
        throw ValidationError("test year " + std::to_string(plan.test_year) +
                              ": empty validation or test rows");

    const FeatureMatrix train = full.slice(train_begin, train_count);
    const FeatureMatrix validation = full.slice(val_begin, val_count);
    const FeatureMatrix test = full.slice(test_begin, test_count);

    const CivilDate test_start{plan.test_year, 1, 1};
    const CivilDate val_start{plan.test_year - 1, 1, 1};
    assert_before(train.dates, val_start, "training fit range");
    assert_before(validation.dates, test_start, "validation range");

    // 1. Tune by 5-fold CV on the training rows.
    std::vector<models::ForecasterSpec> grid;
    if (override_grid != nullptr) {
        grid = *override_grid;
    } else {
        const double y_std = std::sqrt(
            (train.target.array() - train.target.mean()).square().sum() /
            static_cast<double>(train.target.size()));
        grid = models::default_grid(kind, static_cast<int>(train.cols()), y_std);
    }
    const CvPlan plan5 = CvPlan::contiguous(train.rows());
    const CvOutcome cv =
        grid_search_cv(grid, train.values, train.target, train.indicator, plan5, seed);

    // 2. Fit on train, forecast the validation year (ensemble panel input).
    const auto train_model = models::fit(models::with_seed(cv.best, mix_seed(seed, kCtxTrainFit)),
                                         train.values, train.target, train.indicator);
    BaseModelOutcome out;
    out.tuned = cv.best;
    out.validation_forecast = train_model->predict(validation.values);

    // 3. Refit on train + validation, forecast the test year.
    const FeatureMatrix merged = full.slice(train_begin, train_count + val_count);
    assert_before(merged.dates, test_start, "train+validation fit range");
    const auto union_model = models::fit(models::with_seed(cv.best, mix_seed(seed, kCtxUnionFit)),
                                         merged.values, merged.target, merged.indicator);
    out.test_forecast = union_model->predict(test.values);
    return out;
}

// ---------------------------------------------------------------------------
// Ensemble fitting on the validation panel
// ---------------------------------------------------------------------------

struct FittedEnsembles {
    Eigen::VectorXd weighted;           // simplex weights
    Eigen::VectorXd subset;             // uniform weights on the surviving subset
    int subset_size = 0;
    std::shared_ptr<const models::SvrModel> stack;
};

/// Subset size is tuned on a nested split of the validation year: prune on
/// the first nine months, score the uniform average on the last three.
int tune_subset_size(const ensemble::ForecastPanel& panel) {
    const int m = static_cast<int>(panel.model_count());
    if (m <= 2) return m;

    const CivilDate october{panel.dates.front().year, 10, 1};
    Eigen::Index cut = 0;
    while (cut < panel.size() && panel.dates[static_cast<std::size_t>(cut)] < october) ++cut;
    if (cut == 0 || cut == panel.size()) return m;  // degenerate panel, keep everyone

    ensemble::ForecastPanel fit_part;
    fit_part.dates.assign(panel.dates.begin(), panel.dates.begin() + cut);
    fit_part.model_names = panel.model_names;
    fit_part.forecasts = panel.forecasts.topRows(cut);
    fit_part.target = panel.target.head(cut);

    const Eigen::MatrixXd score_x = panel.forecasts.bottomRows(panel.size() - cut);
    const Eigen::VectorXd score_y = panel.target.tail(panel.size() - cut);

    int best_size = 2;
    double best_mae = std::numeric_limits<double>::infinity();
    for (int candidate = 2; candidate <= m - 1; ++candidate) {
        const ensemble::EnsembleWeights w = ensemble::fit_subset_average(fit_part, candidate);
        const double score = mae(score_y, score_x * w.w);
        if (score < best_mae) {
            best_mae = score;
            best_size = candidate;
        }
    }
    return best_size;
}

/// Stacking SVR hyperparameters are tuned by the same 5-fold CV as the base
/// SVR, applied to the validation panel rows.
models::SvrSpec tune_stack_spec(const ensemble::ForecastPanel& panel, std::uint64_t seed) {
    const double y_std =
        std::sqrt((panel.target.array() - panel.target.mean()).square().sum() /
                  static_cast<double>(panel.target.size()));
    const auto grid = models::default_grid(models::ModelKind::Svr,
                                           static_cast<int>(panel.model_count()), y_std);
    const CvPlan plan = CvPlan::contiguous(panel.size());
    const CvOutcome cv =
        grid_search_cv(grid, panel.forecasts, panel.target, {}, plan, seed);
    return std::get<models::SvrSpec>(cv.best);
}

FittedEnsembles fit_ensembles(const ensemble::ForecastPanel& panel, std::uint64_t seed) {
    FittedEnsembles out;
    out.weighted = ensemble::fit_weighted_average(panel).w;
    out.subset_size = tune_subset_size(panel);
    const ensemble::EnsembleWeights subset = ensemble::fit_subset_average(panel, out.subset_size);
    out.subset = subset.w;
    out.stack = ensemble::fit_svr_stack(panel, tune_stack_spec(panel, seed));
    return out;
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

void persist_forecasts(const std::string& out_dir, const BacktestReport& report) {
    const fs::path dir = fs::path(out_dir) / "forecasts";
    fs::create_directories(dir);
    for (const auto& [key, fc] : report.forecasts) {
        for (const auto& [model, values] : fc.by_model) {
            const fs::path file =
                dir / (key.first + "_" + model + "_" + std::to_string(key.second) + ".csv");
            std::ofstream out(file);
            if (!out) throw Error("cannot write " + file.string());
            out << "date,actual_mscm,forecast_mscm\n";
            for (Eigen::Index i = 0; i < values.size(); ++i)
                out << format_date(fc.dates[static_cast<std::size_t>(i)]) << ','
                    << format_double(fc.actual[i]) << ',' << format_double(values[i]) << "\n";
        }
    }
}

}  // namespace

double mae(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
    if (y.size() != yhat.size() || y.size() == 0)
        throw ValidationError("mae: length mismatch (" + std::to_string(y.size()) + " vs " +
                              std::to_string(yhat.size()) + ")");
    return (y - yhat).cwiseAbs().mean();
}

CvPlan CvPlan::contiguous(Eigen::Index n_rows, int folds) {
    if (n_rows < folds)
        throw ValidationError("cannot build " + std::to_string(folds) + " folds from " +
                              std::to_string(n_rows) + " rows");
    CvPlan plan;
    const Eigen::Index base = n_rows / folds;
    const Eigen::Index extra = n_rows % folds;
    Eigen::Index at = 0;
    for (int f = 0; f < folds; ++f) {
        const Eigen::Index count = base + (f < extra ? 1 : 0);
        plan.blocks.emplace_back(at, count);
        at += count;
    }
    return plan;
}

CvOutcome grid_search_cv(const std::vector<models::ForecasterSpec>& grid,
                         const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<bool>& indicator, const CvPlan& plan,
                         std::uint64_t seed_base) {
    if (grid.empty()) throw ValidationError("grid_search_cv: empty grid");

    CvOutcome out;
    out.grid_mae.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = grid.size();

    for (std::size_t g = 0; g < grid.size(); ++g) {
        double total = 0.0;
        bool ok = true;
        for (std::size_t f = 0; f < plan.blocks.size(); ++f) {
            const FoldViews v = fold_views(X, y, plan.blocks[f]);
            try {
                const auto spec =
                    models::with_seed(grid[g], mix_seed(seed_base, static_cast<std::uint64_t>(f) + 1));
                const auto model = models::fit(spec, v.fit_x, v.fit_y, indicator);
                total += mae(v.val_y, model->predict(v.val_x));
            } catch (const Error&) {
                ok = false;  // disqualify this spec
                break;
            }
        }
        if (!ok) continue;
        const double score = total / static_cast<double>(plan.blocks.size());
        out.grid_mae[g] = score;
        if (score < best) {  // strict: ties keep the earliest grid entry
            best = score;
            best_idx = g;
        }
    }
    if (best_idx == grid.size())
        throw Error("grid_search_cv: every grid entry was disqualified");
    out.best = grid[best_idx];
    out.best_mae = best;
    return out;
}

BacktestConfig BacktestConfig::from_json(const nlohmann::json& j) {
    BacktestConfig cfg;
    const auto& paths = j.at("series_paths");
    for (SeriesKind kind : {SeriesKind::Rgd, SeriesKind::Igd, SeriesKind::Tgd}) {
        const std::string name = gasfc::to_string(kind);
        if (!paths.contains(name))
            throw ValidationError("config: series_paths missing '" + name + "'");
        cfg.series_paths[kind] = paths.at(name).get<std::string>();
    }
    cfg.test_years = j.at("test_years").get<std::vector<int>>();
    if (cfg.test_years.empty()) throw ValidationError("config: test_years is empty");

    if (j.contains("models")) {
        for (const auto& name : j.at("models"))
            cfg.model_kinds.push_back(models::model_kind_from_string(name.get<std::string>()));
    } else {
        cfg.model_kinds = {models::ModelKind::Ridge,        models::ModelKind::Lasso,
                           models::ModelKind::ElasticNet,   models::ModelKind::Svr,
                           models::ModelKind::Gp,           models::ModelKind::Knn,
                           models::ModelKind::RandomForest, models::ModelKind::Mlp};
    }
    if (cfg.model_kinds.empty()) throw ValidationError("config: models is empty");

    if (j.contains("grids")) {
        for (const auto& [name, entries] : j.at("grids").items()) {
            models::model_kind_from_string(name);  // validates the key
            std::vector<models::ForecasterSpec> specs;
            for (const auto& sj : entries) specs.push_back(models::spec_from_json(sj));
            if (specs.empty()) throw ValidationError("config: empty grid for '" + name + "'");
            cfg.grid_overrides[name] = std::move(specs);
        }
    }
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.jobs = j.value("jobs", 0);
    return cfg;
}

NationalResult compose_national(const SeriesYearForecasts& rgd, const SeriesYearForecasts& igd,
                                const SeriesYearForecasts& tgd, const std::string& model) {
    if (rgd.dates != igd.dates || rgd.dates != tgd.dates)
        throw ValidationError("compose_national: date misalignment across series");
    NationalResult out;
    out.dates = rgd.dates;
    out.forecast = rgd.by_model.at(model) + igd.by_model.at(model) + tgd.by_model.at(model);
    out.actual = rgd.actual + igd.actual + tgd.actual;
    out.mae_mscm = mae(out.actual, out.forecast);
    return out;
}

BacktestReport run_backtest(const BacktestConfig& config) {
    if (config.series_paths.size() != 3)
        throw ValidationError("run_backtest: all three series paths are required");

    // Load the three series and build each full feature matrix once.
    const std::vector<SeriesKind> kinds = {SeriesKind::Rgd, SeriesKind::Igd, SeriesKind::Tgd};
    std::map<SeriesKind, DailySeries> series;
    std::map<SeriesKind, FeatureMatrix> matrices;
    for (SeriesKind kind : kinds) {
        DailySeries s = load_series_file(config.series_paths.at(kind), kind);
        matrices[kind] = build_matrix(s, DateInterval{s.start_date(), s.end_date()});
        series[kind] = std::move(s);
    }

    const std::size_t n_models = config.model_kinds.size();
    const std::size_t n_years = config.test_years.size();

    // Wave 1: every (series, year, model) base pipeline as its own task.
    struct BaseSlot {
        std::optional<BaseModelOutcome> outcome;
    };
    std::vector<BaseSlot> base_slots(kinds.size() * n_years * n_models);
    auto slot_index = [&](std::size_t s, std::size_t y, std::size_t m) {
        return (s * n_years + y) * n_models + m;
    };

    std::vector<std::function<void()>> tasks;
    for (std::size_t s = 0; s < kinds.size(); ++s) {
        const SeriesKind kind = kinds[s];
        for (std::size_t yi = 0; yi < n_years; ++yi) {
            const int year = config.test_years[yi];
            const SplitPlan plan = make_split(series.at(kind), year);
            for (std::size_t m = 0; m < n_models; ++m) {
                const models::ModelKind model_kind = config.model_kinds[m];
                const std::string model_name = models::to_string(model_kind);
                const auto grid_it = config.grid_overrides.find(model_name);
                const std::vector<models::ForecasterSpec>* override_grid =
                    grid_it == config.grid_overrides.end() ? nullptr : &grid_it->second;
                const std::uint64_t seed =
                    task_seed(config.seed, static_cast<int>(s), year, static_cast<int>(m));
                BaseSlot& slot = base_slots[slot_index(s, yi, m)];
                const FeatureMatrix& full = matrices.at(kind);
                tasks.push_back([&full, plan, model_kind, override_grid, seed, &slot, kind,
                                 year, model_name] {
                    try {
                        slot.outcome = run_base_model(full, plan, model_kind, override_grid, seed);
                    } catch (const std::exception& e) {
                        throw Error(gasfc::to_string(kind) + "/" + std::to_string(year) + "/" +
                                    model_name + ": " + e.what());
                    }
                });
            }
        }
    }
    run_tasks(tasks, config.jobs);

    // Wave 2: ensembles per (series, year) on the validation panels.
    struct EnsembleSlot {
        std::optional<FittedEnsembles> fitted;
    };
    std::vector<EnsembleSlot> ensemble_slots(kinds.size() * n_years);
    std::vector<ensemble::ForecastPanel> panels(kinds.size() * n_years);

    std::vector<std::function<void()>> ensemble_tasks;
    for (std::size_t s = 0; s < kinds.size(); ++s) {
        const SeriesKind kind = kinds[s];
        for (std::size_t yi = 0; yi < n_years; ++yi) {
            const int year = config.test_years[yi];
            const SplitPlan plan = make_split(series.at(kind), year);
            const FeatureMatrix& full = matrices.at(kind);
            const auto [val_begin, val_count] = full.row_range(plan.validation);
            ensemble::ForecastPanel& panel = panels[s * n_years + yi];
            panel.dates.assign(full.dates.begin() + val_begin,
                               full.dates.begin() + val_begin + val_count);
            panel.target = full.target.segment(val_begin, val_count);
            panel.forecasts.resize(val_count, static_cast<Eigen::Index>(n_models));
            for (std::size_t m = 0; m < n_models; ++m) {
                panel.model_names.push_back(models::to_string(config.model_kinds[m]));
                panel.forecasts.col(static_cast<Eigen::Index>(m)) =
                    base_slots[slot_index(s, yi, m)].outcome->validation_forecast;
            }
            const std::uint64_t seed =
                task_seed(config.seed, static_cast<int>(s), year, 1000);
            EnsembleSlot& slot = ensemble_slots[s * n_years + yi];
            ensemble_tasks.push_back([&panel, seed, &slot, kind, year] {
                try {
                    slot.fitted = fit_ensembles(panel, seed);
                } catch (const std::exception& e) {
                    throw Error(gasfc::to_string(kind) + "/" + std::to_string(year) +
                                "/ensembles: " + e.what());
                }
            });
        }
    }
    run_tasks(ensemble_tasks, config.jobs);

    // Single-threaded reduction into the report.
    BacktestReport report;
    for (std::size_t s = 0; s < kinds.size(); ++s) {
        const SeriesKind kind = kinds[s];
        const std::string series_name = gasfc::to_string(kind);
        const FeatureMatrix& full = matrices.at(kind);
        for (std::size_t yi = 0; yi < n_years; ++yi) {
            const int year = config.test_years[yi];
            const SplitPlan plan = make_split(series.at(kind), year);
            const auto [test_begin, test_count] = full.row_range(plan.test);

            SeriesYearForecasts fc;
            fc.dates.assign(full.dates.begin() + test_begin,
                            full.dates.begin() + test_begin + test_count);
            fc.actual = full.target.segment(test_begin, test_count);

            Eigen::MatrixXd test_panel(test_count, static_cast<Eigen::Index>(n_models));
            for (std::size_t m = 0; m < n_models; ++m) {
                const auto& outcome = *base_slots[slot_index(s, yi, m)].outcome;
                test_panel.col(static_cast<Eigen::Index>(m)) = outcome.test_forecast;
                fc.by_model[models::to_string(config.model_kinds[m])] = outcome.test_forecast;
            }

            const FittedEnsembles& ens = *ensemble_slots[s * n_years + yi].fitted;
            fc.by_model["simple_average"] =
                test_panel * Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_models),
                                                       1.0 / static_cast<double>(n_models));
            fc.by_model["subset_average"] = test_panel * ens.subset;
            fc.by_model["weighted_average"] = test_panel * ens.weighted;
            fc.by_model["svr_stack"] = ens.stack->predict(test_panel);

            for (std::size_t m = 0; m < n_models; ++m) {
                const std::string name = models::to_string(config.model_kinds[m]);
                report.rows.push_back(
                    ReportRow{series_name, name, year, mae(fc.actual, fc.by_model.at(name))});
            }
            for (const char* name : kEnsembleNames)
                report.rows.push_back(
                    ReportRow{series_name, name, year, mae(fc.actual, fc.by_model.at(name))});

            report.forecasts[{series_name, year}] = std::move(fc);
        }
    }

    // National composition: sum of the three components, per model and year.
    std::vector<std::string> all_model_names;
    for (std::size_t m = 0; m < n_models; ++m)
        all_model_names.push_back(models::to_string(config.model_kinds[m]));
    for (const char* name : kEnsembleNames) all_model_names.push_back(name);

    for (const int year : config.test_years) {
        const auto& rgd = report.forecasts.at({"RGD", year});
        const auto& igd = report.forecasts.at({"IGD", year});
        const auto& tgd = report.forecasts.at({"TGD", year});
        SeriesYearForecasts national;
        national.dates = rgd.dates;
        national.actual = rgd.actual + igd.actual + tgd.actual;
        for (const std::string& model : all_model_names) {
            const NationalResult nat = compose_national(rgd, igd, tgd, model);
            national.by_model[model] = nat.forecast;
            report.rows.push_back(ReportRow{"GD", model, year, nat.mae_mscm});
        }
        report.forecasts[{"GD", year}] = std::move(national);
    }

    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        std::ofstream out(fs::path(config.out_dir) / "report.csv");
        if (!out) throw Error("cannot write report.csv under " + config.out_dir);
        out << report.to_csv();
        persist_forecasts(config.out_dir, report);
    }
    return report;
}

std::string BacktestReport::to_csv() const {
    std::ostringstream out;
    out << "series,model,test_year,mae_mscm\n";
    for (const auto& row : rows)
        out << row.series << ',' << row.model << ',' << row.test_year << ','
            << format_double(row.mae_mscm) << "\n";
    return out.str();
}

const ReportRow& BacktestReport::row(const std::string& series, const std::string& model,
                                     int year) const {
    for (const auto& r : rows)
        if (r.series == series && r.model == model && r.test_year == year) return r;
    throw ValidationError("report has no row " + series + "/" + model + "/" +
                          std::to_string(year));
}

}  // namespace gasfc::backtest
