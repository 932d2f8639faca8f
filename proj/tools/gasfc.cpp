#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include "gasfc/backtest.hpp"
#include "gasfc/errors.hpp"
#include "gasfc/features.hpp"
#include "gasfc/synthgen.hpp"
#include "gasfc/util.hpp"
#include "gasfc/version.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gasfc::ValidationError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw gasfc::ValidationError(path + ": " + e.what());
    }
    return j;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmd_synth(const std::string& spec_path, const std::string& preset, const std::string& out,
              const std::string& from, const std::string& to) {
    gasfc::synth::SynthSpec spec;
    try {
        if (!preset.empty())
            spec = gasfc::synth::SynthSpec::defaults_for(gasfc::series_kind_from_string(preset));
        else
            spec = gasfc::synth::SynthSpec::from_json(read_json_file(spec_path));
    } catch (const gasfc::ValidationError& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        const gasfc::DateInterval range{gasfc::parse_date(from), gasfc::parse_date(to)};
        gasfc::save_series_file(gasfc::synth::generate(spec, range), out);
    } catch (const std::exception& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// backtest
// ---------------------------------------------------------------------------

void print_mae_tables(const gasfc::backtest::BacktestReport& report,
                      const std::vector<int>& years) {
    // One table per series: rows = models, columns = test years + average.
    std::map<std::string, std::vector<std::string>> models_by_series;
    for (const auto& row : report.rows) {
        auto& names = models_by_series[row.series];
        if (std::find(names.begin(), names.end(), row.model) == names.end())
            names.push_back(row.model);
    }
    for (const char* series : {"RGD", "IGD", "TGD", "GD"}) {
        if (!models_by_series.count(series)) continue;
        std::cout << "\n== " << series << " (MAE, MSCM) ==\n";
        std::cout << std::left << std::setw(18) << "model";
        for (int y : years) std::cout << std::right << std::setw(10) << y;
        std::cout << std::right << std::setw(10) << "average" << "\n";
        for (const auto& model : models_by_series[series]) {
            std::cout << std::left << std::setw(18) << model;
            double total = 0.0;
            for (int y : years) {
                const double v = report.row(series, model, y).mae_mscm;
                total += v;
                std::cout << std::right << std::setw(10) << std::fixed << std::setprecision(3)
                          << v;
            }
            std::cout << std::right << std::setw(10) << std::fixed << std::setprecision(3)
                      << total / static_cast<double>(years.size()) << "\n";
        }
    }
}

int cmd_backtest(const std::string& config_path, const std::string& out_dir, int jobs,
                 std::int64_t seed_override, bool has_seed) {
    gasfc::backtest::BacktestConfig config;
    try {
        config = gasfc::backtest::BacktestConfig::from_json(read_json_file(config_path));
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (jobs > 0) config.jobs = jobs;
        if (has_seed) config.seed = static_cast<std::uint64_t>(seed_override);
    } catch (const gasfc::ValidationError& e) {
        std::cerr << "backtest: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        const gasfc::backtest::BacktestReport report = gasfc::backtest::run_backtest(config);
        print_mae_tables(report, config.test_years);
        if (!config.out_dir.empty())
            std::cout << "\nreport written to " << (fs::path(config.out_dir) / "report.csv")
                      << "\n";
    } catch (const std::exception& e) {
        std::cerr << "backtest: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// forecast
// ---------------------------------------------------------------------------

/// Day-ahead forecast for one date: per series, tune the first configured
/// model by 5-fold CV on all feature rows before the date, fit, and predict.
/// With --models-dir, fitted models are stored as JSON blobs and reloaded on
/// later invocations instead of refitted.
int cmd_forecast(const std::string& config_path, const std::string& date_str,
                 const std::string& models_dir, int jobs) {
    (void)jobs;
    gasfc::backtest::BacktestConfig config;
    gasfc::CivilDate date;
    try {
        config = gasfc::backtest::BacktestConfig::from_json(read_json_file(config_path));
        date = gasfc::parse_date(date_str);
    } catch (const gasfc::ValidationError& e) {
        std::cerr << "forecast: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const gasfc::models::ModelKind kind = config.model_kinds.front();
        double national = 0.0;
        std::vector<std::pair<std::string, double>> outputs;
        for (gasfc::SeriesKind series_kind :
             {gasfc::SeriesKind::Rgd, gasfc::SeriesKind::Igd, gasfc::SeriesKind::Tgd}) {
            const std::string series_name = gasfc::to_string(series_kind);
            const gasfc::DailySeries series =
                gasfc::load_series_file(config.series_paths.at(series_kind), series_kind);
            const gasfc::FeatureMatrix row = gasfc::build_row(series, date);

            gasfc::models::TrainedPtr model;
            const fs::path blob_path =
                models_dir.empty()
                    ? fs::path{}
                    : fs::path(models_dir) / (series_name + "_" +
                                              gasfc::models::to_string(kind) + ".json");
            if (!models_dir.empty() && fs::exists(blob_path)) {
                model = gasfc::models::load_model(read_json_file(blob_path.string()));
            } else {
                const gasfc::FeatureMatrix history = gasfc::build_matrix(
                    series,
                    gasfc::DateInterval{series.start_date(), gasfc::add_days(date, -1)});
                if (history.rows() < 10)
                    throw gasfc::ValidationError(series_name +
                                                 ": not enough history before " + date_str);
                const double y_std = std::sqrt(
                    (history.target.array() - history.target.mean()).square().sum() /
                    static_cast<double>(history.target.size()));
                const auto grid = gasfc::models::default_grid(
                    kind, static_cast<int>(history.cols()), y_std);
                const auto plan = gasfc::backtest::CvPlan::contiguous(history.rows());
                const auto cv = gasfc::backtest::grid_search_cv(
                    grid, history.values, history.target, history.indicator, plan, config.seed);
                model = gasfc::models::fit(gasfc::models::with_seed(cv.best, config.seed),
                                           history.values, history.target, history.indicator);
                if (!models_dir.empty()) {
                    fs::create_directories(models_dir);
                    std::ofstream out(blob_path);
                    out << model->to_json().dump();
                }
            }
            const double value = model->predict(row.values)[0];
            outputs.emplace_back(series_name, value);
            national += value;
        }
        for (const auto& [name, value] : outputs)
            std::cout << name << " " << gasfc::format_double(value) << "\n";
        std::cout << "GD " << gasfc::format_double(national) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "forecast: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

int cmd_features(const std::string& series_path, const std::string& kind_name,
                 const std::string& out, const std::string& from, const std::string& to) {
    try {
        const gasfc::SeriesKind kind = gasfc::series_kind_from_string(kind_name);
        const gasfc::DailySeries series = gasfc::load_series_file(series_path, kind);
        gasfc::DateInterval range{series.start_date(), series.end_date()};
        if (!from.empty()) range.first = gasfc::parse_date(from);
        if (!to.empty()) range.last = gasfc::parse_date(to);
        const gasfc::FeatureMatrix matrix = gasfc::build_matrix(series, range);
        std::ofstream file(out);
        if (!file) throw gasfc::Error("cannot write '" + out + "'");
        gasfc::write_matrix_csv(matrix, file);
    } catch (const std::exception& e) {
        std::cerr << "features: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Day-ahead gas demand forecasting toolkit"};
    app.require_subcommand(0, 1);

    bool show_version = false;
    app.add_flag("--version", show_version, "print toolkit and report format versions");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic demand series CSV");
    std::string synth_spec, synth_preset, synth_out;
    std::string synth_from = "2007-01-01", synth_to = "2018-12-31";
    synth->add_option("--spec", synth_spec, "generator spec JSON file");
    synth->add_option("--preset", synth_preset, "built-in spec: RGD, IGD or TGD");
    synth->add_option("--out", synth_out, "output CSV path")->required();
    synth->add_option("--from", synth_from, "first date (YYYY-MM-DD)");
    synth->add_option("--to", synth_to, "last date (YYYY-MM-DD)");

    // backtest
    auto* backtest = app.add_subcommand("backtest", "run the rolling yearly backtest");
    std::string bt_config, bt_out;
    int bt_jobs = 0;
    std::int64_t bt_seed = 0;
    backtest->add_option("--config", bt_config, "run config JSON")->required();
    backtest->add_option("--out", bt_out, "output directory for report and forecasts");
    backtest->add_option("--jobs", bt_jobs, "worker threads (default: hardware)");
    auto* bt_seed_opt = backtest->add_option("--seed", bt_seed, "override config seed");

    // forecast
    auto* forecast = app.add_subcommand("forecast", "day-ahead forecast for one date");
    std::string fc_config, fc_date, fc_models_dir;
    int fc_jobs = 0;
    forecast->add_option("--config", fc_config, "run config JSON")->required();
    forecast->add_option("--date", fc_date, "target date (YYYY-MM-DD)")->required();
    forecast->add_option("--models-dir", fc_models_dir, "serialized model cache directory");
    forecast->add_option("--jobs", fc_jobs, "worker threads");

    // features
    auto* features = app.add_subcommand("features", "dump the design matrix as CSV");
    std::string ft_series, ft_kind, ft_out, ft_from, ft_to;
    features->add_option("--series", ft_series, "series CSV path")->required();
    features->add_option("--kind", ft_kind, "RGD, IGD or TGD")->required();
    features->add_option("--out", ft_out, "output CSV path")->required();
    features->add_option("--from", ft_from, "first date");
    features->add_option("--to", ft_to, "last date");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (show_version) {
        std::cout << "gasfc " << gasfc::kToolkitVersion << " (report format v"
                  << gasfc::kReportFormatVersion << ", model format v"
                  << gasfc::kModelFormatVersion << ")\n";
        return kExitOk;
    }

    if (synth->parsed()) {
        if (synth_spec.empty() == synth_preset.empty()) {
            std::cerr << "synth: exactly one of --spec or --preset is required\n";
            return kExitUsage;
        }
        return cmd_synth(synth_spec, synth_preset, synth_out, synth_from, synth_to);
    }
    if (backtest->parsed())
        return cmd_backtest(bt_config, bt_out, bt_jobs, bt_seed, bt_seed_opt->count() > 0);
    if (forecast->parsed()) return cmd_forecast(fc_config, fc_date, fc_models_dir, fc_jobs);
    if (features->parsed()) return cmd_features(ft_series, ft_kind, ft_out, ft_from, ft_to);

    std::cout << app.help();
    return kExitOk;
}
