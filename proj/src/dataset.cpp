#include "gasfc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gasfc/errors.hpp"
#include "gasfc/util.hpp"

namespace gasfc {

namespace {

constexpr const char* kHeader = "date,temperature_c,demand_mscm";
constexpr double kTempMin = -30.0;
constexpr double kTempMax = 50.0;

double parse_number(const std::string& field, int line_no, const char* what) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [p, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || p != end)
        throw ValidationError("line " + std::to_string(line_no) + ": bad " + what + " '" +
                              field + "'");
    return v;
}

}  // namespace

std::string to_string(SeriesKind k) {
    switch (k) {
        case SeriesKind::Rgd: return "RGD";
        case SeriesKind::Igd: return "IGD";
        case SeriesKind::Tgd: return "TGD";
    }
    return "?";
}

SeriesKind series_kind_from_string(const std::string& s) {
    if (s == "RGD") return SeriesKind::Rgd;
    if (s == "IGD") return SeriesKind::Igd;
    if (s == "TGD") return SeriesKind::Tgd;
    throw ValidationError("unknown series kind '" + s + "' (expected RGD, IGD or TGD)");
}

const DailyRecord& DailySeries::at(const CivilDate& d) const {
    if (!covers(d))
        throw ValidationError(to_string(kind) + " series does not cover " + format_date(d));
    const auto idx = days_between(start_date(), d);
    return records[static_cast<std::size_t>(idx)];
}

DailySeries load_series(std::istream& in, SeriesKind kind) {
    DailySeries series;
    series.kind = kind;

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ValidationError("empty input, expected CSV header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw ValidationError("bad header '" + line + "', expected '" + kHeader + "'");

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string date_s, temp_s, demand_s, extra;
        if (!std::getline(row, date_s, ',') || !std::getline(row, temp_s, ',') ||
            !std::getline(row, demand_s, ',') || std::getline(row, extra, ','))
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": expected 3 comma-separated fields");
        DailyRecord rec;
        try {
            rec.date = parse_date(date_s);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        rec.temperature_c = parse_number(temp_s, line_no, "temperature");
        rec.demand_mscm = parse_number(demand_s, line_no, "demand");

        if (!std::isfinite(rec.temperature_c) || !std::isfinite(rec.demand_mscm))
            throw ValidationError("line " + std::to_string(line_no) + ": non-finite value");
        if (rec.temperature_c < kTempMin || rec.temperature_c > kTempMax)
            throw ValidationError("line " + std::to_string(line_no) + ": temperature " +
                                  format_double(rec.temperature_c) + " outside [-30, 50]");
        if (rec.demand_mscm < 0.0)
            throw ValidationError("line " + std::to_string(line_no) + ": negative demand");
        series.records.push_back(rec);
    }
    if (series.records.empty()) throw ValidationError("no data rows");

    std::sort(series.records.begin(), series.records.end(),
              [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });

    for (std::size_t i = 1; i < series.records.size(); ++i) {
        const auto& prev = series.records[i - 1].date;
        const auto& cur = series.records[i].date;
        const long gap = days_between(prev, cur);
        if (gap == 0)
            throw ValidationError("duplicate date " + format_date(cur));
        if (gap > 1)
            throw ValidationError("gap in coverage between " + format_date(prev) + " and " +
                                  format_date(cur));
    }
    return series;
}

DailySeries load_series_file(const std::string& path, SeriesKind kind) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return load_series(in, kind);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void save_series(const DailySeries& s, std::ostream& out) {
    out << kHeader << "\n";
    for (const auto& rec : s.records)
        out << format_date(rec.date) << ',' << format_double(rec.temperature_c) << ','
            << format_double(rec.demand_mscm) << "\n";
}

void save_series_file(const DailySeries& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    save_series(s, out);
}

SplitPlan make_split(const DailySeries& series, int test_year) {
    const CivilDate test_first{test_year, 1, 1};
    const CivilDate test_last{test_year, 12, 31};
    const CivilDate val_first{test_year - 1, 1, 1};
    const CivilDate val_last{test_year - 1, 12, 31};

    if (series.end_date() < test_last)
        throw ValidationError(to_string(series.kind) + ": series ends " +
                              format_date(series.end_date()) + ", cannot test year " +
                              std::to_string(test_year));
    if (!(series.start_date() < val_first))
        throw ValidationError(to_string(series.kind) + ": train range would be empty for test year " +
                              std::to_string(test_year) + " (series starts " +
                              format_date(series.start_date()) + ")");

    SplitPlan plan;
    plan.test_year = test_year;
    plan.train = DateInterval{series.start_date(), add_days(val_first, -1)};
    plan.validation = DateInterval{val_first, val_last};
    plan.test = DateInterval{test_first, test_last};
    return plan;
}

DateInterval merge_train_validation(const SplitPlan& plan) {
    return DateInterval{plan.train.first, plan.validation.last};
}

}  // namespace gasfc
