#include "gasfc/features.hpp"

#include <algorithm>
#include <ostream>

#include "gasfc/errors.hpp"
#include "gasfc/util.hpp"

namespace gasfc {

namespace {

constexpr int kNumColumns = 21;

std::vector<std::string> column_names_for(SeriesKind kind) {
    const std::string wdd = kind == SeriesKind::Tgd ? "hcdd" : "hdd";
    std::vector<std::string> names = {
        "demand_lag1", "demand_lag7", "demand_simday", "demand_simday_prev",
        "temp",        "temp_lag1",   "temp_lag7",     "temp_simday",
        wdd,           wdd + "_lag1", wdd + "_lag7",   wdd + "_simday",
    };
    for (const char* w : {"tue", "wed", "thu", "fri", "sat", "sun"})
        names.push_back(std::string("wd_") + w);
    names.insert(names.end(), {"is_holiday", "is_day_after_holiday", "is_bridge"});
    return names;
}

const DailyRecord& lookup(const DailySeries& series, const CivilDate& d, const CivilDate& row_date,
                          const char* role) {
    if (!series.covers(d))
        throw ValidationError("missing history: row " + format_date(row_date) + " needs " +
                              std::string(role) + " = " + format_date(d));
    return series.at(d);
}

void fill_row(const DailySeries& series, const CivilDate& t, Eigen::MatrixXd& values,
              Eigen::Index r) {
    auto row = values.row(r);
    const bool use_hcdd = series.kind == SeriesKind::Tgd;
    const auto wdd = [use_hcdd](double temp) { return use_hcdd ? hcdd(temp) : hdd(temp); };

    const CivilDate sim_t = similar_day(t);
    const CivilDate sim_prev = similar_day(add_days(t, -1));

    const DailyRecord& at_t = lookup(series, t, t, "t");
    const DailyRecord& at_lag1 = lookup(series, add_days(t, -1), t, "t-1");
    const DailyRecord& at_lag7 = lookup(series, add_days(t, -7), t, "t-7");
    const DailyRecord& at_sim = lookup(series, sim_t, t, "sim(t)");
    const DailyRecord& at_sim_prev = lookup(series, sim_prev, t, "sim(t-1)");

    row[0] = at_lag1.demand_mscm;
    row[1] = at_lag7.demand_mscm;
    row[2] = at_sim.demand_mscm;
    row[3] = at_sim_prev.demand_mscm;
    row[4] = at_t.temperature_c;
    row[5] = at_lag1.temperature_c;
    row[6] = at_lag7.temperature_c;
    row[7] = at_sim.temperature_c;
    row[8] = wdd(at_t.temperature_c);
    row[9] = wdd(at_lag1.temperature_c);
    row[10] = wdd(at_lag7.temperature_c);
    row[11] = wdd(at_sim.temperature_c);

    const DayClass cls = classify_day(t);
    const Weekday wd = weekday(t);
    for (int i = 0; i < 6; ++i) row[12 + i] = 0.0;
    if (wd != Weekday::Monday) row[12 + static_cast<int>(wd) - 1] = 1.0;
    row[18] = cls == DayClass::Holiday ? 1.0 : 0.0;
    row[19] = cls == DayClass::DayAfterHoliday ? 1.0 : 0.0;
    row[20] = cls == DayClass::Bridge ? 1.0 : 0.0;
}

FeatureMatrix make_empty(SeriesKind kind, Eigen::Index n) {
    FeatureMatrix m;
    m.column_names = column_names_for(kind);
    m.indicator.assign(kNumColumns, false);
    for (int i = 12; i < kNumColumns; ++i) m.indicator[i] = true;
    m.values.resize(n, kNumColumns);
    m.target.resize(n);
    m.dates.reserve(static_cast<std::size_t>(n));
    return m;
}

}  // namespace

std::pair<Eigen::Index, Eigen::Index> FeatureMatrix::row_range(const DateInterval& interval) const {
    const auto lo = std::lower_bound(dates.begin(), dates.end(), interval.first);
    const auto hi = std::upper_bound(dates.begin(), dates.end(), interval.last);
    return {lo - dates.begin(), hi - lo};
}

FeatureMatrix FeatureMatrix::slice(Eigen::Index begin, Eigen::Index count) const {
    FeatureMatrix out;
    out.column_names = column_names;
    out.indicator = indicator;
    out.dates.assign(dates.begin() + begin, dates.begin() + begin + count);
    out.values = values.middleRows(begin, count);
    out.target = target.segment(begin, count);
    return out;
}

FeatureMatrix build_matrix(const DailySeries& series, const DateInterval& range) {
    const CivilDate earliest = add_days(series.start_date(), kHistoryDays);
    CivilDate first = std::max(range.first, earliest);
    const CivilDate last = std::min(range.last, series.end_date());

    Eigen::Index n = 0;
    if (first <= last) n = days_between(first, last) + 1;
    FeatureMatrix m = make_empty(series.kind, n);

    Eigen::Index r = 0;
    for (CivilDate t = first; n > 0 && t <= last; t = add_days(t, 1), ++r) {
        fill_row(series, t, m.values, r);
        m.target[r] = series.at(t).demand_mscm;
        m.dates.push_back(t);
    }
    if (!m.values.allFinite())
        throw ValidationError("feature matrix contains non-finite entries");
    return m;
}

FeatureMatrix build_row(const DailySeries& series, const CivilDate& date) {
    if (!series.covers(date))
        throw ValidationError("date " + format_date(date) + " outside series coverage");
    FeatureMatrix m = make_empty(series.kind, 1);
    fill_row(series, date, m.values, 0);
    m.target[0] = series.at(date).demand_mscm;
    m.dates.push_back(date);
    return m;
}

void write_matrix_csv(const FeatureMatrix& m, std::ostream& out) {
    out << "date";
    for (const auto& name : m.column_names) out << ',' << name;
    out << ",target\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << format_date(m.dates[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_double(m.values(r, c));
        out << ',' << format_double(m.target[r]) << "\n";
    }
}

}  // namespace gasfc
