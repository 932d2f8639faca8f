#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gasfc/calendar.hpp"

namespace gasfc {

enum class SeriesKind { Rgd, Igd, Tgd };

std::string to_string(SeriesKind k);
SeriesKind series_kind_from_string(const std::string& s);

struct DailyRecord {
    CivilDate date;
    double temperature_c = 0.0;  // forecasted mean Northern-Italy temperature
    double demand_mscm = 0.0;    // Millions of Standard Cubic Meters
};

/// Date-ordered, gap-free daily series. Immutable after load_series.
struct DailySeries {
    SeriesKind kind = SeriesKind::Rgd;
    std::vector<DailyRecord> records;

    const CivilDate& start_date() const { return records.front().date; }
    const CivilDate& end_date() const { return records.back().date; }
    bool covers(const CivilDate& d) const {
        return !records.empty() && start_date() <= d && d <= end_date();
    }
    /// O(1) lookup; throws if d is outside coverage.
    const DailyRecord& at(const CivilDate& d) const;
};

struct DateInterval {
    CivilDate first;
    CivilDate last;  // inclusive

    bool contains(const CivilDate& d) const { return first <= d && d <= last; }
    long length_days() const { return days_between(first, last) + 1; }
};

/// Chronological train < validation < test split. Validation is the calendar
/// year before the test year; train is everything earlier.
struct SplitPlan {
    int test_year = 0;
    DateInterval train;
    DateInterval validation;
    DateInterval test;
};

/// Parses and validates the CSV (header `date,temperature_c,demand_mscm`).
/// Rows are sorted by date; duplicates, coverage gaps, non-finite values,
/// negative demand and out-of-range temperatures are errors.
DailySeries load_series(std::istream& in, SeriesKind kind);
DailySeries load_series_file(const std::string& path, SeriesKind kind);

/// Writes the same CSV schema load_series reads.
void save_series(const DailySeries& s, std::ostream& out);
void save_series_file(const DailySeries& s, const std::string& path);

SplitPlan make_split(const DailySeries& series, int test_year);

/// Contiguous train + validation interval, used to refit base models that
/// are compared against ensembles.
DateInterval merge_train_validation(const SplitPlan& plan);

}  // namespace gasfc
