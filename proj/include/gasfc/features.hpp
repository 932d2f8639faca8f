#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "gasfc/dataset.hpp"

namespace gasfc {

/// Heating degree days: max(18 - T, 0).
inline double hdd(double temperature_c) {
    return temperature_c < 18.0 ? 18.0 - temperature_c : 0.0;
}

/// Heating-and-cooling degree days: |16 - T|. Captures the summer
/// air-conditioning pull on thermoelectric demand as well as heating.
inline double hcdd(double temperature_c) {
    return temperature_c < 16.0 ? 16.0 - temperature_c : temperature_c - 16.0;
}

/// Design matrix for one series kind. Row t holds demand lags (t-1, t-7,
/// sim(t), sim(t-1)), temperatures and degree-days at t, t-1, t-7, sim(t),
/// a 6-dummy weekday encoding (Monday is the reference level) and the
/// holiday / day-after-holiday / bridge indicators; the target is demand(t).
struct FeatureMatrix {
    std::vector<CivilDate> dates;
    std::vector<std::string> column_names;
    std::vector<bool> indicator;  // per column: dummy (left unscaled by models)
    Eigen::MatrixXd values;       // n x p
    Eigen::VectorXd target;       // n

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    /// Contiguous row block covering [interval.first, interval.last].
    /// Dates outside the matrix shrink the block; may be empty.
    std::pair<Eigen::Index, Eigen::Index> row_range(const DateInterval& interval) const;
    FeatureMatrix slice(Eigen::Index begin, Eigen::Index count) const;
};

/// Rows need sim(t-1), which can reach a full year plus alignment back into
/// the history, so the first kHistoryDays of a series never produce rows.
inline constexpr int kHistoryDays = 371;

/// Builds rows for every date of `range` that is covered by the series and
/// at least kHistoryDays after its start. Missing lag lookups are errors.
FeatureMatrix build_matrix(const DailySeries& series, const DateInterval& range);

/// Single row for one date (day-ahead prediction path). Also returns the
/// column metadata; throws if any lag falls outside the series.
FeatureMatrix build_row(const DailySeries& series, const CivilDate& date);

/// Debug/diffing dump: `date,<columns...>,target` CSV.
void write_matrix_csv(const FeatureMatrix& m, std::ostream& out);

}  // namespace gasfc
