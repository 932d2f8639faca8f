#pragma once

#include <compare>
#include <string>

namespace gasfc {

/// Proleptic Gregorian calendar date.
struct CivilDate {
    int year = 0;
    int month = 1;  // 1-12
    int day = 1;    // 1-31

    auto operator<=>(const CivilDate&) const = default;
};

enum class Weekday { Monday = 0, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday };

/// Mutually exclusive day classes. Holiday wins over everything, Weekend
/// covers non-holiday Saturdays/Sundays, Bridge and DayAfterHoliday only
/// apply to working weekdays.
enum class DayClass { Ordinary, Holiday, Bridge, DayAfterHoliday, Weekend };

bool is_valid(const CivilDate& d);
Weekday weekday(const CivilDate& d);
int yearday(const CivilDate& d);    // Jan 1 -> 1
int days_in_year(int year);
bool is_leap(int year);

CivilDate add_days(const CivilDate& d, int n);
long day_number(const CivilDate& d);  // days since 1970-01-01
inline long days_between(const CivilDate& a, const CivilDate& b) {
    return day_number(b) - day_number(a);
}

CivilDate parse_date(const std::string& iso);  // YYYY-MM-DD
std::string format_date(const CivilDate& d);

/// Gregorian Easter Sunday (anonymous computus). Supported for 1583-4099.
CivilDate easter_date(int year);

/// Italian national holidays: Jan 1, Jan 6, Apr 25, May 1, Jun 2, Aug 15,
/// Nov 1, Dec 8, Dec 25, Dec 26, Easter Sunday and Easter Monday.
bool is_holiday(const CivilDate& d);

/// Working day = not Saturday, not Sunday, not a holiday.
bool is_working_day(const CivilDate& d);

DayClass classify_day(const CivilDate& d);

/// Similar day of t in the previous year.
///
/// Holidays map to the same holiday one year earlier: Easter and Easter
/// Monday by name, fixed holidays by month/day. When a date is both (Easter
/// Monday can fall on Apr 25), the movable name wins.
///
/// Non-holidays map to the non-holiday date of the previous year with the
/// same weekday and the smallest |yearday| distance; equidistant candidates
/// resolve to the earlier date.
CivilDate similar_day(const CivilDate& t);

std::string to_string(DayClass c);
std::string to_string(Weekday w);

}  // namespace gasfc
