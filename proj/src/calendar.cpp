#include "gasfc/calendar.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <limits>

#include "gasfc/errors.hpp"

namespace gasfc {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(const CivilDate& d) {
    return chr::year_month_day{chr::year{d.year}, chr::month{static_cast<unsigned>(d.month)},
                               chr::day{static_cast<unsigned>(d.day)}};
}

CivilDate from_days(chr::sys_days sd) {
    const chr::year_month_day ymd{sd};
    return CivilDate{int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
}

// Fixed-date Italian holidays as (month, day).
constexpr std::array<std::pair<int, int>, 10> kFixedHolidays = {{
    {1, 1},    // New Year
    {1, 6},    // Epiphany
    {4, 25},   // Liberation Day
    {5, 1},    // Labour Day
    {6, 2},    // Republic Day
    {8, 15},   // Assumption
    {11, 1},   // All Saints
    {12, 8},   // Immaculate Conception
    {12, 25},  // Christmas
    {12, 26},  // St. Stephen
}};

bool is_fixed_holiday(const CivilDate& d) {
    for (const auto& [m, day] : kFixedHolidays)
        if (d.month == m && d.day == day) return true;
    return false;
}

}  // namespace

bool is_valid(const CivilDate& d) {
    return to_ymd(d).ok();
}

Weekday weekday(const CivilDate& d) {
    const chr::weekday wd{chr::sys_days{to_ymd(d)}};
    // iso_encoding: Monday = 1 .. Sunday = 7
    return static_cast<Weekday>(wd.iso_encoding() - 1);
}

bool is_leap(int year) {
    return chr::year{year}.is_leap();
}

int days_in_year(int year) {
    return is_leap(year) ? 366 : 365;
}

int yearday(const CivilDate& d) {
    const auto jan1 = chr::sys_days{chr::year{d.year} / 1 / 1};
    return static_cast<int>((chr::sys_days{to_ymd(d)} - jan1).count()) + 1;
}

CivilDate add_days(const CivilDate& d, int n) {
    return from_days(chr::sys_days{to_ymd(d)} + chr::days{n});
}

long day_number(const CivilDate& d) {
    return chr::sys_days{to_ymd(d)}.time_since_epoch().count();
}

CivilDate parse_date(const std::string& iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw ValidationError("bad date '" + iso + "': expected YYYY-MM-DD");
    CivilDate d;
    auto num = [&](int from, int to, int& out) {
        auto [p, ec] = std::from_chars(iso.data() + from, iso.data() + to, out);
        if (ec != std::errc{} || p != iso.data() + to)
            throw ValidationError("bad date '" + iso + "': expected YYYY-MM-DD");
    };
    num(0, 4, d.year);
    num(5, 7, d.month);
    num(8, 10, d.day);
    if (!is_valid(d)) throw ValidationError("bad date '" + iso + "': not a calendar date");
    return d;
}

std::string format_date(const CivilDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

CivilDate easter_date(int year) {
    if (year < 1583 || year > 4099)
        throw ValidationError("easter_date: year " + std::to_string(year) +
                              " outside supported range 1583-4099");
    // Anonymous Gregorian computus.
    const int a = year % 19;
    const int b = year / 100;
    const int c = year % 100;
    const int d = b / 4;
    const int e = b % 4;
    const int f = (b + 8) / 25;
    const int g = (b - f + 1) / 3;
    const int h = (19 * a + b - d - g + 15) % 30;
    const int i = c / 4;
    const int k = c % 4;
    const int l = (32 + 2 * e + 2 * i - h - k) % 7;
    const int m = (a + 11 * h + 22 * l) / 451;
    const int month = (h + l - 7 * m + 114) / 31;
    const int day = ((h + l - 7 * m + 114) % 31) + 1;
    return CivilDate{year, month, day};
}

bool is_holiday(const CivilDate& d) {
    if (is_fixed_holiday(d)) return true;
    const CivilDate easter = easter_date(d.year);
    return d == easter || d == add_days(easter, 1);
}

bool is_working_day(const CivilDate& d) {
    const Weekday wd = weekday(d);
    if (wd == Weekday::Saturday || wd == Weekday::Sunday) return false;
    return !is_holiday(d);
}

DayClass classify_day(const CivilDate& d) {
    if (is_holiday(d)) return DayClass::Holiday;
    const Weekday wd = weekday(d);
    if (wd == Weekday::Saturday || wd == Weekday::Sunday) return DayClass::Weekend;
    const CivilDate prev = add_days(d, -1);
    const CivilDate next = add_days(d, 1);
    if (!is_working_day(prev) && !is_working_day(next)) return DayClass::Bridge;
    if (is_holiday(prev)) return DayClass::DayAfterHoliday;
    return DayClass::Ordinary;
}

CivilDate similar_day(const CivilDate& t) {
    const int prev_year = t.year - 1;
    if (is_holiday(t)) {
        // Movable holidays first: Easter Monday on Apr 25 (e.g. 2011) keeps
        // its movable identity.
        const CivilDate easter = easter_date(t.year);
        if (t == easter) return easter_date(prev_year);
        if (t == add_days(easter, 1)) return add_days(easter_date(prev_year), 1);
        return CivilDate{prev_year, t.month, t.day};
    }

    const Weekday wd = weekday(t);
    const int target = yearday(t);
    CivilDate best{};
    long best_dist = std::numeric_limits<long>::max();
    // Scan the previous year; earlier candidate wins ties because the scan
    // runs forward and the comparison is strict.
    for (CivilDate cand{prev_year, 1, 1}; cand.year == prev_year; cand = add_days(cand, 1)) {
        if (weekday(cand) != wd || is_holiday(cand)) continue;
        const long dist = std::abs(long(yearday(cand)) - long(target));
        if (dist < best_dist) {
            best_dist = dist;
            best = cand;
        }
    }
    if (best_dist == std::numeric_limits<long>::max())
        throw ValidationError("similar_day: no candidate in year " + std::to_string(prev_year));
    return best;
}

std::string to_string(DayClass c) {
    switch (c) {
        case DayClass::Ordinary: return "ordinary";
        case DayClass::Holiday: return "holiday";
        case DayClass::Bridge: return "bridge";
        case DayClass::DayAfterHoliday: return "day_after_holiday";
        case DayClass::Weekend: return "weekend";
    }
    return "?";
}

std::string to_string(Weekday w) {
    static const char* names[] = {"monday", "tuesday",  "wednesday", "thursday",
                                  "friday", "saturday", "sunday"};
    return names[static_cast<int>(w)];
}

}  // namespace gasfc
