#pragma once

#include <string>
#include <vector>

namespace mcdtsf {

enum class Frequency { Monthly, Weekly, Daily };

Frequency parse_frequency(const std::string& name);
std::string frequency_name(Frequency f);

// Dimension of the calendar feature vector per frequency.
int timestamp_feature_dim(Frequency f);

struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  bool operator==(const Date&) const = default;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);
bool is_valid_date(const Date& d);

// ISO-8601 (YYYY-MM-DD). Throws std::invalid_argument on malformed input.
Date parse_date(const std::string& iso);
std::string to_iso(const Date& d);

// Days since 1970-01-01 (proleptic Gregorian).
long days_from_civil(const Date& d);
Date civil_from_days(long days);

int compare_dates(const Date& a, const Date& b);
inline bool operator<(const Date& a, const Date& b) { return compare_dates(a, b) < 0; }
inline bool operator<=(const Date& a, const Date& b) { return compare_dates(a, b) <= 0; }

int weekday_mon0(const Date& d);  // Monday = 0 .. Sunday = 6
int day_of_year(const Date& d);   // 1..366
int iso_week(const Date& d);      // 1..53
int iso_weeks_in_year(int year);  // 52 or 53

Date add_days(const Date& d, long n);
// Calendar-aware stepping; day-of-month clamps when the target month is
// shorter (Jan 31 + 1 month = Feb 28).
Date add_months(const Date& d, int n);
Date add_step(const Date& d, Frequency f, int n);

}  // namespace mcdtsf
