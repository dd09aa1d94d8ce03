#include "mcdtsf/date.hpp"

#include <cstdio>
#include <stdexcept>

namespace mcdtsf {

Frequency parse_frequency(const std::string& name) {
  if (name == "monthly" || name == "Monthly") return Frequency::Monthly;
  if (name == "weekly" || name == "Weekly") return Frequency::Weekly;
  if (name == "daily" || name == "Daily") return Frequency::Daily;
  throw std::invalid_argument("unknown frequency: " + name);
}

std::string frequency_name(Frequency f) {
  switch (f) {
    case Frequency::Monthly: return "monthly";
    case Frequency::Weekly: return "weekly";
    case Frequency::Daily: return "daily";
  }
  return "?";
}

int timestamp_feature_dim(Frequency f) {
  switch (f) {
    case Frequency::Monthly: return 1;
    case Frequency::Weekly: return 2;
    case Frequency::Daily: return 3;
  }
  return 0;
}

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static const int lens[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap_year(year)) return 29;
  return lens[month - 1];
}

bool is_valid_date(const Date& d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

Date parse_date(const std::string& iso) {
  int y = 0, m = 0, day = 0;
  char extra = 0;
  if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &day, &extra) != 3 ||
      iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw std::invalid_argument("malformed ISO date: '" + iso + "'");
  }
  Date d{y, m, day};
  if (!is_valid_date(d)) {
    throw std::invalid_argument("invalid calendar date: '" + iso + "'");
  }
  return d;
}

std::string to_iso(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

// Howard Hinnant's civil-days algorithms.
long days_from_civil(const Date& d) {
  int y = d.year;
  const int m = d.month;
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

Date civil_from_days(long z) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned day = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
              static_cast<int>(day)};
}

int compare_dates(const Date& a, const Date& b) {
  if (a.year != b.year) return a.year < b.year ? -1 : 1;
  if (a.month != b.month) return a.month < b.month ? -1 : 1;
  if (a.day != b.day) return a.day < b.day ? -1 : 1;
  return 0;
}

int weekday_mon0(const Date& d) {
  // 1970-01-01 was a Thursday (index 3).
  long z = days_from_civil(d) + 3;
  int wd = static_cast<int>(z % 7);
  return wd < 0 ? wd + 7 : wd;
}

int day_of_year(const Date& d) {
  return static_cast<int>(days_from_civil(d) -
                          days_from_civil(Date{d.year, 1, 1})) +
         1;
}

int iso_weeks_in_year(int year) {
  int jan1 = weekday_mon0(Date{year, 1, 1});
  return (jan1 == 3 || (is_leap_year(year) && jan1 == 2)) ? 53 : 52;
}

int iso_week(const Date& d) {
  int week = (day_of_year(d) - weekday_mon0(d) + 9) / 7;
  if (week < 1) return iso_weeks_in_year(d.year - 1);
  if (week > iso_weeks_in_year(d.year)) return 1;
  return week;
}

Date add_days(const Date& d, long n) { return civil_from_days(days_from_civil(d) + n); }

Date add_months(const Date& d, int n) {
  int idx = d.year * 12 + (d.month - 1) + n;
  int y = idx / 12;
  int m = idx % 12;
  if (m < 0) {
    m += 12;
    y -= 1;
  }
  Date out{y, m + 1, d.day};
  int dim = days_in_month(out.year, out.month);
  if (out.day > dim) out.day = dim;
  return out;
}

Date add_step(const Date& d, Frequency f, int n) {
  switch (f) {
    case Frequency::Monthly: return add_months(d, n);
    case Frequency::Weekly: return add_days(d, 7L * n);
    case Frequency::Daily: return add_days(d, n);
  }
  return d;
}

}  // namespace mcdtsf
