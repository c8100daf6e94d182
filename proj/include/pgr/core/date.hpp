#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace pgr {

/// Calendar date at day precision. Stored as days since 1970-01-01 so all
/// arithmetic is integral.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}

  /// Parses strict ISO-8601 `YYYY-MM-DD`.
  static std::optional<Date> parse(std::string_view text);
  /// Like parse() but throws Error{InvalidDate}.
  static Date parse_or_throw(std::string_view text);
  static Date from_ymd(int year, unsigned month, unsigned day);

  std::string to_string() const;
  std::int64_t day_number() const { return days_.time_since_epoch().count(); }
  std::chrono::sys_days sys_days() const { return days_; }

  Date plus_days(std::int64_t n) const { return Date(days_ + std::chrono::days(n)); }
  friend std::int64_t days_between(Date from, Date to) {
    return (to.days_ - from.days_).count();
  }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace pgr
