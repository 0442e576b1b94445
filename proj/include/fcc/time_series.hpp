#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace fcc {

enum class SeriesSource { closed_form, rk45 };

[[nodiscard]] std::string_view to_string(SeriesSource source);

/// Sampled trajectory (t, i, v). Times are strictly increasing.
struct TimeSeries {
  std::vector<double> times;     // s
  std::vector<double> currents;  // A
  std::vector<double> voltages;  // V
  SeriesSource source = SeriesSource::closed_form;

  [[nodiscard]] std::size_t size() const { return times.size(); }

  /// Throws DomainError unless the lengths match, times increase strictly
  /// and every value is finite.
  void check() const;
};

}  // namespace fcc
