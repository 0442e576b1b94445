#include "fcc/time_series.hpp"

#include <cmath>
#include <string>

#include "fcc/errors.hpp"

namespace fcc {

std::string_view to_string(SeriesSource source) {
  switch (source) {
    case SeriesSource::closed_form:
      return "closed_form";
    case SeriesSource::rk45:
      return "rk45";
  }
  return "unknown";
}

void TimeSeries::check() const {
  if (currents.size() != times.size() || voltages.size() != times.size()) {
    throw DomainError("time series columns differ in length");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || !std::isfinite(currents[k]) || !std::isfinite(voltages[k])) {
      throw DomainError("non-finite sample at index " + std::to_string(k));
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw DomainError("times not strictly increasing at index " + std::to_string(k));
    }
  }
}

}  // namespace fcc
