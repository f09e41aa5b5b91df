#include "propertime/si_estimator.hpp"

#include <numbers>
#include <type_traits>

#include "propertime/error.hpp"

namespace propertime::si {

void PhysicalConstants::validate() const {
  if (!(electron_mass.value > 0 && elementary_charge.value > 0 && hbar.value > 0 &&
        speed_of_light.value > 0)) {
    throw Error(ErrorKind::InvalidArgument, "physical constants must be strictly positive");
  }
}

PerTesla rate_shift_per_tesla(const PhysicalConstants& c) {
  c.validate();
  const auto rest = c.electron_mass * c.speed_of_light;
  const PerTesla shift = (c.elementary_charge * c.hbar) / (rest * rest);
  static_assert(std::is_same_v<decltype(shift * Tesla{1.0}), Dimensionless>);
  return {0.5 * shift.value};
}

Tesla critical_field(const PhysicalConstants& c) {
  c.validate();
  const auto rest = c.electron_mass * c.speed_of_light;
  return (rest * rest) / (c.elementary_charge * c.hbar);
}

std::vector<ShiftRow> magnetar_sweep(const std::vector<double>& fields_tesla,
                                     const PhysicalConstants& c) {
  const double per_tesla = rate_shift_per_tesla(c).value;
  std::vector<ShiftRow> rows;
  rows.reserve(fields_tesla.size());
  for (double b : fields_tesla) {
    if (!(b > 0.0)) throw Error(ErrorKind::InvalidArgument, "magnetic fields must be positive");
    const double shift = per_tesla * b;
    rows.push_back({b, shift, shift > kExpansionLimit});
  }
  return rows;
}

ZitterFrequency zitter_frequency_si(const PhysicalConstants& c) {
  c.validate();
  const PerSecond omega =
      (c.electron_mass * c.speed_of_light * c.speed_of_light) / c.hbar;
  return {omega.value, omega.value / (2.0 * std::numbers::pi)};
}

}  // namespace propertime::si
