#pragma once

// SI-unit magnitude of the spin-field term e sigma.B / (2 m^2) in the
// proper-time rate, and the rest-energy oscillation frequency of an electron.

#include <string>
#include <vector>

namespace propertime::si {

// Exponents of kilogram, metre, second, ampere. Arithmetic on Quantity
// tracks them at compile time so the shift-per-tesla is checked to be
// inverse tesla.
template <int Kg, int M, int S, int A>
struct Quantity {
  double value;
};

template <int K1, int M1, int S1, int A1, int K2, int M2, int S2, int A2>
constexpr Quantity<K1 + K2, M1 + M2, S1 + S2, A1 + A2> operator*(Quantity<K1, M1, S1, A1> a,
                                                                Quantity<K2, M2, S2, A2> b) {
  return {a.value * b.value};
}

template <int K1, int M1, int S1, int A1, int K2, int M2, int S2, int A2>
constexpr Quantity<K1 - K2, M1 - M2, S1 - S2, A1 - A2> operator/(Quantity<K1, M1, S1, A1> a,
                                                                Quantity<K2, M2, S2, A2> b) {
  return {a.value / b.value};
}

using Dimensionless = Quantity<0, 0, 0, 0>;
using Kilogram = Quantity<1, 0, 0, 0>;
using Coulomb = Quantity<0, 0, 1, 1>;
using JouleSecond = Quantity<1, 2, -1, 0>;
using MetrePerSecond = Quantity<0, 1, -1, 0>;
using Tesla = Quantity<1, 0, -2, -1>;
using PerTesla = Quantity<-1, 0, 2, 1>;
using PerSecond = Quantity<0, 0, -1, 0>;

// CODATA 2018.
struct PhysicalConstants {
  Kilogram electron_mass{9.1093837015e-31};
  Coulomb elementary_charge{1.602176634e-19};
  JouleSecond hbar{1.054571817e-34};
  MetrePerSecond speed_of_light{299792458.0};

  // Throws InvalidArgument unless every constant is strictly positive.
  void validate() const;
};

// e hbar / (2 m^2 c^2): the rate shift per tesla for |sigma.B| = |B|.
PerTesla rate_shift_per_tesla(const PhysicalConstants& c = {});

// m^2 c^2 / (e hbar); the shift there is exactly 1/2.
Tesla critical_field(const PhysicalConstants& c = {});

// Order-of-magnitude figure usually quoted for the shift per tesla.
inline constexpr double kQuotedShiftPerTesla = 2e-10;
inline constexpr double kExpansionLimit = 0.1;

struct ShiftRow {
  double field_tesla;
  double shift;
  bool expansion_invalid;  // shift > kExpansionLimit
};

// Throws InvalidArgument for non-positive fields.
std::vector<ShiftRow> magnetar_sweep(const std::vector<double>& fields_tesla,
                                     const PhysicalConstants& c = {});

struct ZitterFrequency {
  double angular;  // m c^2 / hbar, rad/s
  double hertz;    // angular / 2 pi
};

ZitterFrequency zitter_frequency_si(const PhysicalConstants& c = {});

}  // namespace propertime::si
