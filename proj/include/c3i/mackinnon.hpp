#pragma once

// Response-surface tables for Dickey-Fuller type statistics.
//
// Critical values: MacKinnon (2010), cv(T) = b0 + b1/T + b2/T^2 + b3/T^3.
// P-values: MacKinnon (1994) asymptotic surfaces, p = Phi(poly(tau)) with a
// small-p polynomial below tau_star and a large-p polynomial above it.
//
// Rows are indexed by the number of I(1) variables in the tested relation
// (1 = plain unit-root test, 2..3 = cointegrating residuals).

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "c3i/distributions.hpp"
#include "c3i/error.hpp"

namespace c3i {

enum class Deterministic { none, constant, constant_trend };

[[nodiscard]] inline const char* to_string(Deterministic d) {
  switch (d) {
    case Deterministic::none: return "none";
    case Deterministic::constant: return "constant";
    case Deterministic::constant_trend: return "constant_trend";
  }
  return "?";
}

[[nodiscard]] inline Deterministic parse_deterministic(const std::string& s) {
  if (s == "none" || s == "nc" || s == "n") return Deterministic::none;
  if (s == "constant" || s == "c") return Deterministic::constant;
  if (s == "constant_trend" || s == "ct" || s == "trend") return Deterministic::constant_trend;
  throw ConfigError("unknown deterministic specification '" + s + "' (none|constant|constant_trend)");
}

struct CriticalValues {
  double one = 0.0;   // 1%
  double five = 0.0;  // 5%
  double ten = 0.0;   // 10%

  [[nodiscard]] double at(double level) const {
    if (std::abs(level - 0.01) < 1e-12) return one;
    if (std::abs(level - 0.05) < 1e-12) return five;
    if (std::abs(level - 0.10) < 1e-12) return ten;
    throw ConfigError("critical values are tabulated at 1%, 5% and 10% only");
  }
};

namespace mackinnon {

using Surface = std::array<std::array<double, 4>, 3>;  // [1%,5%,10%] x [b0..b3]

inline constexpr std::size_t kMaxVariables = 3;

// MacKinnon (2010) critical value surfaces.
inline constexpr std::array<Surface, 1> kCvNone = {{
    {{{-2.56574, -2.2358, -3.627, 0.0}, {-1.94100, -0.2686, -3.365, 31.223}, {-1.61682, 0.2656, -2.714, 25.364}}},
}};

inline constexpr std::array<Surface, 3> kCvConstant = {{
    {{{-3.43035, -6.5393, -16.786, -79.433}, {-2.86154, -2.8903, -4.234, -40.040}, {-2.56677, -1.5384, -2.809, 0.0}}},
    {{{-3.89644, -10.9519, -33.527, 0.0}, {-3.33613, -6.1101, -6.823, 0.0}, {-3.04445, -4.2412, -2.720, 0.0}}},
    {{{-4.29374, -14.4354, -33.195, 47.433}, {-3.74066, -8.5632, -10.852, 27.982}, {-3.45218, -6.2143, -3.718, 0.0}}},
}};

inline constexpr std::array<Surface, 3> kCvTrend = {{
    {{{-3.95877, -9.0531, -28.428, -134.155}, {-3.41049, -4.3904, -9.036, -45.374}, {-3.12705, -2.5856, -3.925, -22.380}}},
    {{{-4.32762, -15.4387, -35.679, 0.0}, {-3.78057, -9.5106, -12.074, 0.0}, {-3.49631, -7.0815, -7.538, 21.892}}},
    {{{-4.66305, -18.7688, -49.793, 104.244}, {-4.11890, -11.8922, -19.031, 77.332}, {-3.83511, -9.0723, -8.504, 35.403}}},
}};

// MacKinnon (1994) p-value surfaces, already scaled.
struct PSurface {
  double tau_star;
  double tau_min;
  double tau_max;
  std::array<double, 3> small;  // c0 + c1 t + c2 t^2
  std::array<double, 4> large;  // c0 + c1 t + c2 t^2 + c3 t^3
};

inline constexpr std::array<PSurface, 1> kPNone = {{
    {-1.04, -19.04, 1e300, {0.6344, 1.2378, 3.2496e-2}, {0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2}},
}};

inline constexpr std::array<PSurface, 3> kPConstant = {{
    {-1.61, -18.83, 2.74, {2.1659, 1.4412, 3.8269e-2}, {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2}},
    {-2.62, -18.86, 0.92, {2.92, 1.5012, 3.9796e-2}, {2.1945, 6.4695e-1, -2.9198e-1, -4.2377e-2}},
    {-3.13, -23.48, 0.55, {3.4699, 1.4856, 3.164e-2}, {2.5893, 4.5168e-1, -3.6529e-1, -5.0074e-2}},
}};

inline constexpr std::array<PSurface, 3> kPTrend = {{
    {-2.89, -16.18, 0.7, {3.2512, 1.6047, 4.9588e-2}, {2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2}},
    {-3.19, -21.15, 0.63, {3.6646, 1.5419, 3.6448e-2}, {2.85, 5.272e-1, -3.6622e-1, -5.1695e-2}},
    {-3.50, -25.37, 0.71, {4.0983, 1.5173, 2.9898e-2}, {3.221, 5.255e-1, -3.2685e-1, -4.1501e-2}},
}};

inline void check_variables(Deterministic det, std::size_t n_variables) {
  const std::size_t max = det == Deterministic::none ? 1 : kMaxVariables;
  if (n_variables < 1 || n_variables > max) {
    throw ConfigError("no response surface for " + std::to_string(n_variables) + " variable(s) with deterministic '" +
                      to_string(det) + "'");
  }
}

inline const Surface& cv_surface(Deterministic det, std::size_t n_variables) {
  check_variables(det, n_variables);
  switch (det) {
    case Deterministic::none: return kCvNone[0];
    case Deterministic::constant: return kCvConstant[n_variables - 1];
    case Deterministic::constant_trend: return kCvTrend[n_variables - 1];
  }
  return kCvConstant[0];
}

inline const PSurface& p_surface(Deterministic det, std::size_t n_variables) {
  check_variables(det, n_variables);
  switch (det) {
    case Deterministic::none: return kPNone[0];
    case Deterministic::constant: return kPConstant[n_variables - 1];
    case Deterministic::constant_trend: return kPTrend[n_variables - 1];
  }
  return kPConstant[0];
}

inline double eval_cv(const std::array<double, 4>& b, double nobs) {
  return b[0] + b[1] / nobs + b[2] / (nobs * nobs) + b[3] / (nobs * nobs * nobs);
}

}  // namespace mackinnon

/// Finite-sample critical values at 1/5/10% for `nobs` regression observations.
/// Pass nobs = 0 for the asymptotic values.
[[nodiscard]] inline CriticalValues critical_values(Deterministic det, std::size_t n_variables, std::size_t nobs) {
  const auto& s = mackinnon::cv_surface(det, n_variables);
  if (nobs == 0) return {s[0][0], s[1][0], s[2][0]};
  const double t = static_cast<double>(nobs);
  return {mackinnon::eval_cv(s[0], t), mackinnon::eval_cv(s[1], t), mackinnon::eval_cv(s[2], t)};
}

/// Asymptotic MacKinnon p-value of a Dickey-Fuller tau statistic.
[[nodiscard]] inline double asymptotic_p_value(double tau, Deterministic det, std::size_t n_variables) {
  const auto& s = mackinnon::p_surface(det, n_variables);
  if (tau > s.tau_max) return 1.0;
  if (tau < s.tau_min) return 0.0;
  double z = 0.0;
  if (tau <= s.tau_star) {
    z = s.small[0] + tau * (s.small[1] + tau * s.small[2]);
  } else {
    z = s.large[0] + tau * (s.large[1] + tau * (s.large[2] + tau * s.large[3]));
  }
  return normal_cdf(z);
}

/// P-value adjusted to the sample size.
///
/// The statistic is mapped piecewise-linearly so that the finite-sample
/// critical values land on the asymptotic ones before the asymptotic surface
/// is evaluated; outside [cv1, cv10] the nearest shift is applied. As a
/// result p(cv_T(L)) matches L at every tabulated level.
[[nodiscard]] inline double mackinnon_p_value(double tau, Deterministic det, std::size_t n_variables, std::size_t nobs) {
  if (!std::isfinite(tau)) {
    if (std::isnan(tau)) throw NumericalError("mackinnon_p_value: statistic is NaN");
    return tau < 0 ? 0.0 : 1.0;
  }
  if (nobs == 0) return asymptotic_p_value(tau, det, n_variables);
  const auto fin = critical_values(det, n_variables, nobs);
  const auto inf = critical_values(det, n_variables, 0);
  double mapped = tau;
  if (tau <= fin.one) {
    mapped = tau + (inf.one - fin.one);
  } else if (tau <= fin.five) {
    mapped = inf.one + (tau - fin.one) * (inf.five - inf.one) / (fin.five - fin.one);
  } else if (tau <= fin.ten) {
    mapped = inf.five + (tau - fin.five) * (inf.ten - inf.five) / (fin.ten - fin.five);
  } else {
    mapped = tau + (inf.ten - fin.ten);
  }
  return asymptotic_p_value(mapped, det, n_variables);
}

}  // namespace c3i
