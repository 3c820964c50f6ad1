#pragma once

#include <cmath>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "c3i/error.hpp"

namespace c3i {

enum class Family { student_t, chi_square, f, normal };

struct DistSpec {
  Family family = Family::normal;
  double df1 = 0.0;
  double df2 = 0.0;

  [[nodiscard]] static DistSpec t(double df) { return {Family::student_t, df, 0.0}; }
  [[nodiscard]] static DistSpec chi_square(double df) { return {Family::chi_square, df, 0.0}; }
  [[nodiscard]] static DistSpec f(double df1, double df2) { return {Family::f, df1, df2}; }
  [[nodiscard]] static DistSpec standard_normal() { return {Family::normal, 0.0, 0.0}; }
};

namespace detail {

inline void check_spec(const DistSpec& d) {
  auto bad = [](double v) { return !(v > 0.0) || !std::isfinite(v); };
  switch (d.family) {
    case Family::student_t:
    case Family::chi_square:
      if (bad(d.df1)) throw NumericalError("distribution: degrees of freedom must be positive");
      break;
    case Family::f:
      if (bad(d.df1) || bad(d.df2)) throw NumericalError("distribution: F degrees of freedom must be positive");
      break;
    case Family::normal:
      break;
  }
}

}  // namespace detail

/// Upper-tail probability P(D >= statistic).
[[nodiscard]] inline double tail_probability(const DistSpec& dist, double statistic) {
  namespace bm = boost::math;
  detail::check_spec(dist);
  if (!std::isfinite(statistic)) throw NumericalError("tail_probability: statistic is not finite");
  switch (dist.family) {
    case Family::student_t:
      return bm::cdf(bm::complement(bm::students_t(dist.df1), statistic));
    case Family::chi_square:
      if (statistic <= 0.0) return 1.0;
      return bm::cdf(bm::complement(bm::chi_squared(dist.df1), statistic));
    case Family::f:
      if (statistic <= 0.0) return 1.0;
      return bm::cdf(bm::complement(bm::fisher_f(dist.df1, dist.df2), statistic));
    case Family::normal:
      return bm::cdf(bm::complement(bm::normal(), statistic));
  }
  return 1.0;
}

/// Two-sided Student-t p-value, P(|T| >= |t|).
[[nodiscard]] inline double two_sided_t_p(double t, double df) {
  if (std::isnan(t)) throw NumericalError("two_sided_t_p: statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return std::min(1.0, 2.0 * tail_probability(DistSpec::t(df), std::abs(t)));
}

/// Two-sided standard-normal p-value.
[[nodiscard]] inline double two_sided_normal_p(double z) {
  if (std::isnan(z)) throw NumericalError("two_sided_normal_p: statistic is NaN");
  if (std::isinf(z)) return 0.0;
  return std::min(1.0, 2.0 * tail_probability(DistSpec::standard_normal(), std::abs(z)));
}

/// Value x with P(D >= x) = upper.
[[nodiscard]] inline double upper_quantile(const DistSpec& dist, double upper) {
  namespace bm = boost::math;
  detail::check_spec(dist);
  if (!(upper > 0.0 && upper < 1.0)) throw NumericalError("upper_quantile: probability must lie in (0,1)");
  switch (dist.family) {
    case Family::student_t:
      return bm::quantile(bm::complement(bm::students_t(dist.df1), upper));
    case Family::chi_square:
      return bm::quantile(bm::complement(bm::chi_squared(dist.df1), upper));
    case Family::f:
      return bm::quantile(bm::complement(bm::fisher_f(dist.df1, dist.df2), upper));
    case Family::normal:
      return bm::quantile(bm::complement(bm::normal(), upper));
  }
  return 0.0;
}

/// Standard normal CDF.
[[nodiscard]] inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace c3i
