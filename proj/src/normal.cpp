#include "netinf/normal.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

namespace netinf::normal {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// Mills ratio sf(x)/pdf(x) for x >= 5 by Lentz's continued fraction
//   R(x) = 1 / (x + 1 / (x + 2 / (x + 3 / (x + ...))))
double mills_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    d = x + k * d;
    if (d == 0.0) d = tiny;
    c = x + k / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

}  // namespace

double pdf(double x) { return std::exp(log_pdf(x)); }

double log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double log_sf(double x) {
  if (x < 5.0) return std::log(sf(x));
  return log_mills(x) + log_pdf(x);
}

double log_mills(double x) {
  if (x >= 5.0) return std::log(mills_continued_fraction(x));
  return std::log(sf(x)) - log_pdf(x);
}

double quantile(double p) { return -kSqrt2 * boost::math::erfc_inv(2.0 * p); }

}  // namespace netinf::normal
