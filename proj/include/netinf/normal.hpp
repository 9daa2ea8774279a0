#pragma once

// Standard normal helpers that stay finite far into the tails.

namespace netinf::normal {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double pdf(double x);
double log_pdf(double x);
double cdf(double x);
/// Upper tail 1 - cdf(x), computed without cancellation.
double sf(double x);
double log_sf(double x);
/// log of the Mills ratio sf(x) / pdf(x). Finite for every finite x.
double log_mills(double x);
/// Inverse of cdf on (0, 1).
double quantile(double p);

}  // namespace netinf::normal
