#pragma once

#include <cstdint>
#include <vector>

#include "netinf/matrix.hpp"

namespace netinf::assoc {

inline constexpr double kMaxAbsCorrelation = 1.0 - 1e-12;
inline constexpr double kMinPValue = 1e-15;

/// Both tails send small p to large positive z, so the two give the same scores.
enum class Tail { Upper, Lower };

/// Sample covariance with divisor n (not n - 1).
SymmetricMatrix covariance_matrix(const SampleMatrix& samples);

/// Rescales by the inverse square root of the diagonal. Throws DegenerateVariance
/// naming the first non-positive diagonal index.
SymmetricMatrix correlation_from_covariance(const SymmetricMatrix& cov);

/// sqrt(dof - 3) * atanh(r), so that the null scores are standard normal.
/// |r| is clamped to kMaxAbsCorrelation first.
AssocMatrix fisher_z(const SymmetricMatrix& corr, double dof);

/// Inverse-normal transform oriented so small p gives large positive z.
AssocMatrix pvalues_to_z(const SymmetricMatrix& pvals, Tail tail);

/// Binary incidence (items x entities). Rows are items, columns are entities.
struct Incidence {
  std::int64_t items = 0;
  std::int64_t entities = 0;
  // Sorted item indices per entity.
  std::vector<std::vector<std::int64_t>> members;
};

/// Upper-tail hypergeometric probability P(X >= overlap) for two sets of sizes
/// size_a and size_b drawn from a universe of the given size.
double fisher_upper_tail(std::int64_t universe, std::int64_t size_a, std::int64_t size_b,
                         std::int64_t overlap);

/// One-tailed Fisher exact test p-values for pairwise overlap of entity item sets.
/// Diagonal is 1.
SymmetricMatrix cooccurrence_pvalues(const Incidence& incidence);

}  // namespace netinf::assoc
