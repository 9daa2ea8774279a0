#pragma once

#include <cstdint>
#include <functional>

#include "netinf/matrix.hpp"

namespace netinf {

/// y = A x for a symmetric operator A.
using SymmetricOperator = std::function<void(const Vector& x, Vector& y)>;

enum class EigenOrder {
  LargestMagnitude,  // by |lambda|, descending
  LargestAlgebraic,  // by lambda, descending
};

struct LanczosOptions {
  double tolerance = 1e-8;  // residual norm relative to max(1, |lambda_max|)
  int max_restarts = 1000;
  int subspace = 0;  // 0 picks max(2 * count + 16, count + 32), capped at n
  std::uint64_t seed = 0x5eed;
};

struct EigenPairs {
  Vector values;   // ordered per EigenOrder
  Matrix vectors;  // n x count, orthonormal columns
  int restarts = 0;
  std::int64_t matvecs = 0;
  double max_residual = 0.0;
};

/// Thick-restart Lanczos with full reorthogonalization. Throws a Convergence
/// error carrying iteration diagnostics when max_restarts is exhausted.
EigenPairs lanczos_eigs(Eigen::Index n, const SymmetricOperator& op, int count, EigenOrder order,
                        const LanczosOptions& options = {});

}  // namespace netinf
