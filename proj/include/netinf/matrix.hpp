#pragma once

#include <Eigen/Dense>
#include <optional>

namespace netinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x m samples: rows are observations, columns are variables.
struct SampleMatrix {
  Matrix values;

  Eigen::Index samples() const { return values.rows(); }
  Eigen::Index variables() const { return values.cols(); }
};

enum class SymmetricKind { Covariance, Correlation, PValue };

struct SymmetricMatrix {
  Matrix values;
  SymmetricKind kind = SymmetricKind::Covariance;

  Eigen::Index size() const { return values.rows(); }
};

enum class AssocOrigin { Fisher, InverseNormal };

/// Standardized association scores. The diagonal is stored as 0 and never read.
struct AssocMatrix {
  Matrix z;
  std::optional<double> dof;
  AssocOrigin origin = AssocOrigin::Fisher;

  Eigen::Index size() const { return z.rows(); }
};

const char* to_string(SymmetricKind kind);

}  // namespace netinf
