#include "netinf/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netinf/error.hpp"
#include "netinf/normal.hpp"

namespace netinf {

const char* to_string(SymmetricKind kind) {
  switch (kind) {
    case SymmetricKind::Covariance: return "covariance";
    case SymmetricKind::Correlation: return "correlation";
    case SymmetricKind::PValue: return "pvalue";
  }
  return "unknown";
}

}  // namespace netinf

namespace netinf::assoc {

namespace {

// log(k!) for k = 0..n.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(std::int64_t n) : table_(static_cast<std::size_t>(n) + 1, 0.0) {
    for (std::int64_t k = 2; k <= n; ++k) table_[k] = table_[k - 1] + std::log(static_cast<double>(k));
  }

  double operator()(std::int64_t k) const { return table_[static_cast<std::size_t>(k)]; }

  double log_choose(std::int64_t n, std::int64_t k) const {
    return (*this)(n) - (*this)(k) - (*this)(n - k);
  }

 private:
  std::vector<double> table_;
};

double upper_tail(const LogFactorialTable& lf, std::int64_t universe, std::int64_t size_a,
                  std::int64_t size_b, std::int64_t overlap) {
  const std::int64_t lo = std::max<std::int64_t>(0, size_a + size_b - universe);
  const std::int64_t hi = std::min(size_a, size_b);
  if (overlap <= lo) return 1.0;
  if (overlap > hi) return 0.0;
  const double log_denom = lf.log_choose(universe, size_b);
  double sum = 0.0;
  // Smallest terms first.
  for (std::int64_t x = hi; x >= overlap; --x) {
    sum += std::exp(lf.log_choose(size_a, x) + lf.log_choose(universe - size_a, size_b - x) -
                    log_denom);
  }
  return std::min(sum, 1.0);
}

void check_symmetric(const Matrix& values, const char* what) {
  require(values.rows() == values.cols(), ErrorKind::InvalidInput,
          std::string(what) + " matrix must be square");
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      require(std::isfinite(values(i, j)), ErrorKind::InvalidInput,
              std::string(what) + " matrix has a non-finite entry at (" + std::to_string(i + 1) +
                  ", " + std::to_string(j + 1) + ")");
    }
  }
  require(values == values.transpose(),
          ErrorKind::InvalidInput, std::string(what) + " matrix is not symmetric");
}

}  // namespace

SymmetricMatrix covariance_matrix(const SampleMatrix& samples) {
  const auto n = samples.samples();
  const auto m = samples.variables();
  require(n >= 2, ErrorKind::InvalidInput, "need at least 2 samples, got " + std::to_string(n));
  require(m >= 1, ErrorKind::InvalidInput, "need at least 1 variable");
  require(samples.values.allFinite(), ErrorKind::InvalidInput, "sample matrix has non-finite entries");

  const Matrix centered = samples.values.rowwise() - samples.values.colwise().mean();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n);
  // Exact symmetry regardless of BLAS summation order.
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = j + 1; i < m; ++i) cov(j, i) = cov(i, j);
  return {std::move(cov), SymmetricKind::Covariance};
}

SymmetricMatrix correlation_from_covariance(const SymmetricMatrix& cov) {
  const auto m = cov.size();
  require(cov.values.cols() == m, ErrorKind::InvalidInput, "covariance matrix must be square");
  Vector inv_sd(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double v = cov.values(i, i);
    if (!(v > 0.0)) {
      fail(ErrorKind::DegenerateVariance,
           "variable " + std::to_string(i + 1) + " has non-positive variance " + std::to_string(v));
    }
    inv_sd(i) = 1.0 / std::sqrt(v);
  }
  Matrix r(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    r(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < m; ++i) {
      const double v = std::clamp(cov.values(i, j) * inv_sd(i) * inv_sd(j), -1.0, 1.0);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return {std::move(r), SymmetricKind::Correlation};
}

AssocMatrix fisher_z(const SymmetricMatrix& corr, double dof) {
  require(dof > 3.0, ErrorKind::InvalidDof,
          "degrees of freedom must exceed 3, got " + std::to_string(dof));
  check_symmetric(corr.values, "correlation");
  const auto m = corr.size();
  const double scale = std::sqrt(dof - 3.0);
  Matrix z = Matrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = j + 1; i < m; ++i) {
      const double r = corr.values(i, j);
      require(std::abs(r) <= 1.0, ErrorKind::InvalidInput,
              "correlation out of [-1, 1] at (" + std::to_string(i + 1) + ", " +
                  std::to_string(j + 1) + ")");
      const double v = scale * std::atanh(std::clamp(r, -kMaxAbsCorrelation, kMaxAbsCorrelation));
      z(i, j) = v;
      z(j, i) = v;
    }
  }
  return {std::move(z), dof, AssocOrigin::Fisher};
}

AssocMatrix pvalues_to_z(const SymmetricMatrix& pvals, Tail /*tail*/) {
  check_symmetric(pvals.values, "p-value");
  const auto m = pvals.size();
  Matrix z = Matrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = j + 1; i < m; ++i) {
      const double p = pvals.values(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        fail(ErrorKind::InvalidPValue, "p-value out of [0, 1] at (" + std::to_string(i + 1) + ", " +
                                           std::to_string(j + 1) + "): " + std::to_string(p));
      }
      const double pc = std::clamp(p, kMinPValue, 1.0 - kMinPValue);
      // Phi^{-1}(1 - p) == -Phi^{-1}(p); the right side keeps full precision for small p.
      const double v = -normal::quantile(pc);
      z(i, j) = v;
      z(j, i) = v;
    }
  }
  return {std::move(z), std::nullopt, AssocOrigin::InverseNormal};
}

double fisher_upper_tail(std::int64_t universe, std::int64_t size_a, std::int64_t size_b,
                         std::int64_t overlap) {
  require(universe >= 0 && size_a >= 0 && size_b >= 0 && size_a <= universe && size_b <= universe,
          ErrorKind::InvalidParameter, "inconsistent 2x2 table margins");
  const LogFactorialTable lf(universe);
  return upper_tail(lf, universe, size_a, size_b, overlap);
}

SymmetricMatrix cooccurrence_pvalues(const Incidence& incidence) {
  const auto m = incidence.entities;
  require(static_cast<std::int64_t>(incidence.members.size()) == m, ErrorKind::InvalidInput,
          "incidence member lists do not match entity count");
  for (std::int64_t e = 0; e < m; ++e) {
    if (incidence.members[e].empty()) {
      fail(ErrorKind::DegenerateEntity,
           "entity " + std::to_string(e + 1) + " has no items");
    }
  }
  const LogFactorialTable lf(incidence.items);
  Matrix p = Matrix::Ones(m, m);
  for (std::int64_t j = 0; j < m; ++j) {
    const auto& b = incidence.members[j];
    for (std::int64_t i = j + 1; i < m; ++i) {
      const auto& a = incidence.members[i];
      std::int64_t overlap = 0;
      auto ia = a.begin();
      auto ib = b.begin();
      while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
          ++ia;
        } else if (*ib < *ia) {
          ++ib;
        } else {
          ++overlap;
          ++ia;
          ++ib;
        }
      }
      const double v = upper_tail(lf, incidence.items, static_cast<std::int64_t>(a.size()),
                                  static_cast<std::int64_t>(b.size()), overlap);
      p(i, j) = v;
      p(j, i) = v;
    }
  }
  return {std::move(p), SymmetricKind::PValue};
}

}  // namespace netinf::assoc
