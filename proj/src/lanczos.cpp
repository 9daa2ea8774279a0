#include "netinf/lanczos.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "netinf/error.hpp"

namespace netinf {

namespace {

// Orthogonalizes v against the first k columns of basis, twice.
void orthogonalize(const Matrix& basis, Eigen::Index k, Vector& v) {
  if (k == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Vector coeffs = basis.leftCols(k).transpose() * v;
    v.noalias() -= basis.leftCols(k) * coeffs;
  }
}

// True when a should come before b. Equal magnitudes (to a relative 1e-10)
// put the positive value first so that +/- pairs rank deterministically.
bool ranks_before(double a, double b, EigenOrder order) {
  if (order == EigenOrder::LargestAlgebraic) return a > b;
  const double fa = std::abs(a);
  const double fb = std::abs(b);
  if (std::abs(fa - fb) <= 1e-10 * std::max({1.0, fa, fb})) return a > b;
  return fa > fb;
}

std::vector<Eigen::Index> ranked(const Vector& values, EigenOrder order) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (order == EigenOrder::LargestMagnitude) return std::abs(values(a)) > std::abs(values(b));
    return values(a) > values(b);
  });
  // Settle near-ties in magnitude by sign.
  bool swapped = true;
  for (std::size_t pass = 0; swapped && pass < idx.size(); ++pass) {
    swapped = false;
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
      if (ranks_before(values(idx[i + 1]), values(idx[i]), order) &&
          !ranks_before(values(idx[i]), values(idx[i + 1]), order)) {
        std::swap(idx[i], idx[i + 1]);
        swapped = true;
      }
  }
  return idx;
}

// Flips each column so its largest-magnitude entry (lowest index on ties) is positive.
void fix_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < vectors.rows(); ++r)
      if (std::abs(vectors(r, c)) > std::abs(vectors(best, c)) + 1e-12) best = r;
    if (vectors(best, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

// Thick-restart Lanczos for the operator restricted to the orthogonal
// complement of `locked` (n x L, orthonormal; L may be 0).
EigenPairs restarted_lanczos(Eigen::Index n, const SymmetricOperator& op, int count, EigenOrder order,
                             const LanczosOptions& options, const Matrix& locked, std::uint64_t seed) {
  const Eigen::Index dim = n - locked.cols();
  const Eigen::Index p = std::min<Eigen::Index>(
      dim, options.subspace > 0 ? options.subspace : std::max(2 * count + 16, count + 32));
  const Eigen::Index keep_max = std::min<Eigen::Index>(p - 1, count + (p - count) / 2);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_unit = [&](const Matrix& basis, Eigen::Index k) {
    Vector v(n);
    for (int attempt = 0; attempt < 8; ++attempt) {
      for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
      orthogonalize(locked, locked.cols(), v);
      orthogonalize(basis, k, v);
      const double norm = v.norm();
      if (norm > 1e-8) return Vector(v / norm);
    }
    fail(ErrorKind::Convergence, "could not extend Krylov basis");
  };

  Matrix basis(n, p);
  Matrix image(n, p);  // op applied to each basis column
  EigenPairs out;
  basis.col(0) = random_unit(basis, 0);
  Eigen::Index filled = 0;
  Vector w(n);

  for (int restart = 0;; ++restart) {
    // Extend the basis to p columns.
    Vector next;
    for (Eigen::Index j = filled; j < p; ++j) {
      op(basis.col(j), w);
      orthogonalize(locked, locked.cols(), w);
      ++out.matvecs;
      image.col(j) = w;
      if (j + 1 == p) {
        next = w;
        orthogonalize(basis, p, next);
        orthogonalize(locked, locked.cols(), next);
        break;
      }
      Vector r = w;
      orthogonalize(basis, j + 1, r);
      const double beta = r.norm();
      const double scale = std::max(1.0, w.norm());
      basis.col(j + 1) = beta > 1e-10 * scale ? Vector(r / beta) : random_unit(basis, j + 1);
    }

    // Rayleigh-Ritz on the current basis.
    Matrix h = basis.transpose() * image;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    const Vector theta = solver.eigenvalues();
    const auto order_idx = ranked(theta, order);
    const double lambda_scale = std::max(1.0, theta.cwiseAbs().maxCoeff());

    Matrix s(p, keep_max);
    for (Eigen::Index c = 0; c < keep_max; ++c) s.col(c) = solver.eigenvectors().col(order_idx[c]);
    const Matrix ritz = basis * s;
    const Matrix ritz_image = image * s;

    double max_residual = 0.0;
    for (int c = 0; c < count; ++c) {
      const double res = (ritz_image.col(c) - theta(order_idx[c]) * ritz.col(c)).norm();
      max_residual = std::max(max_residual, res);
    }
    out.restarts = restart;
    out.max_residual = max_residual;

    if (max_residual <= options.tolerance * lambda_scale || p == dim) {
      out.values.resize(count);
      for (int c = 0; c < count; ++c) out.values(c) = theta(order_idx[c]);
      out.vectors = ritz.leftCols(count);
      return out;
    }
    if (restart >= options.max_restarts) {
      fail(ErrorKind::Convergence,
           "Lanczos did not converge: " + std::to_string(restart) + " restarts, " +
               std::to_string(out.matvecs) + " matvecs, max residual " + std::to_string(max_residual) +
               " > tolerance " + std::to_string(options.tolerance * lambda_scale));
    }

    // Thick restart: keep the leading Ritz vectors and continue from the
    // residual direction of the last Lanczos step.
    basis.leftCols(keep_max) = ritz;
    image.leftCols(keep_max) = ritz_image;
    orthogonalize(basis, keep_max, next);
    orthogonalize(locked, locked.cols(), next);
    const double beta = next.norm();
    basis.col(keep_max) = beta > 1e-10 * lambda_scale ? Vector(next / beta) : random_unit(basis, keep_max);
    filled = keep_max;
  }
}

}  // namespace

EigenPairs lanczos_eigs(Eigen::Index n, const SymmetricOperator& op, int count, EigenOrder order,
                        const LanczosOptions& options) {
  require(count >= 1 && count <= n, ErrorKind::InvalidParameter,
          "requested " + std::to_string(count) + " eigenpairs of a " + std::to_string(n) +
              "-dimensional operator");
  EigenPairs out = restarted_lanczos(n, op, count, order, options, Matrix(n, 0), options.seed);

  // A single Krylov sequence sees one direction per distinct eigenvalue, so
  // repeated eigenvalues (e.g. disconnected components) can be missed. Search
  // the orthogonal complement of the accepted vectors until nothing there
  // ranks inside the current set.
  for (int round = 1; round <= count; ++round) {
    const Eigen::Index rest = n - count;
    if (rest <= 0) break;
    const int probe = static_cast<int>(std::min<Eigen::Index>(count, rest));
    const EigenPairs extra =
        restarted_lanczos(n, op, probe, order, options, out.vectors, options.seed + 0x9e3779b97f4a7c15ULL * round);
    out.matvecs += extra.matvecs;
    out.restarts += extra.restarts;
    const double scale = std::max({1.0, out.values.cwiseAbs().maxCoeff(), extra.values.cwiseAbs().maxCoeff()});
    const double slack = options.tolerance * scale;
    const double last = out.values(count - 1);
    const double cand = extra.values(0);
    const bool improves = order == EigenOrder::LargestMagnitude
                              ? std::abs(cand) > std::abs(last) + slack ||
                                    (std::abs(cand) >= std::abs(last) - slack && cand > last + slack)
                              : cand > last + slack;
    if (!improves) break;

    // Rayleigh-Ritz on the union of both sets.
    Matrix combined(n, count + probe);
    combined << out.vectors, extra.vectors;
    Eigen::HouseholderQR<Matrix> qr(combined);
    const Matrix q = qr.householderQ() * Matrix::Identity(n, count + probe);
    Matrix image(n, count + probe);
    Vector y(n);
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      op(q.col(c), y);
      image.col(c) = y;
    }
    out.matvecs += q.cols();
    Matrix h = q.transpose() * image;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    const auto idx = ranked(solver.eigenvalues(), order);
    Matrix s(q.cols(), count);
    for (int c = 0; c < count; ++c) {
      s.col(c) = solver.eigenvectors().col(idx[c]);
      out.values(c) = solver.eigenvalues()(idx[c]);
    }
    out.vectors = q * s;
    double max_residual = 0.0;
    const Matrix img = image * s;
    for (int c = 0; c < count; ++c)
      max_residual = std::max(max_residual, (img.col(c) - out.values(c) * out.vectors.col(c)).norm());
    out.max_residual = max_residual;
  }
  fix_signs(out.vectors);
  return out;
}

}  // namespace netinf
