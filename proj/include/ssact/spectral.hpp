#pragma once

// Perron-Frobenius data for irreducible nonnegative integer matrices, and
// the geometric-series matrix A_vN = (I - d A)^{-1} for a discount d with
// d * rho(A) < 1.

#include <optional>
#include <vector>

#include "ssact/linalg.hpp"
#include "ssact/numeric.hpp"

namespace ssact {

template <typename S>
struct SpectralData {
  S rho{};                 // spectral radius
  std::vector<S> m;        // right eigenvector, 1-norm 1, entries > 0
  std::vector<S> m_tilde;  // left eigenvector, scaled so m_tilde . m = 1
};

// Strong connectivity of the support digraph of a square nonnegative matrix.
bool is_irreducible(const IntMatrix& a);

// Deterministic power iteration (1-norm normalized, uniform start) on A + I,
// which is primitive whenever A is irreducible.  Residuals on exit satisfy
// |A m - rho m|_inf <= tol and |m_tilde A - rho m_tilde|_inf <= tol * rho.
SpectralData<double> perron_frobenius(const IntMatrix& a, double tol = 1e-12,
                                      long max_iter = 100000);

// Exact PF data when rho is rational.  For an integer matrix the rational
// eigenvalues are integers, so candidates are scanned between the min and
// max row sums and certified by an exact nullspace computation.  Throws
// ComputeError when rho is irrational (exact mode unavailable).
SpectralData<Rational> perron_frobenius_exact(const IntMatrix& a);

template <typename S>
SpectralData<S> perron_frobenius_as(const IntMatrix& a) {
  if constexpr (std::is_same_v<S, double>) {
    return perron_frobenius(a);
  } else {
    return perron_frobenius_exact(a);
  }
}

template <typename S>
void require_supercritical(const S& d, const S& rho) {
  if (!(d > S(0)) || !(rho > S(0)) || !(d * rho < S(1)))
    throw ValidationError(
        "discount " + format_scalar(d) + " is not supercritical for rho = " +
        format_scalar(rho) +
        " (need 0 < d*rho < 1, i.e. beta > log rho(A_E); no KMS states exist "
        "at or below the critical inverse temperature)");
}

// (I - d A)^{-1}.  Every entry is strictly positive for irreducible A; this
// is checked and a failure reported as an internal inconsistency.
template <typename S>
Matrix<S> von_neumann_matrix(const IntMatrix& a, const SpectralData<S>& sd,
                             const S& d) {
  require_supercritical(d, sd.rho);
  const std::size_t n = a.rows();
  Matrix<S> system = Matrix<S>::identity(n) - matrix_from_int<S>(a).scaled(d);
  Matrix<S> avn;
  try {
    avn = lu_inverse(system);
  } catch (const ComputeError&) {
    throw InternalError("I - d*A singular although d*rho(A) < 1");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(avn(i, j) > S(0)))
        throw InternalError(
            "A_vN has a non-positive entry; matrix was not irreducible?");
  return avn;
}

// Convenience overload: validates the discount against a fresh PF solve.
template <typename S>
Matrix<S> von_neumann_matrix(const IntMatrix& a, const Discount& d) {
  return von_neumann_matrix<S>(a, perron_frobenius_as<S>(a), d.as<S>());
}

}  // namespace ssact
