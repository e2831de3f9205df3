#include "ssact/spectral.hpp"

#include <algorithm>

namespace ssact {

bool is_irreducible(const IntMatrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) return false;
  auto reach = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < n; ++w) {
        long long entry = transpose ? a(w, v) : a(v, w);
        if (entry != 0 && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    return seen;
  };
  auto f = reach(false), b = reach(true);
  for (std::size_t v = 0; v < n; ++v)
    if (!f[v] || !b[v]) return false;
  return true;
}

namespace {

// One-sided power iteration on (A + I); returns the 1-normalized nonnegative
// eigenvector.  `apply` must compute (A + I) x.
std::vector<double> power_iterate(
    std::size_t n, const std::function<std::vector<double>(
                       const std::vector<double>&)>& apply_a,
    double tol, long max_iter, const char* which) {
  std::vector<double> y(n, 1.0 / static_cast<double>(n));
  for (long it = 0; it < max_iter; ++it) {
    std::vector<double> ay = apply_a(y);
    double rho_est = vec_sum(ay);  // y >= 0 with 1-norm 1
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      resid = std::max(resid, std::fabs(ay[i] - rho_est * y[i]));
    if (resid <= tol * std::max(1.0, rho_est)) return y;
    // advance with the shifted primitive matrix
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ay[i] += y[i];
      s += ay[i];
    }
    for (std::size_t i = 0; i < n; ++i) y[i] = ay[i] / s;
  }
  throw ComputeError(std::string("power iteration for the ") + which +
                     " eigenvector did not converge within max_iter");
}

}  // namespace

SpectralData<double> perron_frobenius(const IntMatrix& a, double tol,
                                      long max_iter) {
  if (!is_irreducible(a))
    throw ValidationError("matrix is reducible; Perron-Frobenius data needs "
                          "an irreducible (strongly connected) matrix");
  const std::size_t n = a.rows();
  Matrix<double> ad = matrix_from_int<double>(a);
  Matrix<double> at = ad.transpose();
  const double inner_tol = tol * 0.02;

  SpectralData<double> sd;
  sd.m = power_iterate(
      n, [&](const std::vector<double>& x) { return ad.apply(x); }, inner_tol,
      max_iter, "right");
  std::vector<double> u = power_iterate(
      n, [&](const std::vector<double>& x) { return at.apply(x); }, inner_tol,
      max_iter, "left");
  // Rayleigh quotient with both eigenvectors; quadratically accurate.
  sd.rho = dot(u, ad.apply(sd.m)) / dot(u, sd.m);
  double scale = dot(u, sd.m);
  sd.m_tilde.resize(n);
  for (std::size_t i = 0; i < n; ++i) sd.m_tilde[i] = u[i] / scale;

  std::vector<double> rm = ad.apply(sd.m);
  std::vector<double> lm = at.apply(sd.m_tilde);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(rm[i] - sd.rho * sd.m[i]) > tol)
      throw ComputeError("right eigenvector residual exceeds tol");
    if (std::fabs(lm[i] - sd.rho * sd.m_tilde[i]) > tol * sd.rho)
      throw ComputeError("left eigenvector residual exceeds tol");
  }
  return sd;
}

namespace {

// Strictly positive exact eigenvector of A at integer eigenvalue r, if the
// eigenspace is 1-dimensional and signed; scaled to 1-norm 1.
std::optional<std::vector<Rational>> positive_eigenvector(const IntMatrix& a,
                                                          long long r) {
  const std::size_t n = a.rows();
  Matrix<Rational> sys = matrix_from_int<Rational>(a);
  for (std::size_t i = 0; i < n; ++i) sys(i, i) -= Rational(r);
  auto basis = nullspace(sys);
  if (basis.size() != 1) return std::nullopt;
  std::vector<Rational> v = basis[0];
  Rational total = vec_sum(v);
  if (total == 0) return std::nullopt;
  bool all_pos = true;
  for (auto& x : v) {
    x /= total;
    if (!(x > 0)) all_pos = false;
  }
  if (!all_pos) return std::nullopt;
  return v;
}

}  // namespace

SpectralData<Rational> perron_frobenius_exact(const IntMatrix& a) {
  if (!is_irreducible(a))
    throw ValidationError("matrix is reducible; Perron-Frobenius data needs "
                          "an irreducible (strongly connected) matrix");
  const std::size_t n = a.rows();
  long long row_min = 0, row_max = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long long s = 0;
    for (std::size_t j = 0; j < n; ++j) s += a(i, j);
    if (i == 0 || s < row_min) row_min = s;
    if (i == 0 || s > row_max) row_max = s;
  }
  for (long long r = row_max; r >= std::max(1LL, row_min); --r) {
    auto m = positive_eigenvector(a, r);
    if (!m) continue;
    auto mt_raw = positive_eigenvector(a.transpose(), r);
    if (!mt_raw)
      throw InternalError("left eigenspace at rho disagrees with right");
    SpectralData<Rational> sd;
    sd.rho = Rational(r);
    sd.m = *m;
    sd.m_tilde = *mt_raw;
    Rational scale = dot(sd.m_tilde, sd.m);
    for (auto& x : sd.m_tilde) x /= scale;
    return sd;
  }
  throw ComputeError(
      "spectral radius is not rational; exact mode unavailable for this "
      "matrix (use float mode)");
}

}  // namespace ssact
