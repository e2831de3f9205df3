#pragma once

// Trace vectors on a closure set and the discounted self-mapping chi of the
// trace simplex.
//
// Everything reduces to the restriction-count matrix M of the closure: the
// inner series sum_k d^k sum_{mu in E^k, g.mu = mu} tau(u_{g|_mu}) equals
// ((I - dM)^{-1} y)[g] for the class-value vector y, and the vertex part of
// the image is (I - dA)^{-1} x normalized to unit 1-norm.

#include <cmath>
#include <functional>
#include <optional>

#include "ssact/action.hpp"
#include "ssact/spectral.hpp"

namespace ssact {

template <typename S>
S default_trace_tol() {
  if constexpr (std::is_same_v<S, double>)
    return 1e-9;
  else
    return Rational(0);
}

// Least-squares fit of log(v_n) ~ slope * n over entries above `floor`.
struct GeomFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  int points = 0;
};
inline GeomFit fit_log_decay(const std::vector<double>& vals, double floor) {
  GeomFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!(vals[i] > floor)) continue;
    double x = static_cast<double>(i), y = std::log(vals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.points;
  }
  if (fit.points >= 2) {
    double n = fit.points;
    double denom = n * sxx - sx * sx;
    if (denom != 0) {
      fit.slope = (n * sxy - sx * sy) / denom;
      fit.ratio = std::exp(fit.slope);
    }
  }
  return fit;
}

// A normalized formal trace vector: one complex value per closure class.
template <typename S>
struct TraceVector {
  std::vector<Cx<S>> values;

  static TraceVector zero(const ClosureSet& cs) {
    TraceVector t;
    t.values.assign(cs.size(), Cx<S>());
    return t;
  }

  // Uniform unit entries 1/|E^0|, zero elsewhere.
  static TraceVector uniform(const ClosureSet& cs) {
    TraceVector t = zero(cs);
    S u = S(1) / S(static_cast<long long>(cs.graph().vertex_count()));
    for (int v = 0; v < static_cast<int>(cs.graph().vertex_count()); ++v)
      t.values[cs.unit_class(v)] = Cx<S>(u);
    return t;
  }

  // x^tau: the vertex sub-vector (real parts of the unit entries).
  std::vector<S> unit_vector(const ClosureSet& cs) const {
    std::vector<S> x(cs.graph().vertex_count());
    for (int v = 0; v < static_cast<int>(cs.graph().vertex_count()); ++v)
      x[v] = values[cs.unit_class(v)].re;
    return x;
  }

  // Constraint check: unit entries form a probability vector, values vanish
  // off the diagonal (d != t), conjugate symmetry under inversion, and the
  // Cauchy-Schwarz bound |v[g]|^2 <= v[id_d] v[id_t].
  std::vector<std::string> check(const ClosureSet& cs, const S& tol) const {
    std::vector<std::string> issues;
    if (values.size() != cs.size()) {
      issues.push_back("trace vector has " + std::to_string(values.size()) +
                       " entries for " + std::to_string(cs.size()) +
                       " classes");
      return issues;
    }
    S unit_sum(0);
    for (int v = 0; v < static_cast<int>(cs.graph().vertex_count()); ++v) {
      const Cx<S>& z = values[cs.unit_class(v)];
      if (sabs(z.im) > tol)
        issues.push_back("unit entry " + cs.cls(cs.unit_class(v)).key +
                         " is not real");
      if (z.re < S(0) - tol)
        issues.push_back("unit entry " + cs.cls(cs.unit_class(v)).key +
                         " is negative");
      unit_sum += z.re;
    }
    if (sabs(unit_sum - S(1)) > tol)
      issues.push_back("unit entries sum to " + format_scalar(unit_sum) +
                       ", not 1");
    for (std::size_t c = 0; c < cs.size(); ++c) {
      const auto& info = cs.cls(static_cast<int>(c));
      if (info.domain != info.terminus && values[c].cheb() > tol)
        issues.push_back("class " + info.key +
                         " has d != t but a nonzero value");
      const Cx<S> want = values[c].conj();
      if ((values[info.inverse] - want).cheb() > tol)
        issues.push_back("conjugate symmetry fails between " + info.key +
                         " and " + cs.cls(info.inverse).key);
      S bound = values[cs.unit_class(info.domain)].re *
                values[cs.unit_class(info.terminus)].re;
      if (values[c].norm_sq() > bound + tol)
        issues.push_back("Cauchy-Schwarz bound fails at class " + info.key);
    }
    return issues;
  }

  void require_valid(const ClosureSet& cs, const S& tol) const {
    auto issues = check(cs, tol);
    if (!issues.empty()) throw ValidationError(issues);
  }
};

// Precomputed data for evaluating chi at one discount.
template <typename S>
class ChiEngine {
 public:
  ChiEngine(const ClosureSet& cs, SpectralData<S> sd, S d)
      : cs_(&cs), sd_(std::move(sd)), d_(std::move(d)) {
    require_supercritical(d_, sd_.rho);
    avn_ = von_neumann_matrix(adjacency_matrix(cs.graph()), sd_, d_);
    Matrix<S> sys = Matrix<S>::identity(cs.size()) -
                    matrix_from_int<S>(cs.M()).scaled(d_);
    try {
      mvn_ = lu_inverse(sys);
    } catch (const ComputeError&) {
      throw InternalError("(I - d M) singular although d rho(M) < 1");
    }
    rho_vn_ = S(1) / (S(1) - d_ * sd_.rho);
  }

  const ClosureSet& closure() const { return *cs_; }
  const SpectralData<S>& spectral() const { return sd_; }
  const S& discount() const { return d_; }
  const S& rho_vn() const { return rho_vn_; }
  const Matrix<S>& avn() const { return avn_; }
  const Matrix<S>& mvn() const { return mvn_; }

  // Z(beta, tau) = |A_vN x^tau|_1
  S Z(const TraceVector<S>& tau) const {
    return vec_one_norm(avn_.apply(tau.unit_vector(*cs_)));
  }

  // chi(tau) = Z^{-1} (I - dM)^{-1} y.  The normalizer is taken from the
  // unit entries of the image itself, so the output units sum to 1 exactly.
  TraceVector<S> apply(const TraceVector<S>& tau, S* z_out = nullptr) const {
    const std::size_t n = cs_->size();
    std::vector<S> re(n), im(n);
    for (std::size_t c = 0; c < n; ++c) {
      re[c] = tau.values[c].re;
      im[c] = tau.values[c].im;
    }
    std::vector<S> zre = mvn_.apply(re), zim = mvn_.apply(im);
    S z(0);
    for (int v = 0; v < static_cast<int>(cs_->graph().vertex_count()); ++v)
      z += zre[cs_->unit_class(v)];
    if (!(z > S(0)))
      throw ValidationError(
          "trace vector yields a nonpositive normalizer; unit entries must "
          "be nonnegative with sum 1");
    TraceVector<S> out;
    out.values.resize(n);
    for (std::size_t c = 0; c < n; ++c)
      out.values[c] = Cx<S>(zre[c] / z, zim[c] / z);
    if (z_out) *z_out = z;
    return out;
  }

 private:
  const ClosureSet* cs_;
  SpectralData<S> sd_;
  S d_;
  Matrix<S> avn_, mvn_;
  S rho_vn_{};
};

template <typename S>
S compute_Z(const SpectralData<S>& sd, const ClosureSet& cs, const S& d,
            const TraceVector<S>& tau) {
  require_supercritical(d, sd.rho);
  Matrix<S> avn = von_neumann_matrix(adjacency_matrix(cs.graph()), sd, d);
  return vec_one_norm(avn.apply(tau.unit_vector(cs)));
}

// N(beta, tau) = e^beta (1 - 1/Z) = (1 - 1/Z) / d.
template <typename S>
S compute_N(const S& d, const S& z) {
  if (!(z >= S(1)))
    throw ValidationError("Z must be >= 1 (it is 1 + positive terms)");
  return (S(1) - S(1) / z) / d;
}

template <typename S>
TraceVector<S> apply_chi(const ClosureSet& cs, const SpectralData<S>& sd,
                         const S& d, const TraceVector<S>& tau) {
  tau.require_valid(cs, default_trace_tol<S>());
  return ChiEngine<S>(cs, sd, d).apply(tau);
}

// The preferred trace: the solution of M theta = rho theta with the unit
// entries pinned to the Perron-Frobenius eigenvector.  Solved by
// back-substitution along the restriction digraph when it is acyclic off
// the units, otherwise by a dense solve of the constrained system.
template <typename S>
TraceVector<S> fixed_point_eigen(const ClosureSet& cs,
                                 const SpectralData<S>& sd) {
  if (!is_strongly_connected(cs.graph()))
    throw ValidationError(
        "graph is not strongly connected; no fixed-point computation is "
        "attempted");
  const IntMatrix& m = cs.M();
  TraceVector<S> theta = TraceVector<S>::zero(cs);
  for (int v = 0; v < static_cast<int>(cs.graph().vertex_count()); ++v)
    theta.values[cs.unit_class(v)] = Cx<S>(sd.m[v]);

  std::vector<int> nu;  // non-unit diagonal classes
  for (int c : cs.diagonal_classes())
    if (!cs.cls(c).is_unit) nu.push_back(c);
  if (nu.empty()) return theta;

  const std::size_t k = nu.size();
  std::vector<int> pos(cs.size(), -1);
  for (std::size_t i = 0; i < k; ++i) pos[nu[i]] = static_cast<int>(i);

  // g depends on h when M(g,h) != 0 (off-diagonal, within nu)
  std::vector<std::vector<int>> dependents(k);
  std::vector<int> unresolved(k, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j || m(nu[i], nu[j]) == 0) continue;
      dependents[j].push_back(static_cast<int>(i));
      ++unresolved[i];
    }
  std::vector<int> order;
  {
    std::vector<int> ready;
    for (std::size_t i = 0; i < k; ++i)
      if (unresolved[i] == 0) ready.push_back(static_cast<int>(i));
    std::vector<int> remaining = unresolved;
    while (!ready.empty()) {
      int i = ready.front();
      ready.erase(ready.begin());
      order.push_back(i);
      for (int dep : dependents[i])
        if (--remaining[dep] == 0) ready.push_back(dep);
    }
  }

  bool solved = false;
  if (order.size() == k) {
    solved = true;
    for (int oi : order) {
      int c = nu[oi];
      S denom = sd.rho - S(m(c, c));
      if (denom == S(0)) {
        solved = false;  // degenerate diagonal; use the dense solve
        break;
      }
      S acc(0);
      for (std::size_t h = 0; h < cs.size(); ++h) {
        if (static_cast<int>(h) == c || m(c, h) == 0) continue;
        acc += S(m(c, h)) * theta.values[h].re;
      }
      theta.values[c] = Cx<S>(acc / denom);
    }
  }
  if (!solved) {
    Matrix<S> sys(k, k);
    std::vector<S> rhs(k, S(0));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j)
        sys(i, j) = (i == j ? sd.rho : S(0)) - S(m(nu[i], nu[j]));
      for (std::size_t h = 0; h < cs.size(); ++h)
        if (pos[h] < 0 && m(nu[i], h) != 0)
          rhs[i] += S(m(nu[i], h)) * theta.values[h].re;
    }
    std::vector<S> x;
    try {
      x = lu_solve(sys, rhs);
    } catch (const ComputeError&) {
      throw ComputeError(
          "singular constrained system (rho I - M)theta = 0 with unit "
          "entries pinned; fixed point not certified");
    }
    for (std::size_t i = 0; i < k; ++i) theta.values[nu[i]] = Cx<S>(x[i]);
  }
  theta.require_valid(cs, default_trace_tol<S>());
  return theta;
}

template <typename S>
struct IterateOptions {
  S tol = default_trace_tol<S>();
  long max_iter = 10000;
  bool stop_early = true;  // false: run exactly max_iter steps
};

template <typename S>
struct IterationReport {
  std::vector<TraceVector<S>> iterates;  // tau_0 .. tau_N
  std::vector<S> Z;                      // Z(beta, tau_n)
  std::optional<TraceVector<S>> theta;
  // deltas[n][c]: |tau_n[c] - theta[c]| when theta is available, otherwise
  // |tau_n[c] - tau_{n-1}[c]| (zeros at n = 0)
  std::vector<std::vector<S>> deltas;
  bool deltas_vs_theta = false;
  S discount{};
  bool converged = false;
  long converged_at = -1;
  S last_sup_delta{};
  double fitted_ratio = std::numeric_limits<double>::quiet_NaN();

  std::size_t steps() const { return iterates.size(); }
  S sup_delta(std::size_t n) const {
    S s(0);
    for (const S& v : deltas[n])
      if (v > s) s = v;
    return s;
  }
};

template <typename S>
IterationReport<S> iterate_chi(const ClosureSet& cs,
                               const SpectralData<S>& sd, const S& d,
                               const TraceVector<S>& tau0,
                               const IterateOptions<S>& opt = {}) {
  tau0.require_valid(cs, default_trace_tol<S>());
  ChiEngine<S> eng(cs, sd, d);
  IterationReport<S> rep;
  rep.discount = d;
  try {
    rep.theta = fixed_point_eigen(cs, sd);
    rep.deltas_vs_theta = true;
  } catch (const ComputeError&) {
  } catch (const ValidationError&) {
  }

  auto class_deltas = [&](const TraceVector<S>& cur,
                          const TraceVector<S>* prev) {
    std::vector<S> out(cs.size(), S(0));
    if (rep.theta) {
      for (std::size_t c = 0; c < cs.size(); ++c)
        out[c] = (cur.values[c] - rep.theta->values[c]).cheb();
    } else if (prev) {
      for (std::size_t c = 0; c < cs.size(); ++c)
        out[c] = (cur.values[c] - prev->values[c]).cheb();
    }
    return out;
  };

  rep.iterates.push_back(tau0);
  rep.Z.push_back(eng.Z(tau0));
  rep.deltas.push_back(class_deltas(tau0, nullptr));

  if (rep.theta && rep.sup_delta(0) <= opt.tol &&
      sabs(rep.Z[0] - eng.rho_vn()) <= opt.tol) {
    rep.converged = true;
    rep.converged_at = 0;
    rep.last_sup_delta = rep.sup_delta(0);
  }

  for (long n = 1; n <= opt.max_iter; ++n) {
    if (opt.stop_early && rep.converged) break;
    TraceVector<S> next = eng.apply(rep.iterates.back());
    S z_next = eng.Z(next);
    S succ(0);
    for (std::size_t c = 0; c < cs.size(); ++c) {
      S v = (next.values[c] - rep.iterates.back().values[c]).cheb();
      if (v > succ) succ = v;
    }
    rep.iterates.push_back(std::move(next));
    rep.Z.push_back(z_next);
    rep.deltas.push_back(
        class_deltas(rep.iterates.back(),
                     &rep.iterates[rep.iterates.size() - 2]));
    rep.last_sup_delta = succ;
    if (!rep.converged && succ <= opt.tol &&
        sabs(z_next - eng.rho_vn()) <= opt.tol) {
      rep.converged = true;
      rep.converged_at = n;
    }
  }

  std::vector<double> sup;
  for (std::size_t n = rep.deltas_vs_theta ? 0 : 1; n < rep.steps(); ++n)
    sup.push_back(to_double(rep.sup_delta(n)));
  rep.fitted_ratio = fit_log_decay(sup, 1e-300).ratio;
  return rep;
}

// Census estimate of c_g at a given depth, with the spread over the last
// three depths as the error indicator.
template <typename S>
struct CgEstimate {
  S value{};
  S spread{};
  std::vector<S> last;  // up to the last three census values
};

template <typename S>
CgEstimate<S> compute_cg(const ClosureSet& cs, const SpectralData<S>& sd,
                         int cls, int depth,
                         int guard = kDefaultDepthGuard) {
  const auto& info = cs.cls(cls);
  if (info.domain != info.terminus)
    throw ValidationError("census needs d(g) = t(g) for class " + info.key);
  if (depth < 1) throw ValidationError("census depth must be >= 1");
  if (depth > guard)
    throw ValidationError("census depth " + std::to_string(depth) +
                          " exceeds enumeration guard " +
                          std::to_string(guard));
  Matrix<BigInt> m = matrix_from_int<BigInt>(cs.M());
  std::vector<BigInt> row(cs.size(), BigInt(0));
  row[cls] = 1;
  std::vector<S> vals;
  S rho_pow(1);
  for (int n = 1; n <= depth; ++n) {
    row = m.apply_left(row);
    rho_pow = rho_pow * sd.rho;
    S v(0);
    for (int w = 0; w < static_cast<int>(cs.graph().vertex_count()); ++w)
      v += scalar_from_bigint<S>(row[cs.unit_class(w)]) * sd.m[w];
    vals.push_back(v / rho_pow);
  }
  CgEstimate<S> est;
  est.value = vals.back();
  std::size_t take = vals.size() < 3 ? vals.size() : 3;
  est.last.assign(vals.end() - take, vals.end());
  S lo = est.last[0], hi = est.last[0];
  for (const S& v : est.last) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  est.spread = hi - lo;
  return est;
}

// Walks the fixed paths of a class through the closure transitions in
// lexicographic edge order: the enumeration route of the dual-route checks.
template <typename S>
Cx<S> fixed_path_sum(const ClosureSet& cs, const TraceVector<S>& theta,
                     int cls, int depth) {
  Cx<S> acc;
  std::function<void(int, int)> walk = [&](int c, int remaining) {
    if (remaining == 0) {
      acc = acc + theta.values[c];
      return;
    }
    for (int e : cs.graph().out_edges(cs.cls(c).domain)) {
      const auto& tr = cs.transition(c, e);
      if (tr.out_edge == e) walk(tr.cls, remaining - 1);
    }
  };
  walk(cls, depth);
  return acc;
}

template <typename S>
struct RecursionReport {
  struct Row {
    int n;
    S matrix_discrepancy;
    S enum_discrepancy;
  };
  std::vector<Row> rows;
  S max_matrix{};
  S max_enum{};
  bool within(const S& tol) const {
    return !(max_matrix > tol) && !(max_enum > tol);
  }
};

// Checks rho^n theta[g] = sum over fixed mu in E^n of theta[g|_mu], both
// through matrix powers of M and through explicit path enumeration.
template <typename S>
RecursionReport<S> verify_recursive(const ClosureSet& cs,
                                    const SpectralData<S>& sd,
                                    const TraceVector<S>& theta, int n_max,
                                    int guard = kDefaultDepthGuard) {
  if (n_max > guard)
    throw ValidationError("n_max exceeds enumeration guard");
  RecursionReport<S> report;
  Matrix<S> m = matrix_from_int<S>(cs.M());
  std::vector<S> yre(cs.size()), yim(cs.size());
  for (std::size_t c = 0; c < cs.size(); ++c) {
    yre[c] = theta.values[c].re;
    yim[c] = theta.values[c].im;
  }
  S rho_pow(1);
  for (int n = 1; n <= n_max; ++n) {
    yre = m.apply(yre);
    yim = m.apply(yim);
    rho_pow = rho_pow * sd.rho;
    typename RecursionReport<S>::Row row;
    row.n = n;
    row.matrix_discrepancy = S(0);
    row.enum_discrepancy = S(0);
    for (std::size_t c = 0; c < cs.size(); ++c) {
      Cx<S> want = theta.values[c].scaled(rho_pow);
      S md = (Cx<S>(yre[c], yim[c]) - want).cheb();
      if (md > row.matrix_discrepancy) row.matrix_discrepancy = md;
      S ed = (fixed_path_sum(cs, theta, static_cast<int>(c), n) - want).cheb();
      if (ed > row.enum_discrepancy) row.enum_discrepancy = ed;
    }
    if (row.matrix_discrepancy > report.max_matrix)
      report.max_matrix = row.matrix_discrepancy;
    if (row.enum_discrepancy > report.max_enum)
      report.max_enum = row.enum_discrepancy;
    report.rows.push_back(row);
  }
  return report;
}

// x_n = A_vN^n x0 / |A_vN^n x0|_1, computed with per-step normalization.
template <typename S>
std::vector<std::vector<S>> vertex_trajectory(const IntMatrix& a,
                                              const SpectralData<S>& sd,
                                              const S& d, std::vector<S> x0,
                                              int n) {
  if (x0.size() != a.rows())
    throw ValidationError("x0 has the wrong dimension");
  S sum(0);
  for (const S& v : x0) {
    if (v < S(0) - default_trace_tol<S>())
      throw ValidationError("x0 must be nonnegative");
    sum += v;
  }
  if (sabs(sum - S(1)) > default_trace_tol<S>())
    throw ValidationError("x0 must have 1-norm 1");
  Matrix<S> avn = von_neumann_matrix(a, sd, d);
  std::vector<std::vector<S>> out{x0};
  std::vector<S> x = std::move(x0);
  for (int step = 0; step < n; ++step) {
    x = avn.apply(x);
    S s = vec_one_norm(x);
    for (S& v : x) v = v / s;
    out.push_back(x);
  }
  return out;
}

}  // namespace ssact
