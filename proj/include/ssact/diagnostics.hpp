#pragma once

// Censuses of fixed paths, the contraction bound alpha, and convergence-rate
// reporting for iteration runs.
//
// G^k_g(v): length-k paths into v fixed by g.  F^k_g(v): those whose
// restriction is a unit.  Counts come from powers of the restriction matrix
// M; the weighted residual sum_v |G \ F| m_v drives the contraction bound.

#include <sstream>

#include "ssact/trace.hpp"

namespace ssact {

template <typename S>
struct CensusRow {
  int k = 0;
  std::vector<BigInt> g_counts;  // per vertex, |G^k_g(v)|
  std::vector<BigInt> f_counts;  // per vertex, |F^k_g(v)|
  S residual{};                  // sum_v |G \ F|(v) m_v
};

namespace detail {

// Row of M^k at the given class, exact integer counts.
inline std::vector<BigInt> census_row(const ClosureSet& cs, int cls, int k) {
  Matrix<BigInt> m = matrix_from_int<BigInt>(cs.M());
  std::vector<BigInt> row(cs.size(), BigInt(0));
  row[cls] = 1;
  for (int i = 0; i < k; ++i) row = m.apply_left(row);
  return row;
}

// The same row by explicit enumeration of fixed paths through the closure
// transitions; the oracle side of the census cross-check.
inline std::vector<BigInt> census_row_enumerated(const ClosureSet& cs,
                                                 int cls, int k) {
  std::vector<BigInt> row(cs.size(), BigInt(0));
  std::function<void(int, int)> walk = [&](int c, int remaining) {
    if (remaining == 0) {
      row[c] += 1;
      return;
    }
    for (int e : cs.graph().out_edges(cs.cls(c).domain)) {
      const auto& tr = cs.transition(c, e);
      if (tr.out_edge == e) walk(tr.cls, remaining - 1);
    }
  };
  walk(cls, k);
  return row;
}

}  // namespace detail

template <typename S>
CensusRow<S> census_GF(const ClosureSet& cs, const SpectralData<S>& sd,
                       int cls, int k, int guard = kDefaultDepthGuard) {
  const auto& info = cs.cls(cls);
  if (info.domain != info.terminus)
    throw ValidationError("census needs d(g) = t(g) for class " + info.key);
  if (k < 0 || k > guard)
    throw ValidationError("census depth " + std::to_string(k) +
                          " outside [0, guard=" + std::to_string(guard) +
                          "]");
  std::vector<BigInt> row = detail::census_row(cs, cls, k);
  if (k <= 6 && row != detail::census_row_enumerated(cs, cls, k))
    throw InternalError("transfer-matrix census disagrees with path "
                        "enumeration");
  const int nv = static_cast<int>(cs.graph().vertex_count());
  CensusRow<S> out;
  out.k = k;
  out.g_counts.assign(nv, BigInt(0));
  out.f_counts.assign(nv, BigInt(0));
  for (std::size_t h = 0; h < cs.size(); ++h) {
    if (row[h] == 0) continue;
    int v = cs.cls(static_cast<int>(h)).domain;
    out.g_counts[v] += row[h];
    if (cs.cls(static_cast<int>(h)).is_unit) out.f_counts[v] += row[h];
  }
  out.residual = S(0);
  for (int v = 0; v < nv; ++v)
    out.residual +=
        scalar_from_bigint<S>(out.g_counts[v] - out.f_counts[v]) * sd.m[v];
  return out;
}

// sum_{k<=K} d^k sum_v |G^k \ F^k|(v) m_v plus a certified tail, as a ratio
// to rho(A_vN) m_{d(g)}.  The tail is exactly zero once the census row has
// no non-unit mass left (non-unit classes are never re-entered from units);
// otherwise the geometric bound sum_{k>K} (d rho)^k m_{d(g)} is added.
template <typename S>
struct AlphaBound {
  S value{};
  bool certified = false;
  S truncation{};
  S tail{};
  bool tail_exact_zero = false;
  int K = 0;
};

template <typename S>
AlphaBound<S> alpha_bound(const ClosureSet& cs, const SpectralData<S>& sd,
                          const S& d, int cls, int K = 12) {
  require_supercritical(d, sd.rho);
  Matrix<BigInt> m = matrix_from_int<BigInt>(cs.M());
  std::vector<BigInt> row(cs.size(), BigInt(0));
  row[cls] = 1;
  AlphaBound<S> ab;
  ab.K = K;
  S dk(1);
  for (int k = 0; k <= K; ++k) {
    S resid(0);
    BigInt mass(0);
    for (std::size_t h = 0; h < cs.size(); ++h) {
      if (cs.cls(static_cast<int>(h)).is_unit || row[h] == 0) continue;
      resid += scalar_from_bigint<S>(row[h]) *
               sd.m[cs.cls(static_cast<int>(h)).domain];
      mass += row[h];
    }
    ab.truncation += dk * resid;
    if (mass == 0) {
      ab.tail_exact_zero = true;
      break;
    }
    if (k < K) {
      row = m.apply_left(row);
      dk = dk * d;
    }
  }
  S dr = d * sd.rho;
  S md = sd.m[cs.cls(cls).domain];
  ab.tail = ab.tail_exact_zero ? S(0)
                               : spow(dr, static_cast<long>(K) + 1) /
                                     (S(1) - dr) * md;
  S bound = md / (S(1) - dr);  // rho(A_vN) m_{d(g)}
  ab.value = (ab.truncation + ab.tail) / bound;
  ab.certified = ab.truncation + ab.tail < bound;
  return ab;
}

// Maximum alpha over all classes (the uniform contraction constant).
template <typename S>
AlphaBound<S> alpha_bound_uniform(const ClosureSet& cs,
                                  const SpectralData<S>& sd, const S& d,
                                  int K = 12) {
  AlphaBound<S> best;
  bool first = true;
  for (std::size_t c = 0; c < cs.size(); ++c) {
    AlphaBound<S> ab = alpha_bound(cs, sd, d, static_cast<int>(c), K);
    if (first || ab.value > best.value) {
      best = ab;
      first = false;
    }
    if (!ab.certified) best.certified = false;
  }
  return best;
}

// Smallest k in [1, K] with sum_v |G^k \ F^k|(v) m_v <= (rho^k - 1) m_{d(g)}
// (the inequality behind the contraction estimate, tested at n = 1).
template <typename S>
std::optional<int> k_witness(const ClosureSet& cs, const SpectralData<S>& sd,
                             int cls, int K = 12) {
  Matrix<BigInt> m = matrix_from_int<BigInt>(cs.M());
  std::vector<BigInt> row(cs.size(), BigInt(0));
  row[cls] = 1;
  S rho_pow(1);
  S md = sd.m[cs.cls(cls).domain];
  for (int k = 1; k <= K; ++k) {
    row = m.apply_left(row);
    rho_pow = rho_pow * sd.rho;
    S resid(0);
    for (std::size_t h = 0; h < cs.size(); ++h) {
      if (cs.cls(static_cast<int>(h)).is_unit || row[h] == 0) continue;
      resid += scalar_from_bigint<S>(row[h]) *
               sd.m[cs.cls(static_cast<int>(h)).domain];
    }
    if (!(resid > (rho_pow - S(1)) * md)) return k;
  }
  return std::nullopt;
}

struct ClassRate {
  int cls = -1;
  std::string key;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  bool constant = false;  // deltas at or below the floor throughout
  bool flagged = false;   // some tail ratio exceeded 1
};

struct ConvergenceReport {
  bool already_converged = false;
  std::vector<ClassRate> rates;
  double z_slope = std::numeric_limits<double>::quiet_NaN();
  std::string csv;  // columns: step,class,delta,ratio,Z
};

// Least-squares geometric rates of the recorded deltas per class, tail-ratio
// flags, and the step-indexed CSV.  Needs at least 5 steps.
template <typename S>
ConvergenceReport convergence_report(const IterationReport<S>& rep,
                                     const SpectralData<S>& sd,
                                     const ClosureSet& cs,
                                     double floor = 1e-14) {
  if (rep.steps() < 5)
    throw ValidationError("insufficient data: need at least 5 iteration "
                          "steps, have " + std::to_string(rep.steps()));
  ConvergenceReport out;
  const std::size_t n_steps = rep.steps();
  std::ostringstream csv;
  csv << "step,class,delta,ratio,Z\n";

  std::size_t first = rep.deltas_vs_theta ? 0 : 1;
  bool all_constant = true;
  for (std::size_t c = 0; c < cs.size(); ++c) {
    std::vector<double> d;
    for (std::size_t n = first; n < n_steps; ++n)
      d.push_back(to_double(rep.deltas[n][c]));
    ClassRate rate;
    rate.cls = static_cast<int>(c);
    rate.key = cs.cls(static_cast<int>(c)).key;
    GeomFit fit = fit_log_decay(d, floor);
    rate.slope = fit.slope;
    rate.ratio = fit.ratio;
    rate.constant = fit.points == 0;
    if (!rate.constant) all_constant = false;
    // tail: the last third of the run (at least 3 consecutive pairs)
    std::size_t tail_from = d.size() - std::min<std::size_t>(
                                           d.size(), std::max<std::size_t>(
                                                         4, d.size() / 3));
    for (std::size_t i = tail_from; i + 1 < d.size(); ++i) {
      if (d[i] > floor && d[i + 1] > floor && d[i + 1] / d[i] > 1.0)
        rate.flagged = true;
    }
    out.rates.push_back(rate);
  }
  out.already_converged = all_constant;

  {
    S rho_vn = S(1) / (S(1) - rep.discount * sd.rho);
    std::vector<double> zerr;
    for (std::size_t n = 0; n < n_steps; ++n)
      zerr.push_back(to_double(sabs(rep.Z[n] - rho_vn)));
    out.z_slope = fit_log_decay(zerr, floor).slope;
  }

  for (std::size_t n = 0; n < n_steps; ++n) {
    for (std::size_t c = 0; c < cs.size(); ++c) {
      double dn = to_double(rep.deltas[n][c]);
      csv << n << ',' << cs.cls(static_cast<int>(c)).key << ','
          << format_scalar(dn) << ',';
      if (n > first) {
        double prev = to_double(rep.deltas[n - 1][c]);
        if (prev > floor)
          csv << format_scalar(dn / prev);
      }
      csv << ',' << format_scalar(to_double(rep.Z[n])) << '\n';
    }
  }
  out.csv = csv.str();
  return out;
}

}  // namespace ssact
