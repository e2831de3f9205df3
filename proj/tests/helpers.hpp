#pragma once

// Shared fixtures and brute-force oracles for the test suites.  The oracles
// here deliberately avoid the transfer-matrix machinery: censuses walk real
// paths through act/restrict on words, so they can certify the closed forms.

#include <map>
#include <random>
#include <string>

#include "ssact/diagnostics.hpp"
#include "ssact/instance.hpp"
#include "ssact/kms.hpp"

namespace ssact::testing {

inline RawGraph raw_graph(
    std::vector<std::string> vertices,
    std::vector<std::array<std::string, 3>> edges /* name, range, source */) {
  RawGraph g;
  g.vertices = std::move(vertices);
  for (auto& e : edges) g.edges.push_back({e[0], e[1], e[2]});
  return g;
}

inline DirectedMultigraph two_loop_graph() {
  return validate_graph(
      raw_graph({"v"}, {{"0", "v", "v"}, {"1", "v", "v"}}));
}

inline DirectedMultigraph two_cycle_graph() {
  return validate_graph(
      raw_graph({"v", "w"}, {{"e1", "v", "w"}, {"e2", "w", "v"}}));
}

inline std::string instance_path(const std::string& name) {
  return std::string(SSACT_INSTANCE_DIR) + "/" + name + ".json";
}

inline ValidatedInstance load_corpus(const std::string& name) {
  return validate_instance(load_instance(instance_path(name)));
}

inline std::vector<std::string> corpus_names() {
  return {"odometer", "swap", "partial_fixing", "two_cycle_trivial",
          "two_vertex"};
}

// Closure seeded with every generator (the whole presented groupoid).
inline ClosureSet closure_all(const ValidatedInstance& vi,
                              std::size_t bound = kDefaultClosureBound) {
  std::vector<Word> seeds;
  for (int g = 0; g < static_cast<int>(vi.table.generator_count()); ++g) {
    Word w;
    w.letters.push_back(Letter{g, false});
    seeds.push_back(w);
  }
  return closure(vi.table, seeds, bound);
}

inline ClosureSet closure_of(const ValidatedInstance& vi,
                             const std::string& word_text) {
  return closure(vi.table, {vi.table.parse_word(word_text)},
                 kDefaultClosureBound);
}

// --- oracles -------------------------------------------------------------

// Per-vertex G/F counts by enumerating real paths and acting on them with
// the word machinery (independent of ClosureSet transitions and of M).
struct BruteCensus {
  std::vector<long long> g_counts;
  std::vector<long long> f_counts;
};

inline BruteCensus brute_census(const ActionTable& t, const Word& w, int k) {
  const auto& g = t.graph();
  BruteCensus out;
  out.g_counts.assign(g.vertex_count(), 0);
  out.f_counts.assign(g.vertex_count(), 0);
  for_each_path(g, t.domain(w), k, [&](const Path& mu) {
    if (!(act(t, w, mu) == mu)) return;
    out.g_counts[mu.source] += 1;
    if (is_trivial(t, restrict(t, w, mu))) out.f_counts[mu.source] += 1;
  });
  return out;
}

// Depth-K truncation of Z(beta, tau) by path enumeration.
template <typename S>
S z_series_truncated(const ClosureSet& cs, const TraceVector<S>& tau,
                     const S& d, int max_k) {
  auto x = tau.unit_vector(cs);
  S total(0), dk(1);
  for (int k = 0; k <= max_k; ++k) {
    S layer(0);
    for_each_path(cs.graph(), std::nullopt, k,
                  [&](const Path& mu) { layer += x[mu.source]; });
    total += dk * layer;
    dk = dk * d;
  }
  return total;
}

// Depth-K truncation of the un-normalized chi numerator at a class: the sum
// over fixed paths of tau at the restriction's class, via word actions.
template <typename S>
Cx<S> chi_series_truncated(const ClosureSet& cs, const TraceVector<S>& tau,
                           const S& d, int cls, int max_k) {
  const ActionTable& t = cs.table();
  const Word w = cs.cls(cls).rep;
  Cx<S> total;
  S dk(1);
  for (int k = 0; k <= max_k; ++k) {
    Cx<S> layer;
    for_each_path(t.graph(), t.domain(w), k, [&](const Path& mu) {
      if (!(act(t, w, mu) == mu)) return;
      auto h = cs.find_class(restrict(t, w, mu));
      if (!h) throw InternalError("restriction class missing from closure");
      layer = layer + tau.values[*h];
    });
    total = total + layer.scaled(dk);
    dk = dk * d;
  }
  return total;
}

// Tail bound for either series truncated after depth K:
// sum_{k>K} d^k #paths * sup|tau| <= l * (d rho)^{K+1} / (1 - d rho),
// with l = max_v 1/m_v (so #d(g)E^k <= l rho^k m_{d(g)} <= l rho^k).
template <typename S>
S series_tail_bound(const SpectralData<S>& sd, const S& d, int max_k) {
  S l(0);
  for (const S& mv : sd.m)
    if (S(1) / mv > l) l = S(1) / mv;
  S dr = d * sd.rho;
  return l * spow(dr, static_cast<long>(max_k) + 1) / (S(1) - dr);
}

// --- random inputs -------------------------------------------------------

inline IntMatrix random_irreducible_matrix(std::mt19937& rng, int max_n = 5,
                                           int max_entry = 3) {
  std::uniform_int_distribution<int> size(1, max_n);
  const int n = size(rng);
  IntMatrix a(n, n, 0);
  std::uniform_int_distribution<int> entry(0, max_entry);
  std::uniform_int_distribution<int> coin(0, 99);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (coin(rng) < 45) a(i, j) = entry(rng);
  // a full cycle guarantees irreducibility
  for (int i = 0; i < n; ++i)
    if (a(i, (i + 1) % n) == 0) a(i, (i + 1) % n) = 1;
  return a;
}

inline RawGraph random_graph(std::mt19937& rng, int max_v = 4, int max_e = 6,
                             bool strongly_connected = false) {
  std::uniform_int_distribution<int> nv_dist(1, max_v);
  const int nv = nv_dist(rng);
  RawGraph g;
  for (int v = 0; v < nv; ++v) g.vertices.push_back("v" + std::to_string(v));
  std::uniform_int_distribution<int> ne_dist(strongly_connected ? nv : 1,
                                             std::max(nv, max_e));
  int ne = ne_dist(rng);
  std::uniform_int_distribution<int> pick(0, nv - 1);
  int id = 0;
  if (strongly_connected)
    for (int v = 0; v < nv; ++v, ++id)
      g.edges.push_back({"e" + std::to_string(id),
                         g.vertices[(v + 1) % nv], g.vertices[v]});
  while (static_cast<int>(g.edges.size()) < ne) {
    g.edges.push_back({"e" + std::to_string(id++),
                       g.vertices[pick(rng)], g.vertices[pick(rng)]});
  }
  return g;
}

// Random valid trace vector: positive normalized units, values on diagonal
// classes bounded via |re| + |im| <= min(x_d, x_t) (which implies the
// Cauchy-Schwarz bound), conjugate-symmetric, zero off the diagonal.
inline TraceVector<double> random_trace(const ClosureSet& cs,
                                        std::mt19937& rng,
                                        bool allow_zero_units = false) {
  auto tau = TraceVector<double>::zero(cs);
  const int nv = static_cast<int>(cs.graph().vertex_count());
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::uniform_int_distribution<int> coin(0, 3);
  std::vector<double> x(nv);
  double sum = 0;
  for (int v = 0; v < nv; ++v) {
    x[v] = (allow_zero_units && nv > 1 && coin(rng) == 0) ? 0.0 : unif(rng);
    sum += x[v];
  }
  if (sum == 0) {
    x[0] = 1.0;
    sum = 1.0;
  }
  for (int v = 0; v < nv; ++v)
    tau.values[cs.unit_class(v)] = Cx<double>(x[v] / sum);
  std::uniform_real_distribution<double> signed_unif(-1.0, 1.0);
  for (int c : cs.diagonal_classes()) {
    if (cs.cls(c).is_unit || c > cs.cls(c).inverse) continue;
    double cap = std::min(tau.values[cs.unit_class(cs.cls(c).domain)].re,
                          tau.values[cs.unit_class(cs.cls(c).terminus)].re);
    if (c == cs.cls(c).inverse) {
      tau.values[c] = Cx<double>(signed_unif(rng) * cap);
    } else {
      double a = signed_unif(rng), b = signed_unif(rng);
      double norm = std::fabs(a) + std::fabs(b);
      if (norm > 1.0) {
        a /= norm;
        b /= norm;
      }
      tau.values[c] = Cx<double>(a * cap, b * cap);
      tau.values[cs.cls(c).inverse] = tau.values[c].conj();
    }
  }
  return tau;
}

// Random nonnegative vertex vector with 1-norm 1 (occasionally with zeros).
inline std::vector<double> random_vertex_vector(std::size_t n,
                                                std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 3);
  std::vector<double> x(n);
  double sum = 0;
  for (auto& v : x) {
    v = (n > 1 && coin(rng) == 0) ? 0.0 : unif(rng);
    sum += v;
  }
  if (sum == 0) {
    x[0] = 1.0;
    sum = 1.0;
  }
  for (auto& v : x) v /= sum;
  return x;
}

}  // namespace ssact::testing
