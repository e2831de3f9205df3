#pragma once

// State values on the spanning elements s_mu u_g s_nu^*, at supercritical
// discounts and at the critical inverse temperature.

#include "ssact/trace.hpp"

namespace ssact {

struct SpanningElement {
  Path mu;
  Word g;
  Path nu;
};

// Requires s(mu) = t(g) and s(nu) = d(g); throws ValidationError otherwise.
inline SpanningElement make_spanning_element(const ActionTable& t, Path mu,
                                             Word g, Path nu) {
  std::vector<std::string> issues;
  if (mu.source != t.terminus(g))
    issues.push_back("malformed element: s(mu) != t(g)");
  if (nu.source != t.domain(g))
    issues.push_back("malformed element: s(nu) != d(g)");
  if (!issues.empty()) throw ValidationError(issues);
  return SpanningElement{std::move(mu), std::move(g), std::move(nu)};
}

// Psi_{beta,tau}(s_mu u_g s_nu^*): zero unless mu = nu, and otherwise
// d^{|mu|} Z^{-1} ((I - dM)^{-1} y)[g].  The inner series runs over paths
// from s(mu) = d(g), which is exactly the class's own domain, so the closed
// matrix form applies unchanged.
template <typename S>
Cx<S> psi_eval(const ChiEngine<S>& eng, const TraceVector<S>& tau,
               const SpanningElement& el) {
  tau.require_valid(eng.closure(), default_trace_tol<S>());
  if (!(el.mu == el.nu)) return Cx<S>();
  auto cls = eng.closure().find_class(el.g);
  if (!cls)
    throw ValidationError(
        "element class '" + eng.closure().table().word_to_string(el.g) +
        "' is not in the closure; seed the closure with it");
  TraceVector<S> chi = eng.apply(tau);
  return chi.values[*cls].scaled(
      spow(eng.discount(), static_cast<long>(el.mu.length())));
}

template <typename S>
Cx<S> psi_eval(const ClosureSet& cs, const SpectralData<S>& sd, const S& d,
               const TraceVector<S>& tau, const SpanningElement& el) {
  return psi_eval(ChiEngine<S>(cs, sd, d), tau, el);
}

// Value of the critical-temperature state on a spanning element:
// rho^{-|mu|} c_g when mu = nu (and 0 otherwise), with c_g taken from the
// eigen fixed point when solvable and from the census otherwise; both are
// reported.
template <typename S>
struct CriticalValue {
  S value{};
  std::optional<S> theta_value;
  S census_value{};
  S census_spread{};
};

template <typename S>
CriticalValue<S> critical_psi_eval(const ClosureSet& cs,
                                   const SpectralData<S>& sd,
                                   const SpanningElement& el, int depth = 12,
                                   int guard = kDefaultDepthGuard) {
  CriticalValue<S> cv;
  if (!(el.mu == el.nu)) return cv;
  auto cls = cs.find_class(el.g);
  if (!cls)
    throw ValidationError("element class '" +
                          cs.table().word_to_string(el.g) +
                          "' is not in the closure; seed the closure with it");
  const auto& info = cs.cls(*cls);
  if (info.domain != info.terminus) return cv;  // unreachable when mu = nu

  CgEstimate<S> census = compute_cg(cs, sd, *cls, depth, guard);
  cv.census_value = census.value;
  cv.census_spread = census.spread;
  try {
    TraceVector<S> theta = fixed_point_eigen(cs, sd);
    cv.theta_value = theta.values[*cls].re;
  } catch (const ComputeError&) {
  }
  S cg = cv.theta_value ? *cv.theta_value : cv.census_value;
  cv.value = cg / spow(sd.rho, static_cast<long>(el.mu.length()));
  return cv;
}

}  // namespace ssact
