#pragma once

// Instance files: UTF-8 JSON with a graph, a generator table, and optional
// defaults (discount, tolerance, depth guards).  Trace init files map class
// keys to values.

#include <string>

#include "ssact/action.hpp"
#include "ssact/trace.hpp"

namespace ssact {

struct InstanceDefaults {
  std::optional<Discount> discount;
  double tol = 1e-10;
  int depth_guard = kDefaultDepthGuard;
  std::size_t closure_bound = kDefaultClosureBound;
  int validate_depth = 4;
};

struct Instance {
  RawGraph graph;
  RawActionTable table;
  InstanceDefaults defaults;
};

Instance parse_instance(const std::string& json_text);
Instance load_instance(const std::string& path);
std::string serialize_instance(const Instance& inst);

struct ValidatedInstance {
  DirectedMultigraph graph;
  ActionTable table;
  InstanceDefaults defaults;
};

ValidatedInstance validate_instance(const Instance& inst);

// Values are numbers, "p/q" strings, or [re, im] pairs.  Unspecified
// classes default to 0; unspecified units default to 1/|E^0|.
template <typename S>
TraceVector<S> parse_trace_values(
    const std::vector<std::pair<std::string, Cx<Rational>>>& entries,
    const ClosureSet& cs);

// Parses the JSON text of an init file into key/value pairs.
std::vector<std::pair<std::string, Cx<Rational>>> parse_trace_file(
    const std::string& json_text);

template <typename S>
TraceVector<S> parse_trace_values(
    const std::vector<std::pair<std::string, Cx<Rational>>>& entries,
    const ClosureSet& cs) {
  TraceVector<S> tau = TraceVector<S>::zero(cs);
  std::vector<bool> given(cs.size(), false);
  for (const auto& [key, val] : entries) {
    auto cls = cs.find_class(key);
    if (!cls)
      throw ValidationError("trace file names unknown class '" + key + "'");
    if constexpr (std::is_same_v<S, double>) {
      tau.values[*cls] = Cx<S>(to_double(val.re), to_double(val.im));
    } else {
      tau.values[*cls] = val;
    }
    given[*cls] = true;
  }
  S u = S(1) / S(static_cast<long long>(cs.graph().vertex_count()));
  for (int v = 0; v < static_cast<int>(cs.graph().vertex_count()); ++v)
    if (!given[cs.unit_class(v)]) tau.values[cs.unit_class(v)] = Cx<S>(u);
  return tau;
}

}  // namespace ssact
