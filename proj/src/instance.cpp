#include "ssact/instance.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ssact {

using nlohmann::json;

namespace {

Discount discount_from_json(const json& j) {
  if (j.is_string()) return Discount::from_string(j.get<std::string>());
  if (j.is_number()) {
    // route through the decimal text so 0.25 stays exactly 1/4
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    return Discount::from_string(os.str());
  }
  throw ValidationError("defaults.discount must be a string or number");
}

Cx<Rational> value_from_json(const json& j) {
  auto one = [](const json& v) -> Rational {
    if (v.is_string()) {
      auto q = parse_rational(v.get<std::string>());
      if (!q)
        throw ValidationError("cannot parse value '" +
                              v.get<std::string>() + "'");
      return *q;
    }
    if (v.is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << v.get<double>();
      auto q = parse_rational(os.str());
      if (!q) throw ValidationError("cannot parse numeric value");
      return *q;
    }
    throw ValidationError("trace values must be numbers or p/q strings");
  };
  if (j.is_array()) {
    if (j.size() != 2)
      throw ValidationError("complex trace values are [re, im] pairs");
    return Cx<Rational>(one(j[0]), one(j[1]));
  }
  return Cx<Rational>(one(j));
}

}  // namespace

Instance parse_instance(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("instance file is not valid JSON: ") +
                          e.what());
  }
  std::vector<std::string> issues;
  Instance inst;

  if (!j.contains("graph") || !j["graph"].is_object()) {
    issues.push_back("missing \"graph\" object");
  } else {
    const json& jg = j["graph"];
    if (!jg.contains("vertices") || !jg["vertices"].is_array())
      issues.push_back("graph.vertices must be an array of strings");
    else
      for (const auto& v : jg["vertices"]) {
        if (!v.is_string())
          issues.push_back("graph.vertices entries must be strings");
        else
          inst.graph.vertices.push_back(v.get<std::string>());
      }
    if (!jg.contains("edges") || !jg["edges"].is_array())
      issues.push_back("graph.edges must be an array of objects");
    else
      for (const auto& e : jg["edges"]) {
        if (!e.is_object() || !e.contains("name") || !e.contains("range") ||
            !e.contains("source")) {
          issues.push_back(
              "graph.edges entries need name/range/source fields");
          continue;
        }
        inst.graph.edges.push_back({e["name"].get<std::string>(),
                                    e["range"].get<std::string>(),
                                    e["source"].get<std::string>()});
      }
  }

  if (j.contains("generators")) {
    if (!j["generators"].is_array())
      issues.push_back("\"generators\" must be an array");
    else
      for (const auto& jg : j["generators"]) {
        if (!jg.is_object() || !jg.contains("name") ||
            !jg.contains("domain") || !jg.contains("terminus")) {
          issues.push_back(
              "generator entries need name/domain/terminus fields");
          continue;
        }
        RawGenerator rg;
        rg.name = jg["name"].get<std::string>();
        rg.domain = jg["domain"].get<std::string>();
        rg.terminus = jg["terminus"].get<std::string>();
        if (jg.contains("transitions")) {
          if (!jg["transitions"].is_object()) {
            issues.push_back("generator '" + rg.name +
                             "': transitions must be an object");
          } else {
            for (const auto& [edge, jt] : jg["transitions"].items()) {
              RawTransition rt;
              if (!jt.is_object() || !jt.contains("out") ||
                  !jt.contains("restriction") ||
                  !jt["restriction"].is_array()) {
                issues.push_back("generator '" + rg.name + "', edge '" +
                                 edge +
                                 "': transition needs out and restriction "
                                 "(array) fields");
                continue;
              }
              rt.out = jt["out"].get<std::string>();
              for (const auto& r : jt["restriction"])
                rt.restriction.push_back(r.get<std::string>());
              rg.transitions.emplace_back(edge, std::move(rt));
            }
          }
        }
        inst.table.generators.push_back(std::move(rg));
      }
  }

  if (j.contains("defaults")) {
    const json& jd = j["defaults"];
    if (!jd.is_object()) {
      issues.push_back("\"defaults\" must be an object");
    } else {
      try {
        if (jd.contains("discount"))
          inst.defaults.discount = discount_from_json(jd["discount"]);
      } catch (const ValidationError& e) {
        issues.push_back(e.what());
      }
      if (jd.contains("tol")) inst.defaults.tol = jd["tol"].get<double>();
      if (jd.contains("depth_guard"))
        inst.defaults.depth_guard = jd["depth_guard"].get<int>();
      if (jd.contains("closure_bound"))
        inst.defaults.closure_bound = jd["closure_bound"].get<std::size_t>();
      if (jd.contains("validate_depth"))
        inst.defaults.validate_depth = jd["validate_depth"].get<int>();
    }
  }

  if (!issues.empty()) throw ValidationError(issues);
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read instance file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

std::string serialize_instance(const Instance& inst) {
  json j;
  j["graph"]["vertices"] = inst.graph.vertices;
  j["graph"]["edges"] = json::array();
  for (const auto& e : inst.graph.edges)
    j["graph"]["edges"].push_back(
        {{"name", e.name}, {"range", e.range}, {"source", e.source}});
  j["generators"] = json::array();
  for (const auto& g : inst.table.generators) {
    json jg;
    jg["name"] = g.name;
    jg["domain"] = g.domain;
    jg["terminus"] = g.terminus;
    jg["transitions"] = json::object();
    for (const auto& [edge, tr] : g.transitions) {
      jg["transitions"][edge] = {{"out", tr.out},
                                 {"restriction", tr.restriction}};
    }
    j["generators"].push_back(std::move(jg));
  }
  json jd = json::object();
  if (inst.defaults.discount) {
    if (inst.defaults.discount->exact)
      jd["discount"] = inst.defaults.discount->exact->str();
    else
      jd["discount"] = inst.defaults.discount->value;
  }
  jd["tol"] = inst.defaults.tol;
  jd["depth_guard"] = inst.defaults.depth_guard;
  jd["closure_bound"] = inst.defaults.closure_bound;
  jd["validate_depth"] = inst.defaults.validate_depth;
  j["defaults"] = std::move(jd);
  return j.dump(2) + "\n";
}

ValidatedInstance validate_instance(const Instance& inst) {
  DirectedMultigraph g = validate_graph(inst.graph);
  ActionTable t = validate_action(g, inst.table, inst.defaults.validate_depth);
  return ValidatedInstance{std::move(g), std::move(t), inst.defaults};
}

std::vector<std::pair<std::string, Cx<Rational>>> parse_trace_file(
    const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("trace file is not valid JSON: ") +
                          e.what());
  }
  if (!j.is_object())
    throw ValidationError("trace file must be a JSON object keyed by class");
  std::vector<std::pair<std::string, Cx<Rational>>> out;
  for (const auto& [key, val] : j.items())
    out.emplace_back(key, value_from_json(val));
  return out;
}

}  // namespace ssact
