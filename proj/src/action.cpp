#include "ssact/action.hpp"

#include <algorithm>
#include <set>

namespace ssact {

namespace {

bool label_ok(const std::string& label) {
  if (label.empty()) return false;
  for (char c : label)
    if (c == '.' || c == '^' || c == ',' || c == '"' || c == ' ' ||
        c == '\t' || c == '\n')
      return false;
  return true;
}

std::vector<int> encode(const Word& w) {
  std::vector<int> k;
  k.reserve(w.letters.size());
  for (const Letter& l : w.letters) k.push_back(l.gen * 2 + (l.inv ? 1 : 0));
  return k;
}

}  // namespace

std::optional<int> ActionTable::generator_id(const std::string& name) const {
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

const ActionTable::Transition& ActionTable::transition(int g, int edge) const {
  auto it = gens_[g].trans.find(edge);
  if (it == gens_[g].trans.end())
    throw ValidationError("edge '" + graph_.edge_label(edge) +
                          "' is not in the domain of generator '" +
                          gens_[g].name + "'");
  return it->second;
}

int ActionTable::preimage_edge(int g, int edge) const {
  auto it = gens_[g].preimage.find(edge);
  if (it == gens_[g].preimage.end())
    throw ValidationError("edge '" + graph_.edge_label(edge) +
                          "' is not in the image of generator '" +
                          gens_[g].name + "'");
  return it->second;
}

int ActionTable::domain(const Word& w) const {
  return w.empty() ? w.unit_vertex : domain(w.letters.back());
}

int ActionTable::terminus(const Word& w) const {
  return w.empty() ? w.unit_vertex : terminus(w.letters.front());
}

Word ActionTable::unit_word(int vertex) const {
  Word w;
  w.unit_vertex = vertex;
  return w;
}

Word ActionTable::reduce(Word w) const {
  int dv = domain(w);
  // stack-based free reduction of adjacent inverse pairs
  std::vector<Letter> out;
  for (const Letter& l : w.letters) {
    if (!out.empty() && out.back().gen == l.gen && out.back().inv != l.inv)
      out.pop_back();
    else
      out.push_back(l);
  }
  Word r;
  r.letters = std::move(out);
  r.unit_vertex = r.letters.empty() ? dv : -1;
  return r;
}

Word ActionTable::compose(const Word& h, const Word& g) const {
  if (domain(h) != terminus(g))
    throw ValidationError("words not composable: d(" + word_to_string(h) +
                          ") != t(" + word_to_string(g) + ")");
  Word w;
  if (h.empty() && g.empty()) {
    w.unit_vertex = g.unit_vertex;
    return w;
  }
  w.letters = h.letters;
  w.letters.insert(w.letters.end(), g.letters.begin(), g.letters.end());
  return reduce(std::move(w));
}

std::string ActionTable::word_to_string(const Word& w) const {
  if (w.empty()) return "id_" + graph_.vertex_label(w.unit_vertex);
  std::string s;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (i) s += ".";
    s += gens_[w.letters[i].gen].name;
    if (w.letters[i].inv) s += "^-1";
  }
  return s;
}

Word ActionTable::parse_word(const std::string& text) const {
  if (text.empty()) throw ValidationError("empty word text");
  struct Atom {
    bool unit;
    int vertex = -1;
    Letter letter;
  };
  std::vector<Atom> atoms;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dot = text.find('.', pos);
    std::string tok = text.substr(
        pos, dot == std::string::npos ? std::string::npos : dot - pos);
    Atom a;
    bool inv = false;
    std::string name = tok;
    if (name.size() > 3 && name.substr(name.size() - 3) == "^-1") {
      inv = true;
      name = name.substr(0, name.size() - 3);
    }
    if (auto gid = generator_id(name)) {
      a.unit = false;
      a.letter = Letter{*gid, inv};
    } else if (!inv && tok.rfind("id_", 0) == 0) {
      auto v = graph_.vertex_id(tok.substr(3));
      if (!v)
        throw ValidationError("unknown vertex in unit token '" + tok + "'");
      a.unit = true;
      a.vertex = *v;
    } else {
      throw ValidationError("unknown generator '" + tok + "' in word '" +
                            text + "'");
    }
    atoms.push_back(a);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  // chain composability: d(atom i) must equal t(atom i+1)
  auto dom = [&](const Atom& a) {
    return a.unit ? a.vertex : domain(a.letter);
  };
  auto ter = [&](const Atom& a) {
    return a.unit ? a.vertex : terminus(a.letter);
  };
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i)
    if (dom(atoms[i]) != ter(atoms[i + 1]))
      throw ValidationError("word '" + text +
                            "' is not composable at position " +
                            std::to_string(i));
  Word w;
  for (const Atom& a : atoms)
    if (!a.unit) w.letters.push_back(a.letter);
  if (w.letters.empty()) w.unit_vertex = atoms.front().vertex;
  return reduce(std::move(w));
}

RawActionTable ActionTable::to_raw() const {
  RawActionTable raw;
  for (const Gen& gen : gens_) {
    RawGenerator rg;
    rg.name = gen.name;
    rg.domain = graph_.vertex_label(gen.domain);
    rg.terminus = graph_.vertex_label(gen.terminus);
    for (const auto& [edge, tr] : gen.trans) {
      RawTransition rt;
      rt.out = graph_.edge_label(tr.out_edge);
      for (const Letter& l : tr.restriction.letters)
        rt.restriction.push_back(gens_[l.gen].name + (l.inv ? "^-1" : ""));
      rg.transitions.emplace_back(graph_.edge_label(edge), rt);
    }
    raw.generators.push_back(std::move(rg));
  }
  return raw;
}

Word invert(const Word& w) {
  Word r;
  r.unit_vertex = w.unit_vertex;
  r.letters.assign(w.letters.rbegin(), w.letters.rend());
  for (Letter& l : r.letters) l.inv = !l.inv;
  return r;
}

ActionTable::Transition step_edge(const ActionTable& t, const Word& w,
                                  int edge) {
  const DirectedMultigraph& g = t.graph();
  if (g.range(edge) != t.domain(w))
    throw ValidationError("domain/range mismatch: r(" + g.edge_label(edge) +
                          ") != d(" + t.word_to_string(w) + ")");
  if (w.empty()) {
    ActionTable::Transition tr;
    tr.out_edge = edge;
    tr.restriction = t.unit_word(g.source(edge));
    return tr;
  }
  const std::size_t n = w.letters.size();
  std::vector<Word> parts(n);
  int cur = edge;
  for (std::size_t idx = n; idx-- > 0;) {
    const Letter& l = w.letters[idx];
    if (!l.inv) {
      const auto& tr = t.transition(l.gen, cur);
      parts[idx] = tr.restriction;
      cur = tr.out_edge;
    } else {
      int pre = t.preimage_edge(l.gen, cur);
      parts[idx] = invert(t.transition(l.gen, pre).restriction);
      cur = pre;
    }
  }
  Word rest;
  for (const Word& p : parts)
    rest.letters.insert(rest.letters.end(), p.letters.begin(),
                        p.letters.end());
  rest.unit_vertex = rest.letters.empty() ? g.source(edge) : -1;
  ActionTable::Transition out;
  out.out_edge = cur;
  out.restriction = t.reduce(std::move(rest));
  if (out.restriction.empty()) out.restriction.unit_vertex = g.source(edge);
  return out;
}

Path act(const ActionTable& t, const Word& w, const Path& mu) {
  if (t.domain(w) != mu.range)
    throw ValidationError("domain/range mismatch: d(" + t.word_to_string(w) +
                          ") != r(mu)");
  if (mu.edges.empty()) return empty_path(t.terminus(w));
  Word cur = w;
  std::vector<int> out;
  out.reserve(mu.edges.size());
  for (int e : mu.edges) {
    auto st = step_edge(t, cur, e);
    out.push_back(st.out_edge);
    cur = st.restriction;
  }
  return make_path(t.graph(), out);
}

Word restrict(const ActionTable& t, const Word& w, const Path& mu) {
  if (t.domain(w) != mu.range)
    throw ValidationError("domain/range mismatch: d(" + t.word_to_string(w) +
                          ") != r(mu)");
  Word cur = t.reduce(w);
  for (int e : mu.edges) cur = step_edge(t, cur, e).restriction;
  return cur;
}

bool is_trivial(const ActionTable& t, const Word& w0, std::size_t bound) {
  Word w = t.reduce(w0);
  if (t.domain(w) != t.terminus(w)) return false;
  if (w.empty()) return true;
  std::set<std::vector<int>> seen;
  std::vector<Word> queue;
  seen.insert(encode(w));
  queue.push_back(w);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    Word u = queue[qi];
    if (t.domain(u) != t.terminus(u)) return false;
    for (int e : t.graph().out_edges(t.domain(u))) {
      auto st = step_edge(t, u, e);
      if (st.out_edge != e) return false;
      if (st.restriction.empty()) continue;
      if (seen.insert(encode(st.restriction)).second) {
        if (seen.size() > bound)
          throw ComputeError(
              "triviality test for '" + t.word_to_string(w0) +
              "' exceeded the closure bound " + std::to_string(bound) +
              "; not certified finite-state within bound");
        queue.push_back(st.restriction);
      }
    }
  }
  return true;
}

std::vector<std::string> faithfulness_lint(const ActionTable& t, int depth) {
  std::vector<std::string> warnings;
  const DirectedMultigraph& g = t.graph();
  const int n = static_cast<int>(t.generator_count());
  auto same_action = [&](const Word& a, const Word& b) {
    for (int k = 1; k <= depth; ++k) {
      bool differ = false;
      for_each_path(g, t.domain(a), k, [&](const Path& mu) {
        if (differ) return;
        if (!(act(t, a, mu) == act(t, b, mu))) differ = true;
      });
      if (differ) return false;
    }
    return true;
  };
  for (int i = 0; i < n; ++i) {
    Word wi;
    wi.letters.push_back(Letter{i, false});
    if (t.generator_domain(i) == t.generator_terminus(i)) {
      if (same_action(wi, t.unit_word(t.generator_domain(i))))
        warnings.push_back("generator '" + t.generator_name(i) +
                           "' acts like a unit on all paths of length <= " +
                           std::to_string(depth));
    }
    for (int j = i + 1; j < n; ++j) {
      if (t.generator_domain(i) != t.generator_domain(j) ||
          t.generator_terminus(i) != t.generator_terminus(j))
        continue;
      Word wj;
      wj.letters.push_back(Letter{j, false});
      if (same_action(wi, wj))
        warnings.push_back("generators '" + t.generator_name(i) + "' and '" +
                           t.generator_name(j) +
                           "' act identically on all paths of length <= " +
                           std::to_string(depth));
    }
  }
  return warnings;
}

ActionTable validate_action(const DirectedMultigraph& graph,
                            const RawActionTable& raw, int depth) {
  std::vector<std::string> issues;

  ActionTable table;
  table.graph_ = graph;

  // Pass 1: names and endpoints, so restriction words can reference any
  // generator regardless of declaration order.
  std::set<std::string> names;
  for (const auto& rg : raw.generators) {
    if (!label_ok(rg.name))
      issues.push_back("generator name '" + rg.name +
                       "' is empty or contains a reserved character");
    if (rg.name.rfind("id_", 0) == 0)
      issues.push_back("generator name '" + rg.name +
                       "' is reserved (id_ prefix denotes units)");
    if (!names.insert(rg.name).second)
      issues.push_back("duplicate generator name '" + rg.name + "'");
    ActionTable::Gen gen;
    gen.name = rg.name;
    if (auto v = graph.vertex_id(rg.domain))
      gen.domain = *v;
    else
      issues.push_back("generator '" + rg.name +
                       "' has undeclared domain vertex '" + rg.domain + "'");
    if (auto v = graph.vertex_id(rg.terminus))
      gen.terminus = *v;
    else
      issues.push_back("generator '" + rg.name +
                       "' has undeclared terminus vertex '" + rg.terminus +
                       "'");
    table.gens_.push_back(std::move(gen));
  }
  if (!issues.empty()) throw ValidationError(issues);

  // Pass 2: transitions.
  for (std::size_t gi = 0; gi < raw.generators.size(); ++gi) {
    const auto& rg = raw.generators[gi];
    auto& gen = table.gens_[gi];
    const auto& dom_edges = graph.out_edges(gen.domain);
    const auto& ter_edges = graph.out_edges(gen.terminus);

    std::set<int> provided;
    for (const auto& [edge_name, rt] : rg.transitions) {
      auto e = graph.edge_id(edge_name);
      if (!e) {
        issues.push_back("generator '" + rg.name +
                         "': transition for unknown edge '" + edge_name +
                         "'");
        continue;
      }
      if (graph.range(*e) != gen.domain) {
        issues.push_back("generator '" + rg.name + "': edge '" + edge_name +
                         "' is not in d(" + rg.name + ")E^1");
        continue;
      }
      if (!provided.insert(*e).second) {
        issues.push_back("generator '" + rg.name +
                         "': duplicate transition for edge '" + edge_name +
                         "'");
        continue;
      }
      ActionTable::Transition tr;
      auto out = graph.edge_id(rt.out);
      if (!out) {
        issues.push_back("generator '" + rg.name + "': unknown output edge '" +
                         rt.out + "'");
        continue;
      }
      tr.out_edge = *out;
      if (graph.range(*out) != gen.terminus)
        issues.push_back("generator '" + rg.name + "': endpoint mismatch: r(" +
                         rg.name + "." + edge_name + ") = r(" + rt.out +
                         ") != t(" + rg.name + ")");
      // restriction word
      Word rest;
      bool word_ok = true;
      for (const std::string& tok : rt.restriction) {
        bool inv = false;
        std::string name = tok;
        if (name.size() > 3 && name.substr(name.size() - 3) == "^-1") {
          inv = true;
          name = name.substr(0, name.size() - 3);
        }
        auto rid = table.generator_id(name);
        if (!rid) {
          issues.push_back("generator '" + rg.name + "', edge '" + edge_name +
                           "': unknown generator '" + tok +
                           "' in restriction word");
          word_ok = false;
          break;
        }
        rest.letters.push_back(Letter{*rid, inv});
      }
      if (!word_ok) continue;
      if (rest.letters.empty()) rest.unit_vertex = graph.source(*out);
      for (std::size_t i = 0; i + 1 < rest.letters.size(); ++i)
        if (table.domain(rest.letters[i]) !=
            table.terminus(rest.letters[i + 1])) {
          issues.push_back("generator '" + rg.name + "', edge '" + edge_name +
                           "': restriction word is not composable");
          word_ok = false;
          break;
        }
      if (!word_ok) continue;
      if (table.domain(rest) != graph.source(*e) ||
          table.terminus(rest) != graph.source(*out))
        issues.push_back("generator '" + rg.name + "', edge '" + edge_name +
                         "': restriction word has wrong d/t (need d = s(" +
                         edge_name + "), t = s(" + rt.out + "))");
      tr.restriction = table.reduce(std::move(rest));
      if (tr.restriction.empty())
        tr.restriction.unit_vertex = graph.source(*out);
      gen.trans[*e] = std::move(tr);
    }

    for (int e : dom_edges)
      if (!provided.count(e))
        issues.push_back("generator '" + rg.name +
                         "': missing transition for edge '" +
                         graph.edge_label(e) + "'");

    // bijectivity of e -> g.e onto t(g)E^1
    std::set<int> image;
    bool injective = true;
    for (const auto& [e, tr] : gen.trans)
      if (!image.insert(tr.out_edge).second) injective = false;
    bool surjective = image.size() == ter_edges.size();
    if (provided.size() == dom_edges.size() && (!injective || !surjective))
      issues.push_back("generator '" + rg.name +
                       "': non-bijective edge action d(" + rg.name +
                       ")E^1 -> t(" + rg.name + ")E^1");
    for (const auto& [e, tr] : gen.trans) gen.preimage[tr.out_edge] = e;
  }
  if (!issues.empty()) throw ValidationError(issues);

  // Depth coherence: the induced action must stay level-wise bijective with
  // consistent endpoints up to `depth`.
  for (std::size_t gi = 0; gi < table.gens_.size(); ++gi) {
    Word w;
    w.letters.push_back(Letter{static_cast<int>(gi), false});
    const std::string& name = table.gens_[gi].name;
    for (int k = 1; k <= depth; ++k) {
      std::set<std::vector<int>> images;
      bool reported = false;
      for_each_path(graph, table.gens_[gi].domain, k, [&](const Path& mu) {
        if (reported) return;
        Path nu = act(table, w, mu);
        Word rw = restrict(table, w, mu);
        if (nu.length() != mu.length() ||
            nu.range != table.gens_[gi].terminus ||
            nu.source != table.terminus(rw)) {
          issues.push_back("generator '" + name +
                           "': endpoint incoherence on path " +
                           path_to_string(graph, mu));
          reported = true;
          return;
        }
        if (!images.insert(nu.edges).second) {
          issues.push_back("generator '" + name +
                           "': action is not injective on paths of length " +
                           std::to_string(k));
          reported = true;
        }
      });
    }
  }
  if (!issues.empty()) throw ValidationError(issues);
  return table;
}

const ClassTransition& ClosureSet::transition(int c, int edge) const {
  auto it = trans_[c].find(edge);
  if (it == trans_[c].end())
    throw ValidationError("edge '" + graph().edge_label(edge) +
                          "' is not in the domain of class '" +
                          classes_[c].key + "'");
  return it->second;
}

std::optional<int> ClosureSet::find_class(const Word& w0) const {
  Word w = table_.reduce(w0);
  int d = table_.domain(w), t = table_.terminus(w);
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].domain != d || classes_[i].terminus != t) continue;
    if (is_trivial(table_, table_.compose(w, invert(classes_[i].rep)),
                   bound_))
      return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> ClosureSet::find_class(const std::string& text) const {
  return find_class(table_.parse_word(text));
}

namespace {

void compute_bisim(std::vector<ClosureSet::ClassInfo>& classes,
                   const std::vector<std::map<int, ClassTransition>>& trans) {
  const std::size_t n = classes.size();
  std::vector<int> color(n);
  {
    std::map<std::string, int> palette;
    for (std::size_t i = 0; i < n; ++i) {
      std::string sig = std::to_string(classes[i].domain) + "|" +
                        std::to_string(classes[i].terminus);
      for (const auto& [e, tr] : trans[i])
        sig += ";" + std::to_string(e) + ">" + std::to_string(tr.out_edge);
      auto [it, fresh] =
          palette.emplace(sig, static_cast<int>(palette.size()));
      color[i] = it->second;
      (void)fresh;
    }
  }
  for (;;) {
    std::map<std::string, int> palette;
    std::vector<int> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::string sig = std::to_string(color[i]);
      for (const auto& [e, tr] : trans[i])
        sig += ";" + std::to_string(e) + ">" + std::to_string(color[tr.cls]);
      auto it = palette.emplace(sig, static_cast<int>(palette.size())).first;
      next[i] = it->second;
    }
    bool stable = next == color;
    color = std::move(next);
    if (stable) break;
  }
  for (std::size_t i = 0; i < n; ++i) classes[i].bisim = color[i];
}

}  // namespace

ClosureSet closure(const ActionTable& table, const std::vector<Word>& seeds,
                   std::size_t bound) {
  ClosureSet cs;
  cs.table_ = table;
  cs.bound_ = bound;
  const DirectedMultigraph& g = cs.table_.graph();
  auto& classes = cs.classes_;

  auto add = [&](Word w) -> int {
    w = table.reduce(std::move(w));
    int d = table.domain(w), t = table.terminus(w);
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (classes[i].domain != d || classes[i].terminus != t) continue;
      if (is_trivial(table, table.compose(w, invert(classes[i].rep)), bound))
        return static_cast<int>(i);
    }
    if (classes.size() >= bound)
      throw ComputeError("closure exceeded bound " + std::to_string(bound) +
                         "; not certified finite-state within bound");
    ClosureSet::ClassInfo info;
    info.rep = w;
    info.key = table.word_to_string(w);
    info.domain = d;
    info.terminus = t;
    info.is_unit = w.empty();
    classes.push_back(std::move(info));
    return static_cast<int>(classes.size() - 1);
  };

  cs.unit_class_.resize(g.vertex_count());
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v)
    cs.unit_class_[v] = add(table.unit_word(v));
  for (const Word& s : seeds) add(s);

  for (std::size_t i = 0; i < classes.size(); ++i) {
    const Word rep = classes[i].rep;  // copy: `classes` grows below
    int inv_id = add(invert(rep));
    classes[i].inverse = inv_id;
    if (cs.trans_.size() <= i) cs.trans_.resize(i + 1);
    for (int e : g.out_edges(classes[i].domain)) {
      auto st = step_edge(table, rep, e);
      int h = add(st.restriction);
      cs.trans_[i][e] = ClassTransition{st.out_edge, h};
    }
  }
  cs.trans_.resize(classes.size());

  const std::size_t n = classes.size();
  cs.m_ = IntMatrix(n, n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [e, tr] : cs.trans_[i])
      if (tr.out_edge == e) cs.m_(i, tr.cls) += 1;

  for (std::size_t i = 0; i < n; ++i)
    if (classes[i].domain == classes[i].terminus)
      cs.diag_.push_back(static_cast<int>(i));

  compute_bisim(classes, cs.trans_);
  // After behavioural merging the bisimulation partition must be discrete.
  {
    std::set<int> blocks;
    for (const auto& c : classes) blocks.insert(c.bisim);
    if (blocks.size() != n)
      throw InternalError("bisimulation partition is coarser than the merged "
                          "classes");
  }
  return cs;
}

}  // namespace ssact
