#pragma once

// Automaton-presented self-similar groupoid actions on a directed graph.
//
// Elements are words over signed generators.  A word w acts on paths
// edge-by-edge through the table: w.(e nu) = (w.e)(w|_e . nu), with inverse
// letters resolved through (g^{-1})|_mu = (g|_{g^{-1}.mu})^{-1}.  Equality
// of elements is decided behaviourally: w ~ u iff w u^{-1} acts trivially,
// which under the faithfulness hypothesis is exactly equality in the
// groupoid.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssact/graph.hpp"

namespace ssact {

struct RawTransition {
  std::string out;                       // image edge
  std::vector<std::string> restriction;  // signed generator names; empty =
                                         // unit at the source of `out`
};

struct RawGenerator {
  std::string name;
  std::string domain;
  std::string terminus;
  std::vector<std::pair<std::string, RawTransition>> transitions;  // by edge
};

struct RawActionTable {
  std::vector<RawGenerator> generators;
};

struct Letter {
  int gen = -1;
  bool inv = false;
  bool operator==(const Letter& o) const {
    return gen == o.gen && inv == o.inv;
  }
};

// A groupoid element presented as a word.  Letters are stored in algebraic
// order: letters.back() applies first, letters.front() last.  The empty
// word is the unit at `unit_vertex`.
struct Word {
  std::vector<Letter> letters;
  int unit_vertex = -1;

  bool empty() const { return letters.empty(); }
  bool operator==(const Word& o) const {
    if (letters.empty() != o.letters.empty()) return false;
    if (letters.empty()) return unit_vertex == o.unit_vertex;
    return letters == o.letters;
  }
};

constexpr std::size_t kDefaultClosureBound = 10000;

class ActionTable {
 public:
  struct Transition {
    int out_edge = -1;
    Word restriction;
  };

  const DirectedMultigraph& graph() const { return graph_; }

  std::size_t generator_count() const { return gens_.size(); }
  const std::string& generator_name(int g) const { return gens_[g].name; }
  int generator_domain(int g) const { return gens_[g].domain; }
  int generator_terminus(int g) const { return gens_[g].terminus; }
  std::optional<int> generator_id(const std::string& name) const;

  // Transition of generator g at edge e (requires r(e) = d(g)).
  const Transition& transition(int g, int edge) const;
  // The unique edge e' with g . e' = edge (requires r(edge) = t(g)).
  int preimage_edge(int g, int edge) const;

  int domain(const Word& w) const;
  int terminus(const Word& w) const;
  int domain(const Letter& l) const {
    return l.inv ? gens_[l.gen].terminus : gens_[l.gen].domain;
  }
  int terminus(const Letter& l) const {
    return l.inv ? gens_[l.gen].domain : gens_[l.gen].terminus;
  }

  Word unit_word(int vertex) const;
  // Composable concatenation h . g (g applies first); free-reduced.
  Word compose(const Word& h, const Word& g) const;
  // Cancels adjacent letter/inverse pairs.
  Word reduce(Word w) const;

  std::string word_to_string(const Word& w) const;
  // Dot-separated signed generator names ("a", "a^-1", "c.s^-1"); the token
  // "id_<vertex>" denotes a unit.
  Word parse_word(const std::string& text) const;

  RawActionTable to_raw() const;

  friend ActionTable validate_action(const DirectedMultigraph& graph,
                                     const RawActionTable& raw, int depth);

 private:
  struct Gen {
    std::string name;
    int domain = -1;
    int terminus = -1;
    std::map<int, Transition> trans;    // keyed by edge id, r(e) = domain
    std::map<int, int> preimage;        // out edge -> edge
  };
  DirectedMultigraph graph_;
  std::vector<Gen> gens_;
};

// Checks edge-bijectivity, endpoint compatibility of every transition, and
// coherence of the induced action on paths up to `depth`.  Throws
// ValidationError listing every violation.
ActionTable validate_action(const DirectedMultigraph& graph,
                            const RawActionTable& raw, int depth = 4);

// One step of the action: (w . e, w|_e), with r(e) = d(w).
ActionTable::Transition step_edge(const ActionTable& t, const Word& w,
                                  int edge);

// w . mu (requires d(w) = r(mu)); length-preserving.
Path act(const ActionTable& t, const Word& w, const Path& mu);

// w|_mu with d(w|_mu) = s(mu) and t(w|_mu) = s(w . mu).
Word restrict(const ActionTable& t, const Word& w, const Path& mu);

// Reverses the letters and flips signs; d and t exchange.
Word invert(const Word& w);

// True iff w fixes every edge of d(w)E^1 and, coinductively, so does every
// restriction reachable from w.  Words with d != t are never trivial.
// Throws ComputeError when more than `bound` distinct restriction words are
// reached (finite-state not certified within bound).
bool is_trivial(const ActionTable& t, const Word& w,
                std::size_t bound = kDefaultClosureBound);

// Bounded-depth faithfulness lint: returns a warning for every pair of
// distinct generators that act identically on all paths of length <= depth.
std::vector<std::string> faithfulness_lint(const ActionTable& t,
                                           int depth = 4);

struct ClassTransition {
  int out_edge = -1;
  int cls = -1;
};

// The finite, restriction- and inverse-closed set of element classes
// reachable from the seeds, with one unit class per vertex always present.
// Class numbering is discovery order: units first (vertex order), then
// seeds, then inverses/restrictions breadth-first.
class ClosureSet {
 public:
  struct ClassInfo {
    Word rep;
    std::string key;
    int domain = -1;
    int terminus = -1;
    bool is_unit = false;
    int inverse = -1;
    int bisim = -1;  // bisimulation block id (discrete after merging)
  };

  const ActionTable& table() const { return table_; }
  const DirectedMultigraph& graph() const { return table_.graph(); }

  std::size_t size() const { return classes_.size(); }
  const ClassInfo& cls(int i) const { return classes_[i]; }
  int unit_class(int vertex) const { return unit_class_[vertex]; }

  // Transition of class c at edge e (requires r(e) = d(c)).
  const ClassTransition& transition(int c, int edge) const;

  // Restriction-count matrix: M(g,h) = #{e in d(g)E^1 : g.e = e, g|_e in h}.
  const IntMatrix& M() const { return m_; }

  // Class of a word, decided by the same behavioural test used during
  // construction; nullopt when the word's class is not in this closure.
  std::optional<int> find_class(const Word& w) const;
  std::optional<int> find_class(const std::string& word_text) const;

  // Classes with d = t, in id order (the support of any trace vector).
  const std::vector<int>& diagonal_classes() const { return diag_; }

  friend ClosureSet closure(const ActionTable& table,
                            const std::vector<Word>& seeds,
                            std::size_t bound);

 private:
  ActionTable table_;
  std::vector<ClassInfo> classes_;
  std::vector<int> unit_class_;
  std::vector<std::map<int, ClassTransition>> trans_;
  std::vector<int> diag_;
  IntMatrix m_;
  std::size_t bound_ = kDefaultClosureBound;
};

// Breadth-first saturation under single-edge restriction and inversion with
// behavioural class merging.  Throws ComputeError when the class count
// exceeds `bound`: not certified finite-state within bound.
ClosureSet closure(const ActionTable& table, const std::vector<Word>& seeds,
                   std::size_t bound = kDefaultClosureBound);

inline const IntMatrix& restriction_matrix(const ClosureSet& cs) {
  return cs.M();
}

}  // namespace ssact
