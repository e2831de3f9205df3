#include <set>

#include "doctest.h"
#include "helpers.hpp"

using namespace ssact;
using namespace ssact::testing;

namespace {

Word gen_word(const ActionTable& t, const std::string& text) {
  return t.parse_word(text);
}

}  // namespace

TEST_CASE("validate_action accepts the adding machine and the swap") {
  auto odo = load_corpus("odometer");
  CHECK(odo.table.generator_count() == 1);
  auto swp = load_corpus("swap");
  CHECK(swp.table.generator_count() == 1);
}

TEST_CASE("validate_action rejects a non-bijective edge action") {
  auto g = two_loop_graph();
  RawActionTable raw;
  RawGenerator rg;
  rg.name = "g";
  rg.domain = "v";
  rg.terminus = "v";
  rg.transitions.emplace_back("0", RawTransition{"0", {}});
  rg.transitions.emplace_back("1", RawTransition{"0", {}});
  raw.generators.push_back(rg);
  try {
    validate_action(g, raw);
    FAIL("expected ValidationError");
  } catch (const ValidationError& err) {
    CHECK(std::string(err.what()).find("non-bijective edge action") !=
          std::string::npos);
  }
}

TEST_CASE("validate_action rejects endpoint violations") {
  auto g = validate_graph(raw_graph(
      {"v", "w"},
      {{"lv", "v", "v"}, {"vw", "v", "w"}, {"wv", "w", "v"}, {"lw", "w", "w"}}));
  RawActionTable raw;
  RawGenerator rg;
  rg.name = "g";
  rg.domain = "v";
  rg.terminus = "v";
  // r(wv) = w != t(g): endpoint mismatch; also the restriction word below
  // has the wrong domain.
  rg.transitions.emplace_back("lv", RawTransition{"wv", {}});
  rg.transitions.emplace_back("vw", RawTransition{"vw", {"g"}});
  raw.generators.push_back(rg);
  try {
    validate_action(g, raw);
    FAIL("expected ValidationError");
  } catch (const ValidationError& err) {
    std::string all(err.what());
    CHECK(all.find("endpoint mismatch") != std::string::npos);
    CHECK(all.find("wrong d/t") != std::string::npos);
  }
  // missing transitions are reported too
  RawActionTable raw2;
  RawGenerator rg2;
  rg2.name = "g";
  rg2.domain = "v";
  rg2.terminus = "v";
  raw2.generators.push_back(rg2);
  try {
    validate_action(g, raw2);
    FAIL("expected ValidationError");
  } catch (const ValidationError& err) {
    CHECK(std::string(err.what()).find("missing transition") !=
          std::string::npos);
  }
}

TEST_CASE("adding machine action and restriction match the hand recursion") {
  auto odo = load_corpus("odometer");
  const auto& t = odo.table;
  const auto& g = odo.graph;
  Word a = gen_word(t, "a");

  CHECK(path_to_string(g, act(t, a, parse_path(g, "0.1"))) == "1.1");
  CHECK(path_to_string(g, act(t, a, parse_path(g, "1.1"))) == "0.0");
  // units act as the identity
  Word id = t.unit_word(0);
  CHECK(path_to_string(g, act(t, id, parse_path(g, "1.0"))) == "1.0");

  CHECK(t.word_to_string(restrict(t, a, parse_path(g, "1"))) == "a");
  CHECK(restrict(t, a, parse_path(g, "1.0")).empty());
  CHECK(restrict(t, id, parse_path(g, "0.1")).empty());
  // restriction of a unit lands at the unit of s(mu)
  CHECK(restrict(t, id, parse_path(g, "0.1")).unit_vertex == 0);
}

TEST_CASE("inverse words: subtract-one undoes the adding machine") {
  auto odo = load_corpus("odometer");
  const auto& t = odo.table;
  const auto& g = odo.graph;
  Word a = gen_word(t, "a");
  Word ainv = invert(a);
  CHECK(path_to_string(g, act(t, ainv, parse_path(g, "1.1"))) == "0.1");
  // a a^{-1} is trivial
  CHECK(is_trivial(t, t.compose(a, ainv)));
  CHECK_FALSE(is_trivial(t, a));
  // inverting a unit is a no-op
  Word id = t.unit_word(0);
  CHECK(invert(id) == id);
}

TEST_CASE("is_trivial detects the self-restricting identity generator") {
  // b fixes both loops with restriction b: acts trivially on every path
  auto g = two_loop_graph();
  RawActionTable raw;
  RawGenerator rg;
  rg.name = "b";
  rg.domain = "v";
  rg.terminus = "v";
  rg.transitions.emplace_back("0", RawTransition{"0", {"b"}});
  rg.transitions.emplace_back("1", RawTransition{"1", {"b"}});
  raw.generators.push_back(rg);
  auto t = validate_action(g, raw);
  CHECK(is_trivial(t, t.parse_word("b")));
  // ... and the faithfulness lint notices it
  auto warnings = faithfulness_lint(t);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("acts like a unit") != std::string::npos);
}

TEST_CASE("swap is not trivial") {
  auto swp = load_corpus("swap");
  CHECK_FALSE(is_trivial(swp.table, swp.table.parse_word("s")));
}

TEST_CASE("closure of the adding machine") {
  auto odo = load_corpus("odometer");
  auto cs = closure_of(odo, "a");
  REQUIRE(cs.size() == 3);
  CHECK(cs.cls(0).key == "id_v");
  CHECK(cs.cls(0).is_unit);
  CHECK(cs.cls(1).key == "a");
  CHECK(cs.cls(2).key == "a^-1");
  CHECK(cs.cls(1).inverse == 2);
  CHECK(cs.cls(2).inverse == 1);
  const auto& m = cs.M();
  CHECK(m(0, 0) == 2);  // unit row reproduces A_E
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(m(1, j) == 0);  // a fixes no edge
    CHECK(m(2, j) == 0);
  }
}

TEST_CASE("closure of the partial-fixing generator") {
  auto pf = load_corpus("partial_fixing");
  auto cs = closure_of(pf, "c");
  // c is an involution (c^2 fixes both edges with restrictions s^2 ~ id and
  // id), so c^-1 merges into c and the closure is {id, c, s}.
  REQUIRE(cs.size() == 3);
  CHECK(cs.cls(0).key == "id_v");
  CHECK(cs.cls(1).key == "c");
  CHECK(cs.cls(2).key == "s");
  CHECK(cs.cls(1).inverse == 1);
  // s is self-inverse too
  CHECK(cs.cls(2).inverse == 2);
  auto m = restriction_matrix(cs);
  CHECK(m(1, 2) == 1);  // c fixes edge 0 with restriction s
  CHECK(m(1, 0) == 1);  // c fixes edge 1 with restriction id
  CHECK(m(0, 0) == 2);
  long long srow = 0;
  for (std::size_t j = 0; j < 3; ++j) srow += m(2, j);
  CHECK(srow == 0);
}

TEST_CASE("closure of a unit alone") {
  auto odo = load_corpus("odometer");
  auto cs = closure(odo.table, {odo.table.unit_word(0)});
  REQUIRE(cs.size() == 1);
  CHECK(cs.M()(0, 0) == 2);
}

TEST_CASE("closure bound is enforced") {
  auto odo = load_corpus("odometer");
  CHECK_THROWS_AS(closure_all(odo, 2), ComputeError);
}

TEST_CASE("closure classes are behaviourally distinct (bisim keys)") {
  for (const auto& name : corpus_names()) {
    auto vi = load_corpus(name);
    auto cs = closure_all(vi);
    std::set<int> keys;
    for (std::size_t c = 0; c < cs.size(); ++c)
      keys.insert(cs.cls(static_cast<int>(c)).bisim);
    CHECK(keys.size() == cs.size());
  }
}

TEST_CASE("find_class resolves words to classes") {
  auto pf = load_corpus("partial_fixing");
  auto cs = closure_of(pf, "c");
  CHECK(*cs.find_class("s.s.c") == *cs.find_class("c"));
  CHECK(*cs.find_class("s^-1") == *cs.find_class("s"));
  CHECK(*cs.find_class("c^-1") == *cs.find_class("c"));
  CHECK(*cs.find_class("c.c^-1") == cs.unit_class(0));
  // c.c acts trivially (c is an involution)
  CHECK(*cs.find_class("c.c") == cs.unit_class(0));
  // c.s is genuinely new: not in the closure of {c}
  CHECK_FALSE(cs.find_class("c.s").has_value());
}

TEST_CASE("two-vertex closure has arrows between distinct vertices") {
  auto tv = load_corpus("two_vertex");
  auto cs = closure_all(tv);
  // k and l are involutions; h^-1 is distinct (it crosses u <-> v)
  REQUIRE(cs.size() == 6);  // id_u, id_v, h, k, l, h^-1
  auto h = cs.find_class("h");
  REQUIRE(h.has_value());
  CHECK(cs.cls(*h).domain != cs.cls(*h).terminus);
  auto l = cs.find_class("l");
  REQUIRE(l.has_value());
  auto k = cs.find_class("k");
  REQUIRE(k.has_value());
  const auto& m = cs.M();
  CHECK(m(*l, *k) == 1);
  CHECK(m(*l, cs.unit_class(1)) == 1);
  // unit block reproduces A_E
  auto a = adjacency_matrix(cs.graph());
  for (int v = 0; v < 2; ++v)
    for (int w = 0; w < 2; ++w)
      CHECK(m(cs.unit_class(v), cs.unit_class(w)) == a(v, w));
}

TEST_CASE("restriction cocycle and action compatibility") {
  for (const auto& name : corpus_names()) {
    auto vi = load_corpus(name);
    auto cs = closure_all(vi);
    const auto& t = vi.table;
    for (std::size_t c = 0; c < cs.size(); ++c) {
      const Word& w = cs.cls(static_cast<int>(c)).rep;
      int dom = t.domain(w);
      for (int k1 = 1; k1 <= 2; ++k1)
        for_each_path(vi.graph, dom, k1, [&](const Path& mu) {
          // action compatibility: w.(mu nu) = (w.mu)(w|_mu . nu)
          Word wmu = restrict(t, w, mu);
          Path wdotmu = act(t, w, mu);
          for_each_path(vi.graph, mu.source, 2, [&](const Path& nu) {
            std::vector<int> joined = mu.edges;
            joined.insert(joined.end(), nu.edges.begin(), nu.edges.end());
            Path munu = make_path(vi.graph, joined, mu.range);
            Path lhs = act(t, w, munu);
            Path rhs_head = wdotmu;
            Path rhs_tail = act(t, wmu, nu);
            std::vector<int> rhs = rhs_head.edges;
            rhs.insert(rhs.end(), rhs_tail.edges.begin(),
                       rhs_tail.edges.end());
            CHECK(lhs.edges == rhs);
            // cocycle: w|_{mu nu} = (w|_mu)|_nu as classes
            auto lhs_cls = cs.find_class(restrict(t, w, munu));
            auto rhs_cls = cs.find_class(restrict(t, wmu, nu));
            REQUIRE(lhs_cls.has_value());
            REQUIRE(rhs_cls.has_value());
            CHECK(*lhs_cls == *rhs_cls);
          });
        });
    }
  }
}

TEST_CASE("composition and inverse rules hold as classes") {
  auto pf = load_corpus("partial_fixing");
  const auto& t = pf.table;
  std::vector<Word> words = {t.parse_word("c"), t.parse_word("s"),
                             t.parse_word("c^-1"), t.parse_word("c.s"),
                             t.parse_word("s.c^-1")};
  for (const Word& h : words)
    for (const Word& g : words) {
      if (t.domain(h) != t.terminus(g)) continue;
      Word hg = t.compose(h, g);
      for (int k = 1; k <= 3; ++k)
        for_each_path(pf.graph, t.domain(g), k, [&](const Path& mu) {
          // (hg)|_mu = h|_{g.mu} g|_mu
          Word lhs = restrict(t, hg, mu);
          Word rhs = t.compose(restrict(t, h, act(t, g, mu)),
                               restrict(t, g, mu));
          CHECK(is_trivial(t, t.compose(lhs, invert(rhs))));
        });
    }
  // (g^{-1})|_mu = (g|_{g^{-1}.mu})^{-1}
  for (const Word& g : words) {
    Word gi = invert(g);
    for (int k = 1; k <= 3; ++k)
      for_each_path(pf.graph, t.domain(gi), k, [&](const Path& mu) {
        Word lhs = restrict(t, gi, mu);
        Word rhs = invert(restrict(t, g, act(t, gi, mu)));
        CHECK(is_trivial(t, t.compose(lhs, invert(rhs))));
      });
  }
}

TEST_CASE("census recursion via the concatenation bijection") {
  for (const auto& name : corpus_names()) {
    auto vi = load_corpus(name);
    auto cs = closure_all(vi);
    const auto& t = vi.table;
    for (std::size_t c = 0; c < cs.size(); ++c) {
      const Word& w = cs.cls(static_cast<int>(c)).rep;
      if (t.domain(w) != t.terminus(w)) continue;
      for (int k = 0; k <= 5; ++k) {
        // |{mu in E^{k+1} fixed}| = sum over fixed edges e of
        // |{nu in E^k : w|_e nu = nu}|
        long long lhs = 0;
        for_each_path(vi.graph, t.domain(w), k + 1, [&](const Path& mu) {
          if (act(t, w, mu) == mu) ++lhs;
        });
        long long rhs = 0;
        for (int e : vi.graph.out_edges(t.domain(w))) {
          auto st = step_edge(t, w, e);
          if (st.out_edge != e) continue;
          for_each_path(vi.graph, vi.graph.source(e), k, [&](const Path& nu) {
            if (act(t, st.restriction, nu) == nu) ++rhs;
          });
        }
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("length preservation and bijectivity on path levels") {
  for (const auto& name : corpus_names()) {
    auto vi = load_corpus(name);
    auto cs = closure_all(vi);
    const auto& t = vi.table;
    for (std::size_t c = 0; c < cs.size(); ++c) {
      const Word& w = cs.cls(static_cast<int>(c)).rep;
      for (int k = 1; k <= 5; ++k) {
        std::set<std::vector<int>> images;
        long long count = 0;
        for_each_path(vi.graph, t.domain(w), k, [&](const Path& mu) {
          Path nu = act(t, w, mu);
          CHECK(nu.length() == mu.length());
          CHECK(nu.range == t.terminus(w));
          images.insert(nu.edges);
          ++count;
        });
        CHECK(static_cast<long long>(images.size()) == count);
      }
    }
  }
}

TEST_CASE("word parsing and printing round trip") {
  auto pf = load_corpus("partial_fixing");
  const auto& t = pf.table;
  CHECK(t.word_to_string(t.parse_word("c.s^-1")) == "c.s^-1");
  CHECK(t.word_to_string(t.parse_word("id_v")) == "id_v");
  // adjacent inverses reduce away
  CHECK(t.word_to_string(t.parse_word("c.c^-1")) == "id_v");
  CHECK_THROWS_AS(t.parse_word("nope"), ValidationError);
  CHECK_THROWS_AS(t.parse_word("id_zzz"), ValidationError);
}
