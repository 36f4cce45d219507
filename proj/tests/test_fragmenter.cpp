#include <catch2/catch_amalgamated.hpp>

#include "pwlmbqi/fragmenter.hpp"
#include "pwlmbqi/smtlib/parser.hpp"
#include "pwlmbqi/smtlib/printer.hpp"

using namespace pwlmbqi;

namespace {

// five assertions over three functions plus a free constant:
//   A1: f only          A2: f and h         A3: f and g
//   A4: g only          A5: constants only
smtlib::Script sample_script() {
  return smtlib::parse_script(
      "(set-logic UFLIA)"
      "(declare-sort S 0)"
      "(declare-fun f (Int) Int)"
      "(declare-fun g (Int Int) Int)"
      "(declare-fun h (Int) Bool)"
      "(declare-const c Int)"
      "(assert (forall ((x Int)) (> (f x) x)))"
      "(assert (forall ((x Int)) (=> (h x) (= (f x) c))))"
      "(assert (forall ((x Int) (y Int)) (>= (g x y) (f x))))"
      "(assert (> (g c c) 0))"
      "(assert (> c 5))");
}

std::set<std::string> applied(const smtlib::Script& s) {
  std::set<std::string> out;
  for (const auto& a : s.assertions) {
    std::map<std::string, std::size_t> occ;
    collect_symbols(a, occ);
    for (const auto& [name, arity] : occ)
      if (arity >= 1) out.insert(name);
  }
  return out;
}

}  // namespace

TEST_CASE("fragment keeps exactly the matching assertions") {
  auto s = sample_script();
  auto frag = fragment(s, {"f", "g"});
  // A1 (f), A3 (f,g), A4 (g) stay; A2 has the outsider h; A5 has no chosen symbol
  REQUIRE(frag.assertions.size() == 3);
  auto used = applied(frag);
  CHECK(used == std::set<std::string>{"f", "g"});
  // declarations pruned to used symbols, constants included
  CHECK(frag.find_decl("f"));
  CHECK(frag.find_decl("g"));
  CHECK(frag.find_decl("c"));
  CHECK_FALSE(frag.find_decl("h"));
}

TEST_CASE("choosing every function keeps all assertions that mention one") {
  auto s = sample_script();
  auto frag = fragment(s, {"f", "g", "h"});
  CHECK(frag.assertions.size() == 4);  // only the constants-only assertion drops
}

TEST_CASE("constant-only assertions are excluded") {
  auto s = sample_script();
  auto frag = fragment(s, {"g"});
  // A4 only: A3 mentions f as an outsider
  REQUIRE(frag.assertions.size() == 1);
  CHECK(applied(frag) == std::set<std::string>{"g"});
}

TEST_CASE("fragment output is relaxed and re-parses") {
  auto s = sample_script();
  auto frag = fragment(s, {"f"});
  CHECK(frag.declared_sorts.empty());
  auto reparsed = smtlib::parse_script(smtlib::print_script(frag));
  for (const auto& d : reparsed.declarations) {
    for (const auto& p : d.params) CHECK(p.is_int());
    CHECK((d.result.is_int() || d.result.is_bool()));
  }
}

TEST_CASE("fragmenting is idempotent for the same symbols") {
  auto s = sample_script();
  auto once = fragment(s, {"f", "g"});
  auto twice = fragment(once, {"f", "g"});
  CHECK(smtlib::print_script(once) == smtlib::print_script(twice));
}

TEST_CASE("unknown or zero-ary symbols are rejected") {
  auto s = sample_script();
  CHECK_THROWS_AS(fragment(s, {"nope"}), std::invalid_argument);
  CHECK_THROWS_AS(fragment(s, {"c"}), std::invalid_argument);
}

TEST_CASE("enumerate_fragments walks k-subsets lexicographically") {
  auto s = sample_script();
  auto frags = enumerate_fragments(s, 2);
  REQUIRE(frags.size() == 3);  // C(3,2)
  CHECK(frags[0].first == std::vector<std::string>{"f", "g"});
  CHECK(frags[1].first == std::vector<std::string>{"f", "h"});
  CHECK(frags[2].first == std::vector<std::string>{"g", "h"});

  SECTION("k = 1 on a single-function script") {
    auto single = smtlib::parse_script(
        "(declare-fun f (Int) Int)(assert (forall ((x Int)) (> (f x) x)))");
    auto one = enumerate_fragments(single, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].first == std::vector<std::string>{"f"});
  }
  SECTION("k beyond the function count is empty") {
    CHECK(enumerate_fragments(s, 7).empty());
  }
  SECTION("cap limits the output") {
    CHECK(enumerate_fragments(s, 2, 1).size() == 1);
  }
}

TEST_CASE("empty fragments are skipped") {
  auto s = smtlib::parse_script(
      "(declare-fun f (Int) Int)(declare-fun g (Int) Int)"
      "(assert (= (f (g 0)) 0))");  // f and g only occur together
  auto frags = enumerate_fragments(s, 1);
  CHECK(frags.empty());
  auto both = enumerate_fragments(s, 2);
  REQUIRE(both.size() == 1);
}
