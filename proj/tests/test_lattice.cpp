#include <catch_amalgamated.hpp>

#include <random>

#include "ergolab/lattice.hpp"
#include "oracles.hpp"

using namespace ergolab;

namespace {

ShiftFamily family(std::vector<IntVector> gens, index_t modulus = 97) {
  std::vector<index_t> moduli(gens.front().size(), modulus);
  return ShiftFamily(GridSpace(moduli), std::move(gens));
}

IntVector canonical(IntVector p) {
  auto first = std::find_if(p.begin(), p.end(), [](index_t c) { return c != 0; });
  if (first != p.end() && *first < 0)
    for (auto &c : p)
      c = -c;
  return p;
}

} // namespace

TEST_CASE("rank examples") {
  REQUIRE(rank(family({{1, 0}, {0, 1}})) == 2);
  REQUIRE(rank(family({{1, 0}, {0, 1}, {1, 1}})) == 2);
  REQUIRE(rank(family({{2}, {3}})) == 1);
  REQUIRE(rank(family({{0, 0}, {0, 0}})) == 0);
}

TEST_CASE("relation kernel examples") {
  REQUIRE(relation_kernel(family({{1, 0}, {0, 1}})).empty());
  auto k = relation_kernel(family({{2}, {3}}));
  REQUIRE(k.size() == 1);
  REQUIRE(canonical(k[0].p) == IntVector{3, -2});
  k = relation_kernel(family({{1, 1}, {2, 2}}));
  REQUIRE(k.size() == 1);
  REQUIRE(canonical(k[0].p) == IntVector{2, -1});
  // brute force agrees that these are the smallest relations
  auto rels = oracle::small_relations({{2}, {3}}, 1, 5);
  REQUIRE(std::find(rels.begin(), rels.end(), IntVector{3, -2}) != rels.end());
  for (const auto &p : rels)
    REQUIRE(std::abs(p[0]) + std::abs(p[1]) >= 5);
}

TEST_CASE("select independent examples") {
  REQUIRE(select_independent(family({{1, 0}, {0, 1}, {1, 1}})) == std::vector<std::size_t>{0, 1});
  REQUIRE(select_independent(family({{0, 0}, {1, 0}})) == std::vector<std::size_t>{1});
  REQUIRE(select_independent(family({{2}, {3}})) == std::vector<std::size_t>{0});
}

TEST_CASE("reduction examples") {
  auto r = build_reduction(family({{1, 0}, {0, 1}, {1, 1}}));
  REQUIRE(r.basis == std::vector<std::size_t>{0, 1});
  REQUIRE(r.nonbasis == std::vector<std::size_t>{2});
  REQUIRE(r.l == IntVector{1});
  REQUIRE(r.a == std::vector<IntVector>{{1}, {1}});

  r = build_reduction(family({{2}, {3}}));
  REQUIRE(r.basis == std::vector<std::size_t>{0});
  REQUIRE(r.l == IntVector{2});
  REQUIRE(r.a == std::vector<IntVector>{{3}});
  auto [l, a] = oracle::minimal_power(3, 2, 10, 30);
  REQUIRE(l == 2);
  REQUIRE(a == 3);

  r = build_reduction(family({{1, 0}, {0, 1}}));
  REQUIRE(r.nonbasis.empty());
  REQUIRE(r.matrix() == std::vector<IntVector>{{1, 0}, {0, 1}});

  REQUIRE_THROWS_AS(build_reduction(family({{0, 0}})), domain_error);
}

TEST_CASE("kernel, rank-nullity and reduction invariants on random families") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t D = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 5));
    std::vector<IntVector> gens(n, IntVector(D));
    for (auto &v : gens)
      for (auto &c : v)
        c = uniform_int(rng, -3, 3);
    auto fam = family(gens, 61);
    auto d = rank(fam);
    auto kernel = relation_kernel(fam);
    REQUIRE(d + kernel.size() == n);
    for (const auto &rel : kernel)
      for (std::size_t i = 0; i < D; ++i) {
        index_t s = 0;
        for (std::size_t k = 0; k < n; ++k)
          s += rel.p[k] * gens[k][i];
        REQUIRE(s == 0);
      }
    auto sel = select_independent(fam);
    REQUIRE(sel.size() == d);
    if (d == 0)
      continue;
    REQUIRE(relation_kernel(fam.subfamily(sel)).empty());
    auto red = build_reduction(fam);
    const auto &X = fam.space();
    for (int pt = 0; pt < 10; ++pt) {
      index_t x = uniform_int(rng, 0, X.size() - 1);
      for (std::size_t c = 0; c < red.nonbasis.size(); ++c) {
        REQUIRE(red.l[c] >= 1);
        index_t lhs = X.translate(x, fam.generator(red.nonbasis[c]), red.l[c]);
        index_t rhs = x;
        for (std::size_t j = 0; j < red.basis.size(); ++j)
          rhs = X.translate(rhs, fam.generator(red.basis[j]), red.a[j][c]);
        REQUIRE(lhs == rhs);
      }
    }
  }
}

TEST_CASE("rank agrees with exhaustive relation search") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t D = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 5));
    std::vector<IntVector> gens(n, IntVector(D));
    for (auto &v : gens)
      for (auto &c : v)
        c = uniform_int(rng, -1, 1);
    REQUIRE(rank(family(gens)) == oracle::brute_rank(gens, D, 4));
  }
}

TEST_CASE("rotation to shift examples") {
  std::vector<Rational> a{{1, 2}, {1, 3}};
  auto fam = rotation_to_shift(a, 1);
  REQUIRE(fam.space().moduli()[0] == 6);
  REQUIRE(fam.generators() == std::vector<IntVector>{{3}, {2}});
  std::vector<Rational> b{{1, 5}};
  fam = rotation_to_shift(b, 1);
  REQUIRE(fam.space().moduli()[0] == 5);
  REQUIRE(fam.generators() == std::vector<IntVector>{{1}});
  std::vector<Rational> c{{1, 2}, {1, 4}};
  fam = rotation_to_shift(c, 2);
  REQUIRE(fam.space().moduli()[0] == 8);
  REQUIRE(fam.generators() == std::vector<IntVector>{{4}, {2}});
  std::vector<Rational> bad{{1, 0}};
  REQUIRE_THROWS_AS(rotation_to_shift(bad, 1), domain_error);
}

TEST_CASE("rotation shift has the rank of the frequency tuple") {
  // integer relations sum r_k theta_k = 0 over Q; with denominators <= 4 the
  // primitive relations have |r_k| <= lcm <= 12
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    std::vector<Rational> th(n);
    std::vector<IntVector> scaled;
    for (auto &t : th) {
      t.q = uniform_int(rng, 2, 4);
      t.p = uniform_int(rng, 0, t.q - 1);
      scaled.push_back({t.p * (12 / t.q)});
    }
    auto fam = rotation_to_shift(th, uniform_int(rng, 1, 4));
    REQUIRE(rank(fam) == oracle::brute_rank(scaled, 1, 12));
  }
}

TEST_CASE("continued fraction convergents") {
  auto c = convergents(0.6180339887, 4);
  REQUIRE(c == std::vector<Rational>{{1, 1}, {1, 2}, {2, 3}, {3, 5}});
  REQUIRE(convergents(0.5, 1) == std::vector<Rational>{{1, 2}});
  c = convergents(1.0 / 3.0 + 1e-12, 2);
  REQUIRE(std::find(c.begin(), c.end(), Rational{1, 3}) != c.end());
  REQUIRE(std::find(c.begin(), c.end(), Rational{0, 1}) == c.end());
  c = convergents(std::sqrt(2.0) - 1.0, 8);
  for (std::size_t i = 1; i < c.size(); ++i) {
    REQUIRE(c[i].q > c[i - 1].q);
    REQUIRE(std::gcd(c[i].p, c[i].q) == 1);
  }
  REQUIRE_THROWS_AS(convergents(1.0, 3), domain_error);
  REQUIRE_THROWS_AS(convergents(0.0, 3), domain_error);
}

TEST_CASE("json round-trip") {
  auto fam = family({{1, 0}, {0, 1}, {1, 1}}, 17);
  nlohmann::json j = fam;
  auto back = j.get<ShiftFamily>();
  REQUIRE(back.generators() == fam.generators());
  REQUIRE(back.space() == fam.space());
  auto red = build_reduction(fam);
  nlohmann::json jr = red;
  auto rb = jr.get<ReductionMatrix>();
  REQUIRE(rb.basis == red.basis);
  REQUIRE(rb.nonbasis == red.nonbasis);
  REQUIRE(rb.a == red.a);
  REQUIRE(parse_rational("3/7") == Rational{3, 7});
  REQUIRE_THROWS_AS(parse_rational("1/0"), domain_error);
  REQUIRE_THROWS_AS(parse_rational("x"), domain_error);
}
