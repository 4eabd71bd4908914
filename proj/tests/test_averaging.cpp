#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <random>

#include "ergolab/averaging.hpp"
#include "oracles.hpp"

using namespace ergolab;

namespace {

GridFunction indicator(const GridSpace &X, index_t point) { return GridFunction::spike(X, 1.0, point); }

void require_equal(const GridFunction &a, const GridFunction &b) {
  REQUIRE(a.size() == b.size());
  for (index_t x = 0; x < a.size(); ++x)
    REQUIRE(a[x] == b[x]);
}

} // namespace

TEST_CASE("multi average examples") {
  GridSpace Z6({6});
  ShiftFamily one(Z6, {{1}});
  auto g = multi_average(indicator(Z6, 0), one, WindowSpec({6}), WrapPolicy::cyclic);
  for (index_t x = 0; x < 6; ++x)
    REQUIRE(g[x] == 1.0 / 6.0);
  g = multi_average(indicator(Z6, 0), one, WindowSpec({2}));
  REQUIRE(g[0] == 0.5);

  GridSpace Z5({5});
  ShiftFamily two(Z5, {{1}, {2}});
  g = multi_average(indicator(Z5, 0), two, WindowSpec({2, 2}), WrapPolicy::cyclic);
  REQUIRE(g[0] == 0.25);
  require_equal(g, brute_force_average(indicator(Z5, 0), two, WindowSpec({2, 2})));
}

TEST_CASE("guard refuses aliasing windows") {
  GridSpace Z6({6});
  ShiftFamily one(Z6, {{1}});
  REQUIRE_THROWS_AS(multi_average(indicator(Z6, 0), one, WindowSpec({6})), aliasing_error);
  REQUIRE_THROWS_AS(discrete_maximal(indicator(Z6, 0), one, MaximalSpec(6, MaximalMode::exact)), aliasing_error);
  try {
    multi_average(indicator(Z6, 0), one, WindowSpec({6}));
  } catch (const aliasing_error &e) {
    REQUIRE(std::string(e.what()).find("6*1*1 = 6 >= min modulus 6") != std::string::npos);
  }
  ShiftFamily other(GridSpace({7}), {{1}});
  REQUIRE_THROWS_AS(multi_average(indicator(Z6, 0), other, WindowSpec({2})), domain_error);
  REQUIRE_THROWS_AS(WindowSpec({0}), domain_error);
}

TEST_CASE("directional window sum examples") {
  GridSpace Z4({4});
  auto f = GridFunction::from_integers(Z4, {1, 2, 3, 4});
  auto h = directional_window_sum(f, {1}, 2, WrapPolicy::cyclic);
  REQUIRE(std::vector<double>(h.values().begin(), h.values().end()) == std::vector<double>{3, 5, 7, 5});
  h = directional_window_sum(f, {1}, 1);
  require_equal(h, f);
  auto e = GridFunction::from_integers(Z4, {1, 0, 0, 0});
  h = directional_window_sum(e, {2}, 2, WrapPolicy::cyclic);
  REQUIRE(std::vector<double>(h.values().begin(), h.values().end()) == std::vector<double>{1, 0, 1, 0});
}

TEST_CASE("discrete maximal examples") {
  GridSpace Z5({5});
  ShiftFamily one(Z5, {{1}});
  auto Df = discrete_maximal(indicator(Z5, 0), one, MaximalSpec(5, MaximalMode::exact), WrapPolicy::cyclic);
  REQUIRE(Df[0] == 1.0);
  REQUIRE(Df[1] == 0.2);
  require_equal(Df, brute_force_maximal(indicator(Z5, 0), one, MaximalSpec(5, MaximalMode::exact)));

  ShiftFamily two(Z5, {{1}, {2}});
  Df = discrete_maximal(indicator(Z5, 0), two, MaximalSpec(2, MaximalMode::exact), WrapPolicy::cyclic);
  REQUIRE(Df[0] == 1.0);

  GridSpace X({11, 13});
  ShiftFamily fam(X, {{1, 0}, {0, 1}, {1, 1}});
  for (auto mode : {MaximalMode::exact, MaximalMode::dyadic}) {
    auto c = discrete_maximal(GridFunction::constant(X, 0.375), fam, MaximalSpec(3, mode));
    for (index_t x = 0; x < X.size(); ++x)
      REQUIRE(c[x] == 0.375);
  }
  auto f = GridFunction::from_integers(X, std::vector<std::int64_t>(static_cast<std::size_t>(X.size()), -3));
  auto s1 = discrete_maximal(f, fam, MaximalSpec(1, MaximalMode::exact));
  for (index_t x = 0; x < X.size(); ++x)
    REQUIRE(s1[x] == 3.0);
}

TEST_CASE("fast paths match the brute-force oracle") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    bool integer = trial % 2 == 0;
    auto inst = oracle::random_instance(rng, integer, false, 3.0e5);
    auto fast = multi_average(inst.f, inst.family, inst.window);
    auto slow = brute_force_average(inst.f, inst.family, inst.window);
    auto Df = discrete_maximal(inst.f, inst.family, inst.spec);
    auto Bf = brute_force_maximal(inst.f, inst.family, inst.spec);
    for (index_t x = 0; x < inst.f.size(); ++x) {
      if (integer) {
        REQUIRE(fast[x] == slow[x]);
        REQUIRE(Df[x] == Bf[x]);
      } else {
        REQUIRE(std::abs(fast[x] - slow[x]) <= 1e-12);
        REQUIRE(std::abs(Df[x] - Bf[x]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("averages preserve the mean and contract the sup norm") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = oracle::random_instance(rng, true, false, 3.0e5);
    auto g = multi_average(inst.f, inst.family, inst.window);
    REQUIRE(g.is_exact());
    // exact: sum of numerators scales by the window volume
    __int128 in = 0, out = 0;
    for (auto v : inst.f.numerators())
      in += v;
    for (auto v : g.numerators())
      out += v;
    REQUIRE(out * inst.f.denominator() == in * g.denominator());
    REQUIRE(g.sup_norm() <= inst.f.sup_norm());
  }
}

TEST_CASE("averages and maximal functions are monotone") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = oracle::random_instance(rng, true, true, 3.0e5);
    std::vector<std::int64_t> bigger(inst.f.numerators().begin(), inst.f.numerators().end());
    for (auto &v : bigger)
      v += uniform_int(rng, 0, 5);
    auto g = GridFunction::from_integers(inst.f.space(), bigger);
    auto af = multi_average(inst.f, inst.family, inst.window), ag = multi_average(g, inst.family, inst.window);
    auto mf = discrete_maximal(inst.f, inst.family, inst.spec), mg = discrete_maximal(g, inst.family, inst.spec);
    for (index_t x = 0; x < g.size(); ++x) {
      REQUIRE(af[x] <= ag[x]);
      REQUIRE(mf[x] <= mg[x]);
    }
  }
}

TEST_CASE("dyadic and exact maximal functions are comparable") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = oracle::random_instance(rng, trial % 2 == 0, true, 3.0e5);
    index_t M = inst.spec.cap;
    auto ex = discrete_maximal(inst.f, inst.family, MaximalSpec(M, MaximalMode::exact));
    auto dy = discrete_maximal(inst.f, inst.family, MaximalSpec(M, MaximalMode::dyadic));
    // the doubled box of side 2^(k+1) is admissible only up to the largest power of two <= M
    index_t P = 1;
    while (2 * P <= M)
      P *= 2;
    auto ex_p = discrete_maximal(inst.f, inst.family, MaximalSpec(P, MaximalMode::exact));
    double factor = std::ldexp(1.0, static_cast<int>(inst.family.count()));
    const double tol = inst.f.is_exact() ? 0.0 : 1e-12;
    for (index_t x = 0; x < ex.size(); ++x) {
      REQUIRE(dy[x] <= ex[x] + tol);
      REQUIRE(ex_p[x] <= factor * dy[x] + tol);
    }
  }
}

TEST_CASE("exact maximal can exceed 2^n dyadic when M is not a power of two") {
  // s = 3 > 2 = largest dyadic side: a spike three steps back is seen only by s = 3
  GridSpace Z({16});
  ShiftFamily one(Z, {{1}});
  auto f = GridFunction::from_integers(Z, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3, 3, 3});
  auto ex = discrete_maximal(f, one, MaximalSpec(3, MaximalMode::exact));
  auto dy = discrete_maximal(f, one, MaximalSpec(3, MaximalMode::dyadic));
  REQUIRE(ex[11] == 1.0);
  REQUIRE(dy[11] == 0.0);
}

TEST_CASE("identity window returns |f|") {
  GridSpace X({9, 10});
  ShiftFamily fam(X, {{1, 2}, {3, 1}});
  std::mt19937_64 rng(2);
  std::vector<double> vals(90);
  for (auto &v : vals)
    v = 2.0 * unit_uniform(rng) - 1.0;
  GridFunction f(X, vals);
  auto Df = discrete_maximal(f, fam, MaximalSpec(1, MaximalMode::exact));
  for (index_t x = 0; x < X.size(); ++x)
    REQUIRE(Df[x] == std::abs(f[x]));
}

TEST_CASE("maximal function does not depend on the thread count") {
  GridSpace X({101, 103});
  ShiftFamily fam(X, {{1, 0}, {0, 1}, {1, 1}});
  std::mt19937_64 rng(6);
  std::vector<double> vals(static_cast<std::size_t>(X.size()));
  for (auto &v : vals)
    v = unit_uniform(rng);
  GridFunction f(X, vals);
  setenv("ERGODIC_LAB_THREADS", "1", 1);
  auto a = discrete_maximal(f, fam, MaximalSpec(16, MaximalMode::dyadic));
  auto avg_a = multi_average(f, fam, WindowSpec({5, 7, 3}));
  setenv("ERGODIC_LAB_THREADS", "4", 1);
  auto b = discrete_maximal(f, fam, MaximalSpec(16, MaximalMode::dyadic));
  auto avg_b = multi_average(f, fam, WindowSpec({5, 7, 3}));
  unsetenv("ERGODIC_LAB_THREADS");
  require_equal(a, b);
  require_equal(avg_a, avg_b);
}
