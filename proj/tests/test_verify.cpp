#include <catch_amalgamated.hpp>

#include <random>

#include "ergolab/verify.hpp"
#include "oracles.hpp"

using namespace ergolab;

TEST_CASE("weak type examples") {
  GridSpace Z8({8});
  ShiftFamily one(Z8, {{1}});
  auto f = GridFunction::spike(Z8, 8.0, 0);
  auto rep = weak_type_sweep(f, one, MaximalSpec(8, MaximalMode::exact), {4.0}, WrapPolicy::cyclic);
  REQUIRE(rep.weight_order == 0);
  REQUIRE(rep.level_sets[0] == 0.125);
  REQUIRE(rep.integrals[0] == 0.25);
  REQUIRE(rep.ratios[0] == 0.5);
  // Df(x) = 8 / (distance back to the spike + 1)
  auto Df = discrete_maximal(f, one, MaximalSpec(8, MaximalMode::exact), WrapPolicy::cyclic);
  for (index_t x = 0; x < 8; ++x)
    REQUIRE(Df[(8 - x) % 8] == 8.0 / static_cast<double>(x + 1));

  auto c = GridFunction::constant(Z8, 1.0);
  rep = weak_type_sweep(c, ShiftFamily(Z8, {{1}}), MaximalSpec(2, MaximalMode::exact), {2.0});
  REQUIRE(rep.ratios[0] == 0.0);
  rep = weak_type_sweep(f, one, MaximalSpec(2, MaximalMode::exact), {9.0, 100.0});
  REQUIRE(rep.sup_ratio == 0.0);

  REQUIRE_THROWS_AS(weak_type_sweep(f, one, MaximalSpec(2, MaximalMode::exact), {2.0, 1.0}), domain_error);
  REQUIRE_THROWS_AS(weak_type_sweep(f, ShiftFamily(Z8, {{0}}), MaximalSpec(2, MaximalMode::exact)), domain_error);
}

TEST_CASE("default lambda grid spans the function scale") {
  GridSpace X({64});
  auto f = GridFunction::spike(X, 64.0, 3);
  auto grid = default_lambda_grid(f);
  REQUIRE(grid.size() == 25);
  REQUIRE(grid.front() == Catch::Approx(0.5));
  REQUIRE(grid.back() == Catch::Approx(128.0));
  for (std::size_t i = 1; i < grid.size(); ++i)
    REQUIRE(grid[i] > grid[i - 1]);
}

TEST_CASE("exact weak supremum dominates every grid point") {
  GridSpace X({41, 43});
  ShiftFamily fam(X, {{1, 0}, {0, 1}, {1, 1}});
  std::mt19937_64 rng(8);
  std::vector<std::int64_t> nums(static_cast<std::size_t>(X.size()), 0);
  for (int i = 0; i < 20; ++i)
    nums[static_cast<std::size_t>(uniform_int(rng, 0, X.size() - 1))] = uniform_int(rng, 1, 50);
  auto f = GridFunction::from_integers(X, nums);
  MaximalSpec spec(4, MaximalMode::dyadic);
  auto Df = discrete_maximal(f, fam, spec);
  double sup = sup_weak_ratio(Df, f, OrliczWeight(1), 0.01);
  std::vector<double> grid;
  for (double l = 0.011; l < 60.0; l *= 1.03)
    grid.push_back(l);
  auto rep = weak_type_sweep(f, fam, spec, grid);
  for (double r : rep.ratios)
    REQUIRE(r <= sup * (1.0 + 1e-12));
  // and is approached from the right of a value of Df
  std::vector<double> vals(Df.values().begin(), Df.values().end());
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  double near = 0.0;
  for (double v : vals)
    if (v >= 0.01 && v > 0.0) {
      double lambda = std::nextafter(v, 0.0);
      near = std::max(near, weak_ratio(level_set_measure(Df, lambda), orlicz_integral(f, OrliczWeight(1), lambda)));
    }
  REQUIRE(near == Catch::Approx(sup).epsilon(1e-9));
}

TEST_CASE("weak type ratios stay within a calibrated band") {
  // indicators, two spikes and random +-1 functions on families of rank 1..3
  struct Case {
    std::vector<index_t> moduli;
    std::vector<IntVector> gens;
  };
  std::vector<Case> cases = {
      {{61}, {{1}}},
      {{61}, {{1}, {2}}},
      {{29, 31}, {{1, 0}, {0, 1}}},
      {{29, 31}, {{1, 0}, {0, 1}, {1, 1}}},
      {{13, 13, 13}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}},
      {{17, 17, 17}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}}},
  };
  std::mt19937_64 rng(1);
  for (const auto &c : cases) {
    GridSpace X(c.moduli);
    ShiftFamily fam(X, c.gens);
    std::vector<GridFunction> battery;
    battery.push_back(GridFunction::spike(X, 1.0, 0));
    std::vector<std::int64_t> two(static_cast<std::size_t>(X.size()), 0);
    two[0] = 5;
    two[static_cast<std::size_t>(X.size() / 2)] = 3;
    battery.push_back(GridFunction::from_integers(X, two));
    std::vector<std::int64_t> pm(static_cast<std::size_t>(X.size()));
    for (auto &v : pm)
      v = 2 * uniform_int(rng, 0, 1) - 1;
    battery.push_back(GridFunction::from_integers(X, pm));
    index_t M = (X.min_modulus() - 1) / (static_cast<index_t>(c.gens.size()));
    MaximalSpec dy(std::min<index_t>(M, 8), MaximalMode::dyadic), ex(std::min<index_t>(M, 8), MaximalMode::exact);
    for (const auto &f : battery) {
      auto calib = weak_type_sweep(f, fam, ex);
      auto fast = weak_type_sweep(f, fam, dy);
      REQUIRE(calib.sup_ratio > 0.0);
      REQUIRE(fast.sup_ratio <= 2.0 * calib.sup_ratio);
    }
  }
}

TEST_CASE("convergence probe is exact at full periods") {
  GridSpace Z7({7});
  ShiftFamily fam(Z7, {{3}});
  std::mt19937_64 rng(4);
  std::vector<std::int64_t> nums(7);
  for (auto &v : nums)
    v = uniform_int(rng, -100, 100);
  auto rep = convergence_probe(GridFunction::from_integers(Z7, nums), fam, {WindowSpec({7})}, WrapPolicy::cyclic);
  REQUIRE(rep.sup_deviation == std::vector<double>{0.0});

  std::vector<Rational> th{{1, 2}, {1, 3}};
  auto rot = rotation_to_shift(th, 1);
  std::vector<std::int64_t> six{4, -1, 0, 9, 2, 2};
  rep = convergence_probe(GridFunction::from_integers(rot.space(), six), rot, {WindowSpec({2, 3})},
                          WrapPolicy::cyclic);
  REQUIRE(rep.sup_deviation[0] == 0.0);
  REQUIRE(rep.l1_deviation[0] == 0.0);

  GridSpace X({33, 35});
  ShiftFamily two(X, {{1, 0}, {0, 1}});
  rep = convergence_probe(GridFunction::constant(X, 2.5), two);
  REQUIRE(!rep.rungs.empty());
  for (double d : rep.sup_deviation)
    REQUIRE(d == 0.0);
}

TEST_CASE("divergence extension") {
  GridSpace X({31, 29});
  ShiftFamily fam(X, {{1, 0}, {0, 1}, {1, 1}});
  auto one = GridFunction::constant(X, 1.0);
  auto res = divergence_extension_check(one, fam, WindowSpec({3, 2}), WindowSpec({4}));
  REQUIRE(res.holds);
  res = divergence_extension_check(one, fam, WindowSpec({3, 2}), WindowSpec({1}));
  REQUIRE(res.holds);
  REQUIRE(res.points_checked == X.size());

  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = oracle::random_instance(rng, trial % 2 == 0, true, 1.0e5);
    std::size_t n = inst.family.count();
    if (n < 2)
      continue;
    std::size_t d = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<index_t>(n - 1)));
    std::vector<index_t> s(inst.window.sides.begin(), inst.window.sides.begin() + static_cast<long>(d));
    std::vector<index_t> t(inst.window.sides.begin() + static_cast<long>(d), inst.window.sides.end());
    REQUIRE(divergence_extension_check(inst.f, inst.family, WindowSpec(s), WindowSpec(t)).holds);
  }
  auto neg = GridFunction::constant(X, -1.0);
  REQUIRE_THROWS_AS(divergence_extension_check(neg, fam, WindowSpec({2, 2}), WindowSpec({2})), domain_error);
}

TEST_CASE("sharpness sweep") {
  GridSpace X({101});
  ShiftFamily one(X, {{1}});
  auto low = sharpness_sweep(one, {0.25, 0.5}, MaximalSpec(16, MaximalMode::exact));
  REQUIRE(low.primary == std::vector<double>{0.0, 0.0});
  REQUIRE(low.lower == std::vector<double>{0.0, 0.0});

  // rank one: the Log_0 ratios are bounded (classical weak (1,1))
  std::vector<double> heights;
  for (int k = 4; k <= 10; ++k)
    heights.push_back(std::ldexp(1.0, k));
  auto rep = sharpness_sweep(one, heights, MaximalSpec(16, MaximalMode::exact));
  REQUIRE(rep.primary_order == 0);
  for (double r : rep.primary)
    REQUIRE(r <= 1.0 + 1e-12);

  // the oracle agrees with the fast path on a two-dimensional family
  GridSpace Y({257});
  ShiftFamily two(Y, {{1}, {3}});
  auto fast = sharpness_sweep(two, {16.0, 64.0}, MaximalSpec(16, MaximalMode::exact));
  for (std::size_t i = 0; i < 2; ++i) {
    auto f = GridFunction::spike(Y, fast.heights[i], 0);
    auto Bf = brute_force_maximal(f, two, MaximalSpec(16, MaximalMode::exact));
    REQUIRE(fast.primary[i] == sup_weak_ratio(Bf, f, OrliczWeight(0), 1.0));
  }
  REQUIRE_THROWS_AS(sharpness_sweep(one, {2.0, 1.0}, MaximalSpec(4, MaximalMode::exact)), domain_error);
}

TEST_CASE("report serialization") {
  GridSpace X({17});
  ShiftFamily one(X, {{1}});
  auto rep = weak_type_sweep(GridFunction::spike(X, 4.0, 0), one, MaximalSpec(4, MaximalMode::exact));
  nlohmann::json j = rep;
  REQUIRE(j.at("ratio").size() == rep.ratios.size());
  std::ostringstream os;
  write_csv(os, rep);
  REQUIRE(os.str().rfind("parameter,level_set,orlicz_integral,ratio\n", 0) == 0);
}
