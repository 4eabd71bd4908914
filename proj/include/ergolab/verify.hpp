#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ergolab/averaging.hpp"
#include "ergolab/lattice.hpp"
#include "ergolab/space.hpp"

namespace ergolab {

struct WeakTypeReport {
  std::vector<double> lambdas;
  std::vector<double> level_sets;
  std::vector<double> integrals;
  std::vector<double> ratios;
  double sup_ratio = 0.0;
  std::size_t rank = 0;   // d
  std::size_t count = 0;  // n
  int weight_order = 0;   // d - 1
  MaximalSpec spec;
};

/// 25 log-spaced levels from 0.5 ||f||_1 to 2 ||f||_inf.
inline std::vector<double> default_lambda_grid(const GridFunction &f, std::size_t points = 25) {
  double lo = 0.5 * f.l1_norm(), hi = 2.0 * f.sup_norm();
  if (!(lo > 0.0))
    throw domain_error("lambda grid: f vanishes identically");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    double u = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = lo * std::pow(hi / lo, u);
  }
  return grid;
}

inline double weak_ratio(double level, double integral) { return integral > 0.0 ? level / integral : 0.0; }

/// mu{Df > lambda} against the Orlicz integral of order rank-1, per lambda.
/// Empty `lambdas` selects default_lambda_grid(f).
inline WeakTypeReport weak_type_sweep(const GridFunction &f, const ShiftFamily &family, const MaximalSpec &spec,
                                      std::vector<double> lambdas = {}, WrapPolicy policy = WrapPolicy::guarded) {
  WeakTypeReport rep;
  rep.rank = rank(family);
  rep.count = family.count();
  rep.spec = spec;
  if (rep.rank == 0)
    throw domain_error("weak_type_sweep: family has rank 0");
  rep.weight_order = static_cast<int>(rep.rank) - 1;
  if (lambdas.empty())
    lambdas = default_lambda_grid(f);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0))
      throw domain_error("weak_type_sweep: lambda values must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      throw domain_error("weak_type_sweep: lambda grid must be strictly increasing");
  }
  auto Df = discrete_maximal(f, family, spec, policy);
  OrliczWeight w(rep.weight_order);
  for (double lambda : lambdas) {
    double level = level_set_measure(Df, lambda);
    double integral = orlicz_integral(f, w, lambda);
    double ratio = weak_ratio(level, integral);
    rep.lambdas.push_back(lambda);
    rep.level_sets.push_back(level);
    rep.integrals.push_back(integral);
    rep.ratios.push_back(ratio);
    rep.sup_ratio = std::max(rep.sup_ratio, ratio);
  }
  return rep;
}

/// sup over lambda in [lo, hi] of mu{Df > lambda} / int Log_m(|f|/lambda).
/// The level set is constant between consecutive values of Df while the
/// integral decreases, so the supremum over each step is its left limit at
/// the next value v: #{Df >= v} / integral(v). Cost O(#distinct(Df) * #supp(f)).
inline double sup_weak_ratio(const GridFunction &Df, const GridFunction &f, OrliczWeight w, double lo,
                             double hi = std::numeric_limits<double>::infinity()) {
  std::vector<double> support;
  for (double v : f.values())
    if (v != 0.0)
      support.push_back(std::abs(v));
  const double size = static_cast<double>(f.size());
  auto integral = [&](double lambda) {
    compensated_sum acc;
    for (double v : support)
      acc += orlicz_eval(w, v / lambda);
    return acc.value() / size;
  };
  std::vector<double> values(Df.values().begin(), Df.values().end());
  std::sort(values.begin(), values.end(), std::greater<>());
  double best = 0.0;
  std::size_t i = 0;
  while (i < values.size()) {
    double v = values[i];
    std::size_t j = i;
    while (j < values.size() && values[j] == v)
      ++j;
    // j points now satisfy Df >= v
    if (v > lo && v <= hi)
      best = std::max(best, weak_ratio(static_cast<double>(j) / size, integral(v)));
    if (v > hi && (j == values.size() || values[j] <= hi))
      best = std::max(best, weak_ratio(static_cast<double>(j) / size, integral(hi)));
    i = j;
  }
  return best;
}

struct ConvergenceReport {
  std::vector<WindowSpec> rungs;
  std::vector<double> sup_deviation;
  std::vector<double> l1_deviation;
  double mean = 0.0;
};

/// Rungs (2^i, ..., 2^i) for i = 0, 1, ... while the guard (or, for the cyclic
/// policy, the smallest modulus) allows.
inline std::vector<WindowSpec> dyadic_ladder(const ShiftFamily &family, WrapPolicy policy) {
  std::vector<WindowSpec> ladder;
  for (index_t s = 1;; s *= 2) {
    if (policy == WrapPolicy::guarded ? guard_bound(family, s) >= family.space().min_modulus()
                                      : s > family.space().min_modulus())
      break;
    ladder.emplace_back(std::vector<index_t>(family.count(), s));
  }
  return ladder;
}

/// Deviation of A_s f from the mean of f at each rung. Exact on the integer path.
inline ConvergenceReport convergence_probe(const GridFunction &f, const ShiftFamily &family,
                                           std::vector<WindowSpec> ladder = {},
                                           WrapPolicy policy = WrapPolicy::guarded) {
  if (ladder.empty())
    ladder = dyadic_ladder(family, policy);
  ConvergenceReport rep;
  rep.mean = f.mean();
  const auto size = f.size();
  for (const auto &w : ladder) {
    auto avg = multi_average(f, family, w, policy);
    if (avg.is_exact()) {
      __int128 total = 0;
      for (auto v : f.numerators())
        total += v;
      const __int128 vol = w.volume();
      __int128 sup = 0, sum = 0;
      for (auto a : avg.numerators()) {
        __int128 diff = static_cast<__int128>(a) * size - total * vol;
        if (diff < 0)
          diff = -diff;
        sup = std::max(sup, diff);
        sum += diff;
      }
      double scale = static_cast<double>(f.denominator()) * static_cast<double>(vol) * static_cast<double>(size);
      rep.sup_deviation.push_back(static_cast<double>(sup) / scale);
      rep.l1_deviation.push_back(static_cast<double>(sum) / scale / static_cast<double>(size));
    } else {
      double sup = 0.0;
      compensated_sum sum;
      for (double a : avg.values()) {
        double diff = std::abs(a - rep.mean);
        sup = std::max(sup, diff);
        sum += diff;
      }
      rep.sup_deviation.push_back(sup);
      rep.l1_deviation.push_back(sum.value() / static_cast<double>(size));
    }
    rep.rungs.push_back(w);
  }
  return rep;
}

struct ExtensionResult {
  bool holds = true;
  index_t witness = -1;     // first violating point, if any
  double extended = 0.0;    // averaged over all n generators at the witness
  double base_scaled = 0.0; // A_s(f)(witness) / prod t_j
  index_t points_checked = 0;
};

/// Pointwise A_{(s,t)}(f) >= A_s(f) / prod t_j for non-negative f, where A_s
/// averages over the first s.size() generators only.
inline ExtensionResult divergence_extension_check(const GridFunction &f, const ShiftFamily &family,
                                                  const WindowSpec &s, const WindowSpec &t,
                                                  WrapPolicy policy = WrapPolicy::guarded) {
  for (double v : f.values())
    if (v < 0.0)
      throw domain_error("divergence_extension_check: f must be non-negative");
  const std::size_t d = s.sides.size();
  if (d == 0 || d + t.sides.size() != family.count())
    throw domain_error("divergence_extension_check: s and t must split the generators");
  std::vector<std::size_t> head(d);
  for (std::size_t j = 0; j < d; ++j)
    head[j] = j;
  auto sub = family.subfamily(head);
  auto sides = s.sides;
  sides.insert(sides.end(), t.sides.begin(), t.sides.end());
  WindowSpec full(sides);
  check_window(family, full.max_side(), policy);
  auto base = multi_average(f, sub, s, policy);
  auto ext = multi_average(f, family, full, policy);
  const double tvol = static_cast<double>(t.volume());

  ExtensionResult res;
  res.points_checked = f.size();
  for (index_t x = 0; x < f.size(); ++x) {
    bool ok;
    if (f.is_exact()) {
      // both over den * prod s * prod t
      ok = ext.numerators()[static_cast<std::size_t>(x)] >= base.numerators()[static_cast<std::size_t>(x)];
    } else {
      double lhs = ext[x] * tvol, rhs = base[x];
      ok = lhs >= rhs - 1e-12 * std::max(1.0, rhs);
    }
    if (!ok) {
      res.holds = false;
      res.witness = x;
      res.extended = ext[x];
      res.base_scaled = base[x] / tvol;
      break;
    }
  }
  return res;
}

struct SharpnessReport {
  std::vector<double> heights;
  std::vector<double> primary;  // sup ratio against Log_{d-1}
  std::vector<double> lower;    // sup ratio against Log_{max(d-2, 0)}
  std::size_t rank = 0;
  int primary_order = 0;
  int lower_order = 0;
  MaximalSpec spec;
  // diagnosis
  double tail_start = 64.0;
  double tail_variation = 0.0; // max/min - 1 of primary over heights >= tail_start
  double lower_growth = 0.0;   // lower.back() / lower.front()
  bool lower_monotone = true;  // non-decreasing
  double lower_log_slope = 0.0; // least-squares slope of lower against ln H
};

/// Spikes f_H = H * indicator{point}; ratios are suprema over lambda >= 1.
inline SharpnessReport sharpness_sweep(const ShiftFamily &family, std::vector<double> heights, const MaximalSpec &spec,
                                       index_t point = 0, WrapPolicy policy = WrapPolicy::guarded,
                                       double tail_start = 64.0) {
  SharpnessReport rep;
  rep.rank = rank(family);
  if (rep.rank < 1)
    throw domain_error("sharpness_sweep: rank must be >= 1");
  if (heights.empty())
    throw domain_error("sharpness_sweep: no heights");
  for (std::size_t i = 0; i < heights.size(); ++i)
    if (!(heights[i] > 0.0) || (i > 0 && !(heights[i] > heights[i - 1])))
      throw domain_error("sharpness_sweep: heights must be positive and increasing");
  rep.spec = spec;
  rep.tail_start = tail_start;
  rep.primary_order = static_cast<int>(rep.rank) - 1;
  rep.lower_order = std::max(0, static_cast<int>(rep.rank) - 2);
  check_window(family, spec.cap, policy);
  for (double H : heights) {
    auto f = GridFunction::spike(family.space(), H, point);
    auto Df = discrete_maximal(f, family, spec, policy);
    rep.heights.push_back(H);
    rep.primary.push_back(sup_weak_ratio(Df, f, OrliczWeight(rep.primary_order), 1.0));
    rep.lower.push_back(sup_weak_ratio(Df, f, OrliczWeight(rep.lower_order), 1.0));
  }

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < rep.heights.size(); ++i) {
    if (rep.heights[i] >= tail_start) {
      lo = std::min(lo, rep.primary[i]);
      hi = std::max(hi, rep.primary[i]);
    }
    if (i > 0 && rep.lower[i] < rep.lower[i - 1])
      rep.lower_monotone = false;
  }
  rep.tail_variation = (hi > 0.0 && std::isfinite(lo) && lo > 0.0) ? hi / lo - 1.0 : 0.0;
  rep.lower_growth = rep.lower.front() > 0.0 ? rep.lower.back() / rep.lower.front() : 0.0;
  if (rep.heights.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < rep.heights.size(); ++i) {
      mx += std::log(rep.heights[i]);
      my += rep.lower[i];
    }
    mx /= static_cast<double>(rep.heights.size());
    my /= static_cast<double>(rep.heights.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < rep.heights.size(); ++i) {
      double dx = std::log(rep.heights[i]) - mx;
      sxy += dx * (rep.lower[i] - my);
      sxx += dx * dx;
    }
    rep.lower_log_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return rep;
}

// ---- serialization -------------------------------------------------------

inline std::string mode_name(MaximalMode m) { return m == MaximalMode::exact ? "exact" : "dyadic"; }

inline void to_json(nlohmann::json &j, const WeakTypeReport &r) {
  j = nlohmann::json{{"lambda", r.lambdas},        {"level_set", r.level_sets}, {"orlicz_integral", r.integrals},
                     {"ratio", r.ratios},          {"sup_ratio", r.sup_ratio},  {"rank", r.rank},
                     {"generators", r.count},      {"weight_order", r.weight_order},
                     {"M", r.spec.cap},            {"mode", mode_name(r.spec.mode)},
                     {"constant_note", "calibration-stability check; no explicit constant is asserted"}};
}

inline void to_json(nlohmann::json &j, const ConvergenceReport &r) {
  std::vector<std::vector<index_t>> rungs;
  for (const auto &w : r.rungs)
    rungs.push_back(w.sides);
  j = nlohmann::json{
      {"rungs", rungs}, {"sup_deviation", r.sup_deviation}, {"l1_deviation", r.l1_deviation}, {"mean", r.mean}};
}

inline void to_json(nlohmann::json &j, const ExtensionResult &r) {
  j = nlohmann::json{{"holds", r.holds},
                     {"witness", r.witness},
                     {"extended", r.extended},
                     {"base_scaled", r.base_scaled},
                     {"points_checked", r.points_checked}};
}

inline void to_json(nlohmann::json &j, const SharpnessReport &r) {
  j = nlohmann::json{{"heights", r.heights},
                     {"ratio_primary", r.primary},
                     {"ratio_lower", r.lower},
                     {"rank", r.rank},
                     {"primary_order", r.primary_order},
                     {"lower_order", r.lower_order},
                     {"M", r.spec.cap},
                     {"mode", mode_name(r.spec.mode)},
                     {"tail_start", r.tail_start},
                     {"tail_variation", r.tail_variation},
                     {"lower_growth", r.lower_growth},
                     {"lower_monotone", r.lower_monotone},
                     {"lower_log_slope", r.lower_log_slope}};
}

inline void write_csv(std::ostream &os, const WeakTypeReport &r) {
  os << "parameter,level_set,orlicz_integral,ratio\n";
  for (std::size_t i = 0; i < r.lambdas.size(); ++i)
    os << format_double(r.lambdas[i]) << ',' << format_double(r.level_sets[i]) << ','
       << format_double(r.integrals[i]) << ',' << format_double(r.ratios[i]) << '\n';
}

// Long format: one row per (height, weight order).
inline void write_csv(std::ostream &os, const SharpnessReport &r) {
  os << "parameter,order,ratio\n";
  for (std::size_t i = 0; i < r.heights.size(); ++i) {
    os << format_double(r.heights[i]) << ',' << r.primary_order << ',' << format_double(r.primary[i]) << '\n';
    os << format_double(r.heights[i]) << ',' << r.lower_order << ',' << format_double(r.lower[i]) << '\n';
  }
}

inline void write_csv(std::ostream &os, const ConvergenceReport &r) {
  os << "parameter,sup_deviation,l1_deviation\n";
  for (std::size_t i = 0; i < r.rungs.size(); ++i)
    os << r.rungs[i].max_side() << ',' << format_double(r.sup_deviation[i]) << ','
       << format_double(r.l1_deviation[i]) << '\n';
}

} // namespace ergolab
