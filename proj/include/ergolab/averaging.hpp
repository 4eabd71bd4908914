#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>
#include <vector>

#include "ergolab/errors.hpp"
#include "ergolab/lattice.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/space.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

// guarded: refuse windows that could wrap around the grid. cyclic: no check.
enum class WrapPolicy { guarded, cyclic };

struct WindowSpec {
  std::vector<index_t> sides;

  WindowSpec() = default;
  explicit WindowSpec(std::vector<index_t> s) : sides(std::move(s)) {
    for (index_t v : sides)
      if (v < 1)
        throw domain_error("WindowSpec: sides must be >= 1");
  }
  index_t volume() const {
    index_t p = 1;
    for (index_t v : sides)
      p *= v;
    return p;
  }
  index_t max_side() const { return sides.empty() ? 0 : *std::max_element(sides.begin(), sides.end()); }
};

enum class MaximalMode { exact, dyadic };

struct MaximalSpec {
  index_t cap = 1;
  MaximalMode mode = MaximalMode::dyadic;

  MaximalSpec() = default;
  MaximalSpec(index_t m, MaximalMode md) : cap(m), mode(md) {
    if (m < 1)
      throw domain_error("MaximalSpec: cap must be >= 1");
  }

  /// Admissible side lengths: 1..M, or powers of two up to M.
  std::vector<index_t> sides() const {
    std::vector<index_t> out;
    if (mode == MaximalMode::exact) {
      for (index_t s = 1; s <= cap; ++s)
        out.push_back(s);
    } else {
      for (index_t s = 1; s <= cap; s *= 2)
        out.push_back(s);
    }
    return out;
  }
};

/// M * max_k ||v_k||_inf * n; guarded windows need this below the smallest modulus.
inline index_t guard_bound(const ShiftFamily &family, index_t max_side) {
  return max_side * family.max_norm() * static_cast<index_t>(family.count());
}

inline void check_window(const ShiftFamily &family, index_t max_side, WrapPolicy policy) {
  if (policy == WrapPolicy::cyclic)
    return;
  index_t bound = guard_bound(family, max_side);
  if (bound >= family.space().min_modulus())
    throw aliasing_error("wrap-around aliasing: M*max|v|*n = " + std::to_string(max_side) + "*" +
                         std::to_string(family.max_norm()) + "*" + std::to_string(family.count()) + " = " +
                         std::to_string(bound) + " >= min modulus " +
                         std::to_string(family.space().min_modulus()));
}

namespace detail {

inline std::vector<index_t> step_table(const GridSpace &space, const IntVector &v) {
  std::vector<index_t> next(static_cast<std::size_t>(space.size()));
  parallel_for(next.size(), [&](std::size_t x) { next[x] = space.translate(static_cast<index_t>(x), v); });
  return next;
}

// Exact numerators for integer-valued functions, doubles otherwise.
template <typename T> std::vector<T> raw_values(const GridFunction &f) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    return {f.numerators().begin(), f.numerators().end()};
  } else {
    return {f.values().begin(), f.values().end()};
  }
}

inline double quotient(std::int64_t sum, std::int64_t denominator, index_t volume) {
  return static_cast<double>(sum) / (static_cast<double>(denominator) * static_cast<double>(volume));
}

inline double quotient(double sum, std::int64_t, index_t volume) {
  return sum / static_cast<double>(volume);
}

// h(x) = sum_{k<s} f(x + k v), one running window per cyclic orbit of x -> x+v.
template <typename T>
std::vector<T> orbit_window_sums(const GridSpace &space, std::span<const T> f, const IntVector &v, index_t s) {
  const auto size = static_cast<std::size_t>(space.size());
  auto next = step_table(space, v);
  std::vector<index_t> starts;
  index_t orbit_len = 0;
  {
    std::vector<char> seen(size, 0);
    for (std::size_t x = 0; x < size; ++x) {
      if (seen[x])
        continue;
      starts.push_back(static_cast<index_t>(x));
      index_t len = 0;
      std::size_t y = x;
      do {
        seen[y] = 1;
        y = static_cast<std::size_t>(next[y]);
        ++len;
      } while (y != x);
      orbit_len = len; // all cosets of <v> have the same length
    }
  }
  const index_t L = orbit_len;
  const index_t full = s / L, part = s % L;
  std::vector<T> out(size);
  parallel_for(
      starts.size(),
      [&](std::size_t o) {
        std::vector<index_t> orbit(static_cast<std::size_t>(L));
        index_t y = starts[o];
        for (index_t i = 0; i < L; ++i) {
          orbit[static_cast<std::size_t>(i)] = y;
          y = next[static_cast<std::size_t>(y)];
        }
        auto at = [&](index_t i) { return f[static_cast<std::size_t>(orbit[static_cast<std::size_t>(i % L)])]; };
        if constexpr (std::is_same_v<T, std::int64_t>) {
          T total = 0;
          if (full > 0)
            for (index_t i = 0; i < L; ++i)
              total += at(i);
          T window = 0;
          for (index_t i = 0; i < part; ++i)
            window += at(i);
          for (index_t i = 0; i < L; ++i) {
            out[static_cast<std::size_t>(orbit[static_cast<std::size_t>(i)])] = full * total + window;
            window += at(i + part) - at(i);
          }
        } else {
          compensated_sum total;
          if (full > 0)
            for (index_t i = 0; i < L; ++i)
              total += at(i);
          const double whole = static_cast<double>(full) * total.value();
          compensated_sum window;
          for (index_t i = 0; i < part; ++i)
            window += at(i);
          for (index_t i = 0; i < L; ++i) {
            compensated_sum h(whole);
            h += window.value();
            out[static_cast<std::size_t>(orbit[static_cast<std::size_t>(i)])] = h.value();
            window += at(i + part);
            window -= at(i);
          }
        }
      },
      64);
  return out;
}

template <typename T>
std::vector<T> box_sums(const ShiftFamily &family, std::span<const T> f, const WindowSpec &w) {
  std::vector<T> cur(f.begin(), f.end());
  for (std::size_t j = 0; j < family.count(); ++j)
    if (w.sides[j] > 1)
      cur = orbit_window_sums<T>(family.space(), cur, family.generator(j), w.sides[j]);
  return cur;
}

template <typename T>
GridFunction wrap_sums(const GridFunction &f, std::vector<T> sums, index_t volume) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    return GridFunction::from_integers(f.space(), std::move(sums), f.denominator() * volume);
  } else {
    for (auto &v : sums)
      v /= static_cast<double>(volume);
    return GridFunction(f.space(), std::move(sums));
  }
}

// Depth-first over directions; each level extends the window of its direction
// one step (exact) or by doubling (dyadic) and hands the partial sums down.
template <typename T> class MaximalSearch {
public:
  MaximalSearch(const ShiftFamily &family, const MaximalSpec &spec, std::int64_t denominator)
      : family_(family), spec_(spec), denominator_(denominator),
        size_(static_cast<std::size_t>(family.space().size())) {
    for (std::size_t j = 0; j < family.count(); ++j) {
      std::vector<std::vector<index_t>> tables;
      tables.push_back(step_table(family.space(), family.generator(j)));
      if (spec.mode == MaximalMode::dyadic) {
        for (index_t m = 2; 2 * m <= spec.cap; m *= 2) {
          const auto &prev = tables.back();
          std::vector<index_t> t(size_);
          parallel_for(size_, [&](std::size_t x) { t[x] = prev[static_cast<std::size_t>(prev[x])]; });
          tables.push_back(std::move(t));
        }
      }
      jumps_.push_back(std::move(tables));
    }
  }

  std::vector<double> run(std::vector<T> base) {
    best_.assign(size_, 0.0);
    descend(0, base, 1);
    return std::move(best_);
  }

private:
  void descend(std::size_t level, const std::vector<T> &in, index_t volume) {
    if (level == family_.count()) {
      parallel_for(size_, [&](std::size_t x) {
        double avg = quotient(in[x], denominator_, volume);
        if (avg > best_[x])
          best_[x] = avg;
      });
      return;
    }
    std::vector<T> cur = in;
    if (spec_.mode == MaximalMode::exact) {
      const auto &next = jumps_[level][0];
      std::vector<index_t> pos(size_);
      for (std::size_t x = 0; x < size_; ++x)
        pos[x] = static_cast<index_t>(x);
      for (index_t s = 1; s <= spec_.cap; ++s) {
        if (s > 1) {
          parallel_for(size_, [&](std::size_t x) {
            pos[x] = next[static_cast<std::size_t>(pos[x])];
            cur[x] += in[static_cast<std::size_t>(pos[x])];
          });
        }
        descend(level + 1, cur, volume * s);
      }
    } else {
      std::size_t t = 0;
      for (index_t s = 1; s <= spec_.cap; s *= 2, ++t) {
        if (s > 1) {
          const auto &jump = jumps_[level][t - 1]; // x -> x + (s/2) v
          std::vector<T> doubled(size_);
          parallel_for(size_, [&](std::size_t x) { doubled[x] = cur[x] + cur[static_cast<std::size_t>(jump[x])]; });
          cur = std::move(doubled);
        }
        descend(level + 1, cur, volume * s);
      }
    }
  }

  const ShiftFamily &family_;
  MaximalSpec spec_;
  std::int64_t denominator_;
  std::size_t size_;
  std::vector<std::vector<std::vector<index_t>>> jumps_;
  std::vector<double> best_;
};

inline void require_space(const GridFunction &f, const ShiftFamily &family) {
  if (!(f.space() == family.space()))
    throw domain_error("function and family live on different spaces");
}

} // namespace detail

/// h(x) = sum_{k=0}^{s-1} f(x + k v), O(|X|) via cyclic orbits.
inline GridFunction directional_window_sum(const GridFunction &f, const IntVector &v, index_t s,
                                           WrapPolicy policy = WrapPolicy::guarded) {
  if (s < 1)
    throw domain_error("directional_window_sum: s must be >= 1");
  if (v.size() != f.space().dims())
    throw domain_error("directional_window_sum: direction has wrong dimension");
  check_window(ShiftFamily(f.space(), {v}), s, policy);
  if (f.is_exact()) {
    auto nums = detail::raw_values<std::int64_t>(f);
    auto sums = detail::orbit_window_sums<std::int64_t>(f.space(), nums, v, s);
    return GridFunction::from_integers(f.space(), std::move(sums), f.denominator());
  }
  auto vals = detail::raw_values<double>(f);
  return GridFunction(f.space(), detail::orbit_window_sums<double>(f.space(), vals, v, s));
}

/// (1/prod s_j) sum_{k in [0,s)} f(x + sum_j k_j v_j). Integer-valued input
/// gives an exact result carrying denominator den * prod s_j.
inline GridFunction multi_average(const GridFunction &f, const ShiftFamily &family, const WindowSpec &w,
                                  WrapPolicy policy = WrapPolicy::guarded) {
  detail::require_space(f, family);
  if (w.sides.size() != family.count())
    throw domain_error("multi_average: window needs one side per generator");
  check_window(family, w.max_side(), policy);
  if (f.is_exact()) {
    auto sums = detail::box_sums<std::int64_t>(family, detail::raw_values<std::int64_t>(f), w);
    return detail::wrap_sums(f, std::move(sums), w.volume());
  }
  auto sums = detail::box_sums<double>(family, detail::raw_values<double>(f), w);
  return detail::wrap_sums(f, std::move(sums), w.volume());
}

/// Df(x) = max over admissible windows of the average of |f|.
inline GridFunction discrete_maximal(const GridFunction &f, const ShiftFamily &family, const MaximalSpec &spec,
                                     WrapPolicy policy = WrapPolicy::guarded) {
  detail::require_space(f, family);
  check_window(family, spec.cap, policy);
  auto g = f.abs();
  if (g.is_exact()) {
    detail::MaximalSearch<std::int64_t> search(family, spec, g.denominator());
    return GridFunction(g.space(), search.run(detail::raw_values<std::int64_t>(g)));
  }
  detail::MaximalSearch<double> search(family, spec, 1);
  return GridFunction(g.space(), search.run(detail::raw_values<double>(g)));
}

/// Nested-loop evaluation of the box average straight from the definition.
inline GridFunction brute_force_average(const GridFunction &f, const ShiftFamily &family, const WindowSpec &w) {
  detail::require_space(f, family);
  const auto &space = family.space();
  const std::size_t n = family.count(), D = space.dims();
  const auto size = static_cast<std::size_t>(space.size());
  std::vector<std::int64_t> isums(f.is_exact() ? size : 0);
  std::vector<double> dsums(f.is_exact() ? 0 : size);
  for (std::size_t x = 0; x < size; ++x) {
    auto base = space.coords(static_cast<index_t>(x));
    std::vector<index_t> k(n, 0);
    std::int64_t isum = 0;
    compensated_sum dsum;
    for (;;) {
      std::vector<index_t> c = base;
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < D; ++i)
          c[i] += k[j] * family.generator(j)[i];
      index_t y = space.index(c);
      if (f.is_exact())
        isum += f.numerators()[static_cast<std::size_t>(y)];
      else
        dsum += f[y];
      std::size_t j = 0;
      while (j < n && ++k[j] == w.sides[j])
        k[j++] = 0;
      if (j == n)
        break;
    }
    if (f.is_exact())
      isums[x] = isum;
    else
      dsums[x] = dsum.value();
  }
  if (f.is_exact())
    return detail::wrap_sums(f, std::move(isums), w.volume());
  return detail::wrap_sums(f, std::move(dsums), w.volume());
}

/// Pointwise max of brute_force_average(|f|) over every admissible window.
inline GridFunction brute_force_maximal(const GridFunction &f, const ShiftFamily &family, const MaximalSpec &spec) {
  auto g = f.abs();
  const auto sides = spec.sides();
  const std::size_t n = family.count();
  std::vector<double> best(static_cast<std::size_t>(g.size()), 0.0);
  std::vector<std::size_t> pick(n, 0);
  for (;;) {
    std::vector<index_t> s(n);
    for (std::size_t j = 0; j < n; ++j)
      s[j] = sides[pick[j]];
    auto avg = brute_force_average(g, family, WindowSpec(s));
    for (std::size_t x = 0; x < best.size(); ++x)
      best[x] = std::max(best[x], avg.values()[x]);
    std::size_t j = 0;
    while (j < n && ++pick[j] == sides.size())
      pick[j++] = 0;
    if (j == n)
      break;
  }
  return GridFunction(g.space(), std::move(best));
}

} // namespace ergolab
