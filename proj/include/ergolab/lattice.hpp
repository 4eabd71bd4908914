#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

#include "ergolab/errors.hpp"
#include "ergolab/space.hpp"

namespace ergolab {

using bigint = boost::multiprecision::cpp_int;
using bigrational = boost::multiprecision::cpp_rational;
using IntVector = std::vector<index_t>;

/// n commuting translations U_k : x -> x + v_k on a GridSpace. Generators are
/// kept as the given integers: lattice algebra works in Z^D without the modulus,
/// and only the action reduces them.
class ShiftFamily {
public:
  ShiftFamily() = default;

  ShiftFamily(GridSpace space, std::vector<IntVector> generators)
      : space_(std::move(space)), generators_(std::move(generators)) {
    if (generators_.empty())
      throw domain_error("ShiftFamily: at least one generator required");
    for (const auto &v : generators_)
      if (v.size() != space_.dims())
        throw domain_error("ShiftFamily: generator length does not match space dimension");
  }

  const GridSpace &space() const { return space_; }
  std::size_t count() const { return generators_.size(); }
  std::size_t dims() const { return space_.dims(); }
  const IntVector &generator(std::size_t k) const { return generators_[k]; }
  const std::vector<IntVector> &generators() const { return generators_; }

  IntVector reduced(std::size_t k) const {
    IntVector r = generators_[k];
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] = space_.wrap(r[i], i);
    return r;
  }

  index_t max_norm() const {
    index_t m = 0;
    for (const auto &v : generators_)
      for (index_t c : v)
        m = std::max(m, c < 0 ? -c : c);
    return m;
  }

  /// Family restricted to the listed generator indices, in that order.
  ShiftFamily subfamily(std::span<const std::size_t> indices) const {
    std::vector<IntVector> gens;
    for (auto k : indices)
      gens.push_back(generators_.at(k));
    return ShiftFamily(space_, std::move(gens));
  }

private:
  GridSpace space_;
  std::vector<IntVector> generators_;
};

/// Integer vector p != 0 with sum_k p_k v_k = 0 in Z^D.
struct RelationVector {
  IntVector p;
};

/// Basis-first reduction: for each non-basis generator k,
/// l_k v_k = sum_j a_{j,k} v_{basis[j]} with l_k >= 1 minimal.
struct ReductionMatrix {
  std::vector<std::size_t> basis;
  std::vector<std::size_t> nonbasis;
  IntVector l;                      // one entry per non-basis generator
  std::vector<IntVector> a;         // d rows, one column per non-basis generator
  std::vector<std::size_t> column_order() const {
    auto order = basis;
    order.insert(order.end(), nonbasis.begin(), nonbasis.end());
    return order;
  }
  /// d x n matrix [I_d | a] in column_order() layout.
  std::vector<IntVector> matrix() const {
    std::size_t d = basis.size();
    std::vector<IntVector> m(d, IntVector(d + nonbasis.size(), 0));
    for (std::size_t j = 0; j < d; ++j) {
      m[j][j] = 1;
      for (std::size_t c = 0; c < nonbasis.size(); ++c)
        m[j][d + c] = a[j][c];
    }
    return m;
  }
};

struct Rational {
  std::int64_t p = 0;
  std::int64_t q = 1;
  bool operator==(const Rational &) const = default;
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

namespace detail {

inline std::int64_t to_int64(const bigint &v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw domain_error("lattice: coefficient exceeds 64-bit range");
  return static_cast<std::int64_t>(v);
}

using BigMatrix = std::vector<std::vector<bigint>>; // row-major

inline BigMatrix column_matrix(const std::vector<IntVector> &cols, std::size_t rows) {
  BigMatrix m(rows, std::vector<bigint>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < rows; ++r)
      m[r][c] = cols[c][r];
  return m;
}

// Fraction-free (Bareiss) elimination; returns the rank over Q.
inline std::size_t bareiss_rank(BigMatrix m) {
  if (m.empty())
    return 0;
  std::size_t rows = m.size(), cols = m[0].size();
  std::size_t rank = 0;
  bigint prev = 1;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][c] == 0)
      ++piv;
    if (piv == rows)
      continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      for (std::size_t k = c + 1; k < cols; ++k)
        m[r][k] = (m[rank][c] * m[r][k] - m[r][c] * m[rank][k]) / prev;
      m[r][c] = 0;
    }
    prev = m[rank][c];
    ++rank;
  }
  return rank;
}

inline std::size_t rank_of(const std::vector<IntVector> &cols, std::size_t dims) {
  if (cols.empty())
    return 0;
  return bareiss_rank(column_matrix(cols, dims));
}

inline bigint gcd_of(const std::vector<bigint> &v) {
  bigint g = 0;
  for (const auto &x : v)
    g = boost::multiprecision::gcd(g, x);
  return g;
}

} // namespace detail

inline std::size_t rank(const ShiftFamily &family) {
  return detail::rank_of(family.generators(), family.dims());
}

/// Basis of the integer kernel {p : V p = 0}, by unimodular column reduction
/// of V (column Hermite form) tracking the transform. Each vector is primitive
/// with its first nonzero entry positive.
inline std::vector<RelationVector> relation_kernel(const ShiftFamily &family) {
  const std::size_t n = family.count(), D = family.dims();
  auto V = detail::column_matrix(family.generators(), D);
  detail::BigMatrix U(n, std::vector<bigint>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    U[i][i] = 1;

  auto col_axpy = [&](std::size_t dst, std::size_t src, const bigint &q) {
    // column dst -= q * column src, in both V and U
    for (std::size_t r = 0; r < D; ++r)
      V[r][dst] -= q * V[r][src];
    for (std::size_t r = 0; r < n; ++r)
      U[r][dst] -= q * U[r][src];
  };
  auto col_swap = [&](std::size_t a, std::size_t b) {
    for (auto &row : V)
      std::swap(row[a], row[b]);
    for (auto &row : U)
      std::swap(row[a], row[b]);
  };

  std::size_t pivot_col = 0;
  for (std::size_t r = 0; r < D && pivot_col < n; ++r) {
    for (;;) {
      // smallest nonzero |V[r][c]| among the active columns becomes the pivot
      std::size_t best = n;
      for (std::size_t c = pivot_col; c < n; ++c)
        if (V[r][c] != 0 && (best == n || abs(V[r][c]) < abs(V[r][best])))
          best = c;
      if (best == n)
        break;
      col_swap(pivot_col, best);
      bool done = true;
      for (std::size_t c = pivot_col + 1; c < n; ++c) {
        if (V[r][c] == 0)
          continue;
        bigint q = V[r][c] / V[r][pivot_col];
        col_axpy(c, pivot_col, q);
        if (V[r][c] != 0)
          done = false;
      }
      if (done) {
        ++pivot_col;
        break;
      }
    }
  }

  std::vector<RelationVector> out;
  for (std::size_t c = pivot_col; c < n; ++c) {
    std::vector<bigint> p(n);
    for (std::size_t r = 0; r < n; ++r)
      p[r] = U[r][c];
    bigint g = detail::gcd_of(p);
    if (g == 0)
      continue;
    auto first = std::find_if(p.begin(), p.end(), [](const bigint &x) { return x != 0; });
    if (*first < 0)
      g = -g;
    RelationVector rel;
    for (auto &x : p)
      rel.p.push_back(detail::to_int64(x / g));
    out.push_back(std::move(rel));
  }
  return out;
}

/// Greedy earliest-index rule: k is kept when v_k is outside span{v_1..v_{k-1}}.
inline std::vector<std::size_t> select_independent(const ShiftFamily &family) {
  std::vector<std::size_t> chosen;
  std::vector<IntVector> cols;
  for (std::size_t k = 0; k < family.count(); ++k) {
    cols.push_back(family.generator(k));
    if (detail::rank_of(cols, family.dims()) > chosen.size())
      chosen.push_back(k);
    else
      cols.pop_back();
  }
  return chosen;
}

inline ReductionMatrix build_reduction(const ShiftFamily &family) {
  ReductionMatrix red;
  red.basis = select_independent(family);
  const std::size_t d = red.basis.size(), D = family.dims();
  if (d == 0)
    throw domain_error("build_reduction: no independent generator");
  for (std::size_t k = 0; k < family.count(); ++k)
    if (!std::binary_search(red.basis.begin(), red.basis.end(), k))
      red.nonbasis.push_back(k);
  red.a.assign(d, IntVector{});

  for (std::size_t k : red.nonbasis) {
    // Solve B y = v_k over Q by Gaussian elimination on [B | v_k].
    std::vector<std::vector<bigrational>> m(D, std::vector<bigrational>(d + 1));
    for (std::size_t r = 0; r < D; ++r) {
      for (std::size_t j = 0; j < d; ++j)
        m[r][j] = family.generator(red.basis[j])[r];
      m[r][d] = family.generator(k)[r];
    }
    std::vector<std::size_t> pivot_row(d);
    std::size_t row = 0;
    for (std::size_t j = 0; j < d; ++j) {
      std::size_t piv = row;
      while (piv < D && m[piv][j] == 0)
        ++piv;
      if (piv == D)
        throw domain_error("build_reduction: basis columns are dependent");
      std::swap(m[piv], m[row]);
      for (std::size_t r = 0; r < D; ++r) {
        if (r == row || m[r][j] == 0)
          continue;
        bigrational factor = m[r][j] / m[row][j];
        for (std::size_t c = j; c <= d; ++c)
          m[r][c] -= factor * m[row][c];
      }
      pivot_row[j] = row++;
    }
    std::vector<bigrational> y(d);
    bigint l = 1;
    for (std::size_t j = 0; j < d; ++j) {
      y[j] = m[pivot_row[j]][d] / m[pivot_row[j]][j];
      bigint den = boost::multiprecision::denominator(y[j]);
      l = l / boost::multiprecision::gcd(l, den) * den;
    }
    red.l.push_back(detail::to_int64(l));
    for (std::size_t j = 0; j < d; ++j) {
      bigrational scaled = y[j] * bigrational(l);
      red.a[j].push_back(detail::to_int64(boost::multiprecision::numerator(scaled)));
    }
    // l v_k must equal the basis combination exactly.
    for (std::size_t r = 0; r < D; ++r) {
      bigint lhs = l * bigint(family.generator(k)[r]);
      bigint rhs = 0;
      for (std::size_t j = 0; j < d; ++j)
        rhs += bigint(red.a[j].back()) * bigint(family.generator(red.basis[j])[r]);
      if (lhs != rhs)
        throw domain_error("build_reduction: vector not in the rational span of the basis");
    }
  }
  return red;
}

/// Rational rotations x -> x + p_k/q_k on the circle, realized as shifts on
/// Z_{Q'} with Q' = lcm(q_k) * guard and v_k = p_k Q' / q_k.
inline ShiftFamily rotation_to_shift(std::span<const Rational> frequencies, index_t guard = 1) {
  if (frequencies.empty())
    throw domain_error("rotation_to_shift: no frequencies");
  if (guard < 1)
    throw domain_error("rotation_to_shift: guard must be >= 1");
  index_t lcm = 1;
  for (const auto &f : frequencies) {
    if (f.q == 0)
      throw domain_error("rotation_to_shift: zero denominator");
    lcm = std::lcm(lcm, f.q < 0 ? -f.q : f.q);
  }
  index_t modulus = lcm * guard;
  std::vector<IntVector> gens;
  for (const auto &f : frequencies) {
    index_t p = f.q < 0 ? -f.p : f.p;
    index_t q = f.q < 0 ? -f.q : f.q;
    gens.push_back({p * (modulus / q)});
  }
  return ShiftFamily(GridSpace({modulus}), std::move(gens));
}

/// Continued-fraction convergents of x in (0,1), skipping the leading 0/1.
/// Stops early when the expansion terminates at double precision.
inline std::vector<Rational> convergents(double x, std::size_t count) {
  if (!(x > 0.0 && x < 1.0))
    throw domain_error("convergents: x must lie in (0,1)");
  if (count == 0)
    throw domain_error("convergents: count must be >= 1");
  std::vector<Rational> out;
  // h/k recurrences seeded with the a_0 = 0 term
  std::int64_t h_prev = 1, k_prev = 0, h = 0, k = 1;
  long double rem = x;
  while (out.size() < count) {
    if (rem <= 0.0L)
      break;
    long double inv = 1.0L / rem;
    auto a = static_cast<std::int64_t>(std::floor(inv));
    rem = inv - static_cast<long double>(a);
    if (a > (std::numeric_limits<std::int64_t>::max() - k_prev) / std::max<std::int64_t>(k, 1))
      break;
    std::int64_t h_next = a * h + h_prev, k_next = a * k + k_prev;
    h_prev = h, k_prev = k, h = h_next, k = k_next;
    out.push_back({h, k});
    // remaining tail below double resolution: the expansion has terminated
    if (rem < 1e-9L * inv || std::abs(static_cast<double>(h) / static_cast<double>(k) - x) == 0.0)
      break;
  }
  return out;
}

inline void to_json(nlohmann::json &j, const ShiftFamily &f) {
  j = nlohmann::json{{"moduli", std::vector<index_t>(f.space().moduli().begin(), f.space().moduli().end())},
                     {"generators", f.generators()}};
}

inline void from_json(const nlohmann::json &j, ShiftFamily &f) {
  auto moduli = j.at("moduli").get<std::vector<index_t>>();
  auto gens = j.at("generators").get<std::vector<IntVector>>();
  f = ShiftFamily(GridSpace(std::move(moduli)), std::move(gens));
}

inline void to_json(nlohmann::json &j, const ReductionMatrix &r) {
  j = nlohmann::json{{"basis", r.basis}, {"l", r.l}, {"a", r.a}};
}

inline void from_json(const nlohmann::json &j, ReductionMatrix &r) {
  r.basis = j.at("basis").get<std::vector<std::size_t>>();
  r.l = j.at("l").get<IntVector>();
  r.a = j.at("a").get<std::vector<IntVector>>();
  r.nonbasis.clear();
  std::size_t n = r.basis.size() + r.l.size();
  for (std::size_t k = 0; k < n; ++k)
    if (std::find(r.basis.begin(), r.basis.end(), k) == r.basis.end())
      r.nonbasis.push_back(k);
}

/// Parses "p/q" or an integer.
inline Rational parse_rational(const std::string &text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos)
      return {std::stoll(text), 1};
    Rational r{std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1))};
    if (r.q == 0)
      throw domain_error("zero denominator in '" + text + "'");
    return r;
  } catch (const std::logic_error &) {
    throw domain_error("cannot parse rational '" + text + "'");
  }
}

} // namespace ergolab
