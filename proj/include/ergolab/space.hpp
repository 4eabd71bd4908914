#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "ergolab/errors.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

using index_t = std::int64_t;

/// Finite cyclic group Z_{N_1} x ... x Z_{N_D} with the uniform probability
/// measure. Points are numbered lexicographically, x_1 most significant.
class GridSpace {
public:
  GridSpace() = default;

  explicit GridSpace(std::vector<index_t> moduli) : moduli_(std::move(moduli)) {
    if (moduli_.empty())
      throw domain_error("GridSpace: at least one axis required");
    size_ = 1;
    for (index_t m : moduli_) {
      if (m < 1)
        throw domain_error("GridSpace: moduli must be >= 1");
      size_ *= m;
    }
    strides_.assign(moduli_.size(), 1);
    for (std::size_t i = moduli_.size() - 1; i-- > 0;)
      strides_[i] = strides_[i + 1] * moduli_[i + 1];
  }

  /// Cyclic space of the same modulus on every axis.
  static GridSpace cube(std::size_t dims, index_t modulus) {
    return GridSpace(std::vector<index_t>(dims, modulus));
  }

  std::size_t dims() const { return moduli_.size(); }
  index_t size() const { return size_; }
  std::span<const index_t> moduli() const { return moduli_; }
  index_t min_modulus() const {
    index_t m = moduli_.front();
    for (index_t v : moduli_)
      m = std::min(m, v);
    return m;
  }

  // Each point carries mass 1/|X|.
  double point_mass() const { return 1.0 / static_cast<double>(size_); }

  std::vector<index_t> coords(index_t idx) const {
    std::vector<index_t> c(dims());
    for (std::size_t i = 0; i < dims(); ++i) {
      c[i] = idx / strides_[i];
      idx %= strides_[i];
    }
    return c;
  }

  index_t index(std::span<const index_t> c) const {
    index_t idx = 0;
    for (std::size_t i = 0; i < dims(); ++i)
      idx += wrap(c[i], i) * strides_[i];
    return idx;
  }

  /// Index of x + scale*v (mod moduli).
  index_t translate(index_t idx, std::span<const index_t> v, index_t scale = 1) const {
    index_t out = 0;
    for (std::size_t i = 0; i < dims(); ++i) {
      index_t c = idx / strides_[i];
      idx %= strides_[i];
      index_t step = wrap(v[i], i) * (wrap(scale, i)) % moduli_[i];
      out += ((c + step) % moduli_[i]) * strides_[i];
    }
    return out;
  }

  index_t wrap(index_t value, std::size_t axis) const {
    index_t m = moduli_[axis];
    index_t r = value % m;
    return r < 0 ? r + m : r;
  }

  bool operator==(const GridSpace &o) const { return moduli_ == o.moduli_; }

private:
  std::vector<index_t> moduli_;
  std::vector<index_t> strides_;
  index_t size_ = 0;
};

/// Real-valued function on a GridSpace. When built from integers it keeps the
/// numerators and a common denominator so exact paths can use integer sums.
class GridFunction {
public:
  GridFunction() = default;

  GridFunction(GridSpace space, std::vector<double> values)
      : space_(std::move(space)), values_(std::move(values)) {
    if (static_cast<index_t>(values_.size()) != space_.size())
      throw domain_error("GridFunction: value count does not match |X|");
  }

  static GridFunction from_integers(GridSpace space, std::vector<std::int64_t> numerators,
                                    std::int64_t denominator = 1) {
    if (denominator < 1)
      throw domain_error("GridFunction: denominator must be >= 1");
    std::vector<double> values(numerators.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = static_cast<double>(numerators[i]) / static_cast<double>(denominator);
    GridFunction f(std::move(space), std::move(values));
    f.numerators_ = std::move(numerators);
    f.denominator_ = denominator;
    return f;
  }

  static GridFunction constant(GridSpace space, double c) {
    auto n = static_cast<std::size_t>(space.size());
    return GridFunction(std::move(space), std::vector<double>(n, c));
  }

  /// height * indicator{point}; exact when height is an integer.
  static GridFunction spike(GridSpace space, double height, index_t point = 0) {
    if (point < 0 || point >= space.size())
      throw domain_error("spike: point outside the space");
    if (height == std::floor(height) && std::abs(height) < 9.0e15) {
      std::vector<std::int64_t> nums(static_cast<std::size_t>(space.size()), 0);
      nums[static_cast<std::size_t>(point)] = static_cast<std::int64_t>(height);
      return from_integers(std::move(space), std::move(nums));
    }
    auto f = constant(std::move(space), 0.0);
    f.values_[static_cast<std::size_t>(point)] = height;
    return f;
  }

  const GridSpace &space() const { return space_; }
  index_t size() const { return space_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](index_t i) const { return values_[static_cast<std::size_t>(i)]; }

  bool is_exact() const { return denominator_.has_value(); }
  std::int64_t denominator() const { return denominator_.value_or(1); }
  std::span<const std::int64_t> numerators() const { return numerators_; }

  GridFunction abs() const {
    if (is_exact()) {
      auto nums = numerators_;
      for (auto &v : nums)
        v = v < 0 ? -v : v;
      return from_integers(space_, std::move(nums), *denominator_);
    }
    auto vals = values_;
    for (auto &v : vals)
      v = std::abs(v);
    return GridFunction(space_, std::move(vals));
  }

  /// Mean with respect to the uniform measure; compensated, lexicographic order.
  double mean() const {
    if (is_exact()) {
      __int128 total = 0;
      for (auto v : numerators_)
        total += v;
      return static_cast<double>(total) / (static_cast<double>(*denominator_) * static_cast<double>(size()));
    }
    compensated_sum acc;
    for (double v : values_)
      acc += v;
    return acc.value() / static_cast<double>(size());
  }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_)
      m = std::max(m, std::abs(v));
    return m;
  }

  // ||f||_1 with respect to the probability measure.
  double l1_norm() const { return abs().mean(); }

private:
  GridSpace space_;
  std::vector<double> values_;
  std::vector<std::int64_t> numerators_;
  std::optional<std::int64_t> denominator_;
};

/// Weight Log_m(t) = t (1 + max{0, ln(t)^m}); order 0 is plain t.
struct OrliczWeight {
  int order = 0;

  explicit OrliczWeight(int m = 0) : order(m) {
    if (m < 0)
      throw domain_error("OrliczWeight: order must be >= 0");
  }
};

inline double orlicz_eval(OrliczWeight w, double t) {
  if (!(t >= 0.0))
    throw domain_error("orlicz_eval: t must be non-negative");
  if (w.order == 0 || t == 0.0)
    return t;
  // ln t < 0 for t < 1, and max{0, (ln t)^m} must not pick up even powers there.
  if (t <= 1.0)
    return t;
  return t * (1.0 + std::pow(std::log(t), w.order));
}

/// (1/|X|) * sum_x Log_m(|f(x)| / lambda).
inline double orlicz_integral(const GridFunction &f, OrliczWeight w, double lambda) {
  if (!(lambda > 0.0))
    throw domain_error("orlicz_integral: lambda must be positive");
  const double n = static_cast<double>(f.size());
  if (w.order == 0 && f.is_exact()) {
    __int128 total = 0;
    for (auto v : f.numerators())
      total += v < 0 ? -v : v;
    return static_cast<double>(total) / (lambda * static_cast<double>(f.denominator()) * n);
  }
  compensated_sum acc;
  for (double v : f.values())
    acc += orlicz_eval(w, std::abs(v) / lambda);
  return acc.value() / n;
}

/// mu{x : f(x) > lambda}, strict inequality.
inline double level_set_measure(const GridFunction &f, double lambda) {
  index_t count = 0;
  for (double v : f.values())
    count += v > lambda ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(f.size());
}

// 17 significant digits, '.' separator regardless of locale.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream &os, const GridFunction &f) {
  os << "index,value\n";
  for (index_t i = 0; i < f.size(); ++i)
    os << i << ',' << format_double(f[i]) << '\n';
}

inline GridFunction read_csv(std::istream &is, const GridSpace &space) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("index,value", 0) != 0)
    throw domain_error("read_csv: missing 'index,value' header");
  std::vector<double> values(static_cast<std::size_t>(space.size()));
  std::vector<bool> seen(values.size(), false);
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r")
      continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw domain_error("read_csv: malformed row '" + line + "'");
    index_t idx = std::stoll(line.substr(0, comma));
    double v = std::strtod(line.c_str() + comma + 1, nullptr);
    if (idx < 0 || idx >= space.size())
      throw domain_error("read_csv: index out of range");
    values[static_cast<std::size_t>(idx)] = v;
    seen[static_cast<std::size_t>(idx)] = true;
  }
  for (bool s : seen)
    if (!s)
      throw domain_error("read_csv: missing rows");
  return GridFunction(space, std::move(values));
}

} // namespace ergolab
