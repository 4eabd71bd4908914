#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/random.hpp"

namespace ergolab::geometry {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Orthogonal residual threshold for "in span", relative to the vector norm.
inline constexpr double span_tolerance = 1e-9;
// Gram determinant below which a vector set counts as dependent.
inline constexpr double gram_tolerance = 1e-12;

/// n unit vectors in R^D, stored as the columns of a D x n matrix.
class UnitVectorSet {
public:
  UnitVectorSet() = default;

  explicit UnitVectorSet(Mat columns) : cols_(std::move(columns)) {
    if (cols_.rows() < 1 || cols_.cols() < 1)
      throw domain_error("UnitVectorSet: need D >= 1 and n >= 1");
    for (Eigen::Index k = 0; k < cols_.cols(); ++k)
      if (std::abs(cols_.col(k).norm() - 1.0) > 1e-12)
        throw domain_error("UnitVectorSet: column " + std::to_string(k) + " is not a unit vector");
  }

  /// Normalizes the given nonzero vectors.
  static UnitVectorSet normalized(const std::vector<std::vector<double>> &vectors) {
    if (vectors.empty())
      throw domain_error("UnitVectorSet: no vectors");
    Mat m(static_cast<Eigen::Index>(vectors.front().size()), static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      if (vectors[k].size() != vectors.front().size())
        throw domain_error("UnitVectorSet: ragged vectors");
      Vec v = Eigen::Map<const Vec>(vectors[k].data(), static_cast<Eigen::Index>(vectors[k].size()));
      if (v.norm() == 0.0)
        throw domain_error("UnitVectorSet: zero vector");
      m.col(static_cast<Eigen::Index>(k)) = v / v.norm();
    }
    return UnitVectorSet(std::move(m));
  }

  std::size_t dims() const { return static_cast<std::size_t>(cols_.rows()); }
  std::size_t count() const { return static_cast<std::size_t>(cols_.cols()); }
  auto operator[](std::size_t k) const { return cols_.col(static_cast<Eigen::Index>(k)); }
  const Mat &matrix() const { return cols_; }

  UnitVectorSet select(const std::vector<std::size_t> &idx) const {
    Mat m(cols_.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
      m.col(static_cast<Eigen::Index>(i)) = cols_.col(static_cast<Eigen::Index>(idx[i]));
    return UnitVectorSet(std::move(m));
  }

private:
  Mat cols_;
};

/// { sum_j t_j u_j : |t_j| <= r_j }.
class Parallelepiped {
public:
  Parallelepiped() = default;
  Parallelepiped(UnitVectorSet vectors, std::vector<double> radii)
      : vectors_(std::move(vectors)), radii_(std::move(radii)) {
    if (radii_.size() != vectors_.count())
      throw domain_error("Parallelepiped: one radius per vector required");
    for (double r : radii_)
      if (!(r > 0.0))
        throw domain_error("Parallelepiped: radii must be positive");
  }

  const UnitVectorSet &vectors() const { return vectors_; }
  const std::vector<double> &radii() const { return radii_; }
  std::size_t count() const { return radii_.size(); }
  std::size_t dims() const { return vectors_.dims(); }

  Parallelepiped scaled(double t) const {
    auto r = radii_;
    for (auto &v : r)
      v *= t;
    return {vectors_, std::move(r)};
  }

private:
  UnitVectorSet vectors_;
  std::vector<double> radii_;
};

/// Incrementally grown orthonormal basis (modified Gram-Schmidt, one
/// reorthogonalization pass).
class SpanBasis {
public:
  explicit SpanBasis(std::size_t dims) : dims_(dims) {}

  Vec residual(const Vec &v) const {
    Vec r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto &q : basis_)
        r -= q.dot(r) * q;
    return r;
  }

  bool contains(const Vec &v) const { return residual(v).norm() <= span_tolerance * std::max(1.0, v.norm()); }

  // Returns false (and leaves the basis alone) if v is already in the span.
  bool add(const Vec &v) {
    Vec r = residual(v);
    if (r.norm() <= span_tolerance * std::max(1.0, v.norm()))
      return false;
    basis_.push_back(r / r.norm());
    return true;
  }

  std::size_t rank() const { return basis_.size(); }

private:
  std::size_t dims_;
  std::vector<Vec> basis_;
};

inline std::size_t rank(const UnitVectorSet &u) {
  SpanBasis span(u.dims());
  for (std::size_t k = 0; k < u.count(); ++k)
    span.add(u[k]);
  return span.rank();
}

/// Dual basis of independent vectors: columns w_k in span(V) with <w_k, u_i> = delta_ki.
inline Mat dual_basis(const UnitVectorSet &v) {
  const Mat &U = v.matrix();
  Mat gram = U.transpose() * U;
  if (gram.determinant() < gram_tolerance)
    throw degenerate_error("dual basis undefined: vectors are dependent (Gram determinant " +
                           std::to_string(gram.determinant()) + ")");
  // W = U G^{-1}
  return U * gram.ldlt().solve(Mat::Identity(gram.rows(), gram.cols()));
}

inline double gram_determinant(const UnitVectorSet &v) {
  return (v.matrix().transpose() * v.matrix()).determinant();
}

/// Support function sum_j r_j |<phi, u_j>|.
inline double support(const Parallelepiped &R, const Vec &phi) {
  double s = 0.0;
  for (std::size_t j = 0; j < R.count(); ++j)
    s += R.radii()[j] * std::abs(phi.dot(R.vectors()[j]));
  return s;
}

/// x in c*R for R generated by independent vectors, with 1e-9 relative slack on
/// the coordinate bounds and on the residual off span(V).
inline bool membership(const Parallelepiped &R, const Vec &x, double c) {
  if (!(c > 0.0))
    throw domain_error("membership: scale must be positive");
  Mat W = dual_basis(R.vectors());
  Vec t = W.transpose() * x;
  Vec back = R.vectors().matrix() * t;
  if ((x - back).norm() > span_tolerance * std::max(1.0, x.norm()))
    return false;
  for (std::size_t k = 0; k < R.count(); ++k) {
    double bound = c * R.radii()[k];
    if (std::abs(t(static_cast<Eigen::Index>(k))) > bound * (1.0 + span_tolerance))
      return false;
  }
  return true;
}

struct InscribedBall {
  std::vector<double> heights;   // h_j: distance from the origin to the facet pair t_j = +-r_j
  std::vector<double> constants; // c_j = h_j / r_j, depends on the vectors only
  double radius = 0.0;           // min_j h_j
  std::size_t min_facet = 0;     // argmin_j h_j
};

/// Largest centred ball (inside span V) contained in R. h_j = r_j * dist(u_j,
/// span of the other vectors).
inline InscribedBall inscribed_ball(const Parallelepiped &R) {
  const std::size_t n = R.count();
  if (gram_determinant(R.vectors()) < gram_tolerance)
    throw degenerate_error("inscribed_ball: vectors are dependent");
  InscribedBall ball;
  for (std::size_t j = 0; j < n; ++j) {
    SpanBasis others(R.dims());
    for (std::size_t i = 0; i < n; ++i)
      if (i != j)
        others.add(R.vectors()[i]);
    double dist = others.residual(R.vectors()[j]).norm();
    ball.constants.push_back(dist);
    ball.heights.push_back(R.radii()[j] * dist);
  }
  auto it = std::min_element(ball.heights.begin(), ball.heights.end());
  ball.radius = *it;
  ball.min_facet = static_cast<std::size_t>(it - ball.heights.begin());
  return ball;
}

/// Independent-subset decomposition R = Q + H with Q generated by V and R inside c*Q.
struct Decomposition {
  std::vector<std::size_t> order;      // input indices sorted by decreasing radius (stable)
  std::vector<std::size_t> independent; // V, as input indices in sorted order
  std::vector<std::size_t> dependent;   // the rest, in sorted order
  std::vector<std::size_t> blocks;     // 0 = k_0 < k_1 < ... < k_s = n, positions in `order`
  Parallelepiped Q;
  double containment = 1.0;            // c*
  std::size_t rank = 0;

  /// Minkowski summand H: the dependent generators with their radii.
  std::vector<std::size_t> remainder() const { return dependent; }
};

inline Decomposition decompose(const Parallelepiped &R) {
  const std::size_t n = R.count();
  if (n == 0)
    throw domain_error("decompose: no generators");
  Decomposition dec;
  dec.order.resize(n);
  std::iota(dec.order.begin(), dec.order.end(), std::size_t{0});
  std::stable_sort(dec.order.begin(), dec.order.end(),
                   [&](std::size_t a, std::size_t b) { return R.radii()[a] > R.radii()[b]; });

  SpanBasis span(R.dims());
  std::vector<bool> in_v(n, false);
  for (std::size_t pos = 0; pos < n; ++pos) {
    std::size_t k = dec.order[pos];
    if (span.add(R.vectors()[k])) {
      dec.independent.push_back(k);
      in_v[pos] = true;
    } else {
      dec.dependent.push_back(k);
    }
  }
  if (dec.independent.empty())
    throw degenerate_error("decompose: all vectors are zero");
  dec.rank = dec.independent.size();

  // Maximal runs of equal membership; the first run is always in V.
  dec.blocks.push_back(0);
  for (std::size_t pos = 1; pos < n; ++pos)
    if (in_v[pos] != in_v[pos - 1])
      dec.blocks.push_back(pos);
  dec.blocks.push_back(n);

  // Every even block must lie in the span of the odd blocks before it.
  SpanBasis prefix(R.dims());
  for (std::size_t b = 0; b + 1 < dec.blocks.size(); ++b) {
    for (std::size_t pos = dec.blocks[b]; pos < dec.blocks[b + 1]; ++pos) {
      const auto k = dec.order[pos];
      if (b % 2 == 0)
        prefix.add(R.vectors()[k]);
      else if (!prefix.contains(R.vectors()[k]))
        throw degenerate_error("decompose: even block leaves the span of preceding odd blocks");
    }
  }

  std::vector<double> q_radii;
  for (auto k : dec.independent)
    q_radii.push_back(R.radii()[k]);
  dec.Q = Parallelepiped(R.vectors().select(dec.independent), std::move(q_radii));

  Mat W = dual_basis(dec.Q.vectors());
  double c = 0.0;
  for (std::size_t k = 0; k < dec.rank; ++k)
    c = std::max(c, support(R, W.col(static_cast<Eigen::Index>(k))) / dec.Q.radii()[k]);
  dec.containment = c;
  return dec;
}

namespace detail {

inline constexpr std::size_t shard_size = 1 << 16;

} // namespace detail

/// count i.i.d. samples sum_j t_j u_j with t_j uniform on [-r_j, r_j], as the
/// columns of a D x count matrix. Shard s draws from mt19937_64 seeded with
/// splitmix64(seed + s), so output is independent of the worker count.
inline Mat sample_mu_R(const Parallelepiped &R, std::size_t count, std::uint64_t seed) {
  if (count < 1)
    throw domain_error("sample_mu_R: count must be >= 1");
  Mat out(static_cast<Eigen::Index>(R.dims()), static_cast<Eigen::Index>(count));
  const std::size_t shards = (count + detail::shard_size - 1) / detail::shard_size;
  parallel_for(
      shards,
      [&](std::size_t s) {
        std::mt19937_64 rng(splitmix64(seed + s));
        std::size_t lo = s * detail::shard_size, hi = std::min(count, lo + detail::shard_size);
        for (std::size_t i = lo; i < hi; ++i) {
          Vec x = Vec::Zero(static_cast<Eigen::Index>(R.dims()));
          for (std::size_t j = 0; j < R.count(); ++j) {
            double t = (2.0 * unit_uniform(rng) - 1.0) * R.radii()[j];
            x += t * R.vectors()[j];
          }
          out.col(static_cast<Eigen::Index>(i)) = x;
        }
      },
      1);
  return out;
}

/// Axis-aligned box in the dual-basis coordinates of V.
struct CoordinateBox {
  std::vector<double> lo, hi;
  double volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k)
      v *= std::max(0.0, hi[k] - lo[k]);
    return v;
  }
};

struct MeasureSampleReport {
  std::size_t samples = 0;
  std::vector<CoordinateBox> boxes;
  std::vector<double> empirical; // mu_R(E) estimates
  std::vector<double> stderrs;   // binomial standard error under p = bound
  std::vector<double> bounds;    // |E| / |Q|
  std::vector<bool> box_pass;
  bool pass = true;
  double max_density = 0.0;       // max_E mu_R(E) / |E|
  double density_bound = 0.0;     // 1 / |Q|
  double domination_constant = 0.0; // |R'| / |Q| with R' = c* Q
  double q_volume = 0.0;
};

/// Monte Carlo check of mu_R(E) <= |E|/|Q| (+3 sigma) over coordinate boxes.
inline MeasureSampleReport verify_domination(const Parallelepiped &R, const std::vector<CoordinateBox> &boxes,
                                             std::size_t count, std::uint64_t seed) {
  auto dec = decompose(R);
  const std::size_t r = dec.rank;
  const double gram = gram_determinant(dec.Q.vectors());
  double coord_volume = std::pow(2.0, static_cast<double>(r));
  for (double q : dec.Q.radii())
    coord_volume *= q;
  const double q_volume = coord_volume * std::sqrt(std::max(gram, 0.0));
  if (!(q_volume > 0.0) || gram < gram_tolerance)
    throw degenerate_error("verify_domination: Q has zero volume");

  Mat W = dual_basis(dec.Q.vectors());
  Mat samples = sample_mu_R(R, count, seed);
  Mat coords = W.transpose() * samples; // r x count

  MeasureSampleReport rep;
  rep.samples = count;
  rep.boxes = boxes;
  rep.q_volume = q_volume;
  rep.density_bound = 1.0 / q_volume;
  rep.domination_constant = std::pow(dec.containment, static_cast<double>(r));
  const double sqrt_gram = std::sqrt(gram);
  for (const auto &box : boxes) {
    if (box.lo.size() != r || box.hi.size() != r)
      throw domain_error("verify_domination: box dimension must equal rank(V)");
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < coords.cols(); ++i) {
      bool inside = true;
      for (std::size_t k = 0; k < r && inside; ++k) {
        double t = coords(static_cast<Eigen::Index>(k), i);
        inside = t >= box.lo[k] && t <= box.hi[k];
      }
      hits += inside ? 1 : 0;
    }
    double p_hat = static_cast<double>(hits) / static_cast<double>(count);
    // coordinate volume times sqrt(Gram) on both sides, so the bound is a ratio of coordinate volumes
    double bound = box.volume() / coord_volume;
    double p0 = std::min(bound, 1.0);
    double se = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(count));
    bool ok = p_hat <= bound + 3.0 * se;
    rep.empirical.push_back(p_hat);
    rep.stderrs.push_back(se);
    rep.bounds.push_back(bound);
    rep.box_pass.push_back(ok);
    rep.pass = rep.pass && ok;
    double lebesgue = box.volume() * sqrt_gram;
    if (lebesgue > 0.0)
      rep.max_density = std::max(rep.max_density, p_hat / lebesgue);
  }
  return rep;
}

inline void to_json(nlohmann::json &j, const Parallelepiped &R) {
  std::vector<std::vector<double>> vecs;
  for (std::size_t k = 0; k < R.count(); ++k) {
    auto col = R.vectors()[k];
    vecs.emplace_back(col.data(), col.data() + col.size());
  }
  j = nlohmann::json{{"vectors", vecs}, {"radii", R.radii()}};
}

inline void from_json(const nlohmann::json &j, Parallelepiped &R) {
  auto vecs = j.at("vectors").get<std::vector<std::vector<double>>>();
  auto radii = j.at("radii").get<std::vector<double>>();
  R = Parallelepiped(UnitVectorSet::normalized(vecs), std::move(radii));
}

inline void to_json(nlohmann::json &j, const MeasureSampleReport &rep) {
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto &b : rep.boxes)
    boxes.push_back({{"lo", b.lo}, {"hi", b.hi}});
  std::vector<bool> per_box(rep.box_pass.begin(), rep.box_pass.end());
  j = nlohmann::json{{"samples", rep.samples},
                     {"boxes", boxes},
                     {"empirical", rep.empirical},
                     {"stderr", rep.stderrs},
                     {"bound", rep.bounds},
                     {"pass", rep.pass},
                     {"box_pass", per_box},
                     {"max_density", rep.max_density},
                     {"density_bound", rep.density_bound},
                     {"domination_constant", rep.domination_constant}};
}

} // namespace ergolab::geometry
