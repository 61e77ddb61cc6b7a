#ifndef PRESYM_NUMERIC_HPP
#define PRESYM_NUMERIC_HPP

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "presym/expr.hpp"

namespace presym {

/// Singular values below kRankTolerance * max(largest, 1) count as zero.
inline constexpr double kRankTolerance = 1e-9;

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

/// Per-variable sampling boxes; unnamed variables use [-1, 1].
class Domain {
 public:
  void set(const std::string& name, Interval box) { boxes_[name] = box; }
  Interval at(const std::string& name) const {
    auto it = boxes_.find(name);
    return it == boxes_.end() ? Interval{} : it->second;
  }
  const std::map<std::string, Interval>& explicit_boxes() const noexcept { return boxes_; }

 private:
  std::map<std::string, Interval> boxes_;
};

/// Deterministic generator for stream `stream` of master seed `seed`.
/// Streams are independent so per-sample work can run in any order.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Uniform double in [lo, hi) built from raw engine bits, so sequences do
/// not depend on the standard library's distribution implementation.
double uniform(std::mt19937_64& rng, double lo, double hi);

std::vector<double> random_point(std::mt19937_64& rng, std::span<const std::string> layout,
                                 const Domain& domain);

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = kRankTolerance);

/// Orthonormal basis (as columns) of the null space of `m`.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double rel_tol = kRankTolerance);

/// Minimum-norm least-squares solution of m x = b with the rank tolerance.
Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                               double rel_tol = kRankTolerance);

struct ZeroTest {
  bool zero = true;
  /// Largest |value| / (1 + magnitude) seen.
  double worst_ratio = 0.0;
  /// Largest |value| seen.
  double worst_value = 0.0;
};

/// |e(x)| <= tol * (1 + magnitude(e, x)) at every given point. Points are
/// value arrays ordered by `layout`.
ZeroTest zero_on_points(const Expr& e, std::span<const std::string> layout,
                        std::span<const std::vector<double>> points, double tol);

/// Sampled test that `e` vanishes identically on a box: `trials` points
/// drawn uniformly from `domain` for each of `vars`.
ZeroTest zero_on_box(const Expr& e, std::span<const std::string> vars, int trials, double tol,
                     const Domain& domain, std::uint64_t seed = 0);

bool numerically_zero(const Expr& e, std::span<const std::string> vars, int trials, double tol,
                      const Domain& domain, std::uint64_t seed = 0);

}  // namespace presym

#endif
