#include "presym/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace presym {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double svd_threshold(const Eigen::VectorXd& sv, double rel_tol) {
  double largest = sv.size() > 0 ? sv(0) : 0.0;
  return rel_tol * std::max(largest, 1.0);
}

}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

std::vector<double> random_point(std::mt19937_64& rng, std::span<const std::string> layout,
                                 const Domain& domain) {
  std::vector<double> x(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    Interval box = domain.at(layout[i]);
    x[i] = uniform(rng, box.lo, box.hi);
  }
  return x;
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  double thr = svd_threshold(sv, rel_tol);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++r;
  return r;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double rel_tol) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  double thr = svd_threshold(sv, rel_tol);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++r;
  return svd.matrixV().rightCols(n - r);
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::VectorXd::Zero(m.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  double thr = svd_threshold(sv, rel_tol);
  Eigen::VectorXd ub = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < sv.size(); ++i) ub(i) = sv(i) > thr ? ub(i) / sv(i) : 0.0;
  return svd.matrixV() * ub;
}

ZeroTest zero_on_points(const Expr& e, std::span<const std::string> layout,
                        std::span<const std::vector<double>> points, double tol) {
  ZeroTest t;
  for (const auto& x : points) {
    VariableTable vars(layout, x);
    double v = std::abs(eval(e, vars));
    double ratio = v / (1.0 + eval_magnitude(e, vars));
    t.worst_value = std::max(t.worst_value, v);
    t.worst_ratio = std::max(t.worst_ratio, ratio);
    if (!(ratio <= tol)) t.zero = false;
  }
  return t;
}

ZeroTest zero_on_box(const Expr& e, std::span<const std::string> vars, int trials, double tol,
                     const Domain& domain, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  std::vector<std::vector<double>> points;
  points.reserve(static_cast<std::size_t>(trials));
  for (int k = 0; k < trials; ++k) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(k));
    points.push_back(random_point(rng, vars, domain));
  }
  return zero_on_points(e, vars, points, tol);
}

bool numerically_zero(const Expr& e, std::span<const std::string> vars, int trials, double tol,
                      const Domain& domain, std::uint64_t seed) {
  return zero_on_box(e, vars, trials, tol, domain, seed).zero;
}

}  // namespace presym
