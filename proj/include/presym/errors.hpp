#ifndef PRESYM_ERRORS_HPP
#define PRESYM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace presym {

/// Malformed problem description or arguments.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A call made outside its documented precondition.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sampled rank of some matrix varies across points where the analysis
/// assumes it is constant.
class ConstantRankError : public std::runtime_error {
 public:
  ConstantRankError(const std::string& what, std::vector<int> ranks)
      : std::runtime_error(what), ranks_(std::move(ranks)) {}
  const std::vector<int>& ranks() const noexcept { return ranks_; }

 private:
  std::vector<int> ranks_;
};

/// Newton projection could not produce enough points on a constraint set.
class SamplingError : public std::runtime_error {
 public:
  SamplingError(const std::string& what, std::size_t requested, std::size_t found,
                std::size_t attempts)
      : std::runtime_error(what), requested_(requested), found_(found), attempts_(attempts) {}
  std::size_t requested() const noexcept { return requested_; }
  std::size_t found() const noexcept { return found_; }
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t requested_;
  std::size_t found_;
  std::size_t attempts_;
};

/// Iterative solve did not converge, or hit a singular Jacobian.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace presym

#endif
