#ifndef PRESYM_PROBLEM_IO_HPP
#define PRESYM_PROBLEM_IO_HPP

#include <filesystem>
#include <string_view>

#include "presym/problem.hpp"

namespace presym {

/// Parse the section-based problem format:
///
///   states:      x1 x2
///   controls:    u1
///   dynamics:
///     x1' = x2
///     x2' = u1
///   lagrangian:  0.5*u1^2
///   holonomic:   (one expression per line, optional)
///   time_dependent: false
///   p0: 1
///   symmetries:
///     symmetry shift:
///       xi = (1, 0)
///       zeta = (0)
///   domain:
///     x1 in [-2, 2]
///
/// `#` starts a comment. Errors are InputError with "line L, column C".
/// The validated problem is returned; p0 = 0 (abnormal case) is rejected.
ControlProblem parse_problem(std::string_view text);

ControlProblem load_problem(const std::filesystem::path& path);

}  // namespace presym

#endif
