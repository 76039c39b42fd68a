#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hdim/report.hpp"

namespace hdim {

// Executes one subcommand ({growth, pansu, rvc, dirichlet, poincare,
// meanvalue, harnack, dim, oracle, rough-check, rough-extend, rough-mvl,
// all}) and returns its report. Usage problems (unknown op, invalid request
// shape) throw ConfigError; computation problems propagate as the module
// errors; failed checks come back as ok = false.
Report run_operation(const RunConfig& cfg);

// growth -> rvc -> dim (+oracle when the group is a lattice) -> inequalities
// -> rough suite (when enabled). Each stage's errors are captured in its
// payload; ok = every stage passed.
Report pipeline_all(const RunConfig& cfg);

// Sum-of-monomials parser over the group coordinates, e.g. "x^2-y^2",
// "x1+10", "3x*y - 2". Variables: x, y, z, w or x1..x8 (1-based); exponents
// via ^k. Returns (coefficient, exponent vector) terms sized to `vars`.
std::vector<std::pair<double, std::vector<int>>> parse_polynomial(const std::string& text,
                                                                  int vars);

} // namespace hdim
