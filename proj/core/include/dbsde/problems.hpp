// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dbsde/problem.hpp"

namespace dbsde {

using Overrides = std::map<std::string, std::string>;

/// Built-in instances, all with mu = 0 and sigma = sqrt(2) I:
///
///   heat        f = 0,                 g = |x|^2,               u = |x|^2 + 2d(T - t)
///   hjb         f = -lambda |z|^2,     g = ln((1 + |x|^2) / 2)
///   allen_cahn  f = y - y^3,           g = 1 / (2 + 0.4 |x|^2)
///
/// Override keys: T, lambda (hjb only), xi (point|box), xi0, box_low,
/// box_high. Vector-valued keys take one value (replicated) or d
/// comma-separated values. Default T is 1 except allen_cahn (0.3); default
/// xi is the point mass at the origin; default box is [-1, 1]^d.
ProblemSpec get_problem(std::string_view name, std::size_t dim, const Overrides& overrides = {});

std::vector<std::string> problem_names();
std::vector<std::string> problem_override_keys();

/// Parses "a" or "a,b,c" into exactly `dim` reals (a single value is
/// replicated). ConfigError naming `key` on failure.
std::vector<double> parse_real_list(std::string_view key, std::string_view text, std::size_t dim);
double parse_real(std::string_view key, std::string_view text);

}  // namespace dbsde
