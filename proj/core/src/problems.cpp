// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "dbsde/error.hpp"

namespace dbsde {

namespace {

double squared_norm(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Shared by all built-ins: zero drift, sqrt(2) I diffusion.
void set_brownian_dynamics(ProblemSpec& p) {
  p.drift = [](double, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  p.diffusion_kind = DiffusionKind::kScalarIdentity;
  const std::size_t d = p.dim;
  p.diffusion = [d](double, std::span<const double>, DiffusionMatrix& out) {
    out = DiffusionMatrix::scalar(d, std::sqrt(2.0));
  };
}

}  // namespace

double parse_real(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + std::string(key) + "': expected a real number, got '" + t + "'");
  }
  return value;
}

std::vector<double> parse_real_list(std::string_view key, std::string_view text, std::size_t dim) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    values.push_back(parse_real(key, text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (values.size() == 1) return std::vector<double>(dim, values[0]);
  if (values.size() != dim) {
    throw ConfigError("key '" + std::string(key) + "': expected 1 or " + std::to_string(dim) +
                      " values, got " + std::to_string(values.size()));
  }
  return values;
}

std::vector<std::string> problem_names() { return {"heat", "hjb", "allen_cahn"}; }

std::vector<std::string> problem_override_keys() {
  return {"T", "lambda", "xi", "xi0", "box_low", "box_high"};
}

ProblemSpec get_problem(std::string_view name, std::size_t dim, const Overrides& overrides) {
  const auto names = problem_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("unknown problem '" + std::string(name) + "' (expected heat, hjb, allen_cahn)");
  }
  if (dim < 1) throw ConfigError("problem dimension d must be >= 1");
  const auto keys = problem_override_keys();
  for (const auto& [key, value] : overrides) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("invalid problem override key '" + key +
                        "' (accepted: T, lambda, xi, xi0, box_low, box_high)");
    }
    if (key == "lambda" && name != "hjb") {
      throw ConfigError("override 'lambda' only applies to problem hjb");
    }
  }
  auto lookup = [&](const std::string& key) -> const std::string* {
    const auto it = overrides.find(key);
    return it == overrides.end() ? nullptr : &it->second;
  };

  ProblemSpec p;
  p.name = std::string(name);
  p.dim = dim;
  p.horizon = name == "allen_cahn" ? 0.3 : 1.0;
  if (const auto* v = lookup("T")) p.horizon = parse_real("T", *v);
  if (!(p.horizon > 0.0)) throw ConfigError("key 'T': horizon must be > 0");
  const double T = p.horizon;
  set_brownian_dynamics(p);

  if (name == "heat") {
    p.driver = [](double, std::span<const double>, double, std::span<const double>, DriverPartials* partials) {
      if (partials) {
        partials->dy = 0.0;
        std::fill(partials->dz.begin(), partials->dz.end(), 0.0);
      }
      return 0.0;
    };
    p.driver_is_zero = true;
    p.terminal = [](std::span<const double> x) { return squared_norm(x); };
    const double d = static_cast<double>(dim);
    p.exact = ExactSolution{
        [T, d](double t, std::span<const double> x) { return squared_norm(x) + 2.0 * d * (T - t); },
        [](double, std::span<const double> x, std::span<double> grad) {
          for (std::size_t i = 0; i < x.size(); ++i) grad[i] = 2.0 * x[i];
        }};
  } else if (name == "hjb") {
    double lambda = 1.0;
    if (const auto* v = lookup("lambda")) lambda = parse_real("lambda", *v);
    if (!(lambda > 0.0)) throw ConfigError("key 'lambda': must be > 0");
    p.parameters["lambda"] = lambda;
    p.driver = [lambda](double, std::span<const double>, double, std::span<const double> z,
                        DriverPartials* partials) {
      if (partials) {
        partials->dy = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) partials->dz[i] = -2.0 * lambda * z[i];
      }
      return -lambda * squared_norm(z);
    };
    p.terminal = [](std::span<const double> x) { return std::log((1.0 + squared_norm(x)) / 2.0); };
  } else {
    p.driver = [](double, std::span<const double>, double y, std::span<const double>, DriverPartials* partials) {
      if (partials) {
        partials->dy = 1.0 - 3.0 * y * y;
        std::fill(partials->dz.begin(), partials->dz.end(), 0.0);
      }
      return y - y * y * y;
    };
    p.terminal = [](std::span<const double> x) { return 1.0 / (2.0 + 0.4 * squared_norm(x)); };
  }

  std::string xi_mode = "point";
  if (const auto* v = lookup("xi")) xi_mode = trim(*v);
  if (xi_mode == "point") {
    std::vector<double> x0(dim, 0.0);
    if (const auto* v = lookup("xi0")) x0 = parse_real_list("xi0", *v, dim);
    p.xi = XiSampler::point_mass(std::move(x0));
  } else if (xi_mode == "box") {
    std::vector<double> low(dim, -1.0), high(dim, 1.0);
    if (const auto* v = lookup("box_low")) low = parse_real_list("box_low", *v, dim);
    if (const auto* v = lookup("box_high")) high = parse_real_list("box_high", *v, dim);
    p.xi = XiSampler::uniform_box(std::move(low), std::move(high));
  } else {
    throw ConfigError("key 'xi': expected point or box, got '" + xi_mode + "'");
  }
  p.validate();
  return p;
}

}  // namespace dbsde
