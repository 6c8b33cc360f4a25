// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dbsde/error.hpp"

namespace dbsde {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_positive(const std::string& key, const std::string& text) {
  const std::uint64_t v = parse_unsigned(key, text);
  if (v == 0) throw ConfigError("key '" + key + "': must be positive, got 0");
  return v;
}

std::vector<std::size_t> parse_widths(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_positive(key, trim(item)));
  if (out.empty()) throw ConfigError("key '" + key + "': empty width list");
  return out;
}

const std::vector<std::string> kProblemKeys = {"T", "lambda", "xi", "xi0", "box_low", "box_high"};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::string> accepted_config_keys() {
  return {"problem",    "d",         "N",           "batch_size", "iterations",  "seed",
          "T",          "lambda",    "xi",          "xi0",        "box_low",     "box_high",
          "optimizer",  "lr_schedule", "beta1",     "beta2",      "epsilon",     "grad_clip",
          "hidden_widths", "activation", "sharing", "bank_mode",  "eval_every",  "eval_samples",
          "output_dir", "threads",   "timing"};
}

std::vector<std::string> required_config_keys() {
  return {"problem", "d", "N", "batch_size", "iterations", "seed"};
}

BankLayout RunConfig::bank_layout() const {
  BankLayout layout;
  layout.mode = bank_mode;
  layout.sharing = sharing;
  layout.dim = d;
  layout.steps = N;
  layout.hidden_widths = hidden_widths.empty() ? default_hidden_widths(d) : hidden_widths;
  layout.activation = activation;
  return layout;
}

std::map<std::string, std::string> RunConfig::to_entries() const {
  std::map<std::string, std::string> e;
  e["problem"] = problem;
  e["d"] = std::to_string(d);
  e["N"] = std::to_string(N);
  e["batch_size"] = std::to_string(batch_size);
  e["iterations"] = std::to_string(iterations);
  e["seed"] = std::to_string(seed);
  for (const auto& [k, v] : problem_overrides) e[k] = v;
  e["optimizer"] = optimizer == OptimizerKind::kAdam ? "adam" : "sgd";
  e["lr_schedule"] = lr_schedule.to_string();
  e["beta1"] = format_real(adam.beta1);
  e["beta2"] = format_real(adam.beta2);
  e["epsilon"] = format_real(adam.epsilon);
  e["grad_clip"] = format_real(grad_clip);
  std::string widths;
  for (std::size_t w : bank_layout().hidden_widths) widths += (widths.empty() ? "" : ",") + std::to_string(w);
  e["hidden_widths"] = widths;
  e["activation"] = std::string(ad::activation_name(activation));
  e["sharing"] = std::string(sharing_name(sharing));
  e["bank_mode"] = std::string(bank_mode_name(bank_mode));
  e["eval_every"] = std::to_string(eval_every);
  e["eval_samples"] = std::to_string(eval_samples);
  e["output_dir"] = output_dir.string();
  e["threads"] = std::to_string(threads);
  e["timing"] = timing == TimingMode::kWall ? "wall" : "off";
  return e;
}

std::string RunConfig::architecture_fingerprint() const {
  const auto e = to_entries();
  std::string canonical;
  for (const char* key : {"problem", "d", "N", "hidden_widths", "activation", "sharing", "bank_mode"}) {
    canonical += std::string(key) + "=" + e.at(key) + ";";
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
  return buf;
}

RunConfig parse_config_entries(const std::map<std::string, std::string>& entries) {
  const auto accepted = accepted_config_keys();
  for (const auto& [key, value] : entries) {
    if (std::find(accepted.begin(), accepted.end(), key) == accepted.end()) {
      throw ConfigError("unknown key '" + key + "'; accepted keys: " + join(accepted));
    }
  }
  for (const auto& key : required_config_keys()) {
    if (!entries.contains(key)) throw ConfigError("missing required key '" + key + "'");
  }
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  RunConfig c;
  c.problem = *get("problem");
  const auto names = problem_names();
  if (std::find(names.begin(), names.end(), c.problem) == names.end()) {
    throw ConfigError("key 'problem': unknown problem '" + c.problem + "' (expected " + join(names) + ")");
  }
  c.d = parse_positive("d", *get("d"));
  c.N = parse_positive("N", *get("N"));
  c.batch_size = parse_positive("batch_size", *get("batch_size"));
  c.iterations = parse_unsigned("iterations", *get("iterations"));
  c.seed = parse_unsigned("seed", *get("seed"));

  for (const auto& key : kProblemKeys) {
    if (const auto* v = get(key)) c.problem_overrides[key] = *v;
  }
  if (const auto* v = get("optimizer")) {
    if (*v == "adam") c.optimizer = OptimizerKind::kAdam;
    else if (*v == "sgd") c.optimizer = OptimizerKind::kSgd;
    else throw ConfigError("key 'optimizer': expected adam or sgd, got '" + *v + "'");
  }
  if (const auto* v = get("lr_schedule")) {
    try {
      c.lr_schedule = LrSchedule::parse(*v);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("key 'lr_schedule': ") + e.what());
    }
  }
  if (const auto* v = get("beta1")) c.adam.beta1 = parse_real("beta1", *v);
  if (const auto* v = get("beta2")) c.adam.beta2 = parse_real("beta2", *v);
  if (const auto* v = get("epsilon")) c.adam.epsilon = parse_real("epsilon", *v);
  if (c.adam.beta1 < 0.0 || c.adam.beta1 >= 1.0) throw ConfigError("key 'beta1': must be in [0, 1)");
  if (c.adam.beta2 < 0.0 || c.adam.beta2 >= 1.0) throw ConfigError("key 'beta2': must be in [0, 1)");
  if (!(c.adam.epsilon >= 0.0)) throw ConfigError("key 'epsilon': must be >= 0");
  if (const auto* v = get("grad_clip")) c.grad_clip = parse_real("grad_clip", *v);
  if (c.grad_clip < 0.0) throw ConfigError("key 'grad_clip': must be >= 0");
  if (const auto* v = get("hidden_widths")) c.hidden_widths = parse_widths("hidden_widths", *v);
  try {
    if (const auto* v = get("activation")) c.activation = ad::parse_activation(*v);
    if (const auto* v = get("sharing")) c.sharing = parse_sharing(*v);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid value: ") + e.what());
  }

  const std::string xi_mode = get("xi") ? *get("xi") : "point";
  if (const auto* v = get("bank_mode")) {
    c.bank_mode = parse_bank_mode(*v);
  } else {
    c.bank_mode = xi_mode == "point" ? BankMode::kDeterministicXi : BankMode::kGeneralXi;
  }
  if (c.bank_mode == BankMode::kDeterministicXi && xi_mode != "point") {
    throw ConfigError("key 'bank_mode': deterministic requires xi = point");
  }

  if (const auto* v = get("eval_every")) c.eval_every = parse_positive("eval_every", *v);
  if (const auto* v = get("eval_samples")) c.eval_samples = parse_positive("eval_samples", *v);
  if (const auto* v = get("output_dir")) c.output_dir = *v;
  if (const auto* v = get("threads")) c.threads = static_cast<unsigned>(parse_positive("threads", *v));
  if (const auto* v = get("timing")) {
    if (*v == "wall") c.timing = TimingMode::kWall;
    else if (*v == "off") c.timing = TimingMode::kOff;
    else throw ConfigError("key 'timing': expected wall or off, got '" + *v + "'");
  }

  // Surface problem-override errors (bad lambda, wrong-length xi0, ...) now.
  (void)get_problem(c.problem, c.d, c.problem_overrides);
  return c;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  std::map<std::string, std::string> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has an empty value");
    if (!entries.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  try {
    return parse_config_entries(entries);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace dbsde
