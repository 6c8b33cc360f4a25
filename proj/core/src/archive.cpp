// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/archive.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dbsde/error.hpp"

namespace dbsde {

namespace {

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

std::string serialize_params(const SubnetBank& bank, const RunConfig& config) {
  std::string out = "{\"version\":" + std::to_string(kArchiveVersion);
  out += ",\"fingerprint\":" + quoted(config.architecture_fingerprint());
  out += ",\"config\":{";
  bool first = true;
  for (const auto& [key, value] : config.to_entries()) {
    out += (first ? "" : ",") + quoted(key) + ":" + quoted(value);
    first = false;
  }
  out += "},\"tensors\":[";
  first = true;
  for (const auto& entry : bank.entries()) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "{\"name\":" + quoted(entry.name) + ",\"shape\":[";
    const auto& shape = entry.tensor->shape();
    for (std::size_t i = 0; i < shape.size(); ++i) out += (i ? "," : "") + std::to_string(shape[i]);
    out += "],\"data\":[";
    const auto data = entry.tensor->data();
    for (std::size_t i = 0; i < data.size(); ++i) out += (i ? "," : "") + format_real(data[i]);
    out += "]}";
  }
  out += "\n]}\n";
  return out;
}

void save_params(const SubnetBank& bank, const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open parameter archive '" + path.string() + "' for writing");
  out << serialize_params(bank, config);
  out.flush();
  if (!out) throw IoError("failed writing parameter archive '" + path.string() + "'");
}

LoadedArchive parse_params(const std::string& text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(source + ": corrupt parameter archive: " + e.what());
  }
  try {
    const int version = doc.at("version").get<int>();
    if (version != kArchiveVersion) {
      throw IoError(source + ": archive version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kArchiveVersion) + ")");
    }
    const auto entries = doc.at("config").get<std::map<std::string, std::string>>();
    RunConfig config;
    try {
      config = parse_config_entries(entries);
    } catch (const ConfigError& e) {
      throw IoError(source + ": archive config is invalid: " + e.what());
    }
    SubnetBank bank = SubnetBank::initialize(config.bank_layout(), 0);
    const auto expected = bank.entries();
    const auto& tensors = doc.at("tensors");
    if (tensors.size() != expected.size()) {
      throw IoError(source + ": archive holds " + std::to_string(tensors.size()) + " tensors, layout needs " +
                    std::to_string(expected.size()));
    }
    auto targets = bank.mutable_tensors();
    for (std::size_t k = 0; k < expected.size(); ++k) {
      const auto& t = tensors[k];
      const std::string name = t.at("name").get<std::string>();
      if (name != expected[k].name) {
        throw IoError(source + ": tensor " + std::to_string(k) + " is '" + name + "', expected '" +
                      expected[k].name + "'");
      }
      const Shape shape = t.at("shape").get<Shape>();
      const auto data = t.at("data").get<std::vector<double>>();
      if (shape != expected[k].tensor->shape() || data.size() != shape_size(shape)) {
        throw IoError(source + ": shape mismatch for tensor '" + name + "': archive has " + shape_string(shape) +
                      " with " + std::to_string(data.size()) + " values, layout expects " +
                      shape_string(expected[k].tensor->shape()));
      }
      *targets[k] = Tensor(shape, data);
    }
    const std::string fingerprint = doc.at("fingerprint").get<std::string>();
    if (fingerprint != config.architecture_fingerprint()) {
      throw IoError(source + ": config fingerprint mismatch (archive " + fingerprint + ", config " +
                    config.architecture_fingerprint() + ")");
    }
    return {std::move(config), std::move(bank)};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(source + ": corrupt parameter archive: " + e.what());
  }
}

LoadedArchive load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read parameter archive '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str(), path.string());
}

}  // namespace dbsde
