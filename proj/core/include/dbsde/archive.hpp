// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// Parameter archive: a UTF-8 JSON document
//
//   {"version":1,"fingerprint":"...","config":{...},
//    "tensors":[{"name":"phi_3.layer_1.weight","shape":[12,12],"data":[...]}]}
//
// with reals written at 17 significant digits and tensors in flatten order.

#pragma once

#include <filesystem>
#include <string>

#include "dbsde/config.hpp"
#include "dbsde/net.hpp"

namespace dbsde {

inline constexpr int kArchiveVersion = 1;

struct LoadedArchive {
  RunConfig config;
  SubnetBank bank;
};

std::string serialize_params(const SubnetBank& bank, const RunConfig& config);
void save_params(const SubnetBank& bank, const RunConfig& config, const std::filesystem::path& path);

/// Rebuilds the bank layout from the embedded config and checks every tensor
/// against it. IoError on version mismatch, corrupt JSON, a tensor whose
/// shape differs from the layout, or a fingerprint mismatch.
LoadedArchive load_params(const std::filesystem::path& path);
LoadedArchive parse_params(const std::string& text, const std::string& source = "<archive>");

}  // namespace dbsde
