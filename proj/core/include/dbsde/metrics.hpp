// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>

namespace dbsde {

struct MetricsRecord {
  std::uint64_t step = 0;
  double loss = 0.0;
  double y0 = 0.0;
  double grad_norm = 0.0;
  double lr = 0.0;
  double elapsed_s = 0.0;
  bool operator==(const MetricsRecord&) const = default;
};

inline constexpr const char* kMetricsHeader = "step,loss,y0,grad_norm,lr,elapsed_s";

std::string format_metrics_row(const MetricsRecord& record);

/// Appends rows to a CSV file, writing the header only when the file is new
/// or empty. Every row is flushed immediately.
class MetricsWriter {
 public:
  explicit MetricsWriter(std::filesystem::path path);
  void append(const MetricsRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void write_metrics(std::span<const MetricsRecord> records, const std::filesystem::path& path);

}  // namespace dbsde
