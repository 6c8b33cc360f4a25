// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include "dbsde/metrics.hpp"

#include "dbsde/config.hpp"
#include "dbsde/error.hpp"

namespace dbsde {

std::string format_metrics_row(const MetricsRecord& r) {
  return std::to_string(r.step) + "," + format_real(r.loss) + "," + format_real(r.y0) + "," +
         format_real(r.grad_norm) + "," + format_real(r.lr) + "," + format_real(r.elapsed_s);
}

MetricsWriter::MetricsWriter(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path_, ec) || std::filesystem::file_size(path_, ec) == 0;
  out_.open(path_, std::ios::app);
  if (!out_) throw IoError("cannot open metrics file '" + path_.string() + "' for appending");
  if (fresh) {
    out_ << kMetricsHeader << '\n';
    out_.flush();
    if (!out_) throw IoError("failed writing metrics header to '" + path_.string() + "'");
  }
}

void MetricsWriter::append(const MetricsRecord& record) {
  out_ << format_metrics_row(record) << '\n';
  out_.flush();
  if (!out_) throw IoError("failed writing metrics row to '" + path_.string() + "'");
}

void write_metrics(std::span<const MetricsRecord> records, const std::filesystem::path& path) {
  MetricsWriter writer(path);
  for (const auto& r : records) writer.append(r);
}

}  // namespace dbsde
