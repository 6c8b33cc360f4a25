// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "dbsde/archive.hpp"
#include "dbsde/error.hpp"
#include "dbsde/metrics.hpp"
#include "support/temp_dir.hpp"

namespace dbsde {
namespace {

using testing::read_file;
using testing::TempDir;
using testing::write_file;

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    out.push_back(text.substr(start, nl - start));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return out;
}

RunConfig config_with(const std::string& extra) {
  return parse_config_text("problem = heat\nd = 3\nN = 4\nbatch_size = 8\niterations = 1\nseed = 5\n"
                           "hidden_widths = 6,5\n" +
                           extra);
}

TEST(Metrics, OneRecordGivesHeaderAndRow) {
  TempDir dir;
  const MetricsRecord r{0, 1.5, 2.0, 0.25, 5e-3, 0.0};
  write_metrics(std::vector<MetricsRecord>{r}, dir / "m.csv");
  const auto lines = lines_of(read_file(dir / "m.csv"));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "step,loss,y0,grad_norm,lr,elapsed_s");
  EXPECT_EQ(lines[1], format_metrics_row(r));
}

TEST(Metrics, RealsRoundTripExactly) {
  const MetricsRecord r{7, 0.1, 1.0 / 3.0, 2.0 / 7.0, 1e-3, 123.456789};
  const std::string row = format_metrics_row(r);
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t comma; (comma = row.find(',', start)) != std::string::npos; start = comma + 1) {
    fields.push_back(row.substr(start, comma - start));
  }
  fields.push_back(row.substr(start));
  ASSERT_EQ(fields.size(), 6u);
  EXPECT_EQ(fields[0], "7");
  EXPECT_EQ(fields[1], "0.10000000000000001");
  EXPECT_EQ(std::stod(fields[2]), 1.0 / 3.0);
  EXPECT_EQ(std::stod(fields[3]), 2.0 / 7.0);
  EXPECT_EQ(std::stod(fields[4]), 1e-3);
  EXPECT_EQ(std::stod(fields[5]), 123.456789);
}

TEST(Metrics, AppendingPreservesRows) {
  TempDir dir;
  const MetricsRecord a{0, 1, 2, 3, 4, 5}, b{10, 6, 7, 8, 9, 10};
  write_metrics(std::vector<MetricsRecord>{a}, dir / "m.csv");
  write_metrics(std::vector<MetricsRecord>{b}, dir / "m.csv");
  const auto lines = lines_of(read_file(dir / "m.csv"));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[1], format_metrics_row(a));
  EXPECT_EQ(lines[2], format_metrics_row(b));
}

TEST(Metrics, RowsVisibleBeforeWriterCloses) {
  TempDir dir;
  MetricsWriter writer(dir / "m.csv");
  writer.append({0, 1, 2, 3, 4, 5});
  EXPECT_EQ(lines_of(read_file(dir / "m.csv")).size(), 2u);
}

TEST(Metrics, UnwritablePathIsIoError) {
  EXPECT_THROW(write_metrics(std::vector<MetricsRecord>{{}}, "/nonexistent/dir/m.csv"), IoError);
}

TEST(Archive, RoundTripIsBitwise) {
  for (const std::string extra : {"", "xi = box\n", "xi = box\nsharing = shared\n", "sharing = shared\n"}) {
    const RunConfig config = config_with(extra);
    const SubnetBank bank = SubnetBank::initialize(config.bank_layout(), 99);
    TempDir dir;
    save_params(bank, config, dir / "p.json");
    const LoadedArchive loaded = load_params(dir / "p.json");
    EXPECT_EQ(loaded.bank, bank) << extra;
    EXPECT_EQ(loaded.config.to_entries(), config.to_entries());
    EXPECT_EQ(serialize_params(loaded.bank, loaded.config), read_file(dir / "p.json"));
  }
}

TEST(Archive, DocumentShape) {
  const RunConfig config = config_with("xi = box\n");
  const std::string text = serialize_params(SubnetBank::initialize(config.bank_layout(), 1), config);
  EXPECT_EQ(text.rfind("{\"version\":1,", 0), 0u);
  EXPECT_NE(text.find("\"name\":\"psi0.layer_0.weight\",\"shape\":[3,6]"), std::string::npos);
  EXPECT_NE(text.find("\"name\":\"phi_3.layer_2.bias\",\"shape\":[3]"), std::string::npos);
}

TEST(Archive, SharedModeReloadsAsShared) {
  const RunConfig config = config_with("xi = box\nsharing = shared\n");
  const SubnetBank bank = SubnetBank::initialize(config.bank_layout(), 3);
  const LoadedArchive loaded = parse_params(serialize_params(bank, config));
  EXPECT_EQ(loaded.bank.layout.sharing, Sharing::kShared);
  EXPECT_EQ(loaded.bank.phi.size(), 1u);
}

std::string io_error_of(const std::string& text) {
  try {
    parse_params(text, "p.json");
  } catch (const IoError& e) {
    return e.what();
  }
  return "";
}

void replace_once(std::string& s, const std::string& from, const std::string& to) {
  const std::size_t at = s.find(from);
  ASSERT_NE(at, std::string::npos) << from;
  s.replace(at, from.size(), to);
}

TEST(Archive, EditedLayerWidthNamesTensor) {
  const RunConfig config = config_with("");
  std::string text = serialize_params(SubnetBank::initialize(config.bank_layout(), 3), config);
  replace_once(text, "\"hidden_widths\":\"6,5\"", "\"hidden_widths\":\"7,5\"");
  const std::string err = io_error_of(text);
  EXPECT_NE(err.find("shape mismatch for tensor 'phi_1.layer_0.weight'"), std::string::npos) << err;
}

TEST(Archive, EditedTensorShapeNamesTensor) {
  const RunConfig config = config_with("");
  std::string text = serialize_params(SubnetBank::initialize(config.bank_layout(), 3), config);
  replace_once(text, "\"name\":\"phi_2.layer_1.weight\",\"shape\":[6,5]",
               "\"name\":\"phi_2.layer_1.weight\",\"shape\":[5,6]");
  const std::string err = io_error_of(text);
  EXPECT_NE(err.find("shape mismatch for tensor 'phi_2.layer_1.weight'"), std::string::npos) << err;
}

TEST(Archive, VersionFingerprintAndCorruption) {
  const RunConfig config = config_with("");
  const std::string good = serialize_params(SubnetBank::initialize(config.bank_layout(), 3), config);

  std::string v2 = good;
  replace_once(v2, "\"version\":1", "\"version\":2");
  EXPECT_NE(io_error_of(v2).find("version 2"), std::string::npos);

  std::string fp = good;
  replace_once(fp, "\"fingerprint\":\"", "\"fingerprint\":\"0");
  EXPECT_NE(io_error_of(fp).find("fingerprint"), std::string::npos);

  EXPECT_NE(io_error_of(good.substr(0, good.size() / 2)).find("corrupt"), std::string::npos);
  EXPECT_NE(io_error_of("[1,2,3]"), "");
  EXPECT_NE(io_error_of(""), "");

  std::string renamed = good;
  replace_once(renamed, "\"name\":\"z0\"", "\"name\":\"zz\"");
  EXPECT_NE(io_error_of(renamed).find("'zz'"), std::string::npos);

  std::string short_data = good;
  replace_once(short_data, "\"shape\":[1],\"data\":[0]", "\"shape\":[1],\"data\":[]");
  EXPECT_NE(io_error_of(short_data), "");
}

TEST(Archive, MissingFileIsIoError) {
  EXPECT_THROW(load_params("/nonexistent/p.json"), IoError);
  EXPECT_THROW(save_params(SubnetBank::initialize(config_with("").bank_layout(), 1), config_with(""),
                           "/nonexistent/dir/p.json"),
               IoError);
}

}  // namespace
}  // namespace dbsde
