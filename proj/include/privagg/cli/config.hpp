#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "privagg/harness.hpp"

namespace privagg::cli {

using nlohmann::json;

/// CSV dataset with an `owner_id,value` header, optionally padded with
/// value-less owners up to a total.
struct DatasetSource {
  std::string path;
  std::uint64_t pad_to_total = 0;
};

/// One experiment file. The schema lives in docs/config-schema.md.
struct ExperimentConfig {
  EpochConfig epoch;
  std::optional<PopulationSpec> population;
  std::optional<DatasetSource> dataset;
  /// Population totals to sweep; truthful counts stay fixed.
  std::vector<std::uint64_t> sweep_totals;
  /// Run the full FSS + verification pipeline instead of counting directly.
  bool crypto = false;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
};

/// Strict load: unknown keys, wrong types and invalid parameters raise
/// ConfigError.
ExperimentConfig parse_config(const json& j);
/// Normalized form with every default spelled out; parse_config(dump_config(c))
/// reproduces c.
json dump_config(const ExperimentConfig& config);

json read_json_file(const std::filesystem::path& path);

/// Applies `dotted.key=value`. The value is read as JSON when it parses,
/// otherwise as a string.
void apply_override(json& j, std::string_view assignment);

/// Reads `owner_id,value` rows. Owner ids must be unique and values must fit
/// id_bits. Padding owners have no value.
Population load_dataset_csv(const std::filesystem::path& path, unsigned id_bits,
                            std::uint64_t pad_to_total);

}  // namespace privagg::cli
