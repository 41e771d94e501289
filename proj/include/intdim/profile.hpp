#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intdim/estimators.hpp"

namespace intdim {

inline constexpr int kSchemaVersion = 1;

/// One extracted layer. Layer counting (e.g. excluding batch normalisation)
/// is the manifest author's declaration.
struct LayerCheckpoint {
  std::string name;
  std::size_t order_index = 0;
  std::size_t total_layers = 1;
  std::size_t d_embed = 0;
  std::filesystem::path matrix_path;  // relative paths resolve against the manifest directory
  std::optional<std::string> category;
};

/// JSON document shared with activation exporters:
/// {schema_version, network_name, total_layers,
///  checkpoints: [{name, order_index, d_embed, matrix_path, category?}]}
struct Manifest {
  std::string network_name;
  std::size_t total_layers = 1;
  std::vector<LayerCheckpoint> checkpoints;
  std::filesystem::path base_dir;
};

Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir = {});
Manifest load_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const Manifest& manifest);

struct CategoryEstimate {
  std::string category;
  IdEstimate estimate;
};

struct LayerResult {
  LayerCheckpoint checkpoint;
  double relative_depth = 0.0;
  IdEstimate estimate;
  std::size_t removed_duplicates = 0;
  std::vector<CategoryEstimate> per_category;  // filled in per-category mode
};

struct LayerProfile {
  std::string network_name;
  std::size_t total_layers = 1;
  std::vector<LayerResult> layers;
};

struct ProfileOptions {
  EstimatorConfig estimator;
  SubsampleConfig subsample;
  std::uint64_t seed = 0;
  double dedupe_tol = 0.0;
  /// Group checkpoints sharing an order_index and report the mean and std of
  /// their per-category IDs.
  bool per_category = false;
};

/// Subsampled ID estimate for every checkpoint, in manifest order. Every
/// checkpoint uses the same seed so its result does not depend on its
/// position in the manifest.
LayerProfile profile(const Manifest& manifest, const ProfileOptions& options);
LayerProfile profile(const std::filesystem::path& manifest_path, const ProfileOptions& options);

/// order_index / total_layers.
double relative_depth(std::size_t order_index, std::size_t total_layers);

/// Smallest ID with n_classes <= 2^ID, i.e. each class gets a distinct
/// binary code.
struct ClassBound {
  std::uint64_t n_classes = 1;
  unsigned min_id = 0;
};

ClassBound min_id_bound(std::uint64_t n_classes);

/// Sample Pearson correlation. Throws DegenerateDataError for a constant
/// input and ConfigError for mismatched or too-short inputs.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace intdim
