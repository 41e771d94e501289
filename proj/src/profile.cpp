#include "intdim/profile.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "intdim/errors.hpp"
#include "intdim/io.hpp"
#include "intdim/neighbors.hpp"

namespace intdim {

namespace {

using nlohmann::json;

template <class T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

LayerResult estimate_checkpoint(const Manifest& manifest, const LayerCheckpoint& cp, const ProfileOptions& options) {
  LayerResult result;
  result.checkpoint = cp;
  result.relative_depth = relative_depth(cp.order_index, manifest.total_layers);
  try {
    const auto path = cp.matrix_path.is_absolute() ? cp.matrix_path : manifest.base_dir / cp.matrix_path;
    if (!std::filesystem::exists(path)) throw IoError("matrix file '" + path.string() + "' not found");
    const ActivationMatrix m = load_matrix(path);
    if (m.cols() != cp.d_embed) {
      throw ValidationError("matrix has " + std::to_string(m.cols()) + " columns but the manifest declares d_embed = " +
                            std::to_string(cp.d_embed));
    }
    if (m.rows() < 3) {
      throw DegenerateDataError("layer has " + std::to_string(m.rows()) + " rows (need at least 3)");
    }
    DedupeResult clean = dedupe(m, options.dedupe_tol);
    result.removed_duplicates = clean.removed;
    result.estimate = subsample_estimate(clean.matrix, options.subsample, options.estimator, options.seed);
  } catch (const Error& e) {
    rethrow_with_context(e, "checkpoint '" + cp.name + "': ");
  }
  return result;
}

}  // namespace

Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), e.byte, ParseError::Unit::byte);
  }
  if (!doc.is_object()) throw ConfigError("manifest must be a JSON object");
  if (doc.contains("schema_version")) {
    const int version = required<int>(doc, "schema_version", "manifest");
    if (version < 1 || version > kSchemaVersion) {
      throw ConfigError("unsupported manifest schema_version " + std::to_string(version));
    }
  }

  Manifest m;
  m.base_dir = base_dir;
  m.network_name = required<std::string>(doc, "network_name", "manifest");
  const auto total = required<std::int64_t>(doc, "total_layers", "manifest");
  if (total < 1) throw ConfigError("manifest: total_layers must be at least 1");
  m.total_layers = static_cast<std::size_t>(total);

  if (!doc.contains("checkpoints") || !doc["checkpoints"].is_array() || doc["checkpoints"].empty()) {
    throw ConfigError("manifest: 'checkpoints' must be a nonempty array");
  }
  std::size_t i = 0;
  for (const auto& entry : doc["checkpoints"]) {
    const std::string where = "manifest checkpoint " + std::to_string(i++);
    if (!entry.is_object()) throw ConfigError(where + " is not an object");
    LayerCheckpoint cp;
    cp.name = required<std::string>(entry, "name", where);
    const auto order = required<std::int64_t>(entry, "order_index", where);
    if (order < 0 || static_cast<std::size_t>(order) > m.total_layers) {
      throw ConfigError(where + ": order_index " + std::to_string(order) + " outside [0, total_layers]");
    }
    cp.order_index = static_cast<std::size_t>(order);
    cp.total_layers = m.total_layers;
    const auto d_embed = required<std::int64_t>(entry, "d_embed", where);
    if (d_embed < 1) throw ConfigError(where + ": d_embed must be at least 1");
    cp.d_embed = static_cast<std::size_t>(d_embed);
    cp.matrix_path = required<std::string>(entry, "matrix_path", where);
    if (entry.contains("category") && !entry["category"].is_null()) {
      cp.category = required<std::string>(entry, "category", where);
    }
    if (!m.checkpoints.empty() && cp.order_index < m.checkpoints.back().order_index) {
      throw ConfigError(where + ": checkpoints must be ordered by order_index");
    }
    m.checkpoints.push_back(std::move(cp));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

std::string manifest_to_json(const Manifest& manifest) {
  json cps = json::array();
  for (const auto& cp : manifest.checkpoints) {
    json e = {{"name", cp.name},
              {"order_index", cp.order_index},
              {"d_embed", cp.d_embed},
              {"matrix_path", cp.matrix_path.generic_string()}};
    if (cp.category) e["category"] = *cp.category;
    cps.push_back(std::move(e));
  }
  json doc = {{"schema_version", kSchemaVersion},
              {"network_name", manifest.network_name},
              {"total_layers", manifest.total_layers},
              {"checkpoints", std::move(cps)}};
  return doc.dump(2);
}

LayerProfile profile(const Manifest& manifest, const ProfileOptions& options) {
  LayerProfile out;
  out.network_name = manifest.network_name;
  out.total_layers = manifest.total_layers;
  const auto& cps = manifest.checkpoints;

  if (!options.per_category) {
    for (const auto& cp : cps) out.layers.push_back(estimate_checkpoint(manifest, cp, options));
    return out;
  }

  for (std::size_t begin = 0; begin < cps.size();) {
    std::size_t end = begin + 1;
    while (end < cps.size() && cps[end].order_index == cps[begin].order_index && cps[end].name == cps[begin].name) {
      ++end;
    }
    std::vector<LayerResult> members;
    for (std::size_t i = begin; i < end; ++i) members.push_back(estimate_checkpoint(manifest, cps[i], options));

    LayerResult layer = members.front();
    layer.checkpoint.category.reset();
    for (const auto& mres : members) {
      layer.per_category.push_back({mres.checkpoint.category.value_or(""), mres.estimate});
    }
    if (members.size() > 1) {
      std::vector<double> ids;
      std::size_t used = 0;
      std::size_t removed = 0;
      for (const auto& mres : members) {
        ids.push_back(mres.estimate.d_hat);
        used += mres.estimate.n_used;
        removed += mres.removed_duplicates;
      }
      layer.estimate.d_hat = mean(ids);
      layer.estimate.std = sample_std(ids);
      layer.estimate.n_used = used;
      layer.removed_duplicates = removed;
    }
    out.layers.push_back(std::move(layer));
    begin = end;
  }
  return out;
}

LayerProfile profile(const std::filesystem::path& manifest_path, const ProfileOptions& options) {
  return profile(load_manifest(manifest_path), options);
}

double relative_depth(std::size_t order_index, std::size_t total_layers) {
  if (total_layers < 1) throw ConfigError("total_layers must be at least 1");
  if (order_index > total_layers) {
    throw ConfigError("order_index " + std::to_string(order_index) + " exceeds total_layers " +
                      std::to_string(total_layers));
  }
  return static_cast<double>(order_index) / static_cast<double>(total_layers);
}

ClassBound min_id_bound(std::uint64_t n_classes) {
  if (n_classes < 1) throw ConfigError("n_classes must be at least 1");
  return {n_classes, n_classes == 1 ? 0u : static_cast<unsigned>(std::bit_width(n_classes - 1))};
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("pearson: inputs differ in length");
  if (x.size() < 2) throw ConfigError("pearson: need at least 2 pairs");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y) || sxx == 0.0 || syy == 0.0) {
    throw DegenerateDataError("pearson: correlation undefined for a constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace intdim
