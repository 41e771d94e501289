#include "intdim/serialize.hpp"

#include <charconv>
#include <sstream>

#include "intdim/errors.hpp"

namespace intdim {

namespace {

using nlohmann::json;

// Shortest round-trip representation.
std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

json estimate_body(const IdEstimate& e) {
  json j = {{"d_hat", e.d_hat},   {"std", e.std},         {"method", to_string(e.method)},
            {"n_used", e.n_used}, {"repeats", e.repeats}, {"seed", e.seed}};
  if (!e.warnings.empty()) j["warnings"] = e.warnings;
  return j;
}

}  // namespace

json to_json(const IdEstimate& e) {
  json j = estimate_body(e);
  j["schema_version"] = kSchemaVersion;
  return j;
}

IdEstimate id_estimate_from_json(const json& j) {
  try {
    IdEstimate e;
    e.d_hat = j.at("d_hat").get<double>();
    e.std = j.at("std").get<double>();
    e.method = parse_method(j.at("method").get<std::string>());
    e.n_used = j.at("n_used").get<std::size_t>();
    e.repeats = j.at("repeats").get<std::size_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("warnings")) e.warnings = j.at("warnings").get<std::vector<std::string>>();
    return e;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed estimate report: ") + ex.what());
  }
}

json to_json(const DecimationCurve& c, std::optional<Stability> verdict) {
  json pts = json::array();
  for (const auto& p : c.points) {
    pts.push_back({{"k", p.k}, {"n_sub", p.n_sub}, {"id_mean", p.id_mean}, {"id_std", p.id_std}});
  }
  json j = {{"schema_version", kSchemaVersion},
            {"method", to_string(c.method)},
            {"seed", c.seed},
            {"n_total", c.n_total},
            {"points", std::move(pts)}};
  if (verdict) j["verdict"] = to_string(*verdict);
  return j;
}

json to_json(const SpectrumReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"used_correlation", r.used_correlation},
          {"threshold", r.threshold},
          {"pc_id", r.pc_id},
          {"total_variance", r.total_variance},
          {"dropped_columns", r.dropped_columns},
          {"eigenvalues", r.eigenvalues},
          {"cumulative_fraction", r.cumulative_fraction}};
}

json to_json(const LayerProfile& p) {
  json layers = json::array();
  for (const auto& l : p.layers) {
    json e = {{"name", l.checkpoint.name},
              {"order_index", l.checkpoint.order_index},
              {"relative_depth", l.relative_depth},
              {"d_embed", l.checkpoint.d_embed},
              {"removed_duplicates", l.removed_duplicates},
              {"estimate", estimate_body(l.estimate)}};
    if (l.checkpoint.category) e["category"] = *l.checkpoint.category;
    if (!l.per_category.empty()) {
      json cats = json::array();
      for (const auto& c : l.per_category) cats.push_back({{"category", c.category}, {"estimate", estimate_body(c.estimate)}});
      e["per_category"] = std::move(cats);
    }
    layers.push_back(std::move(e));
  }
  return {{"schema_version", kSchemaVersion},
          {"network_name", p.network_name},
          {"total_layers", p.total_layers},
          {"layers", std::move(layers)}};
}

json to_json(const ClassBound& b) {
  return {{"schema_version", kSchemaVersion}, {"n_classes", b.n_classes}, {"min_id", b.min_id}};
}

std::string to_csv(const IdEstimate& e) {
  std::ostringstream out;
  out << "d_hat,std,method,n_used,repeats,seed\n"
      << num(e.d_hat) << ',' << num(e.std) << ',' << to_string(e.method) << ',' << e.n_used << ',' << e.repeats << ','
      << e.seed << '\n';
  return out.str();
}

std::string to_csv(const DecimationCurve& c) {
  std::ostringstream out;
  out << "k,n_sub,id_mean,id_std\n";
  for (const auto& p : c.points) out << p.k << ',' << p.n_sub << ',' << num(p.id_mean) << ',' << num(p.id_std) << '\n';
  return out.str();
}

std::string to_csv(const SpectrumReport& r) {
  std::ostringstream out;
  out << "rank,eigenvalue,cumulative_fraction\n";
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    out << i + 1 << ',' << num(r.eigenvalues[i]) << ',' << num(r.cumulative_fraction[i]) << '\n';
  }
  return out.str();
}

std::string to_csv(const LayerProfile& p) {
  std::ostringstream out;
  out << "name,order_index,relative_depth,d_embed,d_hat,std,n_used,category\n";
  for (const auto& l : p.layers) {
    out << l.checkpoint.name << ',' << l.checkpoint.order_index << ',' << num(l.relative_depth) << ','
        << l.checkpoint.d_embed << ',' << num(l.estimate.d_hat) << ',' << num(l.estimate.std) << ','
        << l.estimate.n_used << ',' << l.checkpoint.category.value_or("") << '\n';
  }
  return out.str();
}

}  // namespace intdim
