#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "intdim/decimation.hpp"
#include "intdim/estimators.hpp"
#include "intdim/profile.hpp"
#include "intdim/spectrum.hpp"

// JSON reports carry "schema_version". CSV plot data starts with a header
// row naming the columns in this order:
//   decimation: k,n_sub,id_mean,id_std
//   spectrum:   rank,eigenvalue,cumulative_fraction
//   profile:    name,order_index,relative_depth,d_embed,d_hat,std,n_used,category
//   estimate:   d_hat,std,method,n_used,repeats,seed
namespace intdim {

nlohmann::json to_json(const IdEstimate& e);
nlohmann::json to_json(const DecimationCurve& c, std::optional<Stability> verdict = std::nullopt);
nlohmann::json to_json(const SpectrumReport& r);
nlohmann::json to_json(const LayerProfile& p);
nlohmann::json to_json(const ClassBound& b);

/// Inverse of to_json(IdEstimate); used by consumers of estimate reports.
IdEstimate id_estimate_from_json(const nlohmann::json& j);

std::string to_csv(const IdEstimate& e);
std::string to_csv(const DecimationCurve& c);
std::string to_csv(const SpectrumReport& r);
std::string to_csv(const LayerProfile& p);

}  // namespace intdim
