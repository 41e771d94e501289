#include "intdim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "intdim/errors.hpp"
#include "intdim/random.hpp"

namespace intdim {

namespace {

constexpr std::uint64_t kSaltTriplets = 0x7472697031ULL;
constexpr std::uint64_t kSaltSubsample = 0x7375627331ULL;
constexpr std::uint64_t kSaltPareto = 0x7061726531ULL;

void check_ratios(std::span<const double> mu) {
  if (mu.size() < 3) {
    throw DegenerateDataError("need at least 3 ratios, got " + std::to_string(mu.size()));
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu[i] >= 1.0) || !std::isfinite(mu[i])) {
      throw ValidationError("ratio " + std::to_string(i) + " is not a finite value >= 1");
    }
  }
}

void add_warnings(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& w : from) {
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
  }
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::mle:
      return "mle";
    case Method::cumulate:
      return "cumulate";
    case Method::triplets:
      return "triplets";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "mle") return Method::mle;
  if (name == "cumulate") return Method::cumulate;
  if (name == "triplets") return Method::triplets;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected mle, cumulate or triplets)");
}

double mean(std::span<const double> x) noexcept {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_std(std::span<const double> x) noexcept {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

IdEstimate estimate_mle(std::span<const double> mu) {
  check_ratios(mu);
  double log_sum = 0.0;
  for (double m : mu) log_sum += std::log(m);
  if (log_sum <= 0.0) {
    throw DegenerateDataError("all ratios equal 1: the estimate diverges (lattice-like data?)");
  }
  IdEstimate e;
  const auto n = static_cast<double>(mu.size());
  e.d_hat = n / log_sum;
  e.std = e.d_hat / std::sqrt(n);
  e.method = Method::mle;
  e.n_used = mu.size();
  return e;
}

IdEstimate estimate_cumulate(std::span<const double> mu, double discard_fraction) {
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    throw ConfigError("discard fraction must lie in [0, 1)");
  }
  check_ratios(mu);
  std::vector<double> sorted(mu.begin(), mu.end());
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const auto kept = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - discard_fraction)));
  if (kept < 3) {
    throw DegenerateDataError("cumulate fit keeps " + std::to_string(kept) + " points (need at least 3)");
  }

  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < kept; ++i) {
    const double x = std::log(sorted[i]);
    const double y = -std::log(1.0 - static_cast<double>(i) / static_cast<double>(n));
    sxy += x * y;
    sxx += x * x;
  }
  if (sxx <= 0.0) {
    throw DegenerateDataError("all retained ratios equal 1: the estimate diverges");
  }

  IdEstimate e;
  e.d_hat = sxy / sxx;
  e.std = e.d_hat / std::sqrt(static_cast<double>(n));
  e.method = Method::cumulate;
  e.n_used = n;
  if (sorted.front() == sorted[kept - 1]) {
    e.warnings.emplace_back("low-rank cumulate fit: all retained ratios are equal");
  }
  return e;
}

IdEstimate estimate_triplets(const NeighborStats& stats, std::uint64_t seed) {
  const std::size_t n = stats.size();
  if (n < 9) {
    throw DegenerateDataError("triplet estimate needs at least 9 points, got " + std::to_string(n));
  }
  Engine eng = make_engine(seed, kSaltTriplets);
  const std::vector<std::size_t> order = permutation(eng, n);

  std::unordered_set<RowId> used;
  std::vector<double> selected;
  for (std::size_t i : order) {
    const RowId a = stats.row_ids[i];
    const RowId b = stats.nn1[i];
    const RowId c = stats.nn2[i];
    if (used.contains(a) || used.contains(b) || used.contains(c)) continue;
    used.insert({a, b, c});
    selected.push_back(stats.mu[i]);
  }
  if (selected.size() < 3) {
    throw DegenerateDataError("only " + std::to_string(selected.size()) + " disjoint triplets found (need 3)");
  }
  IdEstimate e = estimate_mle(selected);
  e.method = Method::triplets;
  e.seed = seed;
  return e;
}

IdEstimate estimate_triplets(const ActivationMatrix& m, std::uint64_t seed, const KernelOptions& kernel) {
  if (m.rows() < 9) {
    throw DegenerateDataError("triplet estimate needs at least 9 points, got " + std::to_string(m.rows()));
  }
  return estimate_triplets(two_nearest(m, kernel), seed);
}

double pareto_inverse_cdf(double u, double d) noexcept { return std::pow(1.0 - u, -1.0 / d); }

std::vector<double> sample_pareto(double d, std::size_t n, std::uint64_t seed) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("Pareto dimension must be positive");
  if (n < 1) throw ConfigError("Pareto sample size must be at least 1");
  Engine eng = make_engine(seed, kSaltPareto);
  std::vector<double> mu(n);
  for (double& m : mu) m = pareto_inverse_cdf(uniform01(eng), d);
  return mu;
}

IdEstimate estimate(const ActivationMatrix& m, const EstimatorConfig& config, std::uint64_t seed) {
  IdEstimate e;
  switch (config.method) {
    case Method::mle:
      e = estimate_mle(two_nearest(m, config.kernel).mu);
      break;
    case Method::cumulate:
      e = estimate_cumulate(two_nearest(m, config.kernel).mu, config.discard_fraction);
      break;
    case Method::triplets:
      e = estimate_triplets(m, seed, config.kernel);
      break;
  }
  e.seed = seed;
  return e;
}

IdEstimate subsample_estimate(const ActivationMatrix& m, const SubsampleConfig& sub, const EstimatorConfig& config,
                              std::uint64_t seed) {
  if (!(sub.fraction > 0.0 && sub.fraction <= 1.0)) {
    throw ConfigError("subsample fraction must lie in (0, 1]");
  }
  if (sub.repeats < 1) throw ConfigError("subsample repeats must be at least 1");
  const std::size_t n = m.rows();
  const auto count = static_cast<std::size_t>(std::floor(sub.fraction * static_cast<double>(n)));
  if (count < 3) {
    throw ConfigError("subsample of " + std::to_string(count) + " rows is too small (need at least 3)");
  }

  std::vector<double> values;
  IdEstimate out;
  out.n_used = count;
  for (std::size_t r = 0; r < sub.repeats; ++r) {
    const std::uint64_t rseed = stream_seed(seed, r);
    IdEstimate e;
    try {
      if (count == n) {
        e = estimate(m, config, rseed);
      } else {
        Engine eng = make_engine(rseed, kSaltSubsample);
        const auto rows = sample_without_replacement(eng, n, count);
        e = estimate(m.select_rows(rows), config, rseed);
      }
    } catch (const Error& err) {
      rethrow_with_context(err, "subsample repeat " + std::to_string(r) + ": ");
    }
    values.push_back(e.d_hat);
    add_warnings(out.warnings, e.warnings);
    if (sub.repeats == 1) {
      out.std = e.std;
      out.n_used = e.n_used;
    }
  }

  out.d_hat = mean(values);
  if (sub.repeats > 1) out.std = sample_std(values);
  out.method = config.method;
  out.repeats = sub.repeats;
  out.seed = seed;
  return out;
}

}  // namespace intdim
