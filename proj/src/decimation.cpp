#include "intdim/decimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "intdim/errors.hpp"
#include "intdim/random.hpp"

namespace intdim {

namespace {

constexpr std::uint64_t kSaltShuffle = 0x6465636931ULL;

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k) {
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t f = 0; f < n % k; ++f) ++sizes[f];
  return sizes;
}

DecimationCurve decimation_curve(const ActivationMatrix& m, std::size_t k_max, const EstimatorConfig& config,
                                 std::uint64_t seed) {
  const std::size_t n = m.rows();
  if (k_max < 1) throw ConfigError("k_max must be at least 1");
  if (n / k_max < 10) {
    throw ConfigError("k_max = " + std::to_string(k_max) + " leaves folds of " + std::to_string(n / k_max) +
                      " rows; need at least 10 (use k_max <= " + std::to_string(n / 10) + ")");
  }

  DecimationCurve curve;
  curve.method = config.method;
  curve.seed = seed;
  curve.n_total = n;
  for (std::size_t k = k_max; k >= 1; --k) {
    std::vector<double> ids;
    ids.reserve(k);
    if (k == 1) {
      ids.push_back(estimate(m, config, seed).d_hat);
    } else {
      Engine eng = make_engine(stream_seed(seed, k), kSaltShuffle);
      const std::vector<std::size_t> perm = permutation(eng, n);
      const std::vector<std::size_t> sizes = fold_sizes(n, k);
      std::size_t offset = 0;
      for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> rows(perm.begin() + static_cast<std::ptrdiff_t>(offset),
                                      perm.begin() + static_cast<std::ptrdiff_t>(offset + sizes[f]));
        offset += sizes[f];
        std::sort(rows.begin(), rows.end());
        const std::uint64_t fseed = stream_seed(seed, k * (k - 1) / 2 + f);
        try {
          ids.push_back(estimate(m.select_rows(rows), config, fseed).d_hat);
        } catch (const Error& err) {
          rethrow_with_context(err, "decimation k=" + std::to_string(k) + " fold " + std::to_string(f) + ": ");
        }
      }
    }
    curve.points.push_back({k, n / k, mean(ids), sample_std(ids)});
  }
  return curve;
}

std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::well_defined:
      return "well_defined";
    case Stability::ill_defined:
      return "ill_defined";
    case Stability::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("spearman: inputs differ in length");
  if (x.size() < 2) return 0.0;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Stability stability_verdict(const DecimationCurve& curve, double rel_tol, double spearman_min) {
  const auto& pts = curve.points;
  if (pts.size() < 3) return Stability::inconclusive;

  const auto full = std::max_element(pts.begin(), pts.end(),
                                     [](const auto& a, const auto& b) { return a.n_sub < b.n_sub; });
  const double ref = full->id_mean;
  const bool flat = std::all_of(pts.begin(), pts.end(),
                                [&](const auto& p) { return std::abs(p.id_mean - ref) <= rel_tol * std::abs(ref); });
  if (flat) return Stability::well_defined;

  std::vector<double> sizes, ids;
  for (const auto& p : pts) {
    sizes.push_back(static_cast<double>(p.n_sub));
    ids.push_back(p.id_mean);
  }
  const auto smallest = std::min_element(pts.begin(), pts.end(),
                                         [](const auto& a, const auto& b) { return a.n_sub < b.n_sub; });
  const double rise = full->id_mean - smallest->id_mean;
  if (spearman(sizes, ids) > spearman_min && rise > rel_tol * std::abs(smallest->id_mean)) {
    return Stability::ill_defined;
  }
  return Stability::inconclusive;
}

}  // namespace intdim
