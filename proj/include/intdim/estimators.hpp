#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intdim/matrix.hpp"
#include "intdim/neighbors.hpp"

namespace intdim {

enum class Method { mle, cumulate, triplets };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);

/// A global intrinsic-dimension estimate.
struct IdEstimate {
  double d_hat = 0.0;
  /// Std across subsample repeats, or the asymptotic d_hat / sqrt(n) for a
  /// single pass.
  double std = 0.0;
  Method method = Method::mle;
  std::size_t n_used = 0;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// Closed-form maximiser of the Pareto likelihood d^N prod mu_i^-(d+1):
/// d_hat = N / sum(ln mu_i).
IdEstimate estimate_mle(std::span<const double> mu);

/// Slope of a least-squares line through the origin of -ln(1 - F_emp)
/// against ln mu, with F_emp(mu_(i)) = i/N for the ascending 0-based rank i,
/// over the lowest (1 - discard_fraction) share of the sorted ratios.
IdEstimate estimate_cumulate(std::span<const double> mu, double discard_fraction = 0.1);

/// MLE restricted to points whose triplets {i, nn1(i), nn2(i)} are pairwise
/// disjoint, picked greedily in a seeded random order.
IdEstimate estimate_triplets(const NeighborStats& stats, std::uint64_t seed);
IdEstimate estimate_triplets(const ActivationMatrix& m, std::uint64_t seed, const KernelOptions& kernel = {});

/// Inverse CDF of f(mu | d) = d mu^-(d+1) on [1, inf): (1 - u)^(-1/d).
double pareto_inverse_cdf(double u, double d) noexcept;

/// mu_i = pareto_inverse_cdf(u_i, d), u_i ~ U[0, 1).
std::vector<double> sample_pareto(double d, std::size_t n, std::uint64_t seed);

struct EstimatorConfig {
  Method method = Method::mle;
  double discard_fraction = 0.1;
  KernelOptions kernel;
};

/// One estimate on the whole matrix (2-NN, then the configured estimator).
IdEstimate estimate(const ActivationMatrix& m, const EstimatorConfig& config, std::uint64_t seed);

struct SubsampleConfig {
  double fraction = 0.9;
  std::size_t repeats = 20;
};

/// Mean and sample std of `repeats` estimates, each on floor(fraction * n)
/// rows drawn without replacement. Repeat r uses stream r of `seed`. With a
/// single repeat, std and n_used are those of the inner estimate.
IdEstimate subsample_estimate(const ActivationMatrix& m, const SubsampleConfig& sub, const EstimatorConfig& config,
                              std::uint64_t seed);

double mean(std::span<const double> x) noexcept;
/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_std(std::span<const double> x) noexcept;

}  // namespace intdim
