#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "intdim/estimators.hpp"
#include "intdim/matrix.hpp"

namespace intdim {

struct DecimationPoint {
  std::size_t k = 1;       // number of disjoint folds
  std::size_t n_sub = 0;   // floor(N / k); actual folds hold n_sub or n_sub + 1 rows
  double id_mean = 0.0;
  double id_std = 0.0;     // sample std over the k fold estimates, 0 at k = 1
};

/// ID versus sample size, ordered by k from k_max down to 1.
struct DecimationCurve {
  std::vector<DecimationPoint> points;
  Method method = Method::mle;
  std::uint64_t seed = 0;
  std::size_t n_total = 0;
};

/// For each k = k_max..1: shuffle the rows, split them into k disjoint folds
/// of near-equal size, estimate the ID on every fold. Fold f at level k uses
/// stream k(k-1)/2 + f of `seed`, so the k = 1 entry equals the direct
/// estimate. Requires floor(N / k_max) >= 10.
DecimationCurve decimation_curve(const ActivationMatrix& m, std::size_t k_max, const EstimatorConfig& config,
                                 std::uint64_t seed);

/// Sizes of the k folds of n rows: the first n % k folds get one extra row.
std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k);

enum class Stability { well_defined, ill_defined, inconclusive };

std::string_view to_string(Stability s) noexcept;

/// well_defined: every id_mean within rel_tol of the k = 1 value.
/// ill_defined: id_mean rises with n_sub (Spearman rho > spearman_min) by
/// more than rel_tol from the smallest to the largest sample.
/// Anything else, including curves with fewer than 3 entries, is inconclusive.
Stability stability_verdict(const DecimationCurve& curve, double rel_tol = 0.1, double spearman_min = 0.9);

/// Spearman rank correlation with average ranks for ties; 0 if either side
/// is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace intdim
