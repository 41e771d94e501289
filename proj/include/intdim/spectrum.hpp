#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "intdim/matrix.hpp"

namespace intdim {

/// Eigenspectrum of the column correlation (or covariance) matrix.
struct SpectrumReport {
  /// Descending, clamped at 0. Raw eigenvalues: for the covariance route
  /// they sum to the total column variance; for the correlation route to
  /// the number of retained columns.
  std::vector<double> eigenvalues;
  /// eigenvalues / sum(eigenvalues).
  std::vector<double> variance_fraction;
  /// Running sum of variance_fraction; the last entry is exactly 1.
  std::vector<double> cumulative_fraction;
  bool used_correlation = true;
  /// Zero-variance columns excluded from the correlation matrix.
  std::vector<std::size_t> dropped_columns;
  double threshold = 0.9;
  std::size_t pc_id = 0;
  double total_variance = 0.0;
};

/// PCA spectrum of the columns of `m` (n >= 2). Throws DegenerateDataError
/// when every column is constant. Wide matrices (D > 4096, n < D) go
/// through the n x n Gram matrix, which has the same nonzero eigenvalues.
SpectrumReport spectrum(const ActivationMatrix& m, bool use_correlation = true, double threshold = 0.9);

/// Smallest c such that cumulative_fraction[c - 1] >= threshold.
std::size_t pc_id(const SpectrumReport& report, double threshold = 0.9);

/// Recomputes fractions and pc_id from `eigenvalues` (descending, >= 0).
SpectrumReport spectrum_from_eigenvalues(std::vector<double> eigenvalues, double threshold = 0.9);

/// n draws from N(column means, empirical covariance) of `m`. Covariance is
/// factorised by eigendecomposition with clamping; for D > 4096 the
/// centred data itself serves as the factor.
ActivationMatrix gaussian_surrogate(const ActivationMatrix& m, std::uint64_t seed);

}  // namespace intdim
