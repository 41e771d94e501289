#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "intdim/matrix.hpp"

namespace intdim {

/// Exact first/second Euclidean nearest neighbours of every row.
/// Invariants: 0 < r1 <= r2, mu = r2 / r1 >= 1, nn1 != nn2 != self.
struct NeighborStats {
  std::vector<RowId> row_ids;  // the point each entry describes
  std::vector<double> r1;
  std::vector<double> r2;
  std::vector<RowId> nn1;
  std::vector<RowId> nn2;
  std::vector<double> mu;

  std::size_t size() const noexcept { return r1.size(); }
};

struct KernelOptions {
  /// Rows per tile of the blocked distance product.
  std::size_t block_rows = 256;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Squared Euclidean distance by direct subtraction, accumulated in double
/// in index order. This is the reference form every reported distance uses.
template <class T>
double squared_distance(std::span<const T> a, std::span<const T> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    s += d * d;
  }
  return s;
}

/// Exact 2-NN for every row. Ties on distance go to the smaller row id.
/// Output is identical for any block size or thread count.
///
/// Throws DegenerateDataError when n < 3 or when a point has a duplicate
/// (r1 = 0).
NeighborStats two_nearest(const ActivationMatrix& m, const KernelOptions& options = {});

struct DedupeResult {
  ActivationMatrix matrix;
  std::size_t removed = 0;
};

/// Drops every row lying within `tol` (Euclidean) of a kept row with a
/// smaller row id. Throws DegenerateDataError if fewer than 3 rows remain.
DedupeResult dedupe(const ActivationMatrix& m, double tol = 0.0);

}  // namespace intdim
