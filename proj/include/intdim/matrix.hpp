#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace intdim {

using RowId = std::int64_t;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Storage precision of an ActivationMatrix. float32 activations are kept as
/// float32 so that a 10^4 x 10^5 layer dump fits in memory; every arithmetic
/// path promotes to double.
enum class Precision { f32, f64 };

/// N x D point cloud, one row per sample, with stable row identifiers that
/// survive deduplication and subsampling.
///
/// Invariants (enforced by every constructor): all entries finite, values
/// sized rows*cols, row ids unique.
class ActivationMatrix {
 public:
  ActivationMatrix() = default;
  ActivationMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                   std::vector<RowId> row_ids = {});
  ActivationMatrix(std::size_t rows, std::size_t cols, std::vector<float> values,
                   std::vector<RowId> row_ids = {});

  static ActivationMatrix from_eigen(const RowMatrix& m, std::vector<RowId> row_ids = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Precision precision() const noexcept;
  std::span<const RowId> row_ids() const noexcept { return row_ids_; }

  double operator()(std::size_t r, std::size_t c) const;

  /// Calls `f(std::span<const T>)` with the row-major values in their storage type.
  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit([&](const auto& v) -> decltype(auto) {
      using T = typename std::decay_t<decltype(v)>::value_type;
      return f(std::span<const T>(v));
    }, values_);
  }

  /// Dense double copy.
  RowMatrix to_eigen() const;

  /// Rows at `positions`, in the given order, keeping storage precision and row ids.
  ActivationMatrix select_rows(std::span<const std::size_t> positions) const;

 private:
  void check_invariants();

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::variant<std::vector<double>, std::vector<float>> values_;
  std::vector<RowId> row_ids_;
};

/// Builds a float64 matrix by letting `fill` write into an Eigen view of the
/// final buffer (no intermediate copy).
template <class Fill>
ActivationMatrix build_matrix(std::size_t rows, std::size_t cols, Fill&& fill, std::vector<RowId> row_ids = {}) {
  std::vector<double> values(rows * cols);
  Eigen::Map<RowMatrix> view(values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  fill(view);
  return ActivationMatrix(rows, cols, std::move(values), std::move(row_ids));
}

}  // namespace intdim
