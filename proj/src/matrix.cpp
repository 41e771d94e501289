#include "intdim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "intdim/errors.hpp"

namespace intdim {

ActivationMatrix::ActivationMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                                   std::vector<RowId> row_ids)
    : rows_(rows), cols_(cols), values_(std::move(values)), row_ids_(std::move(row_ids)) {
  check_invariants();
}

ActivationMatrix::ActivationMatrix(std::size_t rows, std::size_t cols, std::vector<float> values,
                                   std::vector<RowId> row_ids)
    : rows_(rows), cols_(cols), values_(std::move(values)), row_ids_(std::move(row_ids)) {
  check_invariants();
}

ActivationMatrix ActivationMatrix::from_eigen(const RowMatrix& m, std::vector<RowId> row_ids) {
  std::vector<double> values(m.data(), m.data() + m.size());
  return ActivationMatrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                          std::move(values), std::move(row_ids));
}

void ActivationMatrix::check_invariants() {
  visit([&](auto values) {
    if (values.size() != rows_ * cols_) {
      throw ValidationError("matrix holds " + std::to_string(values.size()) + " values, expected " +
                            std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        if (!std::isfinite(values[r * cols_ + c])) {
          throw ValidationError("non-finite entry at row " + std::to_string(r) + ", column " +
                                std::to_string(c));
        }
      }
    }
  });
  if (row_ids_.empty()) {
    row_ids_.resize(rows_);
    std::iota(row_ids_.begin(), row_ids_.end(), RowId{0});
    return;
  }
  if (row_ids_.size() != rows_) {
    throw ValidationError("row id count " + std::to_string(row_ids_.size()) + " does not match " +
                          std::to_string(rows_) + " rows");
  }
  std::vector<RowId> sorted = row_ids_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("row ids are not unique");
  }
}

Precision ActivationMatrix::precision() const noexcept {
  return std::holds_alternative<std::vector<float>>(values_) ? Precision::f32 : Precision::f64;
}

double ActivationMatrix::operator()(std::size_t r, std::size_t c) const {
  return visit([&](auto values) { return static_cast<double>(values[r * cols_ + c]); });
}

RowMatrix ActivationMatrix::to_eigen() const {
  RowMatrix out(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  visit([&](auto values) { std::copy(values.begin(), values.end(), out.data()); });
  return out;
}

ActivationMatrix ActivationMatrix::select_rows(std::span<const std::size_t> positions) const {
  std::vector<RowId> ids;
  ids.reserve(positions.size());
  for (std::size_t p : positions) {
    if (p >= rows_) throw ConfigError("row position " + std::to_string(p) + " out of range");
    ids.push_back(row_ids_[p]);
  }
  return visit([&](auto values) {
    using T = typename decltype(values)::value_type;
    std::vector<std::remove_const_t<T>> out;
    out.reserve(positions.size() * cols_);
    for (std::size_t p : positions) {
      auto row = values.subspan(p * cols_, cols_);
      out.insert(out.end(), row.begin(), row.end());
    }
    return ActivationMatrix(positions.size(), cols_, std::move(out), std::move(ids));
  });
}

}  // namespace intdim
