#pragma once

#include <filesystem>
#include <string_view>

#include "intdim/matrix.hpp"

namespace intdim {

enum class MatrixFormat { npy, csv };

/// Format implied by the file extension (.npy / .csv / .txt).
MatrixFormat format_from_path(const std::filesystem::path& path);

/// Reads a 2-D matrix. NPY: versions 1.0-3.0, C order, little-endian
/// float32 or float64 (float32 stays float32 in memory). CSV: headerless
/// comma-separated numeric rows of equal length.
ActivationMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
ActivationMatrix load_matrix(const std::filesystem::path& path);

ActivationMatrix parse_npy(std::string_view bytes);
ActivationMatrix parse_csv(std::string_view text);

/// Writes NPY v1.0 in the matrix's storage precision.
void save_npy(const std::filesystem::path& path, const ActivationMatrix& m);
void save_csv(const std::filesystem::path& path, const ActivationMatrix& m);
void save_matrix(const std::filesystem::path& path, const ActivationMatrix& m);

}  // namespace intdim
