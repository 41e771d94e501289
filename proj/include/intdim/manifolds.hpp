#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "intdim/matrix.hpp"

namespace intdim {

enum class ManifoldKind { line, hypercube, hypersphere, swiss_roll, gaussian_blob };

std::string_view to_string(ManifoldKind k) noexcept;
ManifoldKind parse_manifold_kind(std::string_view name);

/// A dataset of known intrinsic dimension.
///
/// line: d_intrinsic = 1, t ~ U[0, 1].
/// hypercube: U[0, 1]^d.
/// hypersphere: uniform on the unit sphere S^d in R^(d+1).
/// swiss_roll: (t cos t, h, t sin t), t ~ U[1.5pi, 4.5pi], h ~ U[0, 21]; d = 2.
/// gaussian_blob: N(0, I_d).
/// Samples live in the first coordinates of R^d_embed (zero padded), then
/// N(0, noise^2) is added to every coordinate.
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::hypercube;
  std::size_t d_intrinsic = 2;
  std::size_t d_embed = 2;
  std::size_t n = 1000;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

struct GeneratedDataset {
  ActivationMatrix matrix;
  std::size_t true_id = 0;
  ManifoldSpec spec;
};

/// Smallest ambient dimension the kind needs for `d_intrinsic`.
std::size_t minimal_ambient_dimension(ManifoldKind kind, std::size_t d_intrinsic) noexcept;

GeneratedDataset gen_manifold(const ManifoldSpec& spec);

/// Writes the matrix as NPY and a JSON sidecar {kind, true_id, n, d_embed,
/// noise, seed} next to it (same stem, .json).
void write_dataset(const std::filesystem::path& npy_path, const GeneratedDataset& ds);

/// X Q^T with Q a d_target x D matrix of orthonormal columns (QR of a seeded
/// Gaussian matrix). Preserves all pairwise distances.
ActivationMatrix embed_orthogonal(const ActivationMatrix& m, std::size_t d_target, std::uint64_t seed);

/// Random Fourier feature map x -> sqrt(2 / D) cos(W x + b), W ~ N(0, bandwidth^2),
/// b ~ U[0, 2pi). Bends a flat low-dimensional dataset into a curved manifold
/// that spans many linear directions of R^d_target.
ActivationMatrix fourier_lift(const ActivationMatrix& m, std::size_t d_target, double bandwidth, std::uint64_t seed);

struct LuminanceConfig {
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

/// x_i -> x_i + lambda * xi_i * (1, ..., 1), xi_i ~ U[0, 1) per row.
ActivationMatrix perturb_luminance(const ActivationMatrix& m, const LuminanceConfig& cfg);

}  // namespace intdim
