#include "intdim/manifolds.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "intdim/errors.hpp"
#include "intdim/io.hpp"
#include "intdim/random.hpp"

namespace intdim {

namespace {

constexpr std::uint64_t kSaltManifold = 0x6d616e6931ULL;
constexpr std::uint64_t kSaltNoise = 0x6e6f697331ULL;
constexpr std::uint64_t kSaltEmbed = 0x656d626431ULL;
constexpr std::uint64_t kSaltLift = 0x6c69667431ULL;
constexpr std::uint64_t kSaltLuminance = 0x6c756d6931ULL;

void validate(const ManifoldSpec& spec) {
  if (spec.n < 1) throw ConfigError("manifold sample count must be at least 1");
  if (spec.d_intrinsic < 1) throw ConfigError("intrinsic dimension must be at least 1");
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) throw ConfigError("noise must be a finite value >= 0");
  if (spec.kind == ManifoldKind::line && spec.d_intrinsic != 1) {
    throw ConfigError("a line has intrinsic dimension 1");
  }
  if (spec.kind == ManifoldKind::swiss_roll && spec.d_intrinsic != 2) {
    throw ConfigError("a swiss roll has intrinsic dimension 2");
  }
  const std::size_t need = minimal_ambient_dimension(spec.kind, spec.d_intrinsic);
  if (spec.d_embed < need) {
    throw ConfigError(std::string(to_string(spec.kind)) + " of dimension " + std::to_string(spec.d_intrinsic) +
                      " needs d_embed >= " + std::to_string(need) + ", got " + std::to_string(spec.d_embed));
  }
}

}  // namespace

std::string_view to_string(ManifoldKind k) noexcept {
  switch (k) {
    case ManifoldKind::line:
      return "line";
    case ManifoldKind::hypercube:
      return "hypercube";
    case ManifoldKind::hypersphere:
      return "hypersphere";
    case ManifoldKind::swiss_roll:
      return "swiss_roll";
    case ManifoldKind::gaussian_blob:
      return "gaussian_blob";
  }
  return "unknown";
}

ManifoldKind parse_manifold_kind(std::string_view name) {
  for (auto k : {ManifoldKind::line, ManifoldKind::hypercube, ManifoldKind::hypersphere, ManifoldKind::swiss_roll,
                 ManifoldKind::gaussian_blob}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown manifold kind '" + std::string(name) + "'");
}

std::size_t minimal_ambient_dimension(ManifoldKind kind, std::size_t d_intrinsic) noexcept {
  switch (kind) {
    case ManifoldKind::hypersphere:
      return d_intrinsic + 1;
    case ManifoldKind::swiss_roll:
      return 3;
    default:
      return d_intrinsic;
  }
}

GeneratedDataset gen_manifold(const ManifoldSpec& spec) {
  validate(spec);
  const std::size_t n = spec.n;
  const std::size_t d = spec.d_intrinsic;
  const std::size_t cols = spec.d_embed;
  std::vector<double> values(n * cols, 0.0);
  Engine eng = make_engine(spec.seed, kSaltManifold);
  std::normal_distribution<double> normal;

  for (std::size_t i = 0; i < n; ++i) {
    double* row = values.data() + i * cols;
    switch (spec.kind) {
      case ManifoldKind::line:
      case ManifoldKind::hypercube:
        for (std::size_t k = 0; k < d; ++k) row[k] = uniform01(eng);
        break;
      case ManifoldKind::gaussian_blob:
        for (std::size_t k = 0; k < d; ++k) row[k] = normal(eng);
        break;
      case ManifoldKind::hypersphere: {
        double norm2 = 0.0;
        while (norm2 == 0.0) {
          for (std::size_t k = 0; k <= d; ++k) {
            row[k] = normal(eng);
            norm2 += row[k] * row[k];
          }
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t k = 0; k <= d; ++k) row[k] *= inv;
        break;
      }
      case ManifoldKind::swiss_roll: {
        const double t = std::numbers::pi * (1.5 + 3.0 * uniform01(eng));
        const double h = 21.0 * uniform01(eng);
        row[0] = t * std::cos(t);
        row[1] = h;
        row[2] = t * std::sin(t);
        break;
      }
    }
  }

  if (spec.noise > 0.0) {
    Engine noise_eng = make_engine(spec.seed, kSaltNoise);
    for (double& v : values) v += spec.noise * normal(noise_eng);
  }
  return {ActivationMatrix(n, cols, std::move(values)), d, spec};
}

void write_dataset(const std::filesystem::path& npy_path, const GeneratedDataset& ds) {
  save_npy(npy_path, ds.matrix);
  nlohmann::json sidecar = {
      {"kind", to_string(ds.spec.kind)}, {"true_id", ds.true_id},   {"n", ds.spec.n},
      {"d_embed", ds.spec.d_embed},      {"noise", ds.spec.noise}, {"seed", ds.spec.seed},
  };
  auto json_path = npy_path;
  json_path.replace_extension(".json");
  std::ofstream out(json_path);
  if (!out) throw IoError("cannot write '" + json_path.string() + "'");
  out << sidecar.dump(2) << '\n';
}

ActivationMatrix embed_orthogonal(const ActivationMatrix& m, std::size_t d_target, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(m.cols());
  if (d_target < m.cols()) {
    throw ConfigError("target dimension " + std::to_string(d_target) + " is below the current dimension " +
                      std::to_string(m.cols()));
  }
  const auto big = static_cast<Eigen::Index>(d_target);
  Engine eng = make_engine(seed, kSaltEmbed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd gaussian(big, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < big; ++r) gaussian(r, c) = normal(eng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, d);

  const RowMatrix x = m.to_eigen();
  return build_matrix(
      m.rows(), d_target, [&](auto out) { out.noalias() = x * q.transpose(); },
      std::vector<RowId>(m.row_ids().begin(), m.row_ids().end()));
}

ActivationMatrix fourier_lift(const ActivationMatrix& m, std::size_t d_target, double bandwidth, std::uint64_t seed) {
  if (d_target < 1) throw ConfigError("lift target dimension must be at least 1");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("lift bandwidth must be positive");
  const auto d = static_cast<Eigen::Index>(m.cols());
  const auto big = static_cast<Eigen::Index>(d_target);
  Engine eng = make_engine(seed, kSaltLift);
  std::normal_distribution<double> normal(0.0, bandwidth);
  Eigen::MatrixXd w(d, big);
  for (Eigen::Index j = 0; j < big; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) w(k, j) = normal(eng);
  }
  Eigen::RowVectorXd phase(big);
  for (Eigen::Index j = 0; j < big; ++j) phase(j) = 2.0 * std::numbers::pi * uniform01(eng);

  const RowMatrix x = m.to_eigen();
  const double scale = std::sqrt(2.0 / static_cast<double>(d_target));
  return build_matrix(
      m.rows(), d_target,
      [&](auto out) {
        out.noalias() = x * w;
        out.rowwise() += phase;
        out = out.array().cos() * scale;
      },
      std::vector<RowId>(m.row_ids().begin(), m.row_ids().end()));
}

ActivationMatrix perturb_luminance(const ActivationMatrix& m, const LuminanceConfig& cfg) {
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw ConfigError("lambda must be a finite value >= 0");
  if (cfg.lambda == 0.0) return m;
  Engine eng = make_engine(cfg.seed, kSaltLuminance);
  RowMatrix x = m.to_eigen();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double shift = cfg.lambda * uniform01(eng);
    x.row(r).array() += shift;
  }
  return ActivationMatrix::from_eigen(x, std::vector<RowId>(m.row_ids().begin(), m.row_ids().end()));
}

}  // namespace intdim
