#include "intdim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "intdim/errors.hpp"
#include "intdim/random.hpp"

namespace intdim {

namespace {

constexpr std::size_t kGramThreshold = 4096;
constexpr double kThresholdSlack = 1e-12;
constexpr std::uint64_t kSaltSurrogate = 0x7375727231ULL;

bool column_is_constant(const RowMatrix& x, Eigen::Index c) {
  const double first = x(0, c);
  for (Eigen::Index r = 1; r < x.rows(); ++r) {
    if (x(r, c) != first) return false;
  }
  return true;
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("variance threshold must lie in (0, 1]");
}

Eigen::VectorXd descending_eigenvalues(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DegenerateDataError("eigendecomposition did not converge");
  return solver.eigenvalues().reverse();
}

}  // namespace

SpectrumReport spectrum_from_eigenvalues(std::vector<double> eigenvalues, double threshold) {
  check_threshold(threshold);
  std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
  for (double& e : eigenvalues) e = std::max(e, 0.0);
  const double total = std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
  if (eigenvalues.empty() || !(total > 0.0)) throw DegenerateDataError("spectrum has no variance");

  SpectrumReport r;
  r.eigenvalues = std::move(eigenvalues);
  r.threshold = threshold;
  r.total_variance = total;
  double running = 0.0;
  for (double e : r.eigenvalues) {
    r.variance_fraction.push_back(e / total);
    running += e;
    r.cumulative_fraction.push_back(std::min(running / total, 1.0));
  }
  r.cumulative_fraction.back() = 1.0;
  r.pc_id = pc_id(r, threshold);
  return r;
}

std::size_t pc_id(const SpectrumReport& report, double threshold) {
  check_threshold(threshold);
  const auto& cum = report.cumulative_fraction;
  for (std::size_t c = 0; c < cum.size(); ++c) {
    if (cum[c] >= threshold - kThresholdSlack) return c + 1;
  }
  return cum.size();
}

SpectrumReport spectrum(const ActivationMatrix& m, bool use_correlation, double threshold) {
  check_threshold(threshold);
  const std::size_t n = m.rows();
  if (n < 2) throw DegenerateDataError("spectrum needs at least 2 rows, got " + std::to_string(n));

  const RowMatrix x = m.to_eigen();
  std::vector<Eigen::Index> kept;
  std::vector<std::size_t> dropped;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (column_is_constant(x, c)) {
      dropped.push_back(static_cast<std::size_t>(c));
    } else {
      kept.push_back(c);
    }
  }
  if (kept.empty()) throw DegenerateDataError("degenerate spectrum: every column is constant");

  const auto rows = static_cast<Eigen::Index>(n);
  const auto p = static_cast<Eigen::Index>(kept.size());
  const double denom = static_cast<double>(n - 1);
  Eigen::MatrixXd z(rows, p);
  double total_variance = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    auto col = x.col(kept[static_cast<std::size_t>(j)]);
    const double mu = col.mean();
    z.col(j) = col.array() - mu;
    const double var = z.col(j).squaredNorm() / denom;
    total_variance += var;
    if (use_correlation) z.col(j) /= std::sqrt(var);
  }

  Eigen::VectorXd eig;
  if (static_cast<std::size_t>(p) > kGramThreshold && rows < p) {
    eig = descending_eigenvalues((z * z.transpose()) / denom);
  } else {
    eig = descending_eigenvalues((z.transpose() * z) / denom);
  }

  SpectrumReport r = spectrum_from_eigenvalues(std::vector<double>(eig.data(), eig.data() + eig.size()), threshold);
  r.used_correlation = use_correlation;
  if (use_correlation) {
    r.dropped_columns = std::move(dropped);
  }
  r.total_variance = use_correlation ? static_cast<double>(p) : total_variance;
  return r;
}

ActivationMatrix gaussian_surrogate(const ActivationMatrix& m, std::uint64_t seed) {
  const std::size_t n = m.rows();
  if (n < 2) throw DegenerateDataError("surrogate needs at least 2 rows, got " + std::to_string(n));
  const RowMatrix x = m.to_eigen();
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const RowMatrix centered = x.rowwise() - mu;
  const auto rows = x.rows();
  const auto d = x.cols();
  const double denom = static_cast<double>(n - 1);

  Engine eng = make_engine(seed, kSaltSurrogate);
  std::normal_distribution<double> normal;
  auto draw = [&](Eigen::Index r, Eigen::Index c) {
    RowMatrix g(r, c);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(eng);
    return g;
  };

  RowMatrix out;
  if (static_cast<std::size_t>(d) > kGramThreshold) {
    // x_i = mu + Xc^T g_i / sqrt(n - 1) has covariance Xc^T Xc / (n - 1).
    out = (draw(rows, rows) * centered) / std::sqrt(denom);
  } else {
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw DegenerateDataError("covariance eigendecomposition did not converge");
    Eigen::VectorXd lambda = solver.eigenvalues();
    const double cutoff = std::max(lambda.maxCoeff(), 0.0) * 1e-12;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda(i) = lambda(i) > cutoff ? std::sqrt(lambda(i)) : 0.0;
    const Eigen::MatrixXd factor = solver.eigenvectors() * lambda.asDiagonal();
    out = draw(rows, d) * factor.transpose();
  }
  out.rowwise() += mu;
  return ActivationMatrix::from_eigen(out);
}

}  // namespace intdim
