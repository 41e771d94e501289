#pragma once

// Independent reference implementations used by the tests. They share no
// code with the library beyond the matrix container.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "intdim/matrix.hpp"

namespace oracle {

struct Neighbors {
  std::vector<std::size_t> nn1, nn2;  // positions
  std::vector<double> d1, d2;         // squared distances
};

// O(N^2) scan. Ties go to the smaller position (= smaller row id when ids
// are ascending).
inline Neighbors naive_two_nearest(const intdim::ActivationMatrix& m) {
  const std::size_t n = m.rows();
  const std::size_t dim = m.cols();
  Neighbors out;
  out.nn1.resize(n);
  out.nn2.resize(n);
  out.d1.resize(n);
  out.d2.resize(n);
  std::vector<double> x(n * dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) x[i * dim + c] = m(i, c);
  for (std::size_t i = 0; i < n; ++i) {
    double b1 = std::numeric_limits<double>::infinity(), b2 = b1;
    std::size_t j1 = n, j2 = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = x[i * dim + c] - x[j * dim + c];
        s += d * d;
      }
      if (s < b1) {
        b2 = b1;
        j2 = j1;
        b1 = s;
        j1 = j;
      } else if (s < b2) {
        b2 = s;
        j2 = j;
      }
    }
    out.nn1[i] = j1;
    out.nn2[i] = j2;
    out.d1[i] = b1;
    out.d2[i] = b2;
  }
  return out;
}

inline intdim::ActivationMatrix uniform_cube(std::size_t n, std::size_t dim, unsigned seed, double lo = 0.0,
                                             double hi = 1.0) {
  std::mt19937 eng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n * dim);
  for (double& x : v) x = u(eng);
  return intdim::ActivationMatrix(n, dim, std::move(v));
}

inline intdim::ActivationMatrix gaussian(std::size_t n, std::size_t dim, unsigned seed) {
  std::mt19937 eng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n * dim);
  for (double& x : v) x = g(eng);
  return intdim::ActivationMatrix(n, dim, std::move(v));
}

// Uniform in the unit disk by rejection.
inline intdim::ActivationMatrix disk(std::size_t n, unsigned seed) {
  std::mt19937 eng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v;
  while (v.size() < 2 * n) {
    const double a = u(eng), b = u(eng);
    if (a * a + b * b < 1.0) {
      v.push_back(a);
      v.push_back(b);
    }
  }
  return intdim::ActivationMatrix(n, 2, std::move(v));
}

// Haar-ish random rotation via Gram-Schmidt on a Gaussian matrix.
inline intdim::RowMatrix random_rotation(std::size_t dim, unsigned seed) {
  std::mt19937 eng(seed);
  std::normal_distribution<double> g;
  intdim::RowMatrix q(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) q(i, j) = g(eng);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = 0; k < i; ++k) q.row(i) -= q.row(i).dot(q.row(k)) * q.row(k);
    q.row(i).normalize();
  }
  return q;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("intdim_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
