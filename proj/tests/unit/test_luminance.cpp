#include <doctest.h>

#include "intdim/estimators.hpp"
#include "intdim/manifolds.hpp"

using namespace intdim;

namespace {

// MNIST-like: a curved 10-D manifold of nonnegative "pixel" vectors in
// 784-D, scaled so that lambda = 100 lands near ID 3 as reported for digits.
ActivationMatrix mnist_like() {
  const auto base = gen_manifold({ManifoldKind::hypercube, 10, 10, 2000, 0.0, 6}).matrix;
  const RowMatrix lifted = fourier_lift(base, 784, 1.0, 6).to_eigen().array() + 0.1;
  return ActivationMatrix::from_eigen(lifted);
}

std::vector<IdEstimate> sweep(const ActivationMatrix& m) {
  std::vector<IdEstimate> ids;
  for (double lambda : {0.0, 1.0, 10.0, 100.0, 1000.0}) ids.push_back(estimate(perturb_luminance(m, {lambda, 1}), {}, 0));
  for (const auto& e : ids) MESSAGE("d_hat = " << e.d_hat << " +- " << e.std);
  return ids;
}

}  // namespace

TEST_CASE("strong luminance noise collapses the ID") {
  const auto ids = sweep(mnist_like());
  CHECK(ids[3].d_hat < 0.5 * ids[0].d_hat);
  CHECK(ids[4].d_hat < ids[3].d_hat);
  CHECK(ids[4].d_hat < 2.0);
}

TEST_CASE("ID is nonincreasing in lambda, allowing one inversion within std") {
  const auto ids = sweep(mnist_like());
  int inversions = 0;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i].d_hat > ids[i - 1].d_hat) {
      ++inversions;
      CHECK(ids[i].d_hat - ids[i - 1].d_hat < ids[i].std + ids[i - 1].std);
    }
  }
  CHECK(inversions <= 1);
}
