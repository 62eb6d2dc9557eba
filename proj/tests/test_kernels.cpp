#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "momrec/kernels.hpp"
#include "momrec/rng.hpp"

using namespace momrec;
using kernels::Exec;

namespace {

Eigen::MatrixXd random_mat(Rng& rng, int r, int c) {
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < M.size(); ++i) M.data()[i] = rng.normal();
  return M;
}

}  // namespace

TEST_CASE("parallel congruence batch matches the serial reference") {
  Rng rng(2);
  for (int s : {3, 17, 40}) {
    Eigen::MatrixXd X = random_mat(rng, s, s), W = random_mat(rng, s, s);
    Eigen::MatrixXd A = random_mat(rng, s * s, 3 * s + 1);
    Eigen::MatrixXd Ts, Tp;
    kernels::congruence_batch(X, W, A, Ts, Exec::Serial);
    kernels::congruence_batch(X, W, A, Tp, Exec::Parallel);
    CHECK((Ts - Tp).cwiseAbs().maxCoeff() == 0.0);
    // spot-check one column against plain Eigen
    Eigen::Map<const Eigen::MatrixXd> A0(A.col(0).data(), s, s);
    Eigen::MatrixXd direct = X * A0 * W;
    CHECK((Ts.col(0) - Eigen::Map<const Eigen::VectorXd>(direct.data(), s * s))
              .cwiseAbs()
              .maxCoeff() <= 1e-12 * (1 + direct.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("parallel gram accumulation matches the serial reference") {
  Rng rng(5);
  for (int na : {5, 64, 130}) {
    Eigen::MatrixXd A = random_mat(rng, 49, na), T = random_mat(rng, 49, na);
    Eigen::MatrixXd Hs = Eigen::MatrixXd::Zero(na, na), Hp = Hs;
    kernels::gram_accumulate(A, T, Hs, Exec::Serial);
    kernels::gram_accumulate(A, T, Hp, Exec::Parallel);
    CHECK((Hs - Hp).cwiseAbs().maxCoeff() == 0.0);
    Eigen::MatrixXd direct = A.transpose() * T;
    CHECK((Hs - direct).cwiseAbs().maxCoeff() <= 1e-11 * (1 + direct.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("parallel stencil application matches the serial reference") {
  Rng rng(9);
  Poly q = Poly::monomial(3, {1, 1, 0}) - Poly::monomial(3, {0, 0, 2});
  auto st = stencil(q, 3);
  Eigen::VectorXd y(binom(3 + 6, 6));
  for (int i = 0; i < y.size(); ++i) y[i] = rng.normal();
  Eigen::MatrixXd Ms, Mp;
  kernels::stencil_apply(*st, y, Ms, Exec::Serial);
  kernels::stencil_apply(*st, y, Mp, Exec::Parallel);
  CHECK((Ms - Mp).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Ms - st->apply(y)).cwiseAbs().maxCoeff() == 0.0);
}
