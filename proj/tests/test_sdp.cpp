#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <sstream>

#include "momrec/rng.hpp"
#include "momrec/sdp.hpp"

using namespace momrec;

namespace {

// min y1 s.t. [[1, y1], [y1, 1]] >= 0, encoded with a pinned constant
// component y0 = 1.
LmiProgram boundary_program() {
  LmiProgram p;
  p.num_vars = 2;
  p.c = Eigen::Vector2d(0, 1);
  p.F = Eigen::MatrixXd::Zero(1, 2);
  p.F(0, 0) = 1;
  p.g = Eigen::VectorXd::Ones(1);
  LmiBlock b;
  b.size = 2;
  b.entries = {{0, 0, 0, 1.0}, {1, 1, 0, 1.0}, {1, 0, 1, 1.0}};
  p.blocks.push_back(b);
  return p;
}

// Dense symmetric matrices from a generator, lower triangle scattered into
// LmiBlock entries for variable alpha.
void add_dense(LmiBlock& b, int alpha, const Eigen::MatrixXd& A) {
  for (int r = 0; r < A.rows(); ++r)
    for (int c = 0; c <= r; ++c)
      if (A(r, c) != 0.0) b.entries.push_back({r, c, alpha, A(r, c)});
}

struct RandomProgram {
  LmiProgram prog;
  int dim;      // free variables (excluding the pinned constant)
  double box;   // |y_i| <= box enforced by 1x1 blocks
};

// Random bounded programs: y0 pinned to 1 carries the constant parts; the
// free part is box-constrained so a lattice oracle always brackets.
RandomProgram random_bounded_program(Rng& rng, int dim, int block_size) {
  RandomProgram rp;
  rp.dim = dim;
  rp.box = 2.0;
  LmiProgram& p = rp.prog;
  p.num_vars = dim + 1;
  p.c = Eigen::VectorXd::Zero(dim + 1);
  for (int i = 1; i <= dim; ++i) p.c[i] = rng.normal();
  p.F = Eigen::MatrixXd::Zero(1, dim + 1);
  p.F(0, 0) = 1;
  p.g = Eigen::VectorXd::Ones(1);

  LmiBlock b;
  b.size = block_size;
  add_dense(b, 0, Eigen::MatrixXd::Identity(block_size, block_size));
  for (int i = 1; i <= dim; ++i) {
    Eigen::MatrixXd A(block_size, block_size);
    for (int r = 0; r < block_size; ++r)
      for (int c = 0; c <= r; ++c) {
        A(r, c) = rng.normal();
        A(c, r) = A(r, c);
      }
    add_dense(b, i, A);
  }
  p.blocks.push_back(b);
  // box blocks: box - y_i >= 0 and box + y_i >= 0
  for (int i = 1; i <= dim; ++i) {
    for (double sgn : {+1.0, -1.0}) {
      LmiBlock bb;
      bb.size = 1;
      bb.entries = {{0, 0, 0, rp.box}, {0, 0, i, sgn}};
      p.blocks.push_back(bb);
    }
  }
  return rp;
}

// Feasibility-checked lattice search; returns the best objective over grid
// points (an upper bound on the true minimum).
double grid_minimum(const RandomProgram& rp, double h) {
  const LmiProgram& p = rp.prog;
  const int dim = rp.dim;
  std::vector<double> axis;
  for (double v = -rp.box; v <= rp.box + 1e-12; v += h) axis.push_back(v);
  const int npts = static_cast<int>(axis.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(dim, 0);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim + 1);
  y[0] = 1.0;
  while (true) {
    for (int i = 0; i < dim; ++i) y[i + 1] = axis[idx[i]];
    bool feasible = true;
    for (const auto& b : p.blocks) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(b.size, b.size);
      for (const auto& e : b.entries) {
        M(e.row, e.col) += e.coeff * y[e.alpha];
        if (e.row != e.col) M(e.col, e.row) += e.coeff * y[e.alpha];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-12) {
        feasible = false;
        break;
      }
    }
    if (feasible) best = std::min(best, p.c.dot(y));
    int i = 0;
    while (i < dim && ++idx[i] == npts) idx[i++] = 0;
    if (i == dim) break;
  }
  return best;
}

}  // namespace

TEST_CASE("2x2 boundary program") {
  SdpSolution s = solve(boundary_program());
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.y[1] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(s.primal_obj == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(s.dual_obj <= s.primal_obj + 1e-8 * (1 + std::abs(s.primal_obj)));
}

TEST_CASE("equality-pinned program with no blocks") {
  LmiProgram p;
  p.num_vars = 1;
  p.c = Eigen::VectorXd::Ones(1);
  p.F = Eigen::MatrixXd::Ones(1, 1);
  p.g = Eigen::VectorXd::Constant(1, 5.0);
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.y[0] == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("objective scaling leaves the argmin unchanged") {
  LmiProgram p = boundary_program();
  SdpSolution s1 = solve(p);
  p.c *= 7.5;
  SdpSolution s2 = solve(p);
  REQUIRE(s1.status == SdpStatus::Optimal);
  REQUIRE(s2.status == SdpStatus::Optimal);
  CHECK(std::abs(s1.y[1] - s2.y[1]) <= 1e-8);
}

TEST_CASE("presolve removes duplicates and keeps the solution") {
  LmiProgram p = boundary_program();
  // duplicate the pin row and add a scaled copy
  Eigen::MatrixXd F(3, 2);
  F.row(0) = p.F.row(0);
  F.row(1) = p.F.row(0);
  F.row(2) = 2.0 * p.F.row(0);
  p.F = F;
  p.g = Eigen::Vector3d(1, 1, 2);
  PresolveResult pre = presolve(p);
  REQUIRE_FALSE(pre.infeasible);
  CHECK(pre.prog.F.rows() == 1);
  CHECK(pre.removed_rows == 2);
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.y[1] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("contradictory duplicate rows are infeasible") {
  LmiProgram p;
  p.num_vars = 2;
  p.c = Eigen::Vector2d(1, 0);
  p.F = Eigen::MatrixXd::Zero(2, 2);
  p.F(0, 1) = 1;
  p.F(1, 1) = 1;
  p.g = Eigen::Vector2d(0, 1);  // y1 = 0 and y1 = 1
  PresolveResult pre = presolve(p);
  CHECK(pre.infeasible);
  SdpSolution s = solve(p);
  CHECK(s.status == SdpStatus::Infeasible);
}

TEST_CASE("inconsistent dense equalities are infeasible") {
  LmiProgram p;
  p.num_vars = 2;
  p.c = Eigen::Vector2d(1, 1);
  p.F = Eigen::MatrixXd(2, 2);
  p.F << 1, 1, 2, 2;
  p.g = Eigen::Vector2d(1, 3);  // parallel rows, different rhs
  SdpSolution s = solve(p);
  CHECK(s.status == SdpStatus::Infeasible);
}

TEST_CASE("negative mass pin is detected as infeasible") {
  // y0 = -1 with the univariate order-1 moment block.
  LmiProgram p;
  p.num_vars = 3;
  p.c = Eigen::Vector3d(0, 0, 1);
  p.F = Eigen::MatrixXd::Zero(1, 3);
  p.F(0, 0) = 1;
  p.g = Eigen::VectorXd::Constant(1, -1.0);
  LmiBlock b;
  b.size = 2;
  b.entries = {{0, 0, 0, 1.0}, {1, 0, 1, 1.0}, {1, 1, 2, 1.0}};
  p.blocks.push_back(b);
  SdpSolution s = solve(p);
  CHECK(s.status == SdpStatus::Infeasible);
}

TEST_CASE("unbounded objective directions are reported") {
  // min -y0 with only y0 >= 0: conic ray.
  LmiProgram p;
  p.num_vars = 1;
  p.c = Eigen::VectorXd::Constant(1, -1.0);
  p.F = Eigen::MatrixXd(0, 1);
  p.g = Eigen::VectorXd(0);
  LmiBlock b;
  b.size = 1;
  b.entries = {{0, 0, 0, 1.0}};
  p.blocks.push_back(b);
  SdpSolution s = solve(p);
  CHECK(s.status == SdpStatus::Unbounded);

  // a direction no block sees
  LmiProgram q = boundary_program();
  q.num_vars = 3;
  q.c = Eigen::Vector3d(0, 1, -1);
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(1, 3);
  F(0, 0) = 1;
  q.F = F;
  SdpSolution s2 = solve(q);
  CHECK(s2.status == SdpStatus::Unbounded);
}

TEST_CASE("random bounded programs are bracketed by the lattice oracle") {
  Rng rng(101);
  int tested = 0;
  for (int rep = 0; rep < 20; ++rep) {
    RandomProgram rp = random_bounded_program(rng, 1 + rng.uniform_int(3),
                                              2 + rng.uniform_int(2));
    SdpSolution s = solve(rp.prog);
    REQUIRE(s.status == SdpStatus::Optimal);
    // weak duality on every return
    CHECK(s.dual_obj <= s.primal_obj + 1e-7 * (1 + std::abs(s.primal_obj)));

    const double h = rp.dim <= 2 ? 0.05 : 0.1;
    double grid = grid_minimum(rp, h);
    REQUIRE(grid < std::numeric_limits<double>::infinity());
    // grid points are feasible, so the solver cannot be beaten by the grid
    CHECK(s.primal_obj <= grid + 1e-6);
    // and the grid gets within one lattice cell of the optimum
    double lip = rp.prog.c.cwiseAbs().sum() + 1.0;
    CHECK(grid - s.primal_obj <= lip * h * std::sqrt(double(rp.dim)) + 1e-6);
    ++tested;
  }
  CHECK(tested == 20);
}

TEST_CASE("solution certificate fields are consistent on Optimal") {
  SdpSolution s = solve(boundary_program());
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.eq_residual <= 1e-8);
  CHECK(s.lmi_min_eig >= -1e-8);
  CHECK(std::abs(s.primal_obj - s.dual_obj) <= 1e-7 * (1 + std::abs(s.primal_obj)));
  // the equality dual exists and prices the pin: c - F^T nu in the range of
  // the block adjoint
  REQUIRE(s.eq_duals.size() == 1);
}

TEST_CASE("deterministic across repeated solves") {
  LmiProgram p = boundary_program();
  SdpSolution a = solve(p), b = solve(p);
  CHECK(a.y == b.y);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("dump format round-trips the program structure") {
  LmiProgram p = boundary_program();
  std::ostringstream os;
  dump_program(p, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "# momrec-lmi 1");
  std::getline(is, line);
  CHECK(line == "vars 2 rows 1 blocks 1 functional 0");
  int lmi_lines = 0, eq_lines = 0, c_lines = 0;
  while (std::getline(is, line)) {
    if (line.rfind("lmi ", 0) == 0) ++lmi_lines;
    if (line.rfind("eq ", 0) == 0) ++eq_lines;
    if (line.rfind("c ", 0) == 0) ++c_lines;
  }
  CHECK(lmi_lines == 3);
  CHECK(eq_lines == 1);
  CHECK(c_lines == 1);
}
