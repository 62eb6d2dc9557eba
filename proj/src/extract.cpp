#include "momrec/extract.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "momrec/momentlin.hpp"
#include "momrec/rng.hpp"

namespace momrec {

int numeric_rank(const Eigen::MatrixXd& M, double tau) {
  if (M.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  double cut = tau * std::max(sv[0], 1.0);
  int r = 0;
  while (r < sv.size() && sv[r] > cut) ++r;
  return r;
}

std::optional<int> flat_degrees(const Tms& w, int k, int dK, double tau, int t_min) {
  if (w.d != 2 * k) return std::nullopt;
  for (int t = std::max(t_min, dK); t <= k; ++t) {
    int r_low = numeric_rank(moment_matrix(w, t - dK), tau);
    int r_t = numeric_rank(moment_matrix(w, t), tau);
    if (r_low == r_t) return t;
  }
  return std::nullopt;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Greedy clustering of near-coincident atoms; weights are summed and the
// representative is the weight-averaged point.
void merge_atoms(std::vector<VectorXd>& atoms, std::vector<double>& weights, double tol) {
  std::vector<VectorXd> out_a;
  std::vector<double> out_w;
  std::vector<bool> used(atoms.size(), false);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (used[i]) continue;
    VectorXd acc = atoms[i] * weights[i];
    double wsum = weights[i];
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      if (!used[j] && (atoms[i] - atoms[j]).norm() <= tol) {
        acc += atoms[j] * weights[j];
        wsum += weights[j];
        used[j] = true;
      }
    }
    out_a.push_back(wsum != 0.0 ? VectorXd(acc / wsum) : atoms[i]);
    out_w.push_back(wsum);
  }
  atoms = std::move(out_a);
  weights = std::move(out_w);
}

}  // namespace

std::optional<AtomicMeasure> extract_atoms(const Tms& w2t, int r,
                                           const SemialgebraicSet& K,
                                           const ExtractOptions& opt) {
  if (w2t.d % 2 != 0) return std::nullopt;
  const int t = w2t.d / 2;
  const int n = w2t.n;
  const double wscale = 1.0 + w2t.values.cwiseAbs().maxCoeff();

  if (r == 0) {
    AtomicMeasure zero;
    zero.reconstruction_error = w2t.values.cwiseAbs().maxCoeff() / wscale;
    return zero;
  }

  MatrixXd Mt = moment_matrix(w2t, t);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Mt);
  const int nb = static_cast<int>(Mt.rows());
  if (r > nb) return std::nullopt;
  // Top-r truncated factorization M_t = V V^T.
  MatrixXd V(nb, r);
  for (int i = 0; i < r; ++i) {
    double lam = es.eigenvalues()[nb - 1 - i];
    if (lam <= 0.0) return std::nullopt;
    V.col(i) = es.eigenvectors().col(nb - 1 - i) * std::sqrt(lam);
  }

  // Monomial row basis of cardinality r among rows of degree <= t - dK,
  // where flatness guarantees those rows span.
  const int dK = std::min(K.constraint_degree(), t);
  const int low_rows = static_cast<int>(binom(n + t - dK, t - dK));
  Eigen::ColPivHouseholderQR<MatrixXd> rowqr(V.topRows(low_rows).transpose());
  MatrixXd R = rowqr.matrixR();
  if (rowqr.rank() < r ||
      std::abs(R(r - 1, r - 1)) < 1e-10 * std::max(1.0, std::abs(R(0, 0))))
    return std::nullopt;  // basis selection failed
  std::vector<int> basis_rows(rowqr.colsPermutation().indices().data(),
                              rowqr.colsPermutation().indices().data() + r);

  const MonomialBasis& rows_t = *MonomialBasis::get(n, t);
  MatrixXd VB(r, r);
  for (int i = 0; i < r; ++i) VB.row(i) = V.row(basis_rows[i]);
  Eigen::PartialPivLU<MatrixXd> luVB(VB);

  // Multiplication matrices from the shifted-row systems.
  std::vector<MatrixXd> Nmul(n);
  for (int v = 0; v < n; ++v) {
    MatrixXd Vs(r, r);
    for (int i = 0; i < r; ++i) {
      Exponent shifted = rows_t.monomial(basis_rows[i]);
      shifted[v] += 1;
      Vs.row(i) = V.row(rows_t.index(shifted));
    }
    Nmul[v] = luVB.solve(Vs);
  }

  Rng rng(opt.seed ^ 0x5eedf00dULL);
  const MonomialBasis& full = w2t.basis();

  for (int attempt = 0; attempt < std::max(1, opt.max_resample); ++attempt) {
    VectorXd xi(n);
    for (int v = 0; v < n; ++v) xi[v] = rng.normal();
    xi.normalize();
    MatrixXd Ncomb = MatrixXd::Zero(r, r);
    for (int v = 0; v < n; ++v) Ncomb += xi[v] * Nmul[v];

    Eigen::RealSchur<MatrixXd> schur(Ncomb);
    if (schur.info() != Eigen::Success) continue;
    const MatrixXd& T = schur.matrixT();
    const MatrixXd& Q = schur.matrixU();
    bool complex_pair = false;
    for (int i = 0; i + 1 < r; ++i)
      if (std::abs(T(i + 1, i)) > 1e-8 * std::max(1.0, std::abs(T(i, i))))
        complex_pair = true;
    if (complex_pair) continue;  // clustered invariant subspaces; resample xi

    // Common ordered invariant vectors give the coordinates directly.
    std::vector<VectorXd> atoms(r, VectorXd(n));
    bool triangular_ok = true;
    for (int v = 0; v < n && triangular_ok; ++v) {
      MatrixXd Tv = Q.transpose() * Nmul[v] * Q;
      double scale = std::max(1.0, Tv.cwiseAbs().maxCoeff());
      for (int i = 0; i < r; ++i) {
        atoms[i][v] = Tv(i, i);
        for (int c = 0; c < i; ++c)
          if (std::abs(Tv(i, c)) > 1e-5 * scale) triangular_ok = false;
      }
    }
    if (!triangular_ok) continue;

    if (K.sphere) {
      bool bad = false;
      for (auto& u : atoms) {
        double nn = u.norm();
        if (nn < 1e-8) bad = true;
        else u /= nn;
      }
      if (bad) continue;
    }

    std::vector<double> weights(r, 0.0);
    merge_atoms(atoms, weights, opt.merge_tol);  // dedupe positions first
    int rr = static_cast<int>(atoms.size());

    // Weight fit: sum_j lambda_j [u_j]_{2t} = w|_{2t} in least squares.
    MatrixXd Mc(full.size(), rr);
    for (int j = 0; j < rr; ++j) Mc.col(j) = moment_vector(atoms[j], 2 * t).values;
    VectorXd lam = Mc.colPivHouseholderQr().solve(w2t.values);

    bool negative = false;
    std::vector<VectorXd> kept_atoms;
    std::vector<double> kept_w;
    for (int j = 0; j < rr; ++j) {
      if (lam[j] < -opt.neg_weight_tol * wscale) negative = true;
      if (lam[j] > opt.weight_floor) {
        kept_atoms.push_back(atoms[j]);
        kept_w.push_back(lam[j]);
      }
    }
    if (negative) continue;
    if (!kept_atoms.empty() && kept_atoms.size() < static_cast<std::size_t>(rr)) {
      MatrixXd Mk(full.size(), kept_atoms.size());
      for (std::size_t j = 0; j < kept_atoms.size(); ++j)
        Mk.col(j) = moment_vector(kept_atoms[j], 2 * t).values;
      VectorXd lk = Mk.colPivHouseholderQr().solve(w2t.values);
      bool ok = true;
      for (int j = 0; j < lk.size(); ++j)
        if (lk[j] < -opt.neg_weight_tol * wscale) ok = false;
      if (ok) {
        kept_w.assign(lk.data(), lk.data() + lk.size());
      }
    }

    VectorXd resid = -w2t.values;
    for (std::size_t j = 0; j < kept_atoms.size(); ++j)
      resid += kept_w[j] * moment_vector(kept_atoms[j], 2 * t).values;
    double err = resid.cwiseAbs().maxCoeff() / wscale;
    if (err > opt.reconstruction_tol) continue;

    AtomicMeasure out;
    out.atoms = std::move(kept_atoms);
    out.weights = std::move(kept_w);
    out.reconstruction_error = err;
    for (const auto& u : out.atoms) {
      double m = K.membership_residual(u);
      out.membership.push_back(m);
      if (m > opt.atom_tol) out.degraded = true;
    }
    return out;
  }
  return std::nullopt;
}

}  // namespace momrec
