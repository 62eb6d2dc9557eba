#include "momrec/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "momrec/kernels.hpp"

namespace momrec {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::Unbounded: return "Unbounded";
    case SdpStatus::MaxIter: return "MaxIter";
    case SdpStatus::NumericalTrouble: return "NumericalTrouble";
  }
  return "?";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::Map<const VectorXd> as_vec(const MatrixXd& M) {
  return Eigen::Map<const VectorXd>(M.data(), M.size());
}

double min_eigenvalue(const MatrixXd& M) {
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Largest step in [0, 1] keeping X + t*D positive semidefinite.
double max_step(const Eigen::LLT<MatrixXd>& lltX, const MatrixXd& D) {
  const auto& L = lltX.matrixL();
  MatrixXd M = L.solve(D);
  M = L.solve(MatrixXd(M.transpose()));
  double lam = min_eigenvalue(M);
  if (lam >= -1e-14) return 1.0;
  return std::min(1.0, -1.0 / lam);
}

struct ReducedBlock {
  int size = 0;
  MatrixXd Aflat;  // (size*size) x nu, column a holds vec(Atilde_a)
  VectorXd a0;     // vec of the constant part A(y0)
};

struct Reduction {
  bool infeasible = false;
  VectorXd y0;
  MatrixXd B;  // N x nu0 orthonormal null-space basis of F
  Eigen::ColPivHouseholderQR<MatrixXd> qr;  // QR of F^T (empty when no rows)
  int rank = 0;
};

// Null-space reparameterization y = y0 + B u of the affine constraints,
// computed from one rank-revealing QR of F^T.  This keeps y free in a pure
// dual-form LMI model, with the equalities satisfied exactly.
Reduction reduce_equalities(const LmiProgram& prog) {
  Reduction red;
  const int N = prog.num_vars;
  const int p = static_cast<int>(prog.F.rows());
  if (p == 0) {
    red.y0 = VectorXd::Zero(N);
    red.B = MatrixXd::Identity(N, N);
    return red;
  }
  MatrixXd Ft = prog.F.transpose();
  red.qr.compute(Ft);
  red.qr.setThreshold(1e-11);
  const int r = static_cast<int>(red.qr.rank());
  red.rank = r;

  VectorXd t = red.qr.colsPermutation().transpose() * prog.g;
  VectorXd w1 = red.qr.matrixR()
                    .topLeftCorner(r, r)
                    .triangularView<Eigen::Upper>()
                    .transpose()
                    .solve(t.head(r));
  VectorXd padded = VectorXd::Zero(N);
  padded.head(r) = w1;
  red.y0 = red.qr.householderQ() * padded;

  double res = (prog.F * red.y0 - prog.g).cwiseAbs().maxCoeff();
  if (res > 1e-8 * (1.0 + prog.g.cwiseAbs().maxCoeff())) {
    red.infeasible = true;
    return red;
  }
  MatrixXd slab = MatrixXd::Zero(N, N - r);
  slab.bottomRows(N - r).setIdentity();
  red.B = red.qr.householderQ() * slab;
  return red;
}

// Least-squares equality multipliers from F^T nu = rhs using the stored QR.
VectorXd recover_duals(const Reduction& red, const LmiProgram& prog, const VectorXd& rhs) {
  const int p = static_cast<int>(prog.F.rows());
  VectorXd nu = VectorXd::Zero(p);
  if (p == 0) return nu;
  const int r = red.rank;
  VectorXd qtr = red.qr.householderQ().transpose() * rhs;
  VectorXd z1 = red.qr.matrixR()
                    .topLeftCorner(r, r)
                    .triangularView<Eigen::Upper>()
                    .solve(qtr.head(r));
  VectorXd z = VectorXd::Zero(p);
  z.head(r) = z1;
  nu = red.qr.colsPermutation() * z;
  return nu;
}

struct IpmState {
  std::vector<MatrixXd> X, S;
  VectorXd u;
  double phi = 0, psi = 0, relgap = 0, pinf = 0, dinf = 0, mu = 0;
};

struct IpmOutcome {
  SdpStatus status = SdpStatus::MaxIter;
  IpmState best;
  int iterations = 0;
  std::string message;
};

class HkmSolver {
 public:
  HkmSolver(std::vector<ReducedBlock> blocks, VectorXd chat, const SdpOptions& opt)
      : blocks_(std::move(blocks)), chat_(std::move(chat)), opt_(opt) {
    nu_ = static_cast<int>(chat_.size());
    stot_ = 0;
    a0_norm_ = 0.0;
    for (const auto& b : blocks_) {
      stot_ += b.size;
      a0_norm_ += b.a0.squaredNorm();
    }
    a0_norm_ = std::sqrt(a0_norm_);
    exec_ = opt.parallel ? kernels::Exec::Parallel : kernels::Exec::Serial;
  }

  IpmOutcome run();

 private:
  void residuals(IpmState& st, std::vector<MatrixXd>& Rd, VectorXd& rp) const;
  VectorXd adjoint(const std::vector<MatrixXd>& M) const;  // i -> sum_j <A_i, M_j>

  std::vector<ReducedBlock> blocks_;
  VectorXd chat_;
  SdpOptions opt_;
  kernels::Exec exec_ = kernels::Exec::Serial;
  int nu_ = 0, stot_ = 0;
  double a0_norm_ = 0.0;
};

VectorXd HkmSolver::adjoint(const std::vector<MatrixXd>& M) const {
  VectorXd out = VectorXd::Zero(nu_);
  for (std::size_t j = 0; j < blocks_.size(); ++j)
    out.noalias() += blocks_[j].Aflat.transpose() * as_vec(M[j]);
  return out;
}

void HkmSolver::residuals(IpmState& st, std::vector<MatrixXd>& Rd, VectorXd& rp) const {
  const std::size_t nb = blocks_.size();
  double gap = 0.0, rd_norm = 0.0, a0x = 0.0;
  for (std::size_t j = 0; j < nb; ++j) {
    const int s = blocks_[j].size;
    VectorXd sv = blocks_[j].a0;
    sv.noalias() += blocks_[j].Aflat * st.u;
    Rd[j] = Eigen::Map<const MatrixXd>(sv.data(), s, s) - st.S[j];
    gap += st.X[j].cwiseProduct(st.S[j]).sum();
    rd_norm += Rd[j].squaredNorm();
    a0x += blocks_[j].a0.dot(as_vec(st.X[j]));
  }
  rp = chat_ - adjoint(st.X);
  st.mu = stot_ > 0 ? gap / stot_ : 0.0;
  st.phi = chat_.dot(st.u);
  st.psi = -a0x;
  st.relgap = std::abs(gap) / (1.0 + std::abs(st.phi) + std::abs(st.psi));
  st.pinf = nu_ > 0 ? rp.cwiseAbs().maxCoeff() / (1.0 + chat_.cwiseAbs().maxCoeff()) : 0.0;
  st.dinf = std::sqrt(rd_norm) / (1.0 + a0_norm_);
}

IpmOutcome HkmSolver::run() {
  IpmOutcome out;
  const std::size_t nb = blocks_.size();

  // Starting point scales in the SDPT3 style; columns of Aflat are
  // normalized upstream, so their Frobenius norms are 1.
  double cmax = nu_ > 0 ? chat_.cwiseAbs().maxCoeff() : 0.0;
  double xi = std::max({10.0, std::sqrt(double(stot_)), 0.5 * stot_ * (1.0 + cmax)});
  double eta = std::max({10.0, std::sqrt(double(stot_)), 1.0 + a0_norm_});

  IpmState st;
  st.u = VectorXd::Zero(nu_);
  for (const auto& b : blocks_) {
    st.X.push_back(MatrixXd::Identity(b.size, b.size) * xi);
    st.S.push_back(MatrixXd::Identity(b.size, b.size) * eta);
  }

  std::vector<MatrixXd> Rd(nb), Sinv(nb), dXa(nb), dSa(nb), dX(nb), dS(nb);
  VectorXd rp(nu_);
  MatrixXd H(nu_, nu_);
  std::vector<MatrixXd> Tflat(nb);

  double best_score = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int iter = 0; iter <= opt_.max_iter; ++iter) {
    out.iterations = iter;
    residuals(st, Rd, rp);

    double score = st.relgap + st.pinf + st.dinf;
    if (score < best_score) {
      if (score < 0.9 * best_score) stall = 0;
      best_score = score;
      out.best = st;
    } else if (++stall > 30) {
      out.status = SdpStatus::NumericalTrouble;
      out.message = "no progress over 30 iterations";
      break;
    }

    if (opt_.verbose) {
      std::ostringstream os;
      os << "iter " << iter << " mu " << st.mu << " relgap " << st.relgap << " pinf "
         << st.pinf << " dinf " << st.dinf << " phi " << st.phi << " psi " << st.psi;
      out.message = os.str();
    }

    if (st.relgap <= opt_.gap_tol && st.pinf <= opt_.feas_tol && st.dinf <= opt_.feas_tol) {
      out.status = SdpStatus::Optimal;
      out.best = st;
      break;
    }

    // Ray-based certificates: a diverging X with A*(X) ~ 0 and <A0, X> < 0
    // witnesses infeasibility of the LMI system; a diverging u with
    // A(u) >= 0 and c^T u < 0 witnesses unboundedness.
    double xnorm = 0.0;
    for (const auto& Xj : st.X) xnorm += Xj.squaredNorm();
    xnorm = std::sqrt(xnorm);
    if (xnorm > 1e7 * xi) {
      double a0x_hat = -st.psi / xnorm;
      double ax_hat = (chat_ - rp).cwiseAbs().maxCoeff() / xnorm;
      if (a0x_hat < -1e-9 * (1.0 + a0_norm_) && ax_hat < 1e-7 * (1.0 + cmax)) {
        out.status = SdpStatus::Infeasible;
        out.best = st;
        out.message = "improving-ray certificate of LMI infeasibility";
        break;
      }
    }
    double unorm = st.u.norm();
    if (unorm > 1e7) {
      VectorXd uhat = st.u / unorm;
      double chat_u = chat_.dot(uhat);
      double mineig = 0.0;
      for (const auto& b : blocks_) {
        VectorXd av = b.Aflat * uhat;
        mineig = std::min(mineig, min_eigenvalue(Eigen::Map<const MatrixXd>(av.data(), b.size, b.size)));
      }
      if (chat_u < -1e-9 && mineig > -1e-9) {
        out.status = SdpStatus::Unbounded;
        out.best = st;
        out.message = "improving-ray certificate of unboundedness";
        break;
      }
    }

    if (iter == opt_.max_iter) {
      out.status = SdpStatus::MaxIter;
      break;
    }

    // Factor S and form the Schur complement H(a,b) = sum_j tr(A_a X A_b S^-1).
    std::vector<Eigen::LLT<MatrixXd>> lltS(nb), lltX(nb);
    bool factor_ok = true;
    for (std::size_t j = 0; j < nb; ++j) {
      lltS[j].compute(st.S[j]);
      lltX[j].compute(st.X[j]);
      if (lltS[j].info() != Eigen::Success || lltX[j].info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      Sinv[j] = lltS[j].solve(MatrixXd::Identity(blocks_[j].size, blocks_[j].size));
    }
    if (!factor_ok) {
      out.status = SdpStatus::NumericalTrouble;
      out.message = "iterate lost positive definiteness";
      break;
    }

    H.setZero();
    for (std::size_t j = 0; j < nb; ++j) {
      kernels::congruence_batch(st.X[j], Sinv[j], blocks_[j].Aflat, Tflat[j], exec_);
      kernels::gram_accumulate(blocks_[j].Aflat, Tflat[j], H, exec_);
    }
    H = 0.5 * (H + H.transpose()).eval();

    Eigen::LLT<MatrixXd> lltH;
    double ridge = 0.0;
    double hscale = nu_ > 0 ? std::max(1.0, H.diagonal().maxCoeff()) : 1.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      MatrixXd Hr = H;
      if (ridge > 0.0) Hr.diagonal().array() += ridge * hscale;
      lltH.compute(Hr);
      if (lltH.info() == Eigen::Success) break;
      ridge = ridge == 0.0 ? 1e-14 : ridge * 100.0;
    }
    if (lltH.info() != Eigen::Success) {
      out.status = SdpStatus::NumericalTrouble;
      out.message = "Schur complement not positive definite";
      break;
    }

    // Shared right-hand-side pieces.
    VectorXd a_s = VectorXd::Zero(nu_), a_rd = VectorXd::Zero(nu_);
    for (std::size_t j = 0; j < nb; ++j) {
      a_s.noalias() += blocks_[j].Aflat.transpose() * as_vec(Sinv[j]);
      MatrixXd M = st.X[j] * Rd[j] * Sinv[j];
      a_rd.noalias() += blocks_[j].Aflat.transpose() * as_vec(M);
    }

    // Predictor (affine direction, sigma = 0).
    VectorXd du = lltH.solve(-chat_ - a_rd);
    double alpha_a = 1.0, beta_a = 1.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const int s = blocks_[j].size;
      VectorXd av = blocks_[j].Aflat * du;
      dSa[j] = Rd[j] + Eigen::Map<const MatrixXd>(av.data(), s, s);
      MatrixXd raw = -st.X[j] - st.X[j] * dSa[j] * Sinv[j];
      dXa[j] = 0.5 * (raw + raw.transpose());
      alpha_a = std::min(alpha_a, max_step(lltX[j], dXa[j]));
      beta_a = std::min(beta_a, max_step(lltS[j], dSa[j]));
    }

    double gap_aff = 0.0;
    for (std::size_t j = 0; j < nb; ++j)
      gap_aff += (st.X[j] + alpha_a * dXa[j]).cwiseProduct(st.S[j] + beta_a * dSa[j]).sum();
    double gap_now = st.mu * stot_;
    double e = std::max(1.0, 3.0 * std::pow(std::min(alpha_a, beta_a), 2));
    double sigma = gap_now > 0 ? std::pow(std::clamp(gap_aff / gap_now, 0.0, 1.0), e) : 0.0;

    // Corrector with the Mehrotra second-order term.
    VectorXd a_corr = VectorXd::Zero(nu_);
    for (std::size_t j = 0; j < nb; ++j) {
      MatrixXd M = dXa[j] * dSa[j] * Sinv[j];
      a_corr.noalias() += blocks_[j].Aflat.transpose() * as_vec(M);
    }
    du = lltH.solve(sigma * st.mu * a_s - chat_ - a_rd - a_corr);
    double alpha = 1.0, beta = 1.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const int s = blocks_[j].size;
      VectorXd av = blocks_[j].Aflat * du;
      dS[j] = Rd[j] + Eigen::Map<const MatrixXd>(av.data(), s, s);
      MatrixXd raw = sigma * st.mu * Sinv[j] - st.X[j] -
                     (st.X[j] * dS[j] + dXa[j] * dSa[j]) * Sinv[j];
      dX[j] = 0.5 * (raw + raw.transpose());
      alpha = std::min(alpha, max_step(lltX[j], dX[j]));
      beta = std::min(beta, max_step(lltS[j], dS[j]));
    }
    double gammaf = 0.9 + 0.09 * std::min(alpha, beta);
    alpha = std::min(1.0, gammaf * alpha);
    beta = std::min(1.0, gammaf * beta);

    // Step, backtracking if a block loses definiteness to rounding.
    bool stepped = false;
    for (int bt = 0; bt < 10 && !stepped; ++bt) {
      if (std::min(alpha, beta) < opt_.step_min) break;
      stepped = true;
      for (std::size_t j = 0; j < nb && stepped; ++j) {
        if (Eigen::LLT<MatrixXd>(st.X[j] + alpha * dX[j]).info() != Eigen::Success ||
            Eigen::LLT<MatrixXd>(st.S[j] + beta * dS[j]).info() != Eigen::Success)
          stepped = false;
      }
      if (!stepped) {
        alpha *= 0.8;
        beta *= 0.8;
      }
    }
    if (!stepped || std::min(alpha, beta) < opt_.step_min) {
      out.status = SdpStatus::NumericalTrouble;
      out.message = "step sizes collapsed";
      break;
    }
    for (std::size_t j = 0; j < nb; ++j) {
      st.X[j] += alpha * dX[j];
      st.S[j] += beta * dS[j];
    }
    st.u += beta * du;
  }

  return out;
}

}  // namespace

PresolveResult presolve(const LmiProgram& prog) {
  PresolveResult out;
  out.prog = prog;
  const int p = static_cast<int>(prog.F.rows());
  if (p == 0) {
    out.row_map.clear();
    return out;
  }
  std::vector<VectorXd> rows;
  std::vector<double> rhs;
  std::vector<int> map;
  std::map<std::string, int> seen;  // normalized row bytes -> kept position
  for (int i = 0; i < p; ++i) {
    VectorXd v = prog.F.row(i);
    double gi = prog.g[i];
    double m = v.cwiseAbs().maxCoeff();
    if (m < 1e-14) {
      if (std::abs(gi) > 1e-12) {
        out.infeasible = true;
        out.note = "zero row with nonzero right-hand side";
        return out;
      }
      ++out.removed_rows;
      continue;
    }
    int lead = 0;
    while (std::abs(v[lead]) < 1e-14 * m) ++lead;
    double scale = (v[lead] > 0 ? 1.0 : -1.0) / m;
    v *= scale;
    gi *= scale;
    std::string key(reinterpret_cast<const char*>(v.data()), sizeof(double) * v.size());
    auto it = seen.find(key);
    if (it != seen.end()) {
      if (std::abs(rhs[it->second] - gi) > 1e-10 * (1.0 + std::abs(gi))) {
        out.infeasible = true;
        out.note = "contradictory duplicate equality rows";
        return out;
      }
      ++out.removed_rows;
      continue;
    }
    seen.emplace(std::move(key), static_cast<int>(rows.size()));
    rows.push_back(std::move(v));
    rhs.push_back(gi);
    map.push_back(i);
  }
  out.prog.F.resize(rows.size(), prog.num_vars);
  out.prog.g.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.prog.F.row(i) = rows[i];
    out.prog.g[i] = rhs[i];
  }
  out.row_map = std::move(map);
  int nf = 0;
  for (int orig : out.row_map)
    if (orig < prog.num_functional_rows) ++nf;
  out.prog.num_functional_rows = nf;
  return out;
}

SdpSolution solve(const LmiProgram& prog, const SdpOptions& opts) {
  if (prog.num_vars <= 0) throw std::invalid_argument("solve: empty program");
  if (prog.c.size() != prog.num_vars || prog.F.cols() != prog.num_vars ||
      prog.F.rows() != prog.g.size())
    throw std::invalid_argument("solve: inconsistent program shapes");
  for (const auto& b : prog.blocks)
    for (const auto& e : b.entries)
      if (e.row < e.col || e.row >= b.size || e.col < 0 || e.alpha < 0 ||
          e.alpha >= prog.num_vars)
        throw std::invalid_argument("solve: malformed block entry");

  SdpSolution sol;
  sol.eq_duals = VectorXd::Zero(prog.F.rows());
  for (const auto& b : prog.blocks) sol.block_duals.push_back(MatrixXd::Zero(b.size, b.size));

  PresolveResult pre = presolve(prog);
  if (pre.infeasible) {
    sol.status = SdpStatus::Infeasible;
    sol.message = pre.note;
    sol.y = VectorXd::Zero(prog.num_vars);
    return sol;
  }
  const LmiProgram& P = pre.prog;

  Reduction red = reduce_equalities(P);
  if (red.infeasible) {
    sol.status = SdpStatus::Infeasible;
    sol.message = "inconsistent equality constraints";
    sol.y = VectorXd::Zero(prog.num_vars);
    return sol;
  }
  const int N = prog.num_vars;
  const int nu0 = static_cast<int>(red.B.cols());

  // Reduced blocks: Atilde_a = A(B e_a), constant part A(y0).
  std::vector<ReducedBlock> rblocks(P.blocks.size());
  for (std::size_t j = 0; j < P.blocks.size(); ++j) {
    const auto& b = P.blocks[j];
    auto& rb = rblocks[j];
    rb.size = b.size;
    rb.Aflat = MatrixXd::Zero(static_cast<Eigen::Index>(b.size) * b.size, nu0);
    rb.a0 = VectorXd::Zero(static_cast<Eigen::Index>(b.size) * b.size);
    for (const auto& e : b.entries) {
      const Eigen::Index lo = static_cast<Eigen::Index>(e.col) * b.size + e.row;
      rb.Aflat.row(lo) += e.coeff * red.B.row(e.alpha);
      rb.a0[lo] += e.coeff * red.y0[e.alpha];
      if (e.row != e.col) {
        const Eigen::Index up = static_cast<Eigen::Index>(e.row) * b.size + e.col;
        rb.Aflat.row(up) += e.coeff * red.B.row(e.alpha);
        rb.a0[up] += e.coeff * red.y0[e.alpha];
      }
    }
  }

  VectorXd chat = red.B.transpose() * P.c;
  const double offset = P.c.dot(red.y0);

  // Normalize reduced directions; directions invisible to every block are
  // either objective rays (unbounded) or removable.
  VectorXd colnorm = VectorXd::Zero(nu0);
  for (const auto& rb : rblocks) colnorm += rb.Aflat.colwise().squaredNorm().transpose();
  colnorm = colnorm.cwiseSqrt();
  std::vector<int> kept;
  for (int i = 0; i < nu0; ++i) {
    if (colnorm[i] > 1e-12) {
      kept.push_back(i);
    } else if (std::abs(chat[i]) > 1e-10 * (1.0 + P.c.cwiseAbs().maxCoeff())) {
      sol.status = SdpStatus::Unbounded;
      sol.message = "free objective direction outside all LMI blocks";
      sol.y = red.y0;
      return sol;
    }
  }
  const int nu = static_cast<int>(kept.size());
  VectorXd chat_k(nu), scale_k(nu);
  for (int i = 0; i < nu; ++i) {
    scale_k[i] = colnorm[kept[i]];
    chat_k[i] = chat[kept[i]] / scale_k[i];
  }
  for (auto& rb : rblocks) {
    MatrixXd Ak(rb.Aflat.rows(), nu);
    for (int i = 0; i < nu; ++i) Ak.col(i) = rb.Aflat.col(kept[i]) / scale_k[i];
    rb.Aflat = std::move(Ak);
  }

  auto finish = [&](const VectorXd& u_scaled, const std::vector<MatrixXd>& X,
                    SdpStatus status, int iters, const std::string& msg,
                    double psi_reduced) {
    VectorXd u = VectorXd::Zero(nu0);
    for (int i = 0; i < nu; ++i) u[kept[i]] = u_scaled[i] / scale_k[i];
    sol.y = red.y0 + red.B * u;
    sol.status = status;
    sol.iterations = iters;
    sol.message = msg;
    sol.primal_obj = prog.c.dot(sol.y);
    sol.dual_obj = psi_reduced + offset;
    sol.gap = std::abs(sol.primal_obj - sol.dual_obj);
    sol.rel_gap = sol.gap / (1.0 + std::abs(sol.primal_obj) + std::abs(sol.dual_obj));
    sol.eq_residual = prog.F.rows() > 0
                          ? (prog.F * sol.y - prog.g).cwiseAbs().maxCoeff()
                          : 0.0;
    // Block values at the returned y, and the dual scatter.
    VectorXd astar = VectorXd::Zero(N);
    sol.lmi_min_eig = 0.0;
    for (std::size_t j = 0; j < prog.blocks.size(); ++j) {
      const auto& b = prog.blocks[j];
      MatrixXd Bv = MatrixXd::Zero(b.size, b.size);
      for (const auto& e : b.entries) {
        Bv(e.row, e.col) += e.coeff * sol.y[e.alpha];
        if (e.row != e.col) Bv(e.col, e.row) += e.coeff * sol.y[e.alpha];
      }
      sol.lmi_min_eig = std::min(sol.lmi_min_eig, min_eigenvalue(Bv));
      if (j < X.size() && X[j].rows() == b.size) {
        sol.block_duals[j] = X[j];
        for (const auto& e : b.entries)
          astar[e.alpha] += e.coeff * X[j](e.row, e.col) * (e.row == e.col ? 1.0 : 2.0);
      }
    }
    if (prog.F.rows() > 0) {
      // F^T nu = c - A*(Z) over the presolved rows, scattered to originals.
      VectorXd nu_pre = recover_duals(red, P, prog.c - astar);
      for (std::size_t i = 0; i < pre.row_map.size(); ++i)
        sol.eq_duals[pre.row_map[i]] = nu_pre[i];
    }
    return sol;
  };

  if (nu == 0) {
    // Fully pinned: y = y0; feasibility decides the status.
    std::vector<MatrixXd> X;
    SdpSolution s = finish(VectorXd::Zero(0), X, SdpStatus::Optimal, 0, "", 0.0);
    double tol = opts.feas_tol * (1.0 + std::abs(s.primal_obj));
    if (s.lmi_min_eig < -std::max(tol, 1e-7)) {
      s.status = SdpStatus::Infeasible;
      s.message = "pinned point violates LMI blocks";
    }
    s.dual_obj = s.primal_obj;
    s.gap = 0.0;
    return s;
  }
  if (rblocks.empty()) {
    // No PSD blocks: linear objective over an affine set.
    if (chat_k.cwiseAbs().maxCoeff() > 1e-10 * (1.0 + P.c.cwiseAbs().maxCoeff())) {
      sol.status = SdpStatus::Unbounded;
      sol.y = red.y0;
      sol.message = "linear objective unbounded on the equality set";
      return sol;
    }
    std::vector<MatrixXd> X;
    return finish(VectorXd::Zero(nu), X, SdpStatus::Optimal, 0, "", 0.0);
  }

  HkmSolver ipm(std::move(rblocks), chat_k, opts);
  IpmOutcome oc = ipm.run();
  return finish(oc.best.u, oc.best.X, oc.status, oc.iterations, oc.message, oc.best.psi);
}

void dump_program(const LmiProgram& prog, std::ostream& os) {
  os << "# momrec-lmi 1\n";
  os << "vars " << prog.num_vars << " rows " << prog.F.rows() << " blocks "
     << prog.blocks.size() << " functional " << prog.num_functional_rows << "\n";
  for (std::size_t j = 0; j < prog.blocks.size(); ++j)
    os << "block " << j << " size " << prog.blocks[j].size << "\n";
  for (int a = 0; a < prog.c.size(); ++a)
    if (prog.c[a] != 0.0) os << "c " << a << " " << prog.c[a] << "\n";
  for (int i = 0; i < prog.F.rows(); ++i) {
    for (int a = 0; a < prog.F.cols(); ++a)
      if (prog.F(i, a) != 0.0) os << "eq " << i << " " << a << " " << prog.F(i, a) << "\n";
    if (prog.g[i] != 0.0) os << "rhs " << i << " " << prog.g[i] << "\n";
  }
  for (std::size_t j = 0; j < prog.blocks.size(); ++j)
    for (const auto& e : prog.blocks[j].entries)
      os << "lmi " << j << " " << e.alpha << " " << e.row << " " << e.col << " " << e.coeff
         << "\n";
}

}  // namespace momrec
