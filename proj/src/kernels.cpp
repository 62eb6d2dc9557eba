#include "momrec/kernels.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace momrec::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void stencil_apply(const LocalizingStencil& S, const Eigen::VectorXd& y,
                   Eigen::MatrixXd& out, Exec exec) {
  const int m = S.rows();
  out.resize(m, m);
  const bool par = exec == Exec::Parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c <= r; ++c) {
      const SparseForm& form = S.entry_form(r, c);
      double v = 0.0;
      for (const auto& [idx, coef] : form.terms) v += coef * y[idx];
      out(r, c) = v;
      out(c, r) = v;
    }
  }
  (void)par;
}

void congruence_batch(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                      const Eigen::MatrixXd& Aflat, Eigen::MatrixXd& Tflat,
                      Exec exec) {
  const int s = static_cast<int>(X.rows());
  if (Aflat.rows() != static_cast<Eigen::Index>(s) * s)
    throw std::invalid_argument("congruence_batch: flattened row count mismatch");
  const int cols = static_cast<int>(Aflat.cols());
  Tflat.resize(Aflat.rows(), cols);
  const bool par = exec == Exec::Parallel;
#ifdef _OPENMP
#pragma omp parallel if (par)
#endif
  {
    Eigen::MatrixXd tmp(s, s);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int a = 0; a < cols; ++a) {
      Eigen::Map<const Eigen::MatrixXd> A(Aflat.col(a).data(), s, s);
      Eigen::Map<Eigen::MatrixXd> T(Tflat.col(a).data(), s, s);
      tmp.noalias() = A * W;
      T.noalias() = X * tmp;
    }
  }
  (void)par;
}

void gram_accumulate(const Eigen::MatrixXd& Aflat, const Eigen::MatrixXd& Tflat,
                     Eigen::MatrixXd& H, Exec exec) {
  const int na = static_cast<int>(Aflat.cols());
  if (Tflat.cols() != na || Tflat.rows() != Aflat.rows())
    throw std::invalid_argument("gram_accumulate: shape mismatch");
  if (H.rows() != na || H.cols() != na)
    throw std::invalid_argument("gram_accumulate: output shape mismatch");
  // Fixed panel width keeps per-entry accumulation order independent of the
  // thread count.
  constexpr int kPanel = 64;
  const int panels = (na + kPanel - 1) / kPanel;
  const bool par = exec == Exec::Parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (int p = 0; p < panels; ++p) {
    const int j0 = p * kPanel;
    const int w = std::min(kPanel, na - j0);
    H.middleCols(j0, w).noalias() += Aflat.transpose() * Tflat.middleCols(j0, w);
  }
  (void)par;
}

}  // namespace momrec::kernels
