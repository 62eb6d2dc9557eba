#pragma once

#include <Eigen/Core>

#include "momrec/momentlin.hpp"

namespace momrec::kernels {

// Execution policy for the data-parallel kernels.  Parallel variants
// partition the output space so every entry is produced by exactly one
// thread in a fixed arithmetic order; results are identical to Serial for
// any thread count.
enum class Exec { Serial, Parallel };

// Dense assembly out = L_q^{(k)}[y] from a stencil; parallel over rows.
void stencil_apply(const LocalizingStencil& S, const Eigen::VectorXd& y,
                   Eigen::MatrixXd& out, Exec exec);

// Batched two-sided products for s x s symmetric blocks stored flattened in
// columns: Tflat.col(a) = vec( X * mat(Aflat.col(a)) * W ).
void congruence_batch(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                      const Eigen::MatrixXd& Aflat, Eigen::MatrixXd& Tflat,
                      Exec exec);

// H += Aflat^T * Tflat, blocked over column panels of H.
void gram_accumulate(const Eigen::MatrixXd& Aflat, const Eigen::MatrixXd& Tflat,
                     Eigen::MatrixXd& H, Exec exec);

int max_threads();

}  // namespace momrec::kernels
