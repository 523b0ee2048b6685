#pragma once

// Dense eigensolvers. LAPACK (dsyevd / zgeev) is used when a one-time self
// check on a 256x256 problem passes; otherwise Eigen's solvers take over.
// Some OpenBLAS builds pick a broken kernel on recent Xeons and return garbage
// silently; OPENBLAS_CORETYPE=Haswell avoids it.

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vaet::linalg {

class LapackError : public std::runtime_error {
 public:
  LapackError(const std::string& routine, int info);
  int info() const { return info_; }

 private:
  int info_;
};

/// Real symmetric eigendecomposition; eigenvalues ascending, orthonormal columns.
void eigh(const Eigen::MatrixXd& a, Eigen::VectorXd& values, Eigen::MatrixXd& vectors);

/// Eigenvalues only, ascending.
Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& a);

/// General complex eigendecomposition: a * vectors = vectors * diag(values).
void eig(const Eigen::MatrixXcd& a, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors);

/// Result of the self checks (runs them on first call).
bool lapack_symmetric_ok();
bool lapack_general_ok();

/// "lapack" or "eigen" for each problem class, for run metadata.
std::string backend_summary();

/// Keep OpenBLAS single-threaded; parallelism lives in our own loops.
void pin_blas_threads();

}  // namespace vaet::linalg
