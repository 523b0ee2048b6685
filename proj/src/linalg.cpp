#include "vaet/linalg.hpp"

#include <cmath>
#include <complex>
#include <mutex>

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);

namespace vaet::linalg {

LapackError::LapackError(const std::string& routine, int info)
    : std::runtime_error(routine + " failed with info = " + std::to_string(info)), info_(info) {}

void pin_blas_threads() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

namespace {

constexpr int kCheckSize = 256;

lapack_int lapack_syevd(char jobz, Eigen::MatrixXd& a, Eigen::VectorXd& w) {
  pin_blas_threads();
  const lapack_int n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  if (n == 0) return 0;
  return LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, a.data(), n, w.data());
}

lapack_int lapack_geev(const Eigen::MatrixXcd& a, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors) {
  pin_blas_threads();
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXcd work = a;
  values.resize(n);
  vectors.resize(n, n);
  if (n == 0) return 0;
  auto* pa = reinterpret_cast<lapack_complex_double*>(work.data());
  auto* w = reinterpret_cast<lapack_complex_double*>(values.data());
  auto* vr = reinterpret_cast<lapack_complex_double*>(vectors.data());
  return LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, pa, n, w, nullptr, 1, vr, n);
}

Eigen::MatrixXd check_matrix() {
  Eigen::MatrixXd a(kCheckSize, kCheckSize);
  for (int i = 0; i < kCheckSize; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = std::sin(0.37 * (i + 1) * (j + 2)) + (i == j ? 0.01 * i : 0.0);
  return a;
}

bool run_symmetric_check() {
  const Eigen::MatrixXd a = check_matrix();
  Eigen::MatrixXd v = a;
  Eigen::VectorXd w;
  if (lapack_syevd('V', v, w) != 0) return false;
  const double res = (a * v - v * w.asDiagonal()).norm() / a.norm();
  return std::isfinite(res) && res < 1e-12;
}

bool run_general_check() {
  Eigen::MatrixXcd a = check_matrix().cast<std::complex<double>>();
  for (int i = 0; i < kCheckSize; ++i) a(i, (i + 1) % kCheckSize) += std::complex<double>(0.0, -0.1);
  Eigen::VectorXcd w;
  Eigen::MatrixXcd v;
  if (lapack_geev(a, w, v) != 0) return false;
  const double res = (a * v - v * w.asDiagonal()).norm() / a.norm();
  return std::isfinite(res) && res < 1e-12;
}

}  // namespace

bool lapack_symmetric_ok() {
  static const bool ok = run_symmetric_check();
  return ok;
}

bool lapack_general_ok() {
  static const bool ok = run_general_check();
  return ok;
}

std::string backend_summary() {
  return std::string("symmetric=") + (lapack_symmetric_ok() ? "lapack" : "eigen") +
         " general=" + (lapack_general_ok() ? "lapack" : "eigen");
}

void eigh(const Eigen::MatrixXd& a, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigh: matrix must be square");
  if (!lapack_symmetric_ok()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw LapackError("SelfAdjointEigenSolver", 1);
    values = es.eigenvalues();
    vectors = es.eigenvectors();
    return;
  }
  vectors = a;
  const lapack_int info = lapack_syevd('V', vectors, values);
  if (info != 0) throw LapackError("dsyevd", info);
}

Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigvalsh: matrix must be square");
  if (!lapack_symmetric_ok()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw LapackError("SelfAdjointEigenSolver", 1);
    return es.eigenvalues();
  }
  Eigen::MatrixXd work = a;
  Eigen::VectorXd w;
  const lapack_int info = lapack_syevd('N', work, w);
  if (info != 0) throw LapackError("dsyevd", info);
  return w;
}

void eig(const Eigen::MatrixXcd& a, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eig: matrix must be square");
  if (!lapack_general_ok()) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
    if (es.info() != Eigen::Success) throw LapackError("ComplexEigenSolver", 1);
    values = es.eigenvalues();
    vectors = es.eigenvectors();
    return;
  }
  const lapack_int info = lapack_geev(a, values, vectors);
  if (info != 0) throw LapackError("zgeev", info);
}

}  // namespace vaet::linalg
