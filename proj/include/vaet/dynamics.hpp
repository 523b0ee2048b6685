#pragma once

// Exact time evolution of thermal ensembles under the effective Hamiltonian.
//
// The initial density matrix is diagonal in the product basis, so the ensemble
// is a weighted sum of pure states. After one eigendecomposition
// H = V diag(lambda) V^-1, any population on a set of rows R is
//
//   P(t) = sum_kl u_k conj(u_l) G_kl,  u_k = exp(-i lambda_k t),
//   G = (V_R^H V_R)^T o (Y W Y^H),      Y = V^-1 restricted to initial columns,
//
// which turns the time loop into one matrix product per block of samples.

#include <optional>
#include <stdexcept>
#include <vector>

#include "vaet/fock.hpp"
#include "vaet/model.hpp"

namespace vaet {

class PropagatorError : public std::runtime_error {
 public:
  PropagatorError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Uniform grid 0, step, ..., t_final (t_final included when it lands on the grid).
std::vector<double> time_grid(double t_final, double step);

struct TransferTrace {
  std::vector<double> times;
  std::vector<double> p3;
  double max_p3 = 0.0;
  double int_p3 = 0.0;  // trapezoidal, ms

  /// Recomputes max_p3 and int_p3 from the samples.
  void finalize();
};

struct PropagationOptions {
  int workers = 0;               // 0: default_workers()
  double cond_threshold = 1e8;   // eigenvector condition number above which RK is used
  double rk_tolerance = 1e-9;    // abs and rel tolerance of the dopri5 fallback
  double residual_tolerance = 1e-8;
  bool force_runge_kutta = false;
};

/// Worker count from VAET_NUM_THREADS, else the OpenMP default.
int default_workers();

/// Eigendecomposition of an effective Hamiltonian, reused for several observables.
class Propagator {
 public:
  explicit Propagator(const EffectiveHamiltonian& h, const PropagationOptions& options = {});

  bool uses_runge_kutta() const { return use_rk_; }
  bool is_hermitian() const { return hermitian_; }
  double condition_number() const { return cond_; }
  double residual() const { return residual_; }

  /// Sum of weighted populations on the given basis rows, per time sample.
  std::vector<double> populations(const std::vector<int>& rows, const InitialWeights& init,
                                  const std::vector<double>& times) const;

  /// Populations for several row sets at once (shares the initial-state factor).
  std::vector<std::vector<double>> populations(const std::vector<std::vector<int>>& row_sets,
                                               const InitialWeights& init,
                                               const std::vector<double>& times) const;

  const Eigen::VectorXd& real_eigenvalues() const { return values_re_; }
  const Eigen::MatrixXd& real_eigenvectors() const { return vectors_re_; }
  const Eigen::VectorXcd& eigenvalues() const { return values_; }
  const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }

 private:
  std::vector<std::vector<double>> populations_rk(const std::vector<std::vector<int>>& row_sets,
                                                  const InitialWeights& init,
                                                  const std::vector<double>& times) const;

  const EffectiveHamiltonian* h_;
  PropagationOptions options_;
  bool hermitian_ = true;
  bool use_rk_ = false;
  double cond_ = 1.0;
  double residual_ = 0.0;
  Eigen::VectorXd values_re_;
  Eigen::MatrixXd vectors_re_;
  Eigen::VectorXcd values_;
  Eigen::MatrixXcd vectors_;
  Eigen::MatrixXcd inverse_;
};

/// Flat indices of every basis state on a zero-based site.
std::vector<int> site_rows(const BasisIndex& basis, int site);

/// P3(t), the acceptor population, with Max and trapezoidal Int.
TransferTrace propagate_trace(const EffectiveHamiltonian& h, const InitialWeights& init,
                              const std::vector<double>& times, const PropagationOptions& options = {});

/// Tr rho(t); identically one for Hermitian h.
std::vector<double> trace_norm_series(const EffectiveHamiltonian& h, const InitialWeights& init,
                                      const std::vector<double>& times,
                                      const PropagationOptions& options = {});

/// Populations of sites 1, 2, 3 and the total trace, in that order.
std::vector<std::vector<double>> site_populations(const EffectiveHamiltonian& h,
                                                  const InitialWeights& init,
                                                  const std::vector<double>& times,
                                                  const PropagationOptions& options = {});

/// Everything needed to build and propagate one configuration.
struct SystemConfig {
  TrimerParams trimer;
  VibrationalModeSpec mode_a;
  VibrationalModeSpec mode_b;
  CouplingTopology topology;
  DissipationSpec dissipation;
  int initial_site = 1;

  EffectiveHamiltonian hamiltonian(const BuildOptions& options = {}) const;
  InitialWeights initial_weights() const;
};

/// Builds, propagates and returns the acceptor trace with the trace norm.
struct TraceResult {
  TransferTrace trace;
  std::vector<double> trace_norm;
};
TraceResult run_trace(const SystemConfig& config, const std::vector<double>& times,
                      const PropagationOptions& options = {});

struct ConvergenceResult {
  std::vector<int> n_values;
  std::vector<TransferTrace> traces;
  std::vector<double> deviation_vs_max;  // max_t |p3_N - p3_Nmax|
  Eigen::MatrixXd pairwise;              // max_t |p3_Ni - p3_Nj|
};

/// Same configuration at several Fock truncations (applied to both modes).
ConvergenceResult convergence_sweep(const SystemConfig& base, const std::vector<int>& n_values,
                                    const std::vector<double>& times,
                                    const PropagationOptions& options = {});

namespace reference {

/// Straightforward serial evolution of every weighted initial state; for tests
/// and benchmarks on small dimensions only.
TransferTrace propagate_trace_serial(const EffectiveHamiltonian& h, const InitialWeights& init,
                                     const std::vector<double>& times);

}  // namespace reference

}  // namespace vaet
