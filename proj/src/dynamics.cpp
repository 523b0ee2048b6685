#include "vaet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <omp.h>

#include <Eigen/Sparse>
#include <boost/numeric/odeint.hpp>

#include "vaet/linalg.hpp"

namespace vaet {

namespace {

constexpr int kTimeBlock = 32;

bool all_rows(const std::vector<int>& rows, int dim) {
  if (static_cast<int>(rows.size()) != dim) return false;
  for (int i = 0; i < dim; ++i)
    if (rows[i] != i) return false;
  return true;
}

int resolve_workers(int requested) {
  const int w = requested > 0 ? requested : default_workers();
  return std::max(1, w);
}

// sum_kl c_k G_kl c_l + s_k G_kl s_l for c = cos(E t), s = sin(E t), per time.
std::vector<double> quadratic_form_real(const Eigen::MatrixXd& g, const Eigen::VectorXd& e,
                                        const std::vector<double>& times, int workers) {
  const int nt = static_cast<int>(times.size());
  const int n = static_cast<int>(e.size());
  const int blocks = (nt + kTimeBlock - 1) / kTimeBlock;
  std::vector<double> out(nt, 0.0);
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1 && !omp_in_parallel())
  for (int b = 0; b < blocks; ++b) {
    const int t0 = b * kTimeBlock;
    const int nb = std::min(kTimeBlock, nt - t0);
    Eigen::MatrixXd cs(n, 2 * nb);
    for (int j = 0; j < nb; ++j) {
      const double t = times[t0 + j];
      for (int k = 0; k < n; ++k) {
        cs(k, j) = std::cos(e(k) * t);
        cs(k, nb + j) = std::sin(e(k) * t);
      }
    }
    const Eigen::MatrixXd gcs = g * cs;
    for (int j = 0; j < nb; ++j) {
      out[t0 + j] = cs.col(j).dot(gcs.col(j)) + cs.col(nb + j).dot(gcs.col(nb + j));
    }
  }
  return out;
}

// Re sum_kl u_k G_kl conj(u_l) for u = exp(-i lambda t), per time.
std::vector<double> quadratic_form_complex(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& lam,
                                           const std::vector<double>& times, int workers) {
  const int nt = static_cast<int>(times.size());
  const int n = static_cast<int>(lam.size());
  const int blocks = (nt + kTimeBlock - 1) / kTimeBlock;
  std::vector<double> out(nt, 0.0);
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1 && !omp_in_parallel())
  for (int b = 0; b < blocks; ++b) {
    const int t0 = b * kTimeBlock;
    const int nb = std::min(kTimeBlock, nt - t0);
    Eigen::MatrixXcd u(n, nb);
    for (int j = 0; j < nb; ++j)
      for (int k = 0; k < n; ++k) u(k, j) = std::exp(Complex(0.0, -times[t0 + j]) * lam(k));
    const Eigen::MatrixXcd gu = g * u.conjugate();
    for (int j = 0; j < nb; ++j) {
      out[t0 + j] = (u.col(j).transpose() * gu.col(j)).value().real();
    }
  }
  return out;
}

}  // namespace

int default_workers() {
  if (const char* env = std::getenv("VAET_NUM_THREADS")) {
    try {
      const int w = std::stoi(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

std::vector<double> time_grid(double t_final, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("time_grid: step must be positive");
  if (!(t_final >= 0.0)) throw std::invalid_argument("time_grid: t_final must be nonnegative");
  const long n = static_cast<long>(std::floor(t_final / step + 1e-9));
  std::vector<double> t(n + 1);
  for (long k = 0; k <= n; ++k) t[k] = k * step;
  return t;
}

void TransferTrace::finalize() {
  max_p3 = p3.empty() ? 0.0 : *std::max_element(p3.begin(), p3.end());
  int_p3 = 0.0;
  for (std::size_t k = 1; k < p3.size(); ++k)
    int_p3 += 0.5 * (times[k] - times[k - 1]) * (p3[k] + p3[k - 1]);
}

std::vector<int> site_rows(const BasisIndex& basis, int site) {
  std::vector<int> rows(basis.site_size());
  for (int i = 0; i < basis.site_size(); ++i) rows[i] = basis.site_begin(site) + i;
  return rows;
}

Propagator::Propagator(const EffectiveHamiltonian& h, const PropagationOptions& options)
    : h_(&h), options_(options), hermitian_(h.is_hermitian) {
  const int n = h.dim();
  if (h.matrix.rows() != n || h.matrix.cols() != n)
    throw std::invalid_argument("propagator: matrix does not match its basis");
  // complex Hermitian input goes through the general solver
  if (hermitian_ && n > 0 && h.matrix.imag().cwiseAbs().maxCoeff() > 0.0) hermitian_ = false;

  if (hermitian_) {
    try {
      linalg::eigh(h.matrix.real(), values_re_, vectors_re_);
    } catch (const linalg::LapackError& e) {
      throw PropagatorError(e.what(), std::nan(""));
    }
    const Eigen::SparseMatrix<double> hs = h.matrix.real().sparseView();
    const Eigen::MatrixXd r = hs * vectors_re_ - vectors_re_ * values_re_.asDiagonal();
    residual_ = r.norm() / std::max(1.0, h.matrix.norm());
    if (!std::isfinite(residual_) || residual_ > options_.residual_tolerance)
      throw PropagatorError("propagator: eigendecomposition residual " + std::to_string(residual_),
                            residual_);
    return;
  }

  if (options_.force_runge_kutta) {
    use_rk_ = true;
    return;
  }
  try {
    linalg::eig(h.matrix, values_, vectors_);
  } catch (const linalg::LapackError& e) {
    throw PropagatorError(e.what(), std::nan(""));
  }
  const Eigen::SparseMatrix<Complex> hs = h.matrix.sparseView();
  const Eigen::MatrixXcd r = hs * vectors_ - vectors_ * values_.asDiagonal();
  residual_ = r.norm() / std::max(1.0, h.matrix.norm());
  if (!std::isfinite(residual_) || residual_ > options_.residual_tolerance)
    throw PropagatorError("propagator: eigendecomposition residual " + std::to_string(residual_),
                          residual_);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(vectors_);
  const double rcond = lu.rcond();
  cond_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (cond_ > options_.cond_threshold) {
    use_rk_ = true;
    return;
  }
  inverse_ = lu.inverse();
}

std::vector<double> Propagator::populations(const std::vector<int>& rows, const InitialWeights& init,
                                            const std::vector<double>& times) const {
  return populations(std::vector<std::vector<int>>{rows}, init, times).front();
}

std::vector<std::vector<double>> Propagator::populations(
    const std::vector<std::vector<int>>& row_sets, const InitialWeights& init,
    const std::vector<double>& times) const {
  const int n = h_->dim();
  if (init.basis.dim() != n) throw std::invalid_argument("propagator: initial weights do not match basis");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("propagator: times must be increasing");
  if (!times.empty() && times.front() < 0.0)
    throw std::invalid_argument("propagator: times must be nonnegative");

  if (use_rk_) return populations_rk(row_sets, init, times);

  const int workers = resolve_workers(options_.workers);
  const int ni = static_cast<int>(init.size());
  std::vector<std::vector<double>> out;

  if (hermitian_) {
    Eigen::MatrixXd b(ni, n);
    for (int i = 0; i < ni; ++i) b.row(i) = std::sqrt(init.weight[i]) * vectors_re_.row(init.index[i]);
    const Eigen::MatrixXd t = b.transpose() * b;
    for (const auto& rows : row_sets) {
      if (all_rows(rows, n)) {
        out.emplace_back(times.size(), t.trace());
        continue;
      }
      const Eigen::MatrixXd a = vectors_re_(rows, Eigen::all);
      Eigen::MatrixXd g = a.transpose() * a;
      g.array() *= t.array();
      out.push_back(quadratic_form_real(g, values_re_, times, workers));
    }
    return out;
  }

  Eigen::MatrixXcd y(n, ni);
  for (int i = 0; i < ni; ++i) y.col(i) = std::sqrt(init.weight[i]) * inverse_.col(init.index[i]);
  const Eigen::MatrixXcd t = y * y.adjoint();
  for (const auto& rows : row_sets) {
    const Eigen::MatrixXcd a = vectors_(rows, Eigen::all);
    Eigen::MatrixXcd g = (a.adjoint() * a).transpose();
    g.array() *= t.array();
    out.push_back(quadratic_form_complex(g, values_, times, workers));
  }
  return out;
}

std::vector<std::vector<double>> Propagator::populations_rk(
    const std::vector<std::vector<int>>& row_sets, const InitialWeights& init,
    const std::vector<double>& times) const {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<Complex>;

  const int n = h_->dim();
  const int ni = static_cast<int>(init.size());
  const Eigen::SparseMatrix<Complex> hs = (Complex(0.0, -1.0) * h_->matrix).sparseView();

  State psi(static_cast<std::size_t>(n) * ni, Complex(0.0));
  for (int i = 0; i < ni; ++i) psi[static_cast<std::size_t>(i) * n + init.index[i]] = std::sqrt(init.weight[i]);

  auto rhs = [&](const State& x, State& dxdt, double) {
    Eigen::Map<const Eigen::MatrixXcd> xm(x.data(), n, ni);
    Eigen::Map<Eigen::MatrixXcd> dm(dxdt.data(), n, ni);
    dm.noalias() = hs * xm;
  };

  std::vector<std::vector<double>> out(row_sets.size(), std::vector<double>(times.size(), 0.0));
  std::size_t sample = 0;
  auto observer = [&](const State& x, double) {
    Eigen::Map<const Eigen::MatrixXcd> xm(x.data(), n, ni);
    for (std::size_t r = 0; r < row_sets.size(); ++r) {
      double p = 0.0;
      for (int row : row_sets[r]) p += xm.row(row).squaredNorm();
      out[r][sample] = p;
    }
    ++sample;
  };

  if (times.empty()) return out;
  const double tol = options_.rk_tolerance;
  auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
  const double dt0 = times.size() > 1 ? 0.1 * (times[1] - times[0]) : 0.01;
  odeint::integrate_times(stepper, rhs, psi, times.begin(), times.end(), dt0, observer);
  return out;
}

TransferTrace propagate_trace(const EffectiveHamiltonian& h, const InitialWeights& init,
                              const std::vector<double>& times, const PropagationOptions& options) {
  const Propagator prop(h, options);
  TransferTrace tr;
  tr.times = times;
  tr.p3 = prop.populations(site_rows(h.basis, 2), init, times);
  tr.finalize();
  return tr;
}

std::vector<double> trace_norm_series(const EffectiveHamiltonian& h, const InitialWeights& init,
                                      const std::vector<double>& times,
                                      const PropagationOptions& options) {
  std::vector<int> rows(h.dim());
  for (int i = 0; i < h.dim(); ++i) rows[i] = i;
  return Propagator(h, options).populations(rows, init, times);
}

std::vector<std::vector<double>> site_populations(const EffectiveHamiltonian& h,
                                                  const InitialWeights& init,
                                                  const std::vector<double>& times,
                                                  const PropagationOptions& options) {
  std::vector<int> all(h.dim());
  for (int i = 0; i < h.dim(); ++i) all[i] = i;
  return Propagator(h, options)
      .populations({site_rows(h.basis, 0), site_rows(h.basis, 1), site_rows(h.basis, 2), all}, init,
                   times);
}

EffectiveHamiltonian SystemConfig::hamiltonian(const BuildOptions& options) const {
  return build_effective_hamiltonian(trimer, mode_a, mode_b, topology, dissipation, options);
}

InitialWeights SystemConfig::initial_weights() const {
  return initial_density(initial_site, thermal_state(mode_a.nu, mode_a.kbt, mode_a.n_fock),
                         thermal_state(mode_b.nu, mode_b.kbt, mode_b.n_fock));
}

TraceResult run_trace(const SystemConfig& config, const std::vector<double>& times,
                      const PropagationOptions& options) {
  const EffectiveHamiltonian h = config.hamiltonian();
  const InitialWeights init = config.initial_weights();
  std::vector<int> all(h.dim());
  for (int i = 0; i < h.dim(); ++i) all[i] = i;
  auto pops = Propagator(h, options).populations({site_rows(h.basis, 2), all}, init, times);
  TraceResult res;
  res.trace.times = times;
  res.trace.p3 = std::move(pops[0]);
  res.trace.finalize();
  res.trace_norm = std::move(pops[1]);
  return res;
}

ConvergenceResult convergence_sweep(const SystemConfig& base, const std::vector<int>& n_values,
                                    const std::vector<double>& times,
                                    const PropagationOptions& options) {
  if (n_values.empty()) throw std::invalid_argument("convergence: no truncations given");
  for (std::size_t k = 1; k < n_values.size(); ++k)
    if (n_values[k] <= n_values[k - 1]) throw std::invalid_argument("convergence: n_values must increase");

  ConvergenceResult res;
  res.n_values = n_values;
  for (int n : n_values) {
    SystemConfig c = base;
    c.mode_a.n_fock = n;
    c.mode_b.n_fock = n;
    res.traces.push_back(run_trace(c, times, options).trace);
  }
  const std::size_t m = n_values.size();
  res.pairwise = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < times.size(); ++k)
        d = std::max(d, std::abs(res.traces[i].p3[k] - res.traces[j].p3[k]));
      res.pairwise(i, j) = res.pairwise(j, i) = d;
    }
  }
  for (std::size_t i = 0; i < m; ++i) res.deviation_vs_max.push_back(res.pairwise(i, m - 1));
  return res;
}

namespace reference {

TransferTrace propagate_trace_serial(const EffectiveHamiltonian& h, const InitialWeights& init,
                                     const std::vector<double>& times) {
  const int n = h.dim();
  const std::vector<int> rows = site_rows(h.basis, 2);
  Eigen::VectorXcd lam;
  Eigen::MatrixXcd v, vinv;
  if (h.is_hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix.real());
    lam = es.eigenvalues().cast<Complex>();
    v = es.eigenvectors().cast<Complex>();
    vinv = v.adjoint();
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.matrix);
    lam = es.eigenvalues();
    v = es.eigenvectors();
    vinv = v.inverse();
  }
  TransferTrace tr;
  tr.times = times;
  tr.p3.assign(times.size(), 0.0);
  Eigen::VectorXcd coeff(n);
  for (std::size_t i = 0; i < init.size(); ++i) {
    const Eigen::VectorXcd c0 = vinv.col(init.index[i]);
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (int j = 0; j < n; ++j) coeff(j) = std::exp(Complex(0.0, -times[k]) * lam(j)) * c0(j);
      double p = 0.0;
      for (int r : rows) p += std::norm((v.row(r) * coeff).value());
      tr.p3[k] += init.weight[i] * p;
    }
  }
  tr.finalize();
  return tr;
}

}  // namespace reference

}  // namespace vaet
