#include "vaet/vibronic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "vaet/dynamics.hpp"
#include "vaet/linalg.hpp"

namespace vaet {

void VibronicConfig::validate() const {
  trimer.validate();
  topology.validate();
  VibrationalModeSpec b{nu_b, kappa_b, 0.0, n_fock};
  b.validate();
  if (!(kappa_a >= 0.0) || !std::isfinite(kappa_a)) throw std::invalid_argument("vibronic: kappa_a must be >= 0");
  if (!(nu_a_start > 0.0)) throw std::invalid_argument("vibronic: nu_a_start must be positive");
  if (!(nu_a_stop > nu_a_start)) throw std::invalid_argument("vibronic: nu_a_stop must exceed nu_a_start");
  if (!(nu_a_step > 0.0)) throw std::invalid_argument("vibronic: nu_a_step must be positive");
}

std::vector<double> VibronicConfig::nu_a_values() const {
  const long n = static_cast<long>(std::floor((nu_a_stop - nu_a_start) / nu_a_step + 1e-9));
  std::vector<double> v(n + 1);
  for (long k = 0; k <= n; ++k) v[k] = nu_a_start + k * nu_a_step;
  return v;
}

EffectiveHamiltonian VibronicConfig::hamiltonian(double nu_a) const {
  VibrationalModeSpec a{nu_a, kappa_a, 0.0, n_fock};
  VibrationalModeSpec b{nu_b, kappa_b, 0.0, n_fock};
  return build_effective_hamiltonian(trimer, a, b, topology);
}

namespace {

Eigen::MatrixXd real_part(const EffectiveHamiltonian& h) { return h.matrix.real(); }

double pair_gap(const VibronicConfig& c, double nu_a, int lower) {
  const Eigen::VectorXd e = linalg::eigvalsh(real_part(c.hamiltonian(nu_a)));
  return e(lower + 1) - e(lower);
}

// Bracketed golden-section search; f(mid) must not exceed f(lo) or f(hi).
double refine_minimum(const VibronicConfig& c, int lower, double lo, double mid, double hi, double fmid, double& gap) {
  const double g = 0.5 * (3.0 - std::sqrt(5.0));
  double a = lo, b = mid, d = hi, fb = fmid;
  for (int it = 0; it < 300 && d - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    const bool right = d - b > b - a;
    const double x = right ? b + g * (d - b) : b - g * (b - a);
    const double fx = pair_gap(c, x, lower);
    if (fx < fb) {
      (right ? a : d) = b;
      b = x;
      fb = fx;
    } else {
      (right ? d : a) = x;
    }
  }
  gap = fb;
  return b;
}

}  // namespace

VibronicSweep sweep_spectrum(const VibronicConfig& config, int workers) {
  config.validate();
  VibronicSweep s;
  s.config = config;
  s.delta31 = gap31(config.trimer, config.topology);
  s.nu_a_values = config.nu_a_values();
  const int np = static_cast<int>(s.nu_a_values.size());
  const int dim = 3 * config.n_fock * config.n_fock;
  s.levels.resize(np, dim);
  s.n_levels_kept = dim;
  const int w = std::max(1, workers > 0 ? workers : default_workers());
  std::vector<std::string> errors(np);
#pragma omp parallel for schedule(dynamic) num_threads(w) if (w > 1)
  for (int p = 0; p < np; ++p) {
    try {
      s.levels.row(p) = linalg::eigvalsh(real_part(config.hamiltonian(s.nu_a_values[p]))).transpose();
    } catch (const std::exception& e) {
      errors[p] = e.what();
    }
  }
  for (int p = 0; p < np; ++p)
    if (!errors[p].empty()) throw std::runtime_error("vibronic sweep failed at nu_a=" + std::to_string(s.nu_a_values[p]) + ": " + errors[p]);
  return s;
}

Eigen::MatrixXi track_levels(const VibronicSweep& sweep, double overlap_threshold) {
  const int np = static_cast<int>(sweep.nu_a_values.size());
  const int dim = static_cast<int>(sweep.levels.cols());
  Eigen::MatrixXi tracked(np, dim);
  if (np == 0) return tracked;
  for (int l = 0; l < dim; ++l) tracked(0, l) = l;
  Eigen::VectorXd e;
  Eigen::MatrixXd prev, cur;
  linalg::eigh(real_part(sweep.config.hamiltonian(sweep.nu_a_values[0])), e, prev);
  for (int p = 1; p < np; ++p) {
    linalg::eigh(real_part(sweep.config.hamiltonian(sweep.nu_a_values[p])), e, cur);
    const Eigen::MatrixXd ov = (prev.transpose() * cur).cwiseAbs2();
    std::vector<int> map(dim, -1);
    std::vector<bool> used(dim, false);
    for (int i = 0; i < dim; ++i) {
      int best = -1;
      double bv = overlap_threshold;
      for (int j = 0; j < dim; ++j)
        if (!used[j] && ov(i, j) > bv) {
          bv = ov(i, j);
          best = j;
        }
      if (best >= 0) {
        map[i] = best;
        used[best] = true;
      }
    }
    // Unmatched states keep sorted order among the leftovers.
    int next = 0;
    for (int i = 0; i < dim; ++i) {
      if (map[i] >= 0) continue;
      while (used[next]) ++next;
      map[i] = next;
      used[next] = true;
    }
    for (int l = 0; l < dim; ++l) tracked(p, l) = map[tracked(p - 1, l)];
    prev.swap(cur);
  }
  return tracked;
}

std::string StateComponent::label() const {
  return "(" + std::to_string(exciton) + "," + std::to_string(n) + "," + std::to_string(m) + ")";
}

std::vector<StateComponent> dominant_components(const Eigen::VectorXd& state, const BasisIndex& basis,
                                                const Eigen::Matrix3d& exciton_vectors, int count) {
  const int na = basis.n_a(), nb = basis.n_b();
  std::vector<StateComponent> comps;
  comps.reserve(basis.dim());
  for (int j = 0; j < 3; ++j)
    for (int n = 0; n < na; ++n)
      for (int m = 0; m < nb; ++m) {
        double amp = 0.0;
        for (int s = 0; s < 3; ++s) amp += exciton_vectors(s, j) * state(basis.flat(s, n, m));
        comps.push_back({j + 1, n, m, amp * amp});
      }
  std::stable_sort(comps.begin(), comps.end(),
                   [](const StateComponent& x, const StateComponent& y) { return x.weight > y.weight; });
  comps.resize(std::min<std::size_t>(comps.size(), static_cast<std::size_t>(std::max(count, 0))));
  return comps;
}

std::vector<AvoidedCrossing> find_avoided_crossings(const VibronicSweep& sweep, const CrossingOptions& options) {
  const int np = static_cast<int>(sweep.nu_a_values.size());
  const int dim = static_cast<int>(sweep.levels.cols());
  const int w = std::max(1, options.window);
  std::vector<AvoidedCrossing> out;
  if (np < 3) return out;

  Eigen::VectorXd e_vals;
  Eigen::MatrixXd e_vecs;
  linalg::eigh(electronic_hamiltonian(sweep.config.trimer, sweep.config.topology), e_vals, e_vecs);
  const Eigen::Matrix3d excitons = e_vecs;

  for (int l = 0; l + 1 < dim; ++l) {
    std::vector<double> g(np);
    for (int p = 0; p < np; ++p) g[p] = sweep.levels(p, l + 1) - sweep.levels(p, l);
    for (int p = 1; p + 1 < np; ++p) {
      if (g[p] > options.gap_threshold) continue;
      bool is_min = true;
      for (int q = std::max(0, p - w); q <= std::min(np - 1, p + w); ++q) {
        if (q == p) continue;
        if (g[q] < g[p] || (q < p && g[q] == g[p])) is_min = false;
      }
      const double edge = 1e-12 * std::max(1.0, std::abs(g[p]));
      if (!is_min || g[p - 1] - g[p] < edge || g[p + 1] - g[p] < edge) continue;

      AvoidedCrossing c;
      c.lower = l;
      c.upper = l + 1;
      c.nu_a = refine_minimum(sweep.config, l, sweep.nu_a_values[p - 1], sweep.nu_a_values[p], sweep.nu_a_values[p + 1], g[p], c.min_gap);
      c.nu_a_over_d31 = c.nu_a / sweep.delta31;
      c.true_crossing = c.min_gap < options.true_crossing_tol;
      Eigen::VectorXd vals;
      Eigen::MatrixXd vecs;
      const EffectiveHamiltonian h = sweep.config.hamiltonian(c.nu_a);
      linalg::eigh(real_part(h), vals, vecs);
      c.lower_state = dominant_components(vecs.col(l), h.basis, excitons, options.label_components);
      c.upper_state = dominant_components(vecs.col(l + 1), h.basis, excitons, options.label_components);
      out.push_back(std::move(c));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const AvoidedCrossing& a, const AvoidedCrossing& b) {
    return a.nu_a != b.nu_a ? a.nu_a < b.nu_a : a.lower < b.lower;
  });
  return out;
}

}  // namespace vaet
