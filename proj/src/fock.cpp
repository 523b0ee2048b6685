#include "vaet/fock.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vaet {

FockOperators FockOperators::make(int n_fock) {
  if (n_fock < 2) throw std::invalid_argument("fock: n_fock must be at least 2");
  FockOperators ops;
  ops.n_fock = n_fock;
  ops.annihilate = Eigen::MatrixXd::Zero(n_fock, n_fock);
  for (int n = 1; n < n_fock; ++n) ops.annihilate(n - 1, n) = std::sqrt(double(n));
  ops.number = ops.annihilate.transpose() * ops.annihilate;
  return ops;
}

double ThermalState::mean() const {
  double s = 0.0;
  for (int n = 0; n < n_fock; ++n) s += n * probabilities[n];
  return s;
}

ThermalState thermal_state(double nu, double kbt, int n_fock) {
  if (!(nu > 0.0)) throw std::invalid_argument("thermal_state: nu must be positive");
  if (!(kbt >= 0.0)) throw std::invalid_argument("thermal_state: kbt must be nonnegative");
  if (n_fock < 2) throw std::invalid_argument("thermal_state: n_fock must be at least 2");

  ThermalState st;
  st.n_fock = n_fock;
  st.probabilities.assign(n_fock, 0.0);
  if (kbt == 0.0) {
    st.probabilities[0] = 1.0;
    return st;
  }
  const double x = nu / kbt;
  for (int n = 0; n < n_fock; ++n) st.probabilities[n] = std::exp(-x * n);
  const double z = std::accumulate(st.probabilities.begin(), st.probabilities.end(), 0.0);
  for (double& p : st.probabilities) p /= z;
  return st;
}

double mean_occupancy(double nu, double kbt) {
  if (!(nu > 0.0)) throw std::invalid_argument("mean_occupancy: nu must be positive");
  if (kbt < 0.0) throw std::invalid_argument("mean_occupancy: kbt must be nonnegative");
  if (kbt == 0.0) return 0.0;
  return 1.0 / std::expm1(nu / kbt);
}

double InitialWeights::total() const { return std::accumulate(weight.begin(), weight.end(), 0.0); }

InitialWeights initial_density(int site, const ThermalState& state_a, const ThermalState& state_b) {
  if (site < 1 || site > 3) throw std::invalid_argument("initial_density: site must be 1, 2 or 3");
  InitialWeights w;
  w.basis = BasisIndex(state_a.n_fock, state_b.n_fock);
  for (int n = 0; n < state_a.n_fock; ++n) {
    for (int m = 0; m < state_b.n_fock; ++m) {
      const double p = state_a.probabilities[n] * state_b.probabilities[m];
      if (p > 0.0) {
        w.index.push_back(w.basis.flat(site - 1, n, m));
        w.weight.push_back(p);
      }
    }
  }
  return w;
}

}  // namespace vaet
