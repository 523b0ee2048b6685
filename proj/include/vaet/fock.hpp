#pragma once

// Truncated bosonic operators and thermal vibrational ensembles.

#include <vector>

#include <Eigen/Dense>

#include "vaet/model.hpp"

namespace vaet {

struct FockOperators {
  int n_fock = 0;
  Eigen::MatrixXd annihilate;  // annihilate(n-1, n) = sqrt(n)
  Eigen::MatrixXd number;      // annihilate^T * annihilate

  static FockOperators make(int n_fock);
  Eigen::MatrixXd create() const { return annihilate.transpose(); }
};

/// Diagonal thermal populations, renormalized over the truncated space.
struct ThermalState {
  int n_fock = 0;
  std::vector<double> probabilities;

  double mean() const;
};

ThermalState thermal_state(double nu, double kbt, int n_fock);

/// Untruncated Bose-Einstein occupancy 1 / (exp(nu / kbt) - 1); 0 at kbt == 0.
double mean_occupancy(double nu, double kbt);

/// Diagonal initial ensemble |site><site| x rho_a x rho_b stored as
/// (flat index, weight) pairs sorted by flat index. Zero weights are dropped.
struct InitialWeights {
  BasisIndex basis;
  std::vector<int> index;
  std::vector<double> weight;

  std::size_t size() const { return index.size(); }
  double total() const;
};

/// `site` is one-based (1 = donor).
InitialWeights initial_density(int site, const ThermalState& state_a, const ThermalState& state_b);

}  // namespace vaet
