#pragma once

// Vibronic level spectra swept over nu_a at fixed nu_b, with avoided-crossing
// search. States are labelled in the exciton x Fock product basis
// |e_j, n, m>, j one-based in ascending exciton energy.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vaet/model.hpp"

namespace vaet {

struct VibronicConfig {
  TrimerParams trimer;
  double nu_b = 0.52;
  double kappa_a = 0.03;
  double kappa_b = 0.03;
  int n_fock = 3;  // per mode
  CouplingTopology topology;
  double nu_a_start = 0.1;
  double nu_a_stop = 1.2;
  double nu_a_step = 0.005;

  void validate() const;
  std::vector<double> nu_a_values() const;
  EffectiveHamiltonian hamiltonian(double nu_a) const;
};

struct VibronicSweep {
  VibronicConfig config;
  double delta31 = 1.0;
  std::vector<double> nu_a_values;
  Eigen::MatrixXd levels;  // (sweep point, level), ascending per row
  int n_levels_kept = 0;
};

VibronicSweep sweep_spectrum(const VibronicConfig& config, int workers = 0);

/// tracked(p, l): sorted index at point p of the level that starts as sorted
/// level l, following eigenvector overlap > threshold across adjacent points.
Eigen::MatrixXi track_levels(const VibronicSweep& sweep, double overlap_threshold = 0.5);

struct StateComponent {
  int exciton = 1;  // one-based
  int n = 0;
  int m = 0;
  double weight = 0.0;

  std::string label() const;  // "(1,1,0)"
};

/// Top components of an eigenvector given in the site x Fock basis.
std::vector<StateComponent> dominant_components(const Eigen::VectorXd& state, const BasisIndex& basis,
                                                const Eigen::Matrix3d& exciton_vectors, int count = 2);

struct AvoidedCrossing {
  int lower = 0;  // sorted level indices
  int upper = 1;
  double nu_a = 0.0;
  double nu_a_over_d31 = 0.0;
  double min_gap = 0.0;
  bool true_crossing = false;
  std::vector<StateComponent> lower_state;
  std::vector<StateComponent> upper_state;
};

struct CrossingOptions {
  int window = 2;             // neighbours on each side that must not be lower
  double gap_threshold = 0.05;
  double true_crossing_tol = 1e-8;
  int label_components = 2;
};

/// Local minima of adjacent sorted-level gaps, refined by golden-section search.
std::vector<AvoidedCrossing> find_avoided_crossings(const VibronicSweep& sweep,
                                                    const CrossingOptions& options = {});

}  // namespace vaet
