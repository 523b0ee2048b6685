#pragma once

// Fourth-order perturbation theory in the site-vibration couplings for the
// symmetric trimer (site energies -Delta, 0, Delta; equal hoppings J).
//
// Interaction picture with respect to the excitonic and free-vibration parts:
//   V_I(t) = sum_x kappa_x sum_jk X_jk |e_j><e_k| e^{i Delta_jk t} (x^dag e^{i nu_x t} + x e^{-i nu_x t})
// with X = A for mode a and X = B for mode b. A leg (x, q, j <- k) carries
// frequency Delta_jk + q nu_x, q = +1 for emission (x^dag) and -1 for absorption.
// Amplitudes are built from every Dyson path and grouped by their operator
// string, then thermal averages come from Wick's theorem per mode.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vaet/dynamics.hpp"
#include "vaet/model.hpp"

namespace vaet {

struct SymmetricEigenSystem {
  double delta = 0.0;
  double j = 0.0;
  double omega_cap = 0.0;       // sqrt(Delta^2 + 2 J^2)
  Eigen::Vector3d lambdas;      // (-Omega, 0, Omega)
  double coef_alpha = 0.0;      // <e_1|1>
  double coef_beta = 0.0;       // -<e_2|1>
  double coef_gamma = 0.0;      // <e_3|1>
  Eigen::Matrix3d eigvecs;      // column k is |e_{k+1}> in the site basis

  double gap(int jj, int kk) const { return lambdas(jj) - lambdas(kk); }
};

SymmetricEigenSystem symmetric_eigensystem(double delta, double j);

/// Rejects non-symmetric parameters; a common site-energy offset only adds a global phase.
SymmetricEigenSystem symmetric_eigensystem(const TrimerParams& trimer);

struct CouplingCoefficients {
  Eigen::Matrix3d a;  // eigenbasis matrix of (|2><2| - |1><1| - |3><3|)
  Eigen::Matrix3d b;  // eigenbasis matrix of (|3><3| - |1><1| - |2><2|)
};

/// Closed forms for all nine A_jk and B_jk.
CouplingCoefficients coupling_coefficients(const SymmetricEigenSystem& sys);

/// E^T diag(pattern) E for the site patterns of a topology.
CouplingCoefficients coupling_coefficients_numeric(const SymmetricEigenSystem& sys,
                                                   const CouplingTopology& topology);

enum class ModeLabel { A, B };

struct Leg {
  ModeLabel mode = ModeLabel::A;
  int sign = -1;  // +1 emission, -1 absorption
  int to = 0;     // zero-based exciton index j
  int from = 0;   // zero-based exciton index k
};

struct PerturbModes {
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  double nu_a = 1.0;
  double nu_b = 1.0;
  double n_a = 0.0;  // mean occupancies
  double n_b = 0.0;

  static PerturbModes from_specs(const VibrationalModeSpec& a, const VibrationalModeSpec& b);
};

/// exp[z_0, ..., z_n], the divided difference of the exponential.
Complex divided_difference_exp(const std::vector<Complex>& z);

/// int_{t > t_1 > ... > t_n > 0} prod_k exp(i omega_k t_k), omega_1 on the latest time.
Complex nested_integral(const std::vector<double>& omegas, double t);

/// The interaction amplitude W of a leg list (first leg = latest time), without (-i)^n.
Complex interaction_w(const std::vector<Leg>& legs, double t, const SymmetricEigenSystem& sys,
                      const CouplingCoefficients& coeffs, const PerturbModes& modes);

/// (-i)^n W, the Dyson-series coefficient of the path.
Complex amplitude(const std::vector<Leg>& legs, double t, const SymmetricEigenSystem& sys,
                  const CouplingCoefficients& coeffs, const PerturbModes& modes);

/// Thermal average of a single-mode operator string (true = creation), by Wick pairing
/// with <x^dag x> = n and <x x^dag> = n + 1.
double wick_average(const std::vector<bool>& creation, double n);

struct BosonOp {
  ModeLabel mode;
  bool creation;
};

/// Two-mode average; factorizes into the single-mode averages.
double thermal_average(const std::vector<BosonOp>& ops, double n_a, double n_b);

enum class Regime { WeakJ, StrongJ };

std::string to_string(Regime regime);
Regime parse_regime(const std::string& name);

struct PathwayTerm {
  std::string term;   // e.g. "P3(2,1)"
  std::string left;   // operator string of the conjugated amplitude, e.g. "-a-b"
  std::string right;  // operator string of the plain amplitude
  Complex amplitude;  // conj(C_left) * C_right, both orders' coefficients
  double thermal = 0.0;
  double contribution = 0.0;  // real part, doubled for cross-order pairs
};

struct PerturbOptions {
  double probe_time = -1.0;  // time of the pathway table; < 0 selects the last sample
  double pathway_cutoff = 0.0;  // drop table rows with |contribution| below this
};

struct PerturbResult {
  Regime regime = Regime::StrongJ;
  TransferTrace trace;
  std::vector<std::string> term_names;
  std::vector<std::vector<double>> term_values;  // [term][time]
  double probe_time = 0.0;
  std::vector<PathwayTerm> pathways;
  std::vector<std::string> warnings;

  const std::vector<double>& term(const std::string& name) const;
};

/// WeakJ: P3(1) + P3(2,1) + P3(2,2) on the energy-conserving absorption pathways with
/// |1> ~ |e_1>, |3> ~ |e_3>. StrongJ: P3(0) + P3(1,1) + P3(1,2) + P3(2,1) over every path;
/// P3(2,2) and P3(2,3) are not part of this branch.
PerturbResult p3_perturbative(const SymmetricEigenSystem& sys, const CouplingCoefficients& coeffs,
                              const PerturbModes& modes, const std::vector<double>& times,
                              Regime regime, const PerturbOptions& options = {});

}  // namespace vaet
