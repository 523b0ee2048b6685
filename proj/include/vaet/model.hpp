#pragma once

// Domain types and Hamiltonian builders for a donor-bridge-acceptor trimer
// coupled to two bosonic modes, projected onto the single-excitation subspace.
//
// Units: energies and frequencies are angular frequencies in rad/ms (quoted
// as "kHz" in ion-trap emulation work), times are in ms, hbar = 1.

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vaet {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Thrown when a requested product space exceeds the configured dimension cap.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Electronic parameters of the trimer. Sites are numbered 1 (donor),
/// 2 (bridge), 3 (acceptor); array slots are zero-based.
struct TrimerParams {
  std::array<double, 3> omega_tilde{};
  double j12 = 0.0;
  double j23 = 0.0;
  double j13 = 0.0;  // direct donor-acceptor hopping, normally only set for the longitudinal variant

  void validate() const;

  /// Equal hoppings and equal adjacent site-energy gaps.
  bool is_symmetric(double tol = 1e-12) const;

  /// Site-energy gap omega_2 - omega_1.
  double delta() const { return omega_tilde[1] - omega_tilde[0]; }

  /// Common hopping of the symmetric model (J12).
  double j() const { return j12; }
};

struct VibrationalModeSpec {
  double nu = 1.0;     // mode frequency
  double kappa = 0.0;  // site-vibration coupling
  double kbt = 0.0;    // mode temperature, as an energy
  int n_fock = 15;     // Fock truncation

  void validate() const;
};

/// Transverse(zeta) interpolates between the sigma_z projected coupling
/// (zeta = 1) and the excited-state-only coupling (zeta = 0). Longitudinal
/// selects the correlated normal-mode Hamiltonian; then mode "a" plays the
/// symmetric stretch (c) and mode "b" the asymmetric stretch (d).
struct CouplingTopology {
  enum class Kind { Transverse, Longitudinal };

  Kind kind = Kind::Transverse;
  double zeta = 1.0;

  static CouplingTopology transverse(double zeta = 1.0) { return {Kind::Transverse, zeta}; }
  static CouplingTopology longitudinal() { return {Kind::Longitudinal, 1.0}; }

  void validate() const;
};

/// Per-site decay rates entering as -(i/2) gamma_j |j><j|.
struct DissipationSpec {
  std::array<double, 3> gamma{};

  static DissipationSpec uniform(double g) { return {{g, g, g}}; }
  bool is_zero() const { return gamma[0] == 0.0 && gamma[1] == 0.0 && gamma[2] == 0.0; }
  void validate() const;
};

/// Row-major product basis: flat = s * Na * Nb + n * Nb + m, s in {0, 1, 2}.
class BasisIndex {
 public:
  struct State {
    int site;  // zero-based
    int n;     // mode a occupation
    int m;     // mode b occupation
  };

  BasisIndex() = default;
  BasisIndex(int n_a, int n_b) : n_a_(n_a), n_b_(n_b) {}

  int n_a() const { return n_a_; }
  int n_b() const { return n_b_; }
  int dim() const { return 3 * n_a_ * n_b_; }
  int flat(int site, int n, int m) const { return (site * n_a_ + n) * n_b_ + m; }
  State decode(int flat) const {
    return {flat / (n_a_ * n_b_), (flat / n_b_) % n_a_, flat % n_b_};
  }
  /// First flat index belonging to a (zero-based) site; a site block is contiguous.
  int site_begin(int site) const { return site * n_a_ * n_b_; }
  int site_size() const { return n_a_ * n_b_; }

 private:
  int n_a_ = 0;
  int n_b_ = 0;
};

struct EffectiveHamiltonian {
  BasisIndex basis;
  ComplexMatrix matrix;
  bool is_hermitian = true;

  int dim() const { return basis.dim(); }
};

struct BuildOptions {
  int max_dim = 20000;
};

/// Dense effective Hamiltonian on electronic x Fock_a x Fock_b.
EffectiveHamiltonian build_effective_hamiltonian(const TrimerParams& trimer,
                                                 const VibrationalModeSpec& mode_a,
                                                 const VibrationalModeSpec& mode_b,
                                                 const CouplingTopology& topology,
                                                 const DissipationSpec& dissipation = {},
                                                 const BuildOptions& options = {});

/// The 3x3 electronic block (site energies and hoppings) as used by the builder.
Eigen::Matrix3d electronic_hamiltonian(const TrimerParams& trimer, const CouplingTopology& topology);

/// Sorted eigenvalues of the electronic block.
Eigen::Vector3d electronic_levels(const TrimerParams& trimer, const CouplingTopology& topology);

/// lambda_3 - lambda_1 of the electronic block.
double gap31(const TrimerParams& trimer,
             const CouplingTopology& topology = CouplingTopology::transverse());

/// Per-site coupling pattern multiplying kappa (x + x^dagger) for each mode.
std::array<double, 3> site_pattern_a(const CouplingTopology& topology);
std::array<double, 3> site_pattern_b(const CouplingTopology& topology);

enum class PresetName { IonTrapLine1, ScaleUpLine2, FmoLine3 };
enum class EnergyUnit { RadPerMs, InverseCm };

struct Preset {
  TrimerParams trimer;
  VibrationalModeSpec mode_a;
  VibrationalModeSpec mode_b;
  EnergyUnit unit = EnergyUnit::RadPerMs;
  std::string note;
};

/// Parameter rows of the ion-trap / scaled / natural-system comparison table.
/// Rows 2 and 3 keep their native cm^-1 values; nothing is converted.
Preset preset(PresetName name);

PresetName parse_preset_name(const std::string& name);
std::string to_string(PresetName name);
std::string to_string(EnergyUnit unit);

}  // namespace vaet
