#include "vaet/model.hpp"

#include <cmath>
#include <string>

namespace vaet {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void TrimerParams::validate() const {
  for (double w : omega_tilde) require(finite(w), "trimer: site energies must be finite");
  require(finite(j12) && finite(j23) && finite(j13), "trimer: hoppings must be finite");
}

bool TrimerParams::is_symmetric(double tol) const {
  const double gap21 = omega_tilde[1] - omega_tilde[0];
  const double gap32 = omega_tilde[2] - omega_tilde[1];
  return std::abs(j12 - j23) <= tol && std::abs(gap21 - gap32) <= tol;
}

void VibrationalModeSpec::validate() const {
  require(finite(nu) && nu > 0.0, "mode: nu must be positive");
  require(finite(kappa) && kappa >= 0.0, "mode: kappa must be nonnegative");
  require(finite(kbt) && kbt >= 0.0, "mode: kbt must be nonnegative");
  require(n_fock >= 2, "mode: n_fock must be at least 2");
}

void CouplingTopology::validate() const {
  require(finite(zeta) && zeta >= 0.0 && zeta <= 1.0, "topology: zeta must lie in [0, 1]");
}

void DissipationSpec::validate() const {
  for (double g : gamma) require(finite(g) && g >= 0.0, "dissipation: rates must be nonnegative");
}

std::array<double, 3> site_pattern_a(const CouplingTopology& topology) {
  if (topology.kind == CouplingTopology::Kind::Longitudinal) return {2.0, 0.0, -2.0};
  return {-topology.zeta, 1.0, -topology.zeta};
}

std::array<double, 3> site_pattern_b(const CouplingTopology& topology) {
  if (topology.kind == CouplingTopology::Kind::Longitudinal) return {2.0, -4.0, 2.0};
  return {-topology.zeta, -topology.zeta, 1.0};
}

Eigen::Matrix3d electronic_hamiltonian(const TrimerParams& trimer, const CouplingTopology& topology) {
  const bool longitudinal = topology.kind == CouplingTopology::Kind::Longitudinal;
  // The longitudinal Hamiltonian carries omega'/2 on the projected site energies.
  const double scale = longitudinal ? 0.5 : 1.0;
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (int s = 0; s < 3; ++s) h(s, s) = scale * trimer.omega_tilde[s];
  h(0, 1) = h(1, 0) = trimer.j12;
  h(1, 2) = h(2, 1) = trimer.j23;
  h(0, 2) = h(2, 0) = trimer.j13;
  return h;
}

Eigen::Vector3d electronic_levels(const TrimerParams& trimer, const CouplingTopology& topology) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(electronic_hamiltonian(trimer, topology),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double gap31(const TrimerParams& trimer, const CouplingTopology& topology) {
  const Eigen::Vector3d lam = electronic_levels(trimer, topology);
  return lam(2) - lam(0);
}

EffectiveHamiltonian build_effective_hamiltonian(const TrimerParams& trimer,
                                                 const VibrationalModeSpec& mode_a,
                                                 const VibrationalModeSpec& mode_b,
                                                 const CouplingTopology& topology,
                                                 const DissipationSpec& dissipation,
                                                 const BuildOptions& options) {
  trimer.validate();
  mode_a.validate();
  mode_b.validate();
  topology.validate();
  dissipation.validate();

  const long long dim = 3LL * mode_a.n_fock * mode_b.n_fock;
  if (dim > options.max_dim)
    throw SizeError("hamiltonian dimension " + std::to_string(dim) + " exceeds cap " +
                    std::to_string(options.max_dim));

  EffectiveHamiltonian h;
  h.basis = BasisIndex(mode_a.n_fock, mode_b.n_fock);
  h.is_hermitian = dissipation.is_zero();
  h.matrix = ComplexMatrix::Zero(dim, dim);
  auto& mat = h.matrix;
  const BasisIndex& b = h.basis;

  const Eigen::Matrix3d elec = electronic_hamiltonian(trimer, topology);
  const auto pat_a = site_pattern_a(topology);
  const auto pat_b = site_pattern_b(topology);

  for (int s = 0; s < 3; ++s) {
    for (int n = 0; n < b.n_a(); ++n) {
      for (int m = 0; m < b.n_b(); ++m) {
        const int i = b.flat(s, n, m);
        mat(i, i) = Complex(elec(s, s) + mode_a.nu * n + mode_b.nu * m, -0.5 * dissipation.gamma[s]);
        for (int s2 = 0; s2 < 3; ++s2) {
          if (s2 != s && elec(s, s2) != 0.0) mat(i, b.flat(s2, n, m)) = elec(s, s2);
        }
        if (n + 1 < b.n_a()) {
          const double c = mode_a.kappa * pat_a[s] * std::sqrt(double(n + 1));
          const int j = b.flat(s, n + 1, m);
          mat(i, j) = c;
          mat(j, i) = c;
        }
        if (m + 1 < b.n_b()) {
          const double c = mode_b.kappa * pat_b[s] * std::sqrt(double(m + 1));
          const int j = b.flat(s, n, m + 1);
          mat(i, j) = c;
          mat(j, i) = c;
        }
      }
    }
  }
  return h;
}

Preset preset(PresetName name) {
  Preset p;
  switch (name) {
    case PresetName::IonTrapLine1:
      p.trimer = {{-0.5, 0.0, 0.5}, 0.1, 0.1, 0.0};
      p.mode_a = {0.52, 0.1, 0.72, 15};
      p.mode_b = {0.52, 0.1, 0.72, 15};
      p.unit = EnergyUnit::RadPerMs;
      p.note = "ion-trap emulator values; rad/ms";
      break;
    case PresetName::ScaleUpLine2:
      p.trimer = {{-138.6, 0.0, 138.6}, 27.72, 27.72, 0.0};
      p.mode_a = {144.0, 27.72, 200.0, 15};
      p.mode_b = {144.0, 27.72, 200.0, 15};
      p.unit = EnergyUnit::InverseCm;
      p.note = "ion-trap values scaled to natural site energies; cm^-1, not converted";
      break;
    case PresetName::FmoLine3:
      p.trimer = {{-138.6, 0.0, 138.6}, -5.9, -13.7, 0.0};
      p.mode_a = {180.0, 42.2, 200.0, 15};
      p.mode_b = {180.0, 42.2, 200.0, 15};
      p.unit = EnergyUnit::InverseCm;
      p.note = "natural light-harvesting system values; cm^-1, not converted";
      break;
  }
  return p;
}

PresetName parse_preset_name(const std::string& name) {
  if (name == "IonTrapLine1" || name == "line1") return PresetName::IonTrapLine1;
  if (name == "ScaleUpLine2" || name == "line2") return PresetName::ScaleUpLine2;
  if (name == "FmoLine3" || name == "line3") return PresetName::FmoLine3;
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::string to_string(PresetName name) {
  switch (name) {
    case PresetName::IonTrapLine1: return "IonTrapLine1";
    case PresetName::ScaleUpLine2: return "ScaleUpLine2";
    case PresetName::FmoLine3: return "FmoLine3";
  }
  return "?";
}

std::string to_string(EnergyUnit unit) {
  return unit == EnergyUnit::RadPerMs ? "rad/ms" : "cm^-1";
}

}  // namespace vaet
