#include "doctest.h"

#include <random>

#include "vaet/model.hpp"

using namespace vaet;

namespace {

TrimerParams line1() { return preset(PresetName::IonTrapLine1).trimer; }

VibrationalModeSpec mode(double nu, double kappa, int n) { return {nu, kappa, 1.5, n}; }

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("model") {

TEST_CASE("zero coupling factorizes into electronic and vibrational blocks") {
  const auto h = build_effective_hamiltonian(line1(), mode(0.52, 0.0, 4), mode(0.31, 0.0, 3),
                                             CouplingTopology::transverse());
  const Eigen::Matrix3d el = electronic_hamiltonian(line1(), CouplingTopology::transverse());
  const BasisIndex& b = h.basis;
  for (int i = 0; i < h.dim(); ++i) {
    for (int j = 0; j < h.dim(); ++j) {
      const auto si = b.decode(i), sj = b.decode(j);
      Complex expect = 0.0;
      if (si.n == sj.n && si.m == sj.m) {
        expect = el(si.site, sj.site);
        if (i == j) expect += 0.52 * si.n + 0.31 * si.m;
      }
      CHECK(std::abs(h.matrix(i, j) - expect) <= 1e-15);
    }
  }
}

TEST_CASE("line-1 preset matrix entries") {
  const Preset p = preset(PresetName::IonTrapLine1);
  const auto h = build_effective_hamiltonian(p.trimer, p.mode_a, p.mode_b, CouplingTopology::transverse());
  CHECK(h.dim() == 675);
  CHECK(h.is_hermitian);
  const BasisIndex& b = h.basis;
  CHECK(h.matrix(b.flat(2, 0, 0), b.flat(2, 0, 0)).real() == doctest::Approx(0.5));
  CHECK(h.matrix(b.flat(1, 0, 0), b.flat(1, 1, 0)).real() == doctest::Approx(p.mode_a.kappa));
  CHECK(h.matrix(b.flat(0, 0, 0), b.flat(0, 1, 0)).real() == doctest::Approx(-p.mode_a.kappa));
  CHECK(h.matrix(b.flat(2, 0, 0), b.flat(2, 0, 1)).real() == doctest::Approx(p.mode_b.kappa));
  CHECK(h.matrix(b.flat(0, 0, 0), b.flat(1, 0, 0)).real() == doctest::Approx(0.1));
}

TEST_CASE("zeta changes only cross-coupling entries and enters affinely") {
  const auto t = line1();
  const auto a = mode(0.4, 0.05, 4), bm = mode(0.7, 0.03, 3);
  const auto h0 = build_effective_hamiltonian(t, a, bm, CouplingTopology::transverse(0.0));
  const auto h1 = build_effective_hamiltonian(t, a, bm, CouplingTopology::transverse(1.0));
  const auto hh = build_effective_hamiltonian(t, a, bm, CouplingTopology::transverse(0.5));
  CHECK(max_abs(hh.matrix - 0.5 * h0.matrix - 0.5 * h1.matrix) < 1e-12);

  const BasisIndex& b = h0.basis;
  const ComplexMatrix d = h1.matrix - h0.matrix;
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j) {
      if (std::abs(d(i, j)) == 0.0) continue;
      const auto si = b.decode(i), sj = b.decode(j);
      REQUIRE(si.site == sj.site);
      const bool a_step = std::abs(si.n - sj.n) == 1 && si.m == sj.m;
      const bool b_step = std::abs(si.m - sj.m) == 1 && si.n == sj.n;
      // mode a lives on site 2, mode b on site 3; the difference sits on the other sites
      if (a_step) CHECK(si.site != 1);
      else if (b_step) CHECK(si.site != 2);
      else FAIL("unexpected entry in the zeta difference");
    }
}

TEST_CASE("hermitian without dissipation for presets and random draws") {
  for (auto name : {PresetName::IonTrapLine1, PresetName::ScaleUpLine2, PresetName::FmoLine3}) {
    Preset p = preset(name);
    p.mode_a.n_fock = p.mode_b.n_fock = 5;
    const auto h = build_effective_hamiltonian(p.trimer, p.mode_a, p.mode_b, CouplingTopology::transverse());
    CHECK(max_abs(h.matrix - h.matrix.adjoint()) < 1e-12);
  }
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    TrimerParams t{{u(rng), u(rng), u(rng)}, u(rng), u(rng), u(rng)};
    const auto topo = k % 2 ? CouplingTopology::longitudinal() : CouplingTopology::transverse(0.5 * (1 + u(rng)));
    const auto h = build_effective_hamiltonian(t, mode(1.0 + u(rng), 0.5 + 0.5 * u(rng), 4),
                                               mode(1.0 + u(rng), 0.5 + 0.5 * u(rng), 3), topo);
    CHECK(max_abs(h.matrix - h.matrix.adjoint()) < 1e-12);
  }
}

TEST_CASE("dissipation gives eigenvalues in the lower half plane") {
  DissipationSpec d{{0.002, 0.0005, 0.001}};
  const auto h = build_effective_hamiltonian(line1(), mode(0.52, 0.1, 4), mode(0.52, 0.1, 4),
                                             CouplingTopology::transverse(), d);
  CHECK_FALSE(h.is_hermitian);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(h.matrix);
  CHECK(es.eigenvalues().imag().maxCoeff() <= 1e-10);
  CHECK(h.matrix(0, 0).imag() == doctest::Approx(-0.001));
}

TEST_CASE("zero coupling commutes with both number operators") {
  const auto h = build_effective_hamiltonian(line1(), mode(0.52, 0.0, 5), mode(0.8, 0.0, 4),
                                             CouplingTopology::transverse());
  const BasisIndex& b = h.basis;
  Eigen::VectorXd na(h.dim()), nb(h.dim());
  for (int i = 0; i < h.dim(); ++i) {
    na(i) = b.decode(i).n;
    nb(i) = b.decode(i).m;
  }
  const ComplexMatrix ca = h.matrix * na.asDiagonal() - na.asDiagonal() * h.matrix;
  const ComplexMatrix cb = h.matrix * nb.asDiagonal() - nb.asDiagonal() * h.matrix;
  CHECK(ca.norm() < 1e-12);
  CHECK(cb.norm() < 1e-12);
}

TEST_CASE("longitudinal c mode does not touch the bridge site") {
  TrimerParams t = line1();
  t.j13 = 0.05;
  const auto h = build_effective_hamiltonian(t, mode(0.6, 0.1, 5), mode(0.9, 0.1, 4), CouplingTopology::longitudinal());
  const BasisIndex& b = h.basis;
  for (int n = 0; n + 1 < 5; ++n)
    for (int m = 0; m < 4; ++m) {
      CHECK(h.matrix(b.flat(1, n, m), b.flat(1, n + 1, m)) == Complex(0.0));
      CHECK(h.matrix(b.flat(0, n, m), b.flat(0, n + 1, m)).real() == doctest::Approx(0.2 * std::sqrt(n + 1.0)));
    }
  CHECK(h.matrix(b.flat(1, 0, 0), b.flat(1, 0, 1)).real() == doctest::Approx(-0.4));
  CHECK(h.matrix(b.flat(0, 0, 0), b.flat(2, 0, 0)).real() == doctest::Approx(0.05));
  // site energies enter halved
  CHECK(h.matrix(b.flat(2, 0, 0), b.flat(2, 0, 0)).real() == doctest::Approx(0.25));
}

TEST_CASE("dimension cap raises a size error") {
  BuildOptions o;
  o.max_dim = 100;
  CHECK_THROWS_AS(build_effective_hamiltonian(line1(), mode(1, 0.1, 6), mode(1, 0.1, 6), CouplingTopology::transverse(), {}, o),
                  SizeError);
  CHECK_NOTHROW(build_effective_hamiltonian(line1(), mode(1, 0.1, 5), mode(1, 0.1, 6), CouplingTopology::transverse(), {}, o));
}

TEST_CASE("invalid parameters are rejected") {
  const auto t = line1();
  CHECK_THROWS_AS(build_effective_hamiltonian(t, mode(-1, 0.1, 4), mode(1, 0.1, 4), CouplingTopology::transverse()), std::invalid_argument);
  CHECK_THROWS_AS(build_effective_hamiltonian(t, mode(1, -0.1, 4), mode(1, 0.1, 4), CouplingTopology::transverse()), std::invalid_argument);
  CHECK_THROWS_AS(build_effective_hamiltonian(t, mode(1, 0.1, 1), mode(1, 0.1, 4), CouplingTopology::transverse()), std::invalid_argument);
  CHECK_THROWS_AS(build_effective_hamiltonian(t, mode(1, 0.1, 4), mode(1, 0.1, 4), CouplingTopology::transverse(1.5)), std::invalid_argument);
  CHECK_THROWS_AS(build_effective_hamiltonian(t, mode(1, 0.1, 4), mode(1, 0.1, 4), CouplingTopology::transverse(), DissipationSpec{{-1, 0, 0}}),
                  std::invalid_argument);
  TrimerParams bad = t;
  bad.j12 = std::nan("");
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("basis indexing is bijective") {
  const BasisIndex b(4, 3);
  CHECK(b.dim() == 36);
  for (int i = 0; i < b.dim(); ++i) {
    const auto s = b.decode(i);
    CHECK(b.flat(s.site, s.n, s.m) == i);
  }
  CHECK(b.flat(1, 2, 1) == 1 * 12 + 2 * 3 + 1);
}

TEST_CASE("presets and symmetry predicate") {
  const Preset p1 = preset(PresetName::IonTrapLine1);
  CHECK(p1.trimer.omega_tilde[0] == -0.5);
  CHECK(p1.trimer.j12 == 0.1);
  CHECK(p1.mode_a.nu == 0.52);
  CHECK(p1.mode_a.kappa == 0.1);
  CHECK(p1.mode_a.kbt == 0.72);
  CHECK(p1.unit == EnergyUnit::RadPerMs);
  CHECK(p1.trimer.is_symmetric());

  const Preset p3 = preset(PresetName::FmoLine3);
  CHECK(p3.trimer.omega_tilde[2] == 138.6);
  CHECK(p3.trimer.j12 == -5.9);
  CHECK(p3.trimer.j23 == -13.7);
  CHECK(p3.mode_a.nu == 180.0);
  CHECK(p3.mode_a.kappa == 42.2);
  CHECK(p3.mode_a.kbt == 200.0);
  CHECK(p3.unit == EnergyUnit::InverseCm);
  CHECK_FALSE(p3.trimer.is_symmetric());

  const Preset p2 = preset(PresetName::ScaleUpLine2);
  CHECK(p2.trimer.j12 == 27.72);
  CHECK(p2.mode_b.nu == 144.0);
  CHECK(p2.mode_b.kappa == 27.72);

  CHECK(parse_preset_name("line3") == PresetName::FmoLine3);
  CHECK_THROWS_AS(parse_preset_name("line9"), std::invalid_argument);
}

TEST_CASE("gap31 of the symmetric trimer") {
  CHECK(gap31(line1()) == doctest::Approx(2.0 * std::sqrt(0.27)).epsilon(1e-12));
}

}
