#include "doctest.h"

#include <cmath>
#include <map>
#include <random>

#include "vaet/fock.hpp"
#include "vaet/perturb.hpp"

using namespace vaet;

namespace {

const double kOm = std::sqrt(0.27);
const double kD31 = 2.0 * kOm;

SymmetricEigenSystem sys() { return symmetric_eigensystem(0.5, 0.1); }

PerturbModes modes(double kappa, double nu_a, double nu_b, double kbt) {
  return PerturbModes::from_specs({nu_a, kappa, kbt, 15}, {nu_b, kappa, kbt, 15});
}

// Cumulative-trapezoid evaluation of the time-ordered integral, latest frequency first.
Complex quadrature(const std::vector<double>& omegas, double t, int steps) {
  const double h = t / steps;
  std::vector<Complex> inner(steps + 1, Complex(1.0));
  for (int k = static_cast<int>(omegas.size()) - 1; k >= 0; --k) {
    std::vector<Complex> next(steps + 1, Complex(0.0));
    for (int i = 1; i <= steps; ++i) {
      const Complex f0 = std::exp(Complex(0.0, omegas[k] * (i - 1) * h)) * inner[i - 1];
      const Complex f1 = std::exp(Complex(0.0, omegas[k] * i * h)) * inner[i];
      next[i] = next[i - 1] + 0.5 * h * (f0 + f1);
    }
    inner.swap(next);
  }
  return inner[steps];
}

Eigen::MatrixXd thermal_rho(double n_mean_nu, double kbt, int n) {
  const auto s = thermal_state(n_mean_nu, kbt, n);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) rho(k, k) = s.probabilities[k];
  return rho;
}

double brute_force(const std::vector<bool>& creation, double nu, double kbt, int n) {
  const auto f = FockOperators::make(n);
  Eigen::MatrixXd op = Eigen::MatrixXd::Identity(n, n);
  for (bool c : creation) op = op * (c ? f.create() : f.annihilate);
  return (thermal_rho(nu, kbt, n) * op).trace();
}

double term_at(const PerturbResult& r, const std::string& name, std::size_t k) { return r.term(name)[k]; }

}  // namespace

TEST_SUITE("perturb") {

TEST_CASE("symmetric eigensystem") {
  const auto s = sys();
  CHECK(s.omega_cap == doctest::Approx(0.52).epsilon(1e-3));
  CHECK(s.coef_beta == doctest::Approx(0.19245).epsilon(1e-4));
  CHECK(std::abs(s.coef_alpha * s.coef_alpha + s.coef_beta * s.coef_beta + s.coef_gamma * s.coef_gamma - 1.0) < 1e-12);
  const Eigen::Matrix3d h = electronic_hamiltonian(preset(PresetName::IonTrapLine1).trimer, CouplingTopology::transverse());
  for (int k = 0; k < 3; ++k) CHECK((h * s.eigvecs.col(k) - s.lambdas(k) * s.eigvecs.col(k)).norm() < 1e-10);
  CHECK((s.eigvecs.transpose() * s.eigvecs - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(s.eigvecs(0, 0) == doctest::Approx(s.coef_alpha));

  const auto weak = symmetric_eigensystem(0.5, 1e-5);
  CHECK(weak.coef_alpha == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(weak.coef_beta) < 1e-4);
  CHECK(std::abs(weak.coef_gamma) < 1e-4);

  CHECK_THROWS_AS(symmetric_eigensystem(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(symmetric_eigensystem(-0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(symmetric_eigensystem(preset(PresetName::FmoLine3).trimer), std::invalid_argument);
  TrimerParams shifted{{0.5, 1.0, 1.5}, 0.1, 0.1, 0.0};
  CHECK(symmetric_eigensystem(shifted).omega_cap == doctest::Approx(s.omega_cap));
}

TEST_CASE("coupling coefficients: closed forms against conjugation") {
  const auto s = sys();
  const auto c = coupling_coefficients(s);
  CHECK(c.a(0, 2) == doctest::Approx(-0.0740741).epsilon(1e-5));
  CHECK(c.b(0, 2) == doctest::Approx(0.0370370).epsilon(1e-5));
  CHECK(c.a(0, 2) / c.b(0, 2) == doctest::Approx(-2.0));
  const auto n = coupling_coefficients_numeric(s, CouplingTopology::transverse());
  CHECK((c.a - n.a).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((c.b - n.b).cwiseAbs().maxCoeff() < 1e-10);
  for (double j : {0.05, 0.3, 0.9}) {
    const auto s2 = symmetric_eigensystem(0.7, j);
    const auto c2 = coupling_coefficients(s2);
    const auto n2 = coupling_coefficients_numeric(s2, CouplingTopology::transverse());
    CHECK((c2.a - n2.a).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((c2.b - n2.b).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(c2.a(0, 2) == doctest::Approx(-2 * j * j / (0.49 + 2 * j * j)));
  }
}

TEST_CASE("time-ordered integrals against quadrature") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int order = 1; order <= 4; ++order) {
    std::vector<double> w(order);
    for (double& x : w) x = u(rng);
    const double t = 7.3;
    CHECK(std::abs(nested_integral(w, t) - quadrature(w, t, 40000)) < 1e-6);
  }
  CHECK(std::abs(nested_integral({0.3, -0.3, 0.0}, 5.0) - quadrature({0.3, -0.3, 0.0}, 5.0, 40000)) < 1e-6);
  CHECK(std::abs(nested_integral({0.0, 0.0}, 4.0) - 8.0) < 1e-13);
}

TEST_CASE("small-frequency branch is continuous") {
  const double t = 3.0;
  for (double x : {1e-6 * (1 - 1e-3), 1e-6, 1e-6 * (1 + 1e-3)}) {
    const double w = x / t;
    const Complex closed = (std::exp(Complex(0.0, w * t)) - 1.0) / Complex(0.0, w);
    CHECK(std::abs(nested_integral({w}, t) - closed) < 1e-8);
    CHECK(std::abs(nested_integral({w}, t) - t) < 1e-5);
  }
  for (double x : {0.999, 1.0, 1.001})
    CHECK(std::abs(nested_integral({x / 2.0, 0.0}, 2.0) - quadrature({x / 2.0, 0.0}, 2.0, 20000)) < 1e-8);
  CHECK(std::abs(divided_difference_exp({Complex(0.0, 0.0), Complex(0.0, 1.0)}) -
                 (std::exp(Complex(0.0, 1.0)) - 1.0) / Complex(0.0, 1.0)) < 1e-14);
}

TEST_CASE("resonant amplitudes") {
  const auto s = sys();
  const auto c = coupling_coefficients(s);
  const double kappa = 0.01, t = 50.0;
  auto m = modes(kappa, kD31, 0.3, 1.5);
  const std::vector<Leg> one{{ModeLabel::A, -1, 2, 0}};
  const Complex w1 = amplitude(one, t, s, c, m);
  CHECK(std::abs(w1 - Complex(0.0, -kappa * c.a(2, 0) * t)) < 1e-12);
  CHECK(std::abs(amplitude(one, 0.0, s, c, m)) == 0.0);

  auto off = modes(kappa, 0.8, 0.3, 1.5);
  for (double tt : {1.0, 10.0, 100.0}) CHECK(std::abs(interaction_w(one, tt, s, c, off)) <= kappa * std::abs(c.a(2, 0)) * tt + 1e-15);

  auto m2 = modes(kappa, kOm, 0.3, 1.5);
  const std::vector<Leg> two{{ModeLabel::A, -1, 2, 1}, {ModeLabel::A, -1, 1, 0}};
  const double w2 = std::norm(interaction_w(two, t, s, c, m2));
  const double expect = std::pow(kappa, 4) * std::pow(c.a(2, 1) * c.a(1, 0), 2) * std::pow(t, 4) / 4.0;
  CHECK(w2 == doctest::Approx(expect).epsilon(1e-10));

  CHECK_THROWS_AS(interaction_w(std::vector<Leg>(5, one[0]), t, s, c, m), std::invalid_argument);
}

TEST_CASE("Wick averages against truncated Fock traces") {
  const int n = 40;
  for (auto [nu, kbt] : {std::pair{0.52, 0.5}, std::pair{1.04, 1.5}, std::pair{0.52, 1.5}}) {
    const double nb = mean_occupancy(nu, kbt);
    const double tol = kbt == 1.5 && nu == 0.52 ? 1e-2 : 1e-9;
    auto near = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
    CHECK(near(wick_average({true, true, false, false}, nb), 2 * nb * nb));
    CHECK(near(wick_average({true, false, true, false}, nb), nb * (2 * nb + 1)));
    CHECK(near(wick_average({false, true}, nb), nb + 1));
    CHECK(wick_average({true, false, false}, nb) == 0.0);
    std::mt19937 rng(static_cast<unsigned>(nu * 100 + kbt * 10));
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<bool> ops;
      for (int k = 0; k < 4; ++k) ops.push_back(rng() % 2);
      CHECK(near(brute_force(ops, nu, kbt, n), wick_average(ops, nb)));
    }
    CHECK(near(brute_force({true, true, false, false}, nu, kbt, n), 2 * nb * nb));
  }
  const double na = 0.7, nb = 1.9;
  CHECK(thermal_average({{ModeLabel::A, true}, {ModeLabel::B, true}, {ModeLabel::A, false}, {ModeLabel::B, false}}, na, nb) ==
        doctest::Approx(na * nb));
  CHECK(thermal_average({{ModeLabel::A, false}, {ModeLabel::B, true}, {ModeLabel::A, true}, {ModeLabel::B, false}}, na, nb) ==
        doctest::Approx((na + 1) * nb));
}

TEST_CASE("zero coupling") {
  const auto s = sys();
  const auto c = coupling_coefficients(s);
  const auto times = time_grid(60.0, 0.5);
  const auto strong = p3_perturbative(s, c, modes(0.0, 0.5, 0.5, 1.5), times, Regime::StrongJ);
  const auto weak = p3_perturbative(s, c, modes(0.0, 0.5, 0.5, 1.5), times, Regime::WeakJ);
  const double r = std::pow(0.1 / kOm, 4);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double p0 = r * std::pow(std::cos(kOm * times[k]) - 1.0, 2);
    CHECK(std::abs(strong.trace.p3[k] - p0) < 1e-14);
    CHECK(std::abs(term_at(strong, "P3(0)", k) - p0) < 1e-14);
    CHECK(term_at(strong, "P3(2,1)", k) == 0.0);
    CHECK(weak.trace.p3[k] == 0.0);
  }
  CHECK(strong.warnings.empty());
}

TEST_CASE("fourth-order terms scale as kappa^4") {
  const auto s = sys();
  const auto c = coupling_coefficients(s);
  const auto times = time_grid(40.0, 2.0);
  for (Regime regime : {Regime::StrongJ, Regime::WeakJ}) {
    const auto r1 = p3_perturbative(s, c, modes(0.01, 0.6, 0.45, 1.5), times, regime);
    const auto r2 = p3_perturbative(s, c, modes(0.03, 0.6, 0.45, 1.5), times, regime);
    for (std::size_t t = 0; t < r1.term_names.size(); ++t) {
      const std::string& name = r1.term_names[t];
      const double power = name == "P3(0)" ? 0 : (name == "P3(1,1)" || name == "P3(1,2)" || name == "P3(1)") ? 2 : 4;
      const double scale = std::pow(3.0, power);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double a = r1.term_values[t][k] * scale, b = r2.term_values[t][k];
        CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(b), 1e-300));
      }
    }
  }
}

TEST_CASE("bridge mode one-phonon term is four times the acceptor mode term") {
  const auto s = sys();
  const auto c = coupling_coefficients(s);
  const auto times = time_grid(100.0, 1.0);
  auto only_a = modes(0.01, kD31, 0.3, 1.5);
  only_a.kappa_b = 0.0;
  auto only_b = modes(0.01, 0.3, kD31, 1.5);
  only_b.kappa_a = 0.0;
  const auto ra = p3_perturbative(s, c, only_a, times, Regime::WeakJ);
  const auto rb = p3_perturbative(s, c, only_b, times, Regime::WeakJ);
  for (std::size_t k = 10; k < times.size(); k += 10)
    CHECK(term_at(ra, "P3(1)", k) / term_at(rb, "P3(1)", k) == doctest::Approx(4.0).epsilon(1e-12));
  const double n = mean_occupancy(kD31, 1.5);
  CHECK(term_at(ra, "P3(1)", 50) == doctest::Approx(n * 1e-4 * c.a(0, 2) * c.a(0, 2) * 2500.0).epsilon(1e-10));
}

TEST_CASE("cooperative pathway cross terms") {
  const auto s = sys();
  const auto c = coupling_coefficients(s);
  const auto times = time_grid(100.0, 1.0);
  PerturbOptions o;
  o.probe_time = 100.0;
  for (auto [xa, xb] : {std::pair{0.5, 0.5}, std::pair{0.5, 0.3}, std::pair{0.45, 0.55}}) {
    const auto r = p3_perturbative(s, c, modes(0.01, xa * kD31, xb * kD31, 1.5), times, Regime::StrongJ, o);
    std::map<std::pair<std::string, std::string>, double> table;
    for (const auto& p : r.pathways)
      if (p.term == "P3(2,1)") table[{p.left, p.right}] = p.contribution;
    for (const auto& [key, v] : table) {
      const auto mirror = table.find({key.second, key.first});
      REQUIRE(mirror != table.end());
      CHECK(mirror->second == doctest::Approx(v).epsilon(1e-12));
    }
    const double ab = table[{"-a-b", "-a-b"}], ba = table[{"-b-a", "-b-a"}], cross = table[{"-a-b", "-b-a"}];
    CHECK(std::abs(cross) <= std::sqrt(ab * ba) * (1 + 1e-12));
  }
  const auto r = p3_perturbative(s, c, modes(0.01, 0.5 * kD31, 0.5 * kD31, 1.5), times, Regime::StrongJ, o);
  double cross = 0.0;
  for (const auto& p : r.pathways)
    if (p.term == "P3(2,1)" && p.left == "-a-b" && p.right == "-b-a") cross = p.contribution;
  CHECK(cross < 0.0);
  CHECK(std::abs(cross) > 1e-3 * r.term("P3(2,1)").back());
}

TEST_CASE("regime warnings and pathway table") {
  const auto c = coupling_coefficients(sys());
  const auto times = time_grid(10.0, 1.0);
  const auto strong = p3_perturbative(sys(), c, modes(0.08, 0.5, 0.5, 1.5), times, Regime::StrongJ);
  CHECK(strong.warnings.size() == 1);
  const auto big_j = symmetric_eigensystem(0.2, 0.3);
  const auto weak = p3_perturbative(big_j, coupling_coefficients(big_j), modes(0.01, 0.5, 0.5, 1.5), times, Regime::WeakJ);
  CHECK(weak.warnings.size() == 1);
  CHECK(strong.probe_time == 10.0);
  CHECK_FALSE(strong.pathways.empty());
  double sum = 0.0;
  for (const auto& p : strong.pathways)
    if (p.term == "P3(2,1)") sum += p.contribution;
  CHECK(sum == doctest::Approx(strong.term("P3(2,1)").back()).epsilon(1e-9));
  CHECK_THROWS_AS(strong.term("P3(9)"), std::out_of_range);
  CHECK(parse_regime("weak_j") == Regime::WeakJ);
  CHECK_THROWS_AS(parse_regime("medium"), std::invalid_argument);
}

}
