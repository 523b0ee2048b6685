#include "doctest.h"

#include <cmath>
#include <numeric>

#include "vaet/fock.hpp"

using namespace vaet;

TEST_SUITE("fock") {

TEST_CASE("ladder and number operators") {
  const auto f = FockOperators::make(6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(f.annihilate(i, j) == (j == i + 1 ? std::sqrt(double(j)) : 0.0));
  CHECK((f.number - f.annihilate.transpose() * f.annihilate).norm() == 0.0);
  for (int n = 0; n < 6; ++n) CHECK(f.number(n, n) == doctest::Approx(n));
}

TEST_CASE("truncated commutator defect sits in the last entry only") {
  const int n = 7;
  const auto f = FockOperators::make(n);
  const Eigen::MatrixXd c = f.annihilate * f.create() - f.create() * f.annihilate;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double expect = i == j ? 1.0 : 0.0;
      if (i == n - 1 && j == n - 1) expect = 1.0 - n;
      CHECK(c(i, j) == doctest::Approx(expect));
    }
}

TEST_CASE("zero temperature is the ground state") {
  const auto s = thermal_state(0.52, 0.0, 10);
  CHECK(s.probabilities[0] == 1.0);
  for (int k = 1; k < 10; ++k) CHECK(s.probabilities[k] == 0.0);
  CHECK(mean_occupancy(0.52, 0.0) == 0.0);
}

TEST_CASE("thermal populations: geometric, normalized, small tail") {
  const double x = 0.52 / 1.5;
  const auto s = thermal_state(0.52, 1.5, 15);
  const double sum = std::accumulate(s.probabilities.begin(), s.probabilities.end(), 0.0);
  CHECK(std::abs(sum - 1.0) < 1e-14);
  const double untruncated_p0 = 1.0 - std::exp(-x);
  const double tail = std::exp(-15 * x);
  CHECK(tail < 1e-2);
  CHECK(s.probabilities[0] == doctest::Approx(untruncated_p0 / (1.0 - tail)).epsilon(1e-13));
  for (int k = 1; k < 15; ++k) CHECK(s.probabilities[k] / s.probabilities[k - 1] == doctest::Approx(std::exp(-x)));
}

TEST_CASE("truncated mean near one for nu=1.04, kbt=1.5") {
  CHECK(std::abs(thermal_state(1.04, 1.5, 15).mean() - 1.0) < 0.02);
}

TEST_CASE("Bose-Einstein occupancies") {
  CHECK(mean_occupancy(0.52, 1.5) == doctest::Approx(2.413).epsilon(1e-3));
  CHECK(mean_occupancy(1.04, 0.5) == doctest::Approx(0.143).epsilon(2e-3));
  CHECK(mean_occupancy(0.52, 0.5) == doctest::Approx(0.548).epsilon(2e-3));
  CHECK(mean_occupancy(1.04, 1.5) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("truncated mean approaches the untruncated one from below") {
  const double be = mean_occupancy(0.52, 1.5);
  double prev = 0.0;
  for (int n : {5, 10, 15, 30}) {
    const double m = thermal_state(0.52, 1.5, n).mean();
    CHECK(m <= be);
    CHECK(m > prev);
    prev = m;
  }
  CHECK(be - prev < 0.05);
}

TEST_CASE("initial density weights") {
  const auto cold = initial_density(1, thermal_state(0.52, 0.0, 5), thermal_state(0.52, 0.0, 5));
  REQUIRE(cold.size() == 1);
  CHECK(cold.index[0] == cold.basis.flat(0, 0, 0));
  CHECK(cold.weight[0] == 1.0);

  const auto sa = thermal_state(0.52, 1.5, 15);
  const auto hot = initial_density(1, sa, sa);
  CHECK(hot.total() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hot.weight[0] == doctest::Approx(sa.probabilities[0] * sa.probabilities[0]));
  CHECK(std::is_sorted(hot.index.begin(), hot.index.end()));

  const auto on3 = initial_density(3, thermal_state(0.3, 0.7, 4), thermal_state(0.9, 0.2, 3));
  CHECK(on3.total() == doctest::Approx(1.0).epsilon(1e-14));
  for (int i : on3.index) CHECK(on3.basis.decode(i).site == 2);
  CHECK_THROWS_AS(initial_density(4, sa, sa), std::invalid_argument);
}

}
