#pragma once

// 2D VAET spectra: Max/Int of P3 over a (nu_a, nu_b) grid, 1D slices, and a
// band/background classifier for the resonance loci
//   nu_a = D31/k, nu_b = D31/k, nu_a + nu_b = D31/m, nu_a - nu_b = +-D31/m.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vaet/dynamics.hpp"

namespace vaet {

struct AxisRange {
  double start = 0.02;
  double stop = 1.30;
  double step = 0.01;

  void validate(const std::string& name) const;
  std::vector<double> values() const;
};

struct ScanConfig {
  AxisRange nu_a;
  AxisRange nu_b;
  SystemConfig base;  // mode frequencies are replaced per point
  double t_final = 400.0;
  double sample_step = 0.5;
  int workers = 0;  // 0: default_workers()

  void validate() const;
};

/// Raised when one grid point fails; carries the offending frequencies.
class ScanError : public std::runtime_error {
 public:
  ScanError(const std::string& what, double nu_a, double nu_b)
      : std::runtime_error(what), nu_a_(nu_a), nu_b_(nu_b) {}
  double nu_a() const { return nu_a_; }
  double nu_b() const { return nu_b_; }

 private:
  double nu_a_, nu_b_;
};

struct SpectrumGrid {
  std::vector<double> nu_a;  // rad/ms
  std::vector<double> nu_b;
  double delta31 = 1.0;
  Eigen::MatrixXd max_p3;  // (i, j) <-> (nu_a[i], nu_b[j])
  Eigen::MatrixXd int_p3;

  double norm_a(int i) const { return nu_a[i] / delta31; }
  double norm_b(int j) const { return nu_b[j] / delta31; }
};

using ScanProgress = std::function<void(std::size_t done, std::size_t total)>;

SpectrumGrid scan_2d(const ScanConfig& config, const ScanProgress& progress = {});

/// Evaluates an explicit list of (nu_a, nu_b) points with the scan machinery.
std::vector<TransferTrace> scan_points(const ScanConfig& config,
                                       const std::vector<std::pair<double, double>>& points);

enum class Axis { NuA, NuB };

struct Profile {
  Axis fixed_axis = Axis::NuB;
  double fixed_value = 0.0;      // actual normalized coordinate of the chosen grid line
  std::vector<double> coord;     // normalized coordinate along the profile
  std::vector<double> max_p3;
  std::vector<double> int_p3;
};

/// Nearest-grid-line cut at normalized coordinate `at` of `fixed_axis`.
Profile slice(const SpectrumGrid& grid, Axis fixed_axis, double at);

SpectrumGrid transpose(const SpectrumGrid& grid);

enum class FeatureKind { SingleModeA, SingleModeB, CooperativeSum, HeteroDiffAB, HeteroDiffBA };

std::string to_string(FeatureKind kind);

struct Feature {
  FeatureKind kind = FeatureKind::SingleModeA;
  int order = 1;
  std::string locus;
  double signal = 0.0;      // mean in-band Max[P3]
  double background = 0.0;  // median of the neighbouring strip
  double prominence = 0.0;  // signal / background
  int band_points = 0;
  int background_points = 0;
  bool detected = false;
  double peak_center = 0.0;  // normalized; single-mode lines only, NaN otherwise
};

struct FeatureOptions {
  int max_single_order = 6;
  int max_pair_order = 2;
  double band = 0.0;  // normalized half-width; 0 picks 0.6 x the coarser grid step
  double threshold = 1.5;
};

struct FeatureSet {
  double band = 0.0;
  double threshold = 0.0;
  std::vector<Feature> features;

  const Feature* find(FeatureKind kind, int order) const;
  bool detected(FeatureKind kind, int order) const;
};

FeatureSet classify_features(const SpectrumGrid& grid, const FeatureOptions& options = {});

}  // namespace vaet
