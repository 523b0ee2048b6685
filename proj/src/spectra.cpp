#include "vaet/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include <omp.h>

namespace vaet {

void AxisRange::validate(const std::string& name) const {
  if (!(step > 0.0)) throw std::invalid_argument(name + ": step must be positive");
  if (!(start > 0.0)) throw std::invalid_argument(name + ": frequencies must be positive");
  if (!(stop >= start)) throw std::invalid_argument(name + ": empty range");
}

std::vector<double> AxisRange::values() const {
  const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> v(n + 1);
  for (long k = 0; k <= n; ++k) v[k] = start + k * step;
  return v;
}

void ScanConfig::validate() const {
  nu_a.validate("nu_a");
  nu_b.validate("nu_b");
  if (!(t_final > 0.0)) throw std::invalid_argument("scan: t_final must be positive");
  if (!(sample_step > 0.0)) throw std::invalid_argument("scan: sample_step must be positive");
  base.trimer.validate();
  base.topology.validate();
  base.dissipation.validate();
}

std::vector<TransferTrace> scan_points(const ScanConfig& config,
                                       const std::vector<std::pair<double, double>>& points) {
  config.validate();
  const std::vector<double> times = time_grid(config.t_final, config.sample_step);
  const int workers = std::max(1, config.workers > 0 ? config.workers : default_workers());
  const long n = static_cast<long>(points.size());
  std::vector<TransferTrace> out(n);
  std::vector<std::string> errors(n);
  PropagationOptions popt;
  popt.workers = 1;

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
  for (long k = 0; k < n; ++k) {
    try {
      SystemConfig c = config.base;
      c.mode_a.nu = points[k].first;
      c.mode_b.nu = points[k].second;
      out[k] = run_trace(c, times, popt).trace;
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (long k = 0; k < n; ++k) {
    if (!errors[k].empty()) {
      std::ostringstream os;
      os << "scan point (nu_a=" << points[k].first << ", nu_b=" << points[k].second << ") failed: " << errors[k];
      throw ScanError(os.str(), points[k].first, points[k].second);
    }
  }
  return out;
}

SpectrumGrid scan_2d(const ScanConfig& config, const ScanProgress& progress) {
  config.validate();
  SpectrumGrid g;
  g.nu_a = config.nu_a.values();
  g.nu_b = config.nu_b.values();
  g.delta31 = gap31(config.base.trimer, config.base.topology);
  const int na = static_cast<int>(g.nu_a.size());
  const int nb = static_cast<int>(g.nu_b.size());
  g.max_p3.resize(na, nb);
  g.int_p3.resize(na, nb);

  const std::vector<double> times = time_grid(config.t_final, config.sample_step);
  const int workers = std::max(1, config.workers > 0 ? config.workers : default_workers());
  const long total = static_cast<long>(na) * nb;
  std::vector<std::string> errors(total);
  std::atomic<std::size_t> done{0};
  PropagationOptions popt;
  popt.workers = 1;

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
  for (long k = 0; k < total; ++k) {
    const int i = static_cast<int>(k / nb);
    const int j = static_cast<int>(k % nb);
    try {
      SystemConfig c = config.base;
      c.mode_a.nu = g.nu_a[i];
      c.mode_b.nu = g.nu_b[j];
      const TransferTrace tr = run_trace(c, times, popt).trace;
      g.max_p3(i, j) = tr.max_p3;
      g.int_p3(i, j) = tr.int_p3;
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
    const std::size_t d = ++done;
    if (progress) {
#pragma omp critical(vaet_scan_progress)
      progress(d, static_cast<std::size_t>(total));
    }
  }
  for (long k = 0; k < total; ++k) {
    if (!errors[k].empty()) {
      const double a = g.nu_a[k / nb], b = g.nu_b[k % nb];
      std::ostringstream os;
      os << "scan point (nu_a=" << a << ", nu_b=" << b << ") failed: " << errors[k];
      throw ScanError(os.str(), a, b);
    }
  }
  return g;
}

namespace {

int nearest_index(const std::vector<double>& axis, double value) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(axis.size()); ++k)
    if (std::abs(axis[k] - value) < std::abs(axis[best] - value)) best = k;
  return best;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  }
  return m;
}

struct Locus {
  FeatureKind kind;
  int order;
  double c;  // 1 / order

  double distance(double x, double y) const {
    switch (kind) {
      case FeatureKind::SingleModeA: return std::abs(x - c);
      case FeatureKind::SingleModeB: return std::abs(y - c);
      case FeatureKind::CooperativeSum: return std::abs(x + y - c) / std::sqrt(2.0);
      case FeatureKind::HeteroDiffAB: return std::abs(x - y - c) / std::sqrt(2.0);
      case FeatureKind::HeteroDiffBA: return std::abs(y - x - c) / std::sqrt(2.0);
    }
    return 0.0;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(6);
    switch (kind) {
      case FeatureKind::SingleModeA: os << "nu_a/D31 = " << c; break;
      case FeatureKind::SingleModeB: os << "nu_b/D31 = " << c; break;
      case FeatureKind::CooperativeSum: os << "(nu_a + nu_b)/D31 = " << c; break;
      case FeatureKind::HeteroDiffAB: os << "(nu_a - nu_b)/D31 = " << c; break;
      case FeatureKind::HeteroDiffBA: os << "(nu_b - nu_a)/D31 = " << c; break;
    }
    return os.str();
  }
};

double axis_step(const std::vector<double>& v, double scale) {
  if (v.size() < 2) return 0.0;
  return (v[1] - v[0]) / scale;
}

}  // namespace

Profile slice(const SpectrumGrid& grid, Axis fixed_axis, double at) {
  Profile p;
  p.fixed_axis = fixed_axis;
  const bool fix_b = fixed_axis == Axis::NuB;
  const auto& fixed = fix_b ? grid.nu_b : grid.nu_a;
  const auto& free = fix_b ? grid.nu_a : grid.nu_b;
  if (fixed.empty()) throw std::invalid_argument("slice: empty grid");
  const double lo = fixed.front() / grid.delta31, hi = fixed.back() / grid.delta31;
  const double half = 0.5 * std::max(axis_step(fixed, grid.delta31), 0.0) + 1e-12;
  if (at < lo - half || at > hi + half) throw std::invalid_argument("slice: coordinate outside the grid");
  const int k = nearest_index(fixed, at * grid.delta31);
  p.fixed_value = fixed[k] / grid.delta31;
  for (std::size_t i = 0; i < free.size(); ++i) {
    p.coord.push_back(free[i] / grid.delta31);
    p.max_p3.push_back(fix_b ? grid.max_p3(i, k) : grid.max_p3(k, i));
    p.int_p3.push_back(fix_b ? grid.int_p3(i, k) : grid.int_p3(k, i));
  }
  return p;
}

SpectrumGrid transpose(const SpectrumGrid& grid) {
  SpectrumGrid t;
  t.nu_a = grid.nu_b;
  t.nu_b = grid.nu_a;
  t.delta31 = grid.delta31;
  t.max_p3 = grid.max_p3.transpose();
  t.int_p3 = grid.int_p3.transpose();
  return t;
}

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::SingleModeA: return "SingleModeA";
    case FeatureKind::SingleModeB: return "SingleModeB";
    case FeatureKind::CooperativeSum: return "CooperativeSum";
    case FeatureKind::HeteroDiffAB: return "HeteroDiffAB";
    case FeatureKind::HeteroDiffBA: return "HeteroDiffBA";
  }
  return "?";
}

const Feature* FeatureSet::find(FeatureKind kind, int order) const {
  for (const Feature& f : features)
    if (f.kind == kind && f.order == order) return &f;
  return nullptr;
}

bool FeatureSet::detected(FeatureKind kind, int order) const {
  const Feature* f = find(kind, order);
  return f != nullptr && f->detected;
}

FeatureSet classify_features(const SpectrumGrid& grid, const FeatureOptions& options) {
  FeatureSet fs;
  fs.threshold = options.threshold;
  const double sx = axis_step(grid.nu_a, grid.delta31);
  const double sy = axis_step(grid.nu_b, grid.delta31);
  fs.band = options.band > 0.0 ? options.band : 0.6 * std::max(sx, sy);
  if (!(fs.band > 0.0)) throw std::invalid_argument("classify_features: grid too small to infer a band");
  const double band = fs.band;

  std::vector<Locus> loci;
  for (int k = 1; k <= options.max_single_order; ++k) {
    loci.push_back({FeatureKind::SingleModeA, k, 1.0 / k});
    loci.push_back({FeatureKind::SingleModeB, k, 1.0 / k});
  }
  for (int m = 1; m <= options.max_pair_order; ++m) {
    loci.push_back({FeatureKind::CooperativeSum, m, 1.0 / m});
    loci.push_back({FeatureKind::HeteroDiffAB, m, 1.0 / m});
    loci.push_back({FeatureKind::HeteroDiffBA, m, 1.0 / m});
  }

  const int na = static_cast<int>(grid.nu_a.size());
  const int nb = static_cast<int>(grid.nu_b.size());
  // Which loci claim each grid point.
  std::vector<std::vector<int>> owners(static_cast<std::size_t>(na) * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      for (std::size_t l = 0; l < loci.size(); ++l)
        if (loci[l].distance(grid.norm_a(i), grid.norm_b(j)) <= band) owners[i * nb + j].push_back(static_cast<int>(l));

  for (std::size_t l = 0; l < loci.size(); ++l) {
    const Locus& lc = loci[l];
    Feature f;
    f.kind = lc.kind;
    f.order = lc.order;
    f.locus = lc.describe();
    f.peak_center = std::numeric_limits<double>::quiet_NaN();

    std::vector<double> pure, all, strip;
    for (int i = 0; i < na; ++i) {
      for (int j = 0; j < nb; ++j) {
        const double d = lc.distance(grid.norm_a(i), grid.norm_b(j));
        const auto& own = owners[i * nb + j];
        const double v = grid.max_p3(i, j);
        if (d <= band) {
          all.push_back(v);
          if (own.size() == 1) pure.push_back(v);
        } else if (d <= 3.0 * band && own.empty()) {
          strip.push_back(v);
        }
      }
    }
    const auto& sig = pure.empty() ? all : pure;
    f.band_points = static_cast<int>(sig.size());
    f.background_points = static_cast<int>(strip.size());
    if (!sig.empty() && !strip.empty()) {
      double s = 0.0;
      for (double v : sig) s += v;
      f.signal = s / sig.size();
      f.background = median(strip);
      f.prominence = f.background > 0.0 ? f.signal / f.background : std::numeric_limits<double>::infinity();
      f.detected = f.prominence > options.threshold;
    }

    if (lc.kind == FeatureKind::SingleModeA || lc.kind == FeatureKind::SingleModeB) {
      const bool is_a = lc.kind == FeatureKind::SingleModeA;
      const double width = 0.3 * (lc.c - 1.0 / (lc.order + 1));
      const int n_along = is_a ? na : nb;
      const int n_across = is_a ? nb : na;
      double best = -1.0;
      for (int u = 0; u < n_along; ++u) {
        const double x = is_a ? grid.norm_a(u) : grid.norm_b(u);
        if (std::abs(x - lc.c) > width) continue;
        double s = 0.0;
        int cnt = 0;
        for (int w = 0; w < n_across; ++w) {
          const int i = is_a ? u : w, j = is_a ? w : u;
          const auto& own = owners[i * nb + j];
          bool other = false;
          for (int o : own)
            if (loci[o].kind != lc.kind) other = true;
          if (other) continue;
          s += grid.max_p3(i, j);
          ++cnt;
        }
        if (cnt > 0 && s / cnt > best) {
          best = s / cnt;
          f.peak_center = x;
        }
      }
    }
    fs.features.push_back(f);
  }
  return fs;
}

}  // namespace vaet
