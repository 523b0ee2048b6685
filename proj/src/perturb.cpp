#include "vaet/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace vaet {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr int kSeriesTerms = 40;

const Complex kMinusI(0.0, -1.0);

Complex dd_series(const std::vector<Complex>& z) {
  const std::size_t np = z.size();
  Complex c(0.0);
  for (const Complex& x : z) c += x;
  c /= static_cast<double>(np);
  std::vector<Complex> w(np);
  for (std::size_t i = 0; i < np; ++i) w[i] = z[i] - c;

  // Complete homogeneous symmetric polynomials h_k(w_0..w_n), k = 0..K.
  std::vector<Complex> h(kSeriesTerms + 1, Complex(0.0));
  h[0] = 1.0;
  for (int k = 1; k <= kSeriesTerms; ++k) h[k] = h[k - 1] * w[0];
  for (std::size_t i = 1; i < np; ++i)
    for (int k = 1; k <= kSeriesTerms; ++k) h[k] += w[i] * h[k - 1];

  const int n = static_cast<int>(np) - 1;
  double inv_fact = 1.0;  // 1 / (k + n)!
  for (int m = 2; m <= n; ++m) inv_fact /= m;
  Complex sum(0.0);
  for (int k = 0; k <= kSeriesTerms; ++k) {
    sum += h[k] * inv_fact;
    inv_fact /= (k + n + 1);
  }
  return std::exp(c) * sum;
}

std::string string_name(const std::vector<Leg>& legs) {
  std::string s;
  for (const Leg& l : legs) {
    s += l.sign > 0 ? '+' : '-';
    s += l.mode == ModeLabel::A ? 'a' : 'b';
  }
  return s;
}

// Operator string index s in [0, 4^n): two bits per leg, leg 0 in the lowest bits.
void decode_string(int s, int n, std::vector<ModeLabel>& modes, std::vector<int>& signs) {
  modes.resize(n);
  signs.resize(n);
  for (int k = 0; k < n; ++k) {
    const int d = (s >> (2 * k)) & 3;
    modes[k] = (d & 1) ? ModeLabel::B : ModeLabel::A;
    signs[k] = (d & 2) ? +1 : -1;
  }
}

std::string string_name(int s, int n) {
  std::vector<ModeLabel> modes;
  std::vector<int> signs;
  decode_string(s, n, modes, signs);
  std::vector<Leg> legs(n);
  for (int k = 0; k < n; ++k) legs[k] = {modes[k], signs[k], 0, 0};
  return n == 0 ? std::string("1") : string_name(legs);
}

// <O_s^dag O_s'> for strings of orders m and n.
double string_pair_average(int s, int m, int sp, int n, const PerturbModes& modes) {
  std::vector<ModeLabel> ml, mr;
  std::vector<int> sl, sr;
  decode_string(s, m, ml, sl);
  decode_string(sp, n, mr, sr);
  std::vector<BosonOp> ops;
  // O_s = x_1^{q_1} ... x_m^{q_m}; the adjoint reverses the order and flips each operator.
  for (int k = m - 1; k >= 0; --k) ops.push_back({ml[k], sl[k] < 0});
  for (int k = 0; k < n; ++k) ops.push_back({mr[k], sr[k] > 0});
  return thermal_average(ops, modes.n_a, modes.n_b);
}

struct PathSet {
  std::vector<std::vector<int>> states;  // j_0 (final) ... j_n (initial)
  std::vector<std::vector<int>> signs;   // required sign per leg, 0 = any
};

PathSet all_paths(int n) {
  PathSet p;
  int count = 1;
  for (int k = 0; k <= n; ++k) count *= 3;
  for (int c = 0; c < count; ++c) {
    std::vector<int> st(n + 1);
    int r = c;
    for (int k = 0; k <= n; ++k) {
      st[k] = r % 3;
      r /= 3;
    }
    p.states.push_back(st);
    p.signs.emplace_back(n, 0);
  }
  return p;
}

struct OrderCoefficients {
  int order = 0;
  std::vector<Complex> c;  // per operator string
};

class Engine {
 public:
  Engine(const SymmetricEigenSystem& sys, const CouplingCoefficients& coeffs, const PerturbModes& modes,
         Regime regime)
      : sys_(sys), coeffs_(coeffs), modes_(modes), regime_(regime) {}

  // Endpoint weight <3|e_j0> <e_jn|1>.
  double endpoint(int j0, int jn) const {
    if (regime_ == Regime::WeakJ) return (j0 == 2 && jn == 0) ? 1.0 : 0.0;
    return sys_.eigvecs(2, j0) * sys_.eigvecs(0, jn);
  }

  OrderCoefficients coefficients(int n, const PathSet& paths, double t) const {
    OrderCoefficients oc;
    oc.order = n;
    int strings = 1;
    for (int k = 0; k < n; ++k) strings *= 4;
    oc.c.assign(strings, Complex(0.0));
    std::vector<ModeLabel> modes;
    std::vector<int> signs;
    std::vector<Leg> legs(n);
    for (std::size_t p = 0; p < paths.states.size(); ++p) {
      const auto& st = paths.states[p];
      const double ep = endpoint(st.front(), st.back());
      if (ep == 0.0) continue;
      const Complex phase = std::exp(Complex(0.0, -sys_.lambdas(st.front()) * t));
      for (int s = 0; s < strings; ++s) {
        decode_string(s, n, modes, signs);
        bool allowed = true;
        for (int k = 0; k < n; ++k) {
          if (paths.signs[p][k] != 0 && paths.signs[p][k] != signs[k]) allowed = false;
          legs[k] = {modes[k], signs[k], st[k], st[k + 1]};
        }
        if (!allowed) continue;
        oc.c[s] += ep * phase * amplitude(legs, t, sys_, coeffs_, modes_);
      }
    }
    return oc;
  }

 private:
  const SymmetricEigenSystem& sys_;
  const CouplingCoefficients& coeffs_;
  const PerturbModes& modes_;
  Regime regime_;
};

struct TermSpec {
  std::string name;
  int left;   // order of the conjugated amplitude
  int right;  // order of the plain amplitude
};

}  // namespace

SymmetricEigenSystem symmetric_eigensystem(double delta, double j) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("eigensystem: delta must be positive");
  if (j == 0.0 || !std::isfinite(j)) throw std::invalid_argument("eigensystem: j must be nonzero");
  SymmetricEigenSystem s;
  s.delta = delta;
  s.j = j;
  const double d = delta;
  const double om = std::sqrt(d * d + 2.0 * j * j);
  s.omega_cap = om;
  s.lambdas = Eigen::Vector3d(-om, 0.0, om);
  const double r2 = std::sqrt(2.0);
  const double sp = std::sqrt(j * j + d * (d + om));
  const double d_minus_om = -2.0 * j * j / (d + om);
  const double sm = r2 * j * j / (d + om);
  s.coef_alpha = sp / (r2 * om);
  s.coef_beta = j / om;
  s.coef_gamma = sm / (r2 * om);
  s.eigvecs.col(0) << sp / (r2 * om), -j * (d + om) / (r2 * om * sp), j * j / (r2 * om * sp);
  s.eigvecs.col(1) << -j / om, -d / om, j / om;
  s.eigvecs.col(2) << sm / (r2 * om), -j * d_minus_om / (r2 * om * sm), j * j / (r2 * om * sm);
  return s;
}

SymmetricEigenSystem symmetric_eigensystem(const TrimerParams& trimer) {
  trimer.validate();
  if (!trimer.is_symmetric(kSymmetryTol))
    throw std::invalid_argument("eigensystem: trimer is not symmetric (needs j12 == j23 and equal gaps)");
  if (trimer.j13 != 0.0) throw std::invalid_argument("eigensystem: j13 must be zero");
  return symmetric_eigensystem(trimer.delta(), trimer.j());
}

CouplingCoefficients coupling_coefficients(const SymmetricEigenSystem& sys) {
  const double d = sys.delta;
  const double j = sys.j;
  const double om = sys.omega_cap;
  const double o2 = om * om;
  const double qp = j * j + d * (d + om);
  const double qm = j * j + d * (d - om);
  CouplingCoefficients c;
  auto& a = c.a;
  auto& b = c.b;
  a(0, 0) = -d * d * (d + om) * (d + om) / (2.0 * o2 * qp);
  a(1, 1) = (d * d - 2.0 * j * j) / o2;
  a(2, 2) = -d * d * (d - om) * (d - om) / (2.0 * o2 * qm);
  a(0, 1) = a(1, 0) = 2.0 * d * j * (d + om) / (o2 * std::sqrt(2.0 * qp));
  a(0, 2) = a(2, 0) = -2.0 * j * j / o2;
  a(1, 2) = a(2, 1) = 2.0 * d * j * (d - om) / (o2 * std::sqrt(2.0 * qm));
  b(0, 0) = -(d * om + j * j) * (d + om) * (d + om) / (2.0 * o2 * qp);
  b(1, 1) = -d * d / o2;
  b(2, 2) = (d * om - j * j) * (d - om) * (d - om) / (2.0 * o2 * qm);
  b(0, 1) = b(1, 0) = 2.0 * j * j * j / (o2 * std::sqrt(2.0 * qp));
  b(0, 2) = b(2, 0) = j * j / o2;
  b(1, 2) = b(2, 1) = 2.0 * j * j * j / (o2 * std::sqrt(2.0 * qm));
  return c;
}

CouplingCoefficients coupling_coefficients_numeric(const SymmetricEigenSystem& sys,
                                                   const CouplingTopology& topology) {
  const auto pa = site_pattern_a(topology);
  const auto pb = site_pattern_b(topology);
  const Eigen::Matrix3d& e = sys.eigvecs;
  CouplingCoefficients c;
  c.a = e.transpose() * Eigen::Vector3d(pa[0], pa[1], pa[2]).asDiagonal() * e;
  c.b = e.transpose() * Eigen::Vector3d(pb[0], pb[1], pb[2]).asDiagonal() * e;
  return c;
}

PerturbModes PerturbModes::from_specs(const VibrationalModeSpec& a, const VibrationalModeSpec& b) {
  a.validate();
  b.validate();
  return {a.kappa, b.kappa, a.nu, b.nu, mean_occupancy(a.nu, a.kbt), mean_occupancy(b.nu, b.kbt)};
}

Complex divided_difference_exp(const std::vector<Complex>& z) {
  if (z.empty()) throw std::invalid_argument("divided difference needs at least one point");
  if (z.size() == 1) return std::exp(z[0]);
  std::size_t p = 0, q = 1;
  double diam = -1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t k = i + 1; k < z.size(); ++k) {
      const double d = std::abs(z[i] - z[k]);
      if (d > diam) {
        diam = d;
        p = i;
        q = k;
      }
    }
  }
  if (diam <= 1.0) return dd_series(z);
  std::vector<Complex> without_p, without_q;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i != p) without_p.push_back(z[i]);
    if (i != q) without_q.push_back(z[i]);
  }
  return (divided_difference_exp(without_q) - divided_difference_exp(without_p)) / (z[p] - z[q]);
}

Complex nested_integral(const std::vector<double>& omegas, double t) {
  const std::size_t n = omegas.size();
  std::vector<Complex> z(n + 1);
  z[0] = 0.0;
  double partial = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    partial += omegas[k];
    z[k + 1] = Complex(0.0, partial * t);
  }
  return std::pow(t, static_cast<double>(n)) * divided_difference_exp(z);
}

Complex interaction_w(const std::vector<Leg>& legs, double t, const SymmetricEigenSystem& sys,
                      const CouplingCoefficients& coeffs, const PerturbModes& modes) {
  if (legs.size() > 4) throw std::invalid_argument("interaction amplitude: order must be at most 4");
  double pref = 1.0;
  std::vector<double> omegas;
  for (const Leg& l : legs) {
    if (l.to < 0 || l.to > 2 || l.from < 0 || l.from > 2 || (l.sign != 1 && l.sign != -1))
      throw std::invalid_argument("interaction amplitude: malformed leg");
    const bool is_a = l.mode == ModeLabel::A;
    pref *= (is_a ? modes.kappa_a : modes.kappa_b) * (is_a ? coeffs.a : coeffs.b)(l.to, l.from);
    omegas.push_back(sys.gap(l.to, l.from) + l.sign * (is_a ? modes.nu_a : modes.nu_b));
  }
  if (pref == 0.0) return 0.0;
  return pref * nested_integral(omegas, t);
}

Complex amplitude(const std::vector<Leg>& legs, double t, const SymmetricEigenSystem& sys,
                  const CouplingCoefficients& coeffs, const PerturbModes& modes) {
  return std::pow(kMinusI, static_cast<int>(legs.size())) * interaction_w(legs, t, sys, coeffs, modes);
}

double wick_average(const std::vector<bool>& creation, double n) {
  if (creation.empty()) return 1.0;
  if (creation.size() % 2 != 0) return 0.0;
  // Pair the first operator with each later one; the rest is paired recursively.
  double total = 0.0;
  for (std::size_t k = 1; k < creation.size(); ++k) {
    double c = 0.0;
    if (creation[0] && !creation[k]) c = n;
    else if (!creation[0] && creation[k]) c = n + 1.0;
    if (c == 0.0) continue;
    std::vector<bool> rest;
    for (std::size_t i = 1; i < creation.size(); ++i)
      if (i != k) rest.push_back(creation[i]);
    total += c * wick_average(rest, n);
  }
  return total;
}

double thermal_average(const std::vector<BosonOp>& ops, double n_a, double n_b) {
  std::vector<bool> a, b;
  for (const BosonOp& op : ops) (op.mode == ModeLabel::A ? a : b).push_back(op.creation);
  return wick_average(a, n_a) * wick_average(b, n_b);
}

std::string to_string(Regime regime) { return regime == Regime::WeakJ ? "weak_j" : "strong_j"; }

Regime parse_regime(const std::string& name) {
  if (name == "weak_j" || name == "WeakJ") return Regime::WeakJ;
  if (name == "strong_j" || name == "StrongJ") return Regime::StrongJ;
  throw std::invalid_argument("unknown regime '" + name + "'");
}

const std::vector<double>& PerturbResult::term(const std::string& name) const {
  for (std::size_t k = 0; k < term_names.size(); ++k)
    if (term_names[k] == name) return term_values[k];
  throw std::out_of_range("no perturbative term named " + name);
}

PerturbResult p3_perturbative(const SymmetricEigenSystem& sys, const CouplingCoefficients& coeffs,
                              const PerturbModes& modes, const std::vector<double>& times,
                              Regime regime, const PerturbOptions& options) {
  PerturbResult res;
  res.regime = regime;
  res.trace.times = times;
  res.trace.p3.assign(times.size(), 0.0);

  const double kmax = std::max(modes.kappa_a, modes.kappa_b);
  if (kmax > 0.5 * std::abs(sys.j)) {
    std::ostringstream os;
    os << "coupling " << kmax << " exceeds J/2 = " << 0.5 * std::abs(sys.j) << "; perturbation theory may fail";
    res.warnings.push_back(os.str());
  }
  if (regime == Regime::WeakJ && !(std::abs(sys.j) < sys.delta))
    res.warnings.push_back("weak-J branch used with J >= Delta");

  std::vector<TermSpec> terms;
  std::vector<PathSet> paths(4);
  if (regime == Regime::StrongJ) {
    terms = {{"P3(0)", 0, 0}, {"P3(1,1)", 1, 1}, {"P3(1,2)", 0, 2}, {"P3(2,1)", 2, 2}};
    for (int n = 0; n <= 2; ++n) paths[n] = all_paths(n);
  } else {
    terms = {{"P3(1)", 1, 1}, {"P3(2,1)", 2, 2}, {"P3(2,2)", 1, 3}};
    paths[1] = {{{2, 0}}, {{-1}}};
    paths[2] = {{{2, 1, 0}}, {{-1, -1}}};
    paths[3] = {{{2, 0, 2, 0}}, {{-1, +1, -1}}};
  }
  int max_order = 0;
  for (const auto& ts : terms) max_order = std::max({max_order, ts.left, ts.right});

  // Wick factors per string pair, computed once.
  std::vector<std::vector<std::vector<double>>> thermal(terms.size());
  auto n_strings = [](int n) { int s = 1; for (int k = 0; k < n; ++k) s *= 4; return s; };
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const int m = terms[k].left, n = terms[k].right;
    thermal[k].assign(n_strings(m), std::vector<double>(n_strings(n), 0.0));
    for (int s = 0; s < n_strings(m); ++s)
      for (int sp = 0; sp < n_strings(n); ++sp) thermal[k][s][sp] = string_pair_average(s, m, sp, n, modes);
  }

  res.term_names.clear();
  for (const auto& ts : terms) res.term_names.push_back(ts.name);
  res.term_values.assign(terms.size(), std::vector<double>(times.size(), 0.0));

  std::size_t probe = times.empty() ? 0 : times.size() - 1;
  if (options.probe_time >= 0.0 && !times.empty()) {
    probe = 0;
    for (std::size_t k = 1; k < times.size(); ++k)
      if (std::abs(times[k] - options.probe_time) < std::abs(times[probe] - options.probe_time)) probe = k;
  }
  res.probe_time = times.empty() ? 0.0 : times[probe];

  const Engine engine(sys, coeffs, modes, regime);
  for (std::size_t it = 0; it < times.size(); ++it) {
    const double t = times[it];
    std::vector<OrderCoefficients> oc(max_order + 1);
    for (int n = 0; n <= max_order; ++n) {
      if (!paths[n].states.empty()) oc[n] = engine.coefficients(n, paths[n], t);
      else oc[n].c.assign(n_strings(n), Complex(0.0));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const int m = terms[k].left, n = terms[k].right;
      const double factor = m == n ? 1.0 : 2.0;
      Complex acc(0.0);
      for (int s = 0; s < n_strings(m); ++s) {
        if (oc[m].c[s] == 0.0) continue;
        for (int sp = 0; sp < n_strings(n); ++sp) {
          const double th = thermal[k][s][sp];
          if (th == 0.0) continue;
          const Complex amp = std::conj(oc[m].c[s]) * oc[n].c[sp];
          acc += amp * th;
          if (it == probe) {
            const double contrib = factor * (amp * th).real();
            if (std::abs(contrib) >= options.pathway_cutoff && amp != 0.0)
              res.pathways.push_back({terms[k].name, string_name(s, m), string_name(sp, n), amp, th, contrib});
          }
        }
      }
      const double v = factor * acc.real();
      res.term_values[k][it] = v;
      total += v;
    }
    res.trace.p3[it] = total;
  }
  res.trace.finalize();
  return res;
}

}  // namespace vaet
