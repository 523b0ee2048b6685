#include "vaet/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "vaet/linalg.hpp"

#ifndef VAET_VERSION
#define VAET_VERSION "0.0.0"
#endif

namespace vaet {

namespace {

// Strict object reader: every key must be consumed, types are checked.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const Json* child(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void get(const char* key, double& out) {
    if (const Json* v = child(key)) {
      if (!v->is_number()) throw ConfigError(sub(key) + ": expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(sub(key) + ": must be finite");
    }
  }

  void get(const char* key, int& out) {
    if (const Json* v = child(key)) {
      if (!v->is_number_integer()) throw ConfigError(sub(key) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void get(const char* key, std::uint64_t& out) {
    if (const Json* v = child(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        throw ConfigError(sub(key) + ": expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void get(const char* key, bool& out) {
    if (const Json* v = child(key)) {
      if (!v->is_boolean()) throw ConfigError(sub(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void get(const char* key, std::string& out) {
    if (const Json* v = child(key)) {
      if (!v->is_string()) throw ConfigError(sub(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void get(const char* key, std::array<double, 3>& out) {
    if (const Json* v = child(key)) {
      if (!v->is_array() || v->size() != 3) throw ConfigError(sub(key) + ": expected an array of 3 numbers");
      for (int i = 0; i < 3; ++i) {
        if (!(*v)[i].is_number()) throw ConfigError(sub(key) + ": expected an array of 3 numbers");
        out[i] = (*v)[i].get<double>();
      }
    }
  }

  void get(const char* key, std::vector<int>& out) {
    if (const Json* v = child(key)) {
      if (!v->is_array()) throw ConfigError(sub(key) + ": expected an array of integers");
      out.clear();
      for (const Json& e : *v) {
        if (!e.is_number_integer()) throw ConfigError(sub(key) + ": expected an array of integers");
        out.push_back(e.get<int>());
      }
    }
  }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(where() + "unknown key \"" + it.key() + "\"");
  }

 private:
  std::string where() const { return path_.empty() ? "config: " : path_ + ": "; }

  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class F>
void with_object(Reader& parent, const char* key, F&& f) {
  if (const Json* v = parent.child(key)) {
    Reader r(*v, parent.sub(key));
    f(r);
    r.done();
  }
}

void read_axis(Reader& parent, const char* key, AxisRange& axis) {
  with_object(parent, key, [&](Reader& r) {
    r.get("start", axis.start);
    r.get("stop", axis.stop);
    r.get("step", axis.step);
  });
}

void read_mode(Reader& parent, const char* key, VibrationalModeSpec& mode, double delta31) {
  with_object(parent, key, [&](Reader& r) {
    if (r.has("nu") && r.has("nu_over_d31"))
      throw ConfigError(r.sub("nu") + ": give either nu or nu_over_d31, not both");
    r.get("nu", mode.nu);
    if (r.has("nu_over_d31")) {
      double x = 0.0;
      r.get("nu_over_d31", x);
      mode.nu = x * delta31;
    }
    r.get("kappa", mode.kappa);
    r.get("kbt", mode.kbt);
    r.get("n_fock", mode.n_fock);
  });
}

template <class F>
void check(const std::string& field, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

void check_units(const std::string& field, const std::string& units) {
  if (units != "rad_per_ms" && units != "d31") throw ConfigError(field + ": units must be \"rad_per_ms\" or \"d31\"");
}

Json axis_json(const AxisRange& a) { return Json{{"start", a.start}, {"stop", a.stop}, {"step", a.step}}; }

Json mode_json(const VibrationalModeSpec& m) {
  return Json{{"nu", m.nu}, {"kappa", m.kappa}, {"kbt", m.kbt}, {"n_fock", m.n_fock}};
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string column_name(const std::string& term) {
  std::string out;
  for (char c : term) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

}  // namespace

PropagationOptions RunConfig::propagation_options() const {
  PropagationOptions p = propagation;
  p.workers = workers;
  return p;
}

ScanConfig RunConfig::scan_config() const {
  ScanConfig s;
  s.nu_a = scan.nu_a;
  s.nu_b = scan.nu_b;
  if (scan.units == "d31") {
    const double d = delta31();
    for (AxisRange* a : {&s.nu_a, &s.nu_b}) {
      a->start *= d;
      a->stop *= d;
      a->step *= d;
    }
  }
  s.base = system;
  s.t_final = t_final;
  s.sample_step = sample_step;
  s.workers = workers;
  return s;
}

VibronicConfig RunConfig::vibronic_config() const {
  VibronicConfig v;
  v.trimer = system.trimer;
  v.topology = system.topology;
  v.nu_b = system.mode_b.nu;
  v.kappa_a = system.mode_a.kappa;
  v.kappa_b = system.mode_b.kappa;
  v.n_fock = vibronic.n_fock;
  const double scale = vibronic.units == "d31" ? delta31() : 1.0;
  v.nu_a_start = vibronic.nu_a_start * scale;
  v.nu_a_stop = vibronic.nu_a_stop * scale;
  v.nu_a_step = vibronic.nu_a_step * scale;
  return v;
}

RunConfig parse_run_config(const Json& doc) {
  RunConfig c;
  Reader top(doc, "");

  top.get("preset", c.preset);
  {
    Preset p;
    try {
      p = preset(parse_preset_name(c.preset));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("preset: ") + e.what());
    }
    c.preset = to_string(parse_preset_name(c.preset));
    c.system.trimer = p.trimer;
    c.system.mode_a = p.mode_a;
    c.system.mode_b = p.mode_b;
  }

  with_object(top, "trimer", [&](Reader& r) {
    r.get("omega_tilde", c.system.trimer.omega_tilde);
    if (r.has("j") && (r.has("j12") || r.has("j23"))) throw ConfigError("trimer.j: cannot be combined with j12/j23");
    if (r.has("j")) {
      double j = 0.0;
      r.get("j", j);
      c.system.trimer.j12 = c.system.trimer.j23 = j;
    }
    r.get("j12", c.system.trimer.j12);
    r.get("j23", c.system.trimer.j23);
    r.get("j13", c.system.trimer.j13);
  });
  check("trimer", [&] { c.system.trimer.validate(); });

  with_object(top, "topology", [&](Reader& r) {
    std::string kind = "transverse";
    r.get("kind", kind);
    if (kind == "transverse") {
      double zeta = 1.0;
      r.get("zeta", zeta);
      c.system.topology = CouplingTopology::transverse(zeta);
    } else if (kind == "longitudinal") {
      if (r.has("zeta")) throw ConfigError("topology.zeta: only used by the transverse kind");
      c.system.topology = CouplingTopology::longitudinal();
    } else {
      throw ConfigError("topology.kind: expected \"transverse\" or \"longitudinal\"");
    }
  });
  check("topology", [&] { c.system.topology.validate(); });

  with_object(top, "dissipation", [&](Reader& r) { r.get("gamma", c.system.dissipation.gamma); });
  check("dissipation", [&] { c.system.dissipation.validate(); });

  top.get("initial_site", c.system.initial_site);
  if (c.system.initial_site < 1 || c.system.initial_site > 3) throw ConfigError("initial_site: must be 1, 2 or 3");

  const double d31 = c.delta31();
  read_mode(top, "mode_a", c.system.mode_a, d31);
  read_mode(top, "mode_b", c.system.mode_b, d31);
  check("mode_a", [&] { c.system.mode_a.validate(); });
  check("mode_b", [&] { c.system.mode_b.validate(); });

  with_object(top, "time", [&](Reader& r) {
    r.get("t_final", c.t_final);
    r.get("step", c.sample_step);
  });
  if (!(c.t_final > 0.0)) throw ConfigError("time.t_final: must be positive");
  if (!(c.sample_step > 0.0)) throw ConfigError("time.step: must be positive");

  top.get("workers", c.workers);
  if (c.workers < 0) throw ConfigError("workers: must be >= 0");
  top.get("seed", c.seed);
  top.get("output_dir", c.output_dir);

  with_object(top, "propagation", [&](Reader& r) {
    r.get("cond_threshold", c.propagation.cond_threshold);
    r.get("rk_tolerance", c.propagation.rk_tolerance);
    r.get("residual_tolerance", c.propagation.residual_tolerance);
    r.get("force_runge_kutta", c.propagation.force_runge_kutta);
  });
  if (!(c.propagation.cond_threshold > 0.0) || !(c.propagation.rk_tolerance > 0.0) ||
      !(c.propagation.residual_tolerance > 0.0))
    throw ConfigError("propagation: thresholds and tolerances must be positive");

  with_object(top, "scan", [&](Reader& r) {
    read_axis(r, "nu_a", c.scan.nu_a);
    read_axis(r, "nu_b", c.scan.nu_b);
    r.get("units", c.scan.units);
    with_object(r, "features", [&](Reader& f) {
      f.get("max_single_order", c.scan.features.max_single_order);
      f.get("max_pair_order", c.scan.features.max_pair_order);
      f.get("band", c.scan.features.band);
      f.get("threshold", c.scan.features.threshold);
    });
    r.get("svg", c.scan.svg);
  });
  check_units("scan.units", c.scan.units);
  check("scan", [&] { c.scan_config().validate(); });
  if (c.scan.features.max_single_order < 1 || c.scan.features.max_pair_order < 1 || c.scan.features.band < 0.0 ||
      !(c.scan.features.threshold > 0.0))
    throw ConfigError("scan.features: orders must be >= 1, band >= 0, threshold > 0");

  with_object(top, "trace", [&](Reader& r) {
    if (const Json* b = r.child("batch")) {
      if (!b->is_array()) throw ConfigError("trace.batch: expected an array of objects");
      for (const Json& e : *b)
        if (!e.is_object()) throw ConfigError("trace.batch: expected an array of objects");
      c.trace.batch = *b;
    }
  });

  with_object(top, "vibronic", [&](Reader& r) {
    r.get("nu_a_start", c.vibronic.nu_a_start);
    r.get("nu_a_stop", c.vibronic.nu_a_stop);
    r.get("nu_a_step", c.vibronic.nu_a_step);
    r.get("units", c.vibronic.units);
    r.get("n_fock", c.vibronic.n_fock);
    with_object(r, "crossings", [&](Reader& x) {
      x.get("window", c.vibronic.crossings.window);
      x.get("gap_threshold", c.vibronic.crossings.gap_threshold);
      x.get("true_crossing_tol", c.vibronic.crossings.true_crossing_tol);
      x.get("label_components", c.vibronic.crossings.label_components);
    });
  });
  check_units("vibronic.units", c.vibronic.units);
  check("vibronic", [&] { c.vibronic_config().validate(); });

  with_object(top, "perturb", [&](Reader& r) {
    std::string regime = to_string(c.perturb.regime);
    r.get("regime", regime);
    check("perturb.regime", [&] { c.perturb.regime = parse_regime(regime); });
    r.get("probe_time", c.perturb.probe_time);
    r.get("pathway_cutoff", c.perturb.pathway_cutoff);
    r.get("exact", c.perturb.exact);
  });

  with_object(top, "convergence", [&](Reader& r) { r.get("n_values", c.convergence.n_values); });
  if (c.convergence.n_values.empty()) throw ConfigError("convergence.n_values: must not be empty");
  for (std::size_t i = 0; i < c.convergence.n_values.size(); ++i) {
    if (c.convergence.n_values[i] < 2) throw ConfigError("convergence.n_values: entries must be >= 2");
    if (i > 0 && c.convergence.n_values[i] <= c.convergence.n_values[i - 1])
      throw ConfigError("convergence.n_values: must be increasing");
  }

  top.done();
  return c;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_json_file(path)); }

Json to_json(const RunConfig& c) {
  const auto& t = c.system.trimer;
  Json j;
  j["preset"] = c.preset;
  j["trimer"] = {{"omega_tilde", t.omega_tilde}, {"j12", t.j12}, {"j23", t.j23}, {"j13", t.j13}};
  if (c.system.topology.kind == CouplingTopology::Kind::Transverse)
    j["topology"] = {{"kind", "transverse"}, {"zeta", c.system.topology.zeta}};
  else
    j["topology"] = {{"kind", "longitudinal"}};
  j["dissipation"] = {{"gamma", c.system.dissipation.gamma}};
  j["initial_site"] = c.system.initial_site;
  j["mode_a"] = mode_json(c.system.mode_a);
  j["mode_b"] = mode_json(c.system.mode_b);
  j["time"] = {{"t_final", c.t_final}, {"step", c.sample_step}};
  j["workers"] = c.workers;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["propagation"] = {{"cond_threshold", c.propagation.cond_threshold},
                      {"rk_tolerance", c.propagation.rk_tolerance},
                      {"residual_tolerance", c.propagation.residual_tolerance},
                      {"force_runge_kutta", c.propagation.force_runge_kutta}};
  j["scan"] = {{"nu_a", axis_json(c.scan.nu_a)},
               {"nu_b", axis_json(c.scan.nu_b)},
               {"units", c.scan.units},
               {"features",
                {{"max_single_order", c.scan.features.max_single_order},
                 {"max_pair_order", c.scan.features.max_pair_order},
                 {"band", c.scan.features.band},
                 {"threshold", c.scan.features.threshold}}},
               {"svg", c.scan.svg}};
  j["trace"] = {{"batch", c.trace.batch}};
  j["vibronic"] = {{"nu_a_start", c.vibronic.nu_a_start},
                   {"nu_a_stop", c.vibronic.nu_a_stop},
                   {"nu_a_step", c.vibronic.nu_a_step},
                   {"units", c.vibronic.units},
                   {"n_fock", c.vibronic.n_fock},
                   {"crossings",
                    {{"window", c.vibronic.crossings.window},
                     {"gap_threshold", c.vibronic.crossings.gap_threshold},
                     {"true_crossing_tol", c.vibronic.crossings.true_crossing_tol},
                     {"label_components", c.vibronic.crossings.label_components}}}};
  j["perturb"] = {{"regime", to_string(c.perturb.regime)},
                  {"probe_time", c.perturb.probe_time},
                  {"pathway_cutoff", c.perturb.pathway_cutoff},
                  {"exact", c.perturb.exact}};
  j["convergence"] = {{"n_values", c.convergence.n_values}};
  return j;
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override \"" + assignment + "\": expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  if (!doc.is_object()) doc = Json::object();
  Json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw ConfigError("override \"" + assignment + "\": empty key component");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    Json& next = (*node)[part];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) throw ConfigError("override \"" + assignment + "\": " + part + " is not an object");
    node = &next;
    pos = dot + 1;
  }
}

std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const Json& config, std::vector<std::string> columns) : ncols_(columns.size()) {
  text_ = "# config: " + config.dump() + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) text_ += ',';
    text_ += csv_cell(columns[i]);
  }
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_) throw std::logic_error("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_number(values[i]);
  }
  text_ += '\n';
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path);
}

Json meta_json(const Json& config, const std::string& command) {
  Json m;
  m["command"] = command;
  m["version"] = VAET_VERSION;
  m["eigensolver_backend"] = linalg::backend_summary();
  m["default_workers"] = default_workers();
  m["units"] = "frequencies rad/ms, times ms, hbar = 1";
  m["basis"] = "flat = s*Na*Nb + n*Nb + m, s in {0,1,2}";
  m["config"] = config;
  return m;
}

std::string spectrum_csv(const SpectrumGrid& grid, const Json& config) {
  CsvWriter w(config, {"nu_a", "nu_b", "nu_a_over_d31", "nu_b_over_d31", "max_p3", "int_p3"});
  for (std::size_t i = 0; i < grid.nu_a.size(); ++i)
    for (std::size_t j = 0; j < grid.nu_b.size(); ++j)
      w.row({grid.nu_a[i], grid.nu_b[j], grid.norm_a(static_cast<int>(i)), grid.norm_b(static_cast<int>(j)),
             grid.max_p3(i, j), grid.int_p3(i, j)});
  return w.str();
}

Json features_json(const FeatureSet& fs, const Json& config) {
  Json j;
  j["band"] = fs.band;
  j["threshold"] = fs.threshold;
  Json list = Json::array();
  for (const Feature& f : fs.features) {
    Json e;
    e["kind"] = to_string(f.kind);
    e["order"] = f.order;
    e["locus"] = f.locus;
    e["signal"] = f.signal;
    e["background"] = f.background;
    e["prominence"] = f.prominence;
    e["band_points"] = f.band_points;
    e["background_points"] = f.background_points;
    e["detected"] = f.detected;
    if (std::isfinite(f.peak_center)) e["peak_center"] = f.peak_center;
    else e["peak_center"] = nullptr;
    list.push_back(e);
  }
  j["features"] = list;
  j["config"] = config;
  return j;
}

namespace {

std::string color_for(double u) {
  // Piecewise-linear dark blue -> teal -> yellow.
  static const double stops[][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  u = std::clamp(u, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(u));
  const double f = u - k;
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string spectrum_svg(const SpectrumGrid& grid, const Json& config, int max_order) {
  const int na = static_cast<int>(grid.nu_a.size());
  const int nb = static_cast<int>(grid.nu_b.size());
  if (na == 0 || nb == 0) throw std::invalid_argument("spectrum_svg: empty grid");
  const double cell = std::max(2.0, 600.0 / std::max(na, nb));
  const double w = cell * na, h = cell * nb;
  const double left = 70, top = 20, bar = 20;
  const double vmin = grid.max_p3.minCoeff(), vmax = grid.max_p3.maxCoeff();
  const double span = vmax > vmin ? vmax - vmin : 1.0;

  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + w + 120 << "\" height=\"" << top + h + 60
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<metadata>" << xml_escape(config.dump()) << "</metadata>\n";
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      os << "<rect x=\"" << left + i * cell << "\" y=\"" << top + h - (j + 1) * cell << "\" width=\"" << cell
         << "\" height=\"" << cell << "\" fill=\"" << color_for((grid.max_p3(i, j) - vmin) / span) << "\"/>\n";
  const double a0 = grid.norm_a(0), a1 = grid.norm_a(na - 1);
  const double b0 = grid.norm_b(0), b1 = grid.norm_b(nb - 1);
  for (int k = 1; k <= max_order; ++k) {
    const double x = 1.0 / k;
    if (x >= a0 && x <= a1 && na > 1) {
      const double px = left + (x - a0) / (a1 - a0) * (w - cell) + cell / 2;
      os << "<line x1=\"" << px << "\" y1=\"" << top + h << "\" x2=\"" << px << "\" y2=\"" << top + h + 5
         << "\" stroke=\"black\"/><text x=\"" << px << "\" y=\"" << top + h + 17 << "\" text-anchor=\"middle\">1/" << k
         << "</text>\n";
    }
    if (x >= b0 && x <= b1 && nb > 1) {
      const double py = top + h - ((x - b0) / (b1 - b0) * (h - cell) + cell / 2);
      os << "<line x1=\"" << left - 5 << "\" y1=\"" << py << "\" x2=\"" << left << "\" y2=\"" << py
         << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">1/" << k
         << "</text>\n";
    }
  }
  os << "<text x=\"" << left + w / 2 << "\" y=\"" << top + h + 40 << "\" text-anchor=\"middle\">nu_a / D31</text>\n";
  os << "<text x=\"15\" y=\"" << top + h / 2 << "\" transform=\"rotate(-90 15 " << top + h / 2
     << ")\" text-anchor=\"middle\">nu_b / D31</text>\n";
  const double bx = left + w + 20;
  const int steps = 50;
  for (int s = 0; s < steps; ++s)
    os << "<rect x=\"" << bx << "\" y=\"" << top + h - (s + 1) * h / steps << "\" width=\"" << bar << "\" height=\""
       << h / steps + 0.5 << "\" fill=\"" << color_for((s + 0.5) / steps) << "\"/>\n";
  os << "<text x=\"" << bx + bar + 4 << "\" y=\"" << top + h << "\">" << format_number(vmin).substr(0, 8) << "</text>\n";
  os << "<text x=\"" << bx + bar + 4 << "\" y=\"" << top + 10 << "\">" << format_number(vmax).substr(0, 8) << "</text>\n";
  os << "<text x=\"" << bx << "\" y=\"" << top + h + 20 << "\">Max P3</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string trace_csv(const TransferTrace& trace, const std::vector<double>& trace_norm, const Json& config) {
  CsvWriter w(config, {"t_ms", "p3", "trace_norm"});
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    w.row({trace.times[k], trace.p3[k], k < trace_norm.size() ? trace_norm[k] : 1.0});
  return w.str();
}

std::string levels_csv(const VibronicSweep& sweep, const Json& config) {
  std::vector<std::string> cols{"nu_a", "nu_a_over_d31"};
  for (int l = 0; l < sweep.levels.cols(); ++l) cols.push_back("level_" + std::to_string(l));
  CsvWriter w(config, cols);
  for (std::size_t p = 0; p < sweep.nu_a_values.size(); ++p) {
    std::vector<double> row{sweep.nu_a_values[p], sweep.nu_a_values[p] / sweep.delta31};
    for (int l = 0; l < sweep.levels.cols(); ++l) row.push_back(sweep.levels(p, l));
    w.row(row);
  }
  return w.str();
}

Json crossings_json(const std::vector<AvoidedCrossing>& crossings, const VibronicSweep& sweep, const Json& config) {
  auto state = [](const std::vector<StateComponent>& s) {
    Json a = Json::array();
    for (const StateComponent& c : s) a.push_back({{"label", c.label()}, {"weight", c.weight}});
    return a;
  };
  Json list = Json::array();
  for (const AvoidedCrossing& c : crossings) {
    list.push_back({{"lower", c.lower},
                    {"upper", c.upper},
                    {"nu_a", c.nu_a},
                    {"nu_a_over_d31", c.nu_a_over_d31},
                    {"min_gap", c.min_gap},
                    {"true_crossing", c.true_crossing},
                    {"lower_state", state(c.lower_state)},
                    {"upper_state", state(c.upper_state)}});
  }
  Json j;
  j["delta31"] = sweep.delta31;
  j["label_basis"] = "(exciton j, n_a, n_b), j one-based by ascending exciton energy";
  j["crossings"] = list;
  j["config"] = config;
  return j;
}

std::string perturb_trace_csv(const PerturbResult& r, const std::vector<double>& exact, const Json& config) {
  std::vector<std::string> cols{"t_ms", "p3_perturbative"};
  if (!exact.empty()) {
    cols.push_back("p3_exact");
    cols.push_back("abs_difference");
  }
  for (const std::string& t : r.term_names) cols.push_back(column_name(t));
  CsvWriter w(config, cols);
  for (std::size_t k = 0; k < r.trace.times.size(); ++k) {
    std::vector<double> row{r.trace.times[k], r.trace.p3[k]};
    if (!exact.empty()) {
      row.push_back(exact[k]);
      row.push_back(std::abs(r.trace.p3[k] - exact[k]));
    }
    for (const auto& v : r.term_values) row.push_back(v[k]);
    w.row(row);
  }
  return w.str();
}

std::string perturb_terms_csv(const PerturbResult& r, const Json& config) {
  std::string out = "# config: " + config.dump() + "\n";
  out += "term,value_at_probe,max_abs\n";
  std::size_t k = 0;
  for (std::size_t i = 0; i < r.trace.times.size(); ++i)
    if (std::abs(r.trace.times[i] - r.probe_time) < std::abs(r.trace.times[k] - r.probe_time)) k = i;
  for (std::size_t t = 0; t < r.term_names.size(); ++t) {
    double m = 0.0;
    for (double v : r.term_values[t]) m = std::max(m, std::abs(v));
    out += csv_cell(r.term_names[t]) + "," + format_number(r.term_values[t].empty() ? 0.0 : r.term_values[t][k]) +
           "," + format_number(m) + "\n";
  }
  return out;
}

std::string perturb_pathways_csv(const PerturbResult& r, const Json& config) {
  std::string out = "# config: " + config.dump() + "\n";
  out += "# probe_time_ms: " + format_number(r.probe_time) + "\n";
  out += "term,left,right,amplitude_re,amplitude_im,thermal,contribution\n";
  for (const PathwayTerm& p : r.pathways) {
    out += csv_cell(p.term) + "," + csv_cell(p.left) + "," + csv_cell(p.right) + "," +
           format_number(p.amplitude.real()) + "," + format_number(p.amplitude.imag()) + "," +
           format_number(p.thermal) + "," + format_number(p.contribution) + "\n";
  }
  return out;
}

std::string convergence_traces_csv(const ConvergenceResult& r, const Json& config) {
  std::vector<std::string> cols{"t_ms"};
  for (int n : r.n_values) cols.push_back("p3_n" + std::to_string(n));
  CsvWriter w(config, cols);
  if (r.traces.empty()) return w.str();
  for (std::size_t k = 0; k < r.traces.front().times.size(); ++k) {
    std::vector<double> row{r.traces.front().times[k]};
    for (const auto& t : r.traces) row.push_back(t.p3[k]);
    w.row(row);
  }
  return w.str();
}

std::string convergence_table_csv(const ConvergenceResult& r, const Json& config) {
  std::vector<std::string> cols{"n_fock", "max_p3", "int_p3", "deviation_vs_largest"};
  for (int n : r.n_values) cols.push_back("deviation_vs_n" + std::to_string(n));
  CsvWriter w(config, cols);
  for (std::size_t i = 0; i < r.n_values.size(); ++i) {
    std::vector<double> row{static_cast<double>(r.n_values[i]), r.traces[i].max_p3, r.traces[i].int_p3,
                            r.deviation_vs_max[i]};
    for (std::size_t j = 0; j < r.n_values.size(); ++j) row.push_back(r.pairwise(i, j));
    w.row(row);
  }
  return w.str();
}

}  // namespace vaet
