#include "mtclt/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "mtclt/cumulants.hpp"
#include "mtclt/dpp.hpp"
#include "mtclt/ensembles.hpp"
#include "mtclt/gff.hpp"
#include "mtclt/montecarlo.hpp"
#include "mtclt/symbols.hpp"

namespace mtclt::cli {

namespace {

// A JSON object whose keys are checked against an allow-list on construction.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_ + ": expected an object");
    for (const auto& [k, v] : j.items())
      if (!allowed.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  const json& raw(const std::string& k) const {
    if (!has(k)) throw ConfigError(path_ + ": missing required key '" + k + "'");
    return j_.at(k);
  }
  std::string where(const std::string& k) const { return path_ + "." + k; }

  double number(const std::string& k) const {
    const auto& v = raw(k);
    if (!v.is_number()) throw ConfigError(where(k) + ": expected a number");
    return v.get<double>();
  }
  double number(const std::string& k, double def) const { return has(k) ? number(k) : def; }
  long integer(const std::string& k) const {
    const auto& v = raw(k);
    if (!v.is_number_integer()) throw ConfigError(where(k) + ": expected an integer");
    return v.get<long>();
  }
  long integer(const std::string& k, long def) const { return has(k) ? integer(k) : def; }
  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    if (!j_.at(k).is_boolean()) throw ConfigError(where(k) + ": expected a boolean");
    return j_.at(k).get<bool>();
  }
  std::string string(const std::string& k) const {
    const auto& v = raw(k);
    if (!v.is_string()) throw ConfigError(where(k) + ": expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& k, const std::string& def) const { return has(k) ? string(k) : def; }
  std::vector<double> numbers(const std::string& k) const { return number_list(raw(k), where(k)); }

  static std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(where + ": expected a non-empty array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

EnsembleSpec parse_ensemble(const json& j) {
  Section s(j, "$.ensemble", {"family", "n", "r", "alpha", "beta", "gamma", "mu", "p", "B", "C", "V"});
  EnsembleSpec e;
  try {
    e.family = family_from_name(s.string("family"));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("$.ensemble.family: ") + ex.what());
  }
  e.n = static_cast<int>(s.integer("n"));
  e.r = s.number("r", e.r);
  e.alpha = s.number("alpha", e.alpha);
  e.beta = s.number("beta", e.beta);
  e.gamma = s.number("gamma", e.family == Family::Krawtchouk ? 2.0 : e.gamma);
  e.mu = s.number("mu", e.mu);
  e.p = s.number("p", e.p);
  e.B = s.number("B", e.B);
  e.C = s.number("C", e.C);
  if (s.has("V")) e.V = Polynomial(s.numbers("V"));
  try {
    e.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("$.ensemble: ") + ex.what());
  }
  return e;
}

json ensemble_json(const EnsembleSpec& e) {
  json j = {{"family", family_name(e.family)}, {"n", e.n}};
  switch (e.family) {
    case Family::LaguerreSquaredOU: j["r"] = e.r; break;
    case Family::JacobiDiffusion: j["alpha"] = e.alpha; j["beta"] = e.beta; break;
    case Family::Meixner: j["gamma"] = e.gamma; j["mu"] = e.mu; break;
    case Family::CharlierEdge:
    case Family::CharlierBulk: j["mu"] = e.mu; break;
    case Family::Krawtchouk: j["p"] = e.p; j["gamma"] = e.gamma; break;
    case Family::Hahn: j["B"] = e.B; j["C"] = e.C; break;
    case Family::NonStationaryHermite: j["V"] = e.V.coeffs(); break;
    default: break;
  }
  return j;
}

struct TimeGrid {
  std::vector<double> input;        // as given
  std::vector<double> layer_times;  // argument passed to the recurrence constructors
  std::vector<double> taus;
  bool bridge = false;
};

TimeGrid parse_times(const Section& s, const EnsembleSpec& e) {
  TimeGrid g;
  if (s.has("times") == s.has("bridge_times")) throw ConfigError("$: give exactly one of 'times' or 'bridge_times'");
  if (s.has("bridge_times")) {
    if (e.family != Family::HermiteOU) throw ConfigError("$.bridge_times: the bridge preset needs HermiteOU");
    g.bridge = true;
    g.input = s.numbers("bridge_times");
    for (double t : g.input) {
      if (!(t > 0 && t < 1)) throw ConfigError("$.bridge_times: values must lie in (0, 1)");
      g.taus.push_back(bridge_tau(t));
    }
    g.layer_times = g.taus;
  } else {
    g.input = s.numbers("times");
    g.layer_times = g.input;
    for (double t : g.input) g.taus.push_back(tau_of_time(e, t));
  }
  for (size_t m = 1; m < g.taus.size(); ++m)
    if (!(g.taus[m] > g.taus[m - 1])) throw ConfigError("$: layer times must give strictly increasing tau");
  return g;
}

LayeredStatistic parse_statistic(const json& j, const std::vector<double>& taus) {
  Section s(j, "$.statistic", {"polynomial", "layers", "riemann_end"});
  if (s.has("polynomial") == s.has("layers")) throw ConfigError("$.statistic: give exactly one of 'polynomial' or 'layers'");
  LayeredStatistic st;
  if (s.has("polynomial")) {
    st = LayeredStatistic::same_polynomial(Polynomial(s.numbers("polynomial")), taus);
  } else {
    const auto& L = s.raw("layers");
    if (!L.is_array() || L.size() != taus.size())
      throw ConfigError("$.statistic.layers: need one coefficient array per time");
    std::vector<LayerFunction> layers;
    for (size_t m = 0; m < L.size(); ++m)
      layers.emplace_back(Polynomial(Section::number_list(L[m], "$.statistic.layers[" + std::to_string(m) + "]")));
    st.layers = layers;
    st.times = taus;
  }
  if (s.has("riemann_end")) {
    const double end = s.number("riemann_end");
    try {
      st = LayeredStatistic::riemann(st.layers, taus, end);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("$.statistic.riemann_end: ") + ex.what());
    }
  }
  return st;
}

json symbol_json(const LaurentSymbol& s) {
  json c = json::array();
  for (int j = s.min_power(); j <= s.max_power(); ++j) c.push_back(s[j]);
  return {{"min_power", s.min_power()}, {"coeffs", c}};
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json header(const std::string& command, const json& config) {
  return {{"schema", 1}, {"command", command}, {"config", config}, {"timestamp", {{"utc", utc_now()}}}};
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_json(std::ostringstream& o, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<size_t>(indent) * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<size_t>(indent) * depth, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { o << "{}"; return; }
      o << "{" << nl;
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) o << "," << nl;
        first = false;
        o << pad << json(k).dump() << (indent > 0 ? ": " : ":");
        write_json(o, v, indent, depth + 1);
      }
      o << nl << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { o << "[]"; return; }
      o << "[" << nl;
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) o << "," << nl;
        o << pad;
        write_json(o, j[i], indent, depth + 1);
      }
      o << nl << close << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v))
        o << fmt17(v);
      else
        o << "null";
      return;
    }
    default:
      o << j.dump();
  }
}

std::vector<LayerLimit> layer_limits(const EnsembleSpec& e, const TimeGrid& g) {
  std::vector<LayerLimit> lim;
  for (size_t m = 0; m < g.taus.size(); ++m) {
    const auto d = limit_symbol(e, g.layer_times[m]);
    lim.push_back({d.a0, d.a1, g.taus[m]});
  }
  return lim;
}

struct Prediction {
  double sigma2 = 0.0;
  std::vector<double> per_k;
  json extra = json::object();
};

Prediction predict(const EnsembleSpec& e, const TimeGrid& g, const LayeredStatistic& st, int K) {
  Prediction p;
  if (e.family == Family::NonStationaryHermite) {
    // general Laurent symbols; the layer symbols are not of the symmetric tridiagonal form
    std::vector<LaurentSymbol> sym;
    for (size_t m = 0; m < g.layer_times.size(); ++m) {
      const auto d = limit_symbol(e, g.layer_times[m]);
      sym.push_back(std::visit([&](const auto& f) { return compose(f, d.symbol); }, st.layers[m]).scaled(st.weight(m)));
    }
    int kmax = 0;
    for (const auto& s : sym) kmax = std::max({kmax, s.max_power(), -s.min_power()});
    p.per_k.assign(std::max(kmax, 1), 0.0);
    for (int k = 1; k <= kmax; ++k)
      for (size_t a = 0; a < sym.size(); ++a) {
        p.per_k[k - 1] += k * sym[a][k] * sym[a][-k];
        for (size_t b = a + 1; b < sym.size(); ++b) p.per_k[k - 1] += 2.0 * k * sym[b][k] * sym[a][-k];
      }
    p.sigma2 = toeplitz_variance_limit(sym);
    p.extra["form"] = "general_laurent";
    return p;
  }
  const auto v = variance_fixed_N(st, layer_limits(e, g), K);
  p.sigma2 = v.sigma2;
  p.per_k = v.per_k_terms;
  p.extra = {{"form", "symmetric"}, {"sigma2_asymmetric", v.sigma2_asymmetric}, {"series_K", v.series_K}};
  return p;
}

std::string csv_rows(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream o;
  for (size_t i = 0; i < header.size(); ++i) o << (i ? "," : "") << header[i];
  o << "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << fmt17(r[i]);
    o << "\n";
  }
  return o.str();
}

json cumulant_report_json(const CumulantReport& r) {
  json vals = json::object();
  for (const auto& [k, v] : r.values) vals[std::to_string(k)] = v;
  return {{"method", method_name(r.method)}, {"values", vals},       {"radius", r.radius},
          {"truncation", r.truncation},      {"window", r.window},    {"residual", r.residual},
          {"quad_points", r.quad_points}};
}

template <typename F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
}

}  // namespace

const std::map<std::string, std::string>& embedded_schemas();

const json& schema_for(const std::string& key) {
  static const std::map<std::string, json> parsed = [] {
    std::map<std::string, json> m;
    for (const auto& [file, text] : embedded_schemas()) m[file.substr(0, file.size() - 12)] = json::parse(text);
    return m;
  }();
  const auto it = parsed.find(key);
  if (it == parsed.end()) throw std::out_of_range("no schema named '" + key + "'");
  return it->second;
}

std::string dump_json(const json& j, int indent) {
  std::ostringstream o;
  o.imbue(std::locale::classic());
  write_json(o, j, indent, 0);
  o << "\n";
  return o.str();
}

std::string validate_schema(const json& x, const json& schema, const std::string& path) {
  if (schema.contains("type")) {
    auto matches = [&](const std::string& t) {
      if (t == "object") return x.is_object();
      if (t == "array") return x.is_array();
      if (t == "string") return x.is_string();
      if (t == "boolean") return x.is_boolean();
      if (t == "integer") return x.is_number_integer();
      if (t == "number") return x.is_number();
      if (t == "null") return x.is_null();
      return false;
    };
    bool ok = false;
    if (schema["type"].is_array()) {
      for (const auto& t : schema["type"]) ok |= matches(t.get<std::string>());
    } else {
      ok = matches(schema["type"].get<std::string>());
    }
    if (!ok) return path + ": expected type " + schema["type"].dump();
  }
  if (schema.contains("const") && x != schema["const"]) return path + ": expected " + schema["const"].dump();
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"]) found |= (v == x);
    if (!found) return path + ": value not in enum";
  }
  if (schema.contains("minimum") && x.is_number() && x.get<double>() < schema["minimum"].get<double>())
    return path + ": below minimum";
  if (x.is_object()) {
    if (schema.contains("required"))
      for (const auto& k : schema["required"])
        if (!x.contains(k.get<std::string>())) return path + ": missing '" + k.get<std::string>() + "'";
    const json props = schema.value("properties", json::object());
    for (const auto& [k, v] : x.items()) {
      if (props.contains(k)) {
        auto e = validate_schema(v, props[k], path + "." + k);
        if (!e.empty()) return e;
      } else if (schema.contains("additionalProperties")) {
        const auto& ap = schema["additionalProperties"];
        if (ap.is_boolean() && !ap.get<bool>()) return path + ": unexpected key '" + k + "'";
        if (ap.is_object()) {
          auto e = validate_schema(v, ap, path + "." + k);
          if (!e.empty()) return e;
        }
      }
    }
  }
  if (x.is_array() && schema.contains("items"))
    for (size_t i = 0; i < x.size(); ++i) {
      auto e = validate_schema(x[i], schema["items"], path + "[" + std::to_string(i) + "]");
      if (!e.empty()) return e;
    }
  return "";
}

CommandResult cmd_variance_predict(const json& config, const RunOptions&) {
  Section s(config, "$", {"ensemble", "times", "bridge_times", "statistic", "series_K"});
  const auto e = parse_ensemble(s.raw("ensemble"));
  const auto g = parse_times(s, e);
  const auto st = parse_statistic(s.raw("statistic"), g.taus);
  const int K = static_cast<int>(s.integer("series_K", 0));
  const auto p = as_config_error([&] { return predict(e, g, st, K); });

  CommandResult r;
  r.report = header("predict", config);
  r.report["ensemble"] = ensemble_json(e);
  r.report["times"] = g.input;
  r.report["taus"] = g.taus;
  r.report["sigma2"] = p.sigma2;
  r.report["per_k_terms"] = p.per_k;
  r.report["details"] = p.extra;
  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < p.per_k.size(); ++k) rows.push_back({static_cast<double>(k + 1), p.per_k[k]});
  r.csv = csv_rows({"k", "term"}, rows);
  r.csv_name = "terms";
  return r;
}

CommandResult cmd_cumulant(const json& config, const RunOptions&) {
  Section s(config, "$",
            {"ensemble", "times", "bridge_times", "statistic", "n", "k_max", "method", "radius", "quad_points",
             "truncation", "series_K"});
  const auto e = parse_ensemble(s.raw("ensemble"));
  const auto g = parse_times(s, e);
  const auto st = parse_statistic(s.raw("statistic"), g.taus);
  const int n = static_cast<int>(s.integer("n", e.n));
  const int k_max = static_cast<int>(s.integer("k_max", 4));
  const std::string method = s.string("method", "windowed");
  if (method != "windowed" && method != "contour" && method != "both" && method != "composition")
    throw ConfigError("$.method: expected windowed, contour, both or composition");
  CumulantRequest req;
  req.stat = st;
  req.n = n;
  req.k_max = k_max;
  req.quad_points = static_cast<int>(s.integer("quad_points", 64));
  if (s.has("radius")) {
    const auto& rv = s.raw("radius");
    if (rv.is_string()) {
      if (rv.get<std::string>() != "auto") throw ConfigError("$.radius: expected a number or \"auto\"");
    } else if (rv.is_number()) {
      req.radius = rv.get<double>();
    } else {
      throw ConfigError("$.radius: expected a number or \"auto\"");
    }
  }
  const int bw = e.family == Family::NonStationaryHermite ? std::max(1, e.V.degree() - 1) : 1;
  const int S = static_cast<int>(s.integer("truncation", required_truncation(n, k_max, st, bw)));

  CommandResult r;
  r.report = header("cumulant", config);
  as_config_error([&] {
    for (double t : g.layer_times) req.J_list.push_back(weighted_recurrence(e, t, S));
    json reports = json::object();
    if (method == "windowed" || method == "both")
      reports["contour_windowed"] = cumulant_report_json(cumulants_windowed_report(req));
    if (method == "contour" || method == "both") reports["contour_full"] = cumulant_report_json(cumulants_contour(req));
    if (method == "composition")
      reports["composition_series"] = {{"method", "composition_series"},
                                       {"values", {{"2", composition_series_C2(req.J_list, st, n)}}}};
    r.report["cumulants"] = reports;
    return 0;
  });
  r.report["ensemble"] = ensemble_json(e);
  r.report["times"] = g.input;
  r.report["taus"] = g.taus;
  r.report["n"] = n;
  r.report["truncation"] = S;
  if (!st.weights.empty()) r.report["grid_regularity"] = st.grid_regularity(s.raw("statistic").at("riemann_end").get<double>());
  try {
    r.report["prediction"] = {{"sigma2", predict(e, g, st, static_cast<int>(s.integer("series_K", 0))).sigma2}};
  } catch (const std::exception& ex) {
    r.report["prediction"] = {{"error", ex.what()}};
  }
  return r;
}

CommandResult cmd_mc(const json& config, const RunOptions& opt) {
  Section s(config, "$", {"n", "times", "samples", "statistic", "seed", "rescale"});
  OUBridgeConfig c;
  c.n = static_cast<int>(s.integer("n"));
  c.times = s.numbers("times");
  c.samples = s.integer("samples");
  c.seed = opt.seed ? *opt.seed : static_cast<std::uint64_t>(s.integer("seed", 1));
  c.rescale = s.boolean("rescale", true);
  c.threads = opt.threads;
  as_config_error([&] { c.validate(); return 0; });
  const auto st = parse_statistic(s.raw("statistic"), c.times);
  const auto rep = as_config_error([&] { return run_experiment(c, st); });

  CommandResult r;
  r.report = header("mc", config);
  r.report["timestamp"]["wall_seconds"] = rep.wall_seconds;
  r.report["seed"] = c.seed;
  r.report["samples"] = rep.samples;
  r.report["mean"] = rep.mean;
  r.report["variance"] = rep.variance;
  r.report["k3"] = rep.k3;
  r.report["k4"] = rep.k4;
  r.report["se"] = {{"mean", rep.se_mean}, {"variance", rep.se_variance}, {"k3", rep.se_k3}, {"k4", rep.se_k4}};
  r.report["layer_means"] = rep.layer_means;
  r.report["layer_covariance"] = rep.layer_covariance;
  r.report["power_sums"] = rep.used_power_sums;
  if (c.rescale) {
    EnsembleSpec e;
    e.n = c.n;
    TimeGrid g{c.times, c.times, c.times, false};
    const double pred = predict(e, g, st, 0).sigma2;
    r.report["prediction"] = {{"sigma2", pred}, {"z_score", (rep.variance - pred) / rep.se_variance}};
  }
  if (opt.dump_samples) {
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < rep.per_sample.size(); ++i) rows.push_back({static_cast<double>(i), rep.per_sample[i]});
    r.csv = csv_rows({"sample", "X"}, rows);
    r.csv_name = "samples";
  }
  return r;
}

CommandResult cmd_gff_check(const json& config, const RunOptions&) {
  Section s(config, "$", {"geometry", "bumps", "K", "quad", "tolerance"});
  Section geo(s.raw("geometry"), "$.geometry", {"preset", "interval"});
  if (geo.string("preset", "hermite_ou") != "hermite_ou") throw ConfigError("$.geometry.preset: only hermite_ou is available");
  const auto iv = geo.numbers("interval");
  if (iv.size() != 2 || !(iv[1] > iv[0])) throw ConfigError("$.geometry.interval: expected [alpha, beta] with alpha < beta");
  const auto geom = GffGeometry::hermite_ou(iv[0], iv[1]);
  const int K = static_cast<int>(s.integer("K", 64));
  const int quad = static_cast<int>(s.integer("quad", 64));
  const double tol = s.number("tolerance", 1e-3);
  const auto& bumps = s.raw("bumps");
  if (!bumps.is_array() || bumps.empty()) throw ConfigError("$.bumps: expected a non-empty array");

  CommandResult r;
  r.report = header("gff", config);
  json rows = json::array();
  bool pass = true;
  for (size_t i = 0; i < bumps.size(); ++i) {
    const std::string w = "$.bumps[" + std::to_string(i) + "]";
    Section b(bumps[i], w, {"center", "radius", "amplitude", "power"});
    const auto c = b.numbers("center"), rad = b.numbers("radius");
    if (c.size() != 2 || rad.size() != 2) throw ConfigError(w + ": center and radius need two entries");
    if (c[0] - rad[0] < iv[0] || c[0] + rad[0] > iv[1]) throw ConfigError(w + ": tau support must lie inside the interval");
    const auto phi = as_config_error([&] {
      return product_bump(c[0], rad[0], c[1], rad[1], b.number("amplitude", 1.0), static_cast<int>(b.integer("power", 4)));
    });
    const double d = dirichlet_norm(phi);
    const auto sg = sigma_from_phi(phi, geom, K, quad);
    const double gap = std::abs(sg.sigma2 - d) / d;
    pass &= gap < tol;
    rows.push_back({{"dirichlet_norm", d}, {"sigma2", sg.sigma2}, {"relative_gap", gap}, {"last_term", sg.last_term}});
  }
  r.report["results"] = rows;
  r.report["tolerance"] = tol;
  r.report["pass"] = pass;
  r.exit_code = pass ? 0 : 1;
  return r;
}

CommandResult cmd_oracle(const json& config, const RunOptions&) {
  Section s(config, "$",
            {"family", "M", "p", "mu", "gamma", "grid_max", "n", "polynomial", "compare_cumulants",
             "tolerance_variance", "tolerance_moments"});
  const std::string fam = s.string("family");
  const int n = static_cast<int>(s.integer("n"));
  const auto ope = as_config_error([&] {
    if (fam == "Krawtchouk") return DiscreteOPE::krawtchouk(static_cast<int>(s.integer("M")), s.number("p", 0.5), n);
    if (fam == "Charlier") return DiscreteOPE::charlier(s.number("mu", 1.0), n, static_cast<int>(s.integer("grid_max", -1)));
    if (fam == "Meixner")
      return DiscreteOPE::meixner(s.number("gamma", 1.0), s.number("mu", 0.5), n, static_cast<int>(s.integer("grid_max", -1)));
    throw ConfigError("$.family: expected Krawtchouk, Charlier or Meixner");
  });
  const Polynomial f(s.numbers("polynomial"));
  std::vector<double> fv;
  for (double x : ope.grid) fv.push_back(f(x));
  const double tol_v = s.number("tolerance_variance", 1e-10), tol_m = s.number("tolerance_moments", 1e-7);

  const auto en = as_config_error([&] { return enumerate_small(ope, fv); });
  const double kv = variance_oracle_single_time(ope, fv);
  CommandResult r;
  r.report = header("oracle", config);
  r.report["grid_size"] = ope.size();
  r.report["warnings"] = ope.warnings;
  r.report["enumeration"] = {{"configurations", en.configurations}, {"mean", en.mean}, {"variance", en.variance},
                             {"k3", en.k3}, {"k4", en.k4}, {"raw_moments", en.raw_moments}};
  r.report["kernel_variance"] = kv;
  json cmp = json::array();
  bool pass = true;
  auto add = [&](const std::string& name, double v, double ref, double tol) {
    const double err = std::abs(v - ref) / std::max(std::abs(ref), 1e-300);
    const bool ok = std::abs(v - ref) <= tol * std::max(std::abs(ref), 1.0);
    pass &= ok;
    cmp.push_back({{"name", name}, {"value", v}, {"reference", ref}, {"relative_error", err}, {"tolerance", tol}, {"pass", ok}});
  };
  add("kernel_variance", kv, en.variance, tol_v);
  if (s.boolean("compare_cumulants", true)) {
    CumulantRequest req;
    req.J_list = {ope.jacobi()};
    req.stat = LayeredStatistic::same_polynomial(f, {0.0});
    req.n = n;
    const auto m = as_config_error([&] { return moments_by_finite_difference(req, 4); });
    r.report["determinant_moments"] = m;
    for (int k = 0; k < 4; ++k) add("moment_" + std::to_string(k + 1), m[k], en.raw_moments[k], tol_m);
  }
  r.report["comparisons"] = cmp;
  r.report["pass"] = pass;
  r.exit_code = pass ? 0 : 1;
  return r;
}

CommandResult cmd_ensemble_info(const json& config, const RunOptions&) {
  Section s(config, "$", {"ensemble", "time", "truncation", "half_width"});
  const auto e = parse_ensemble(s.raw("ensemble"));
  const double t = s.number("time", e.family == Family::Hahn ? 0.5 * (e.B + e.C) : 0.0);
  const int w = static_cast<int>(s.integer("half_width", 2));
  if (w < 0 || w >= e.n) throw ConfigError("$.half_width: must satisfy 0 <= half_width < n");
  const int S = static_cast<int>(s.integer("truncation", e.n + w + 2));
  if (S < e.n + w + 1) throw ConfigError("$.truncation: must exceed n + half_width");
  CommandResult r;
  r.report = header("ensemble-info", config);
  r.report["ensemble"] = ensemble_json(e);
  r.report["time"] = t;
  as_config_error([&] {
    const auto J = weighted_recurrence(e, t, S);
    json rows = json::array();
    for (int k = e.n - w; k <= e.n + w; ++k) {
      const auto pr = probe_recurrence(e, t, k);
      rows.push_back({{"index", k}, {"a", pr.a}, {"b", pr.b}, {"weighted_sub", J(k + 1, k)}, {"weighted_super", J(k, k + 1)}});
    }
    r.report["recurrence"] = rows;
    const auto d = limit_symbol(e, t);
    r.report["limit"] = {{"a0", d.a0}, {"a1", d.a1}, {"tau", d.tau}, {"kappa_n", d.kappa_n},
                         {"kappa_description", d.kappa_desc}, {"symbol", symbol_json(d.symbol)}};
    if (e.family == Family::Hahn) {
      const auto h = hahn_limits(e.B, e.C, t);
      r.report["hahn"] = {{"a_inf", h.a_inf}, {"b_inf", h.b_inf}, {"a_n", h.a_n},   {"a_2n", h.a_2n},
                          {"b_n", h.b_n},     {"b_2n", h.b_2n},   {"n", h.n},       {"tau", h.tau},
                          {"tau_printed", h.tau_printed}};
    }
    return 0;
  });
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-time CLT predictions and checks for determinantal processes"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  RunOptions opt;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_option("--out", opt.out, "Report path (default: stdout)");
  app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--dump-samples", opt.dump_samples, "Write per-sample statistics as CSV (mc)");

  using Handler = CommandResult (*)(const json&, const RunOptions&);
  const std::vector<std::pair<std::string, Handler>> commands = {
      {"predict", cmd_variance_predict}, {"cumulant", cmd_cumulant},     {"mc", cmd_mc},
      {"gff", cmd_gff_check},            {"oracle", cmd_oracle},         {"ensemble-info", cmd_ensemble_info}};
  for (const auto& [name, h] : commands) app.add_subcommand(name)->add_option("--config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count()) opt.seed = seed;

  Handler handler = nullptr;
  std::string command;
  for (const auto& [name, h] : commands)
    if (app.got_subcommand(name)) {
      handler = h;
      command = name;
    }

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    json config;
    try {
      config = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (auto bad = validate_schema(config, schema_for(command + ".config")); !bad.empty()) throw ConfigError(bad);
    CommandResult res = handler(config, opt);
    const std::string text = dump_json(res.report);
    if (opt.out.empty()) {
      out << text;
    } else {
      std::ofstream f(opt.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write '" + opt.out + "'");
      f << text;
      if (!res.csv.empty()) {
        std::string base = opt.out;
        if (auto dot = base.rfind('.'); dot != std::string::npos && base.find('/', dot) == std::string::npos)
          base.resize(dot);
        std::ofstream c(base + "." + res.csv_name + ".csv", std::ios::binary);
        c << res.csv;
      }
    }
    return res.exit_code;
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << command << " failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mtclt::cli
