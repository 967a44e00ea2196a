#include "capxray/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace capxray {

using nlohmann::json;

double ExperimentConfig::tolerance(const std::string& check, double fallback) const {
  const auto it = tolerances.find(check);
  return it == tolerances.end() ? fallback : it->second;
}

// ---------------------------------------------------------------------------
// Pointer -> line map. A small scanner over the raw text; it assumes the
// text is valid JSON (it runs after the real parser has accepted it).

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

struct Frame {
  bool object;
  std::string path;
  std::string key;
  int index = 0;
  bool expect_key = true;
};

}  // namespace

std::map<std::string, int> json_pointer_lines(const std::string& text) {
  std::map<std::string, int> lines;
  std::vector<Frame> stack;
  int line = 1;
  std::size_t i = 0;

  auto value_path = [&]() -> std::string {
    if (stack.empty()) return "";
    const Frame& f = stack.back();
    return f.path + "/" + (f.object ? escape_token(f.key) : std::to_string(f.index));
  };
  auto read_string = [&]() {
    std::string s;
    ++i;
    while (i < text.size() && text[i] != '"') {
      if (text[i] == '\\' && i + 1 < text.size()) {
        s += text[i + 1];
        i += 2;
        continue;
      }
      if (text[i] == '\n') ++line;
      s += text[i++];
    }
    ++i;
    return s;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == ':') {
      ++i;
    } else if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().object) stack.back().expect_key = true;
        else ++stack.back().index;
      }
      ++i;
    } else if (c == '}' || c == ']') {
      stack.pop_back();
      ++i;
    } else if (c == '"' && !stack.empty() && stack.back().object && stack.back().expect_key) {
      stack.back().key = read_string();
      stack.back().expect_key = false;
    } else {
      const std::string p = value_path();
      lines.emplace(p, line);
      if (c == '{' || c == '[') {
        stack.push_back({c == '{', p, {}, 0, true});
        ++i;
      } else if (c == '"') {
        read_string();
      } else {
        while (i < text.size() && std::string(",}] \t\r\n").find(text[i]) == std::string::npos) ++i;
      }
    }
  }
  return lines;
}

// ---------------------------------------------------------------------------

namespace {

class Reader {
 public:
  Reader(const std::string& text, std::filesystem::path source)
      : source_(std::move(source)), lines_(json_pointer_lines(text)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    std::string where = source_.string();
    std::string p = pointer;
    // Report the nearest enclosing value that exists in the document.
    while (true) {
      const auto it = lines_.find(p);
      if (it != lines_.end()) {
        where += ":" + std::to_string(it->second);
        break;
      }
      const auto slash = p.rfind('/');
      if (slash == std::string::npos) break;
      p = p.substr(0, slash);
    }
    throw ConfigError(where + ": " + (pointer.empty() ? "/" : pointer) + ": " + msg);
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ptr, "expected a finite number");
    return x;
  }

  int integer(const json& v, const std::string& ptr) const {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned_integer(const json& v, const std::string& ptr) const {
    if (!v.is_number_unsigned()) fail(ptr, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& v, const std::string& ptr) const {
    if (!v.is_boolean()) fail(ptr, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::string& ptr) const {
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
  }

  // A complex number is a real number or a [re, im] pair.
  cplx complex(const json& v, const std::string& ptr) const {
    if (v.is_number()) return {number(v, ptr), 0.0};
    if (!v.is_array() || v.size() != 2) fail(ptr, "expected a number or [re, im]");
    return {number(v[0], ptr + "/0"), number(v[1], ptr + "/1")};
  }

  Vec3 vec3(const json& v, const std::string& ptr) const {
    if (!v.is_array() || v.size() != 3) fail(ptr, "expected an array of 3 numbers");
    return {number(v[0], ptr + "/0"), number(v[1], ptr + "/1"), number(v[2], ptr + "/2")};
  }

  CVec3 cvec3(const json& v, const std::string& ptr) const {
    if (!v.is_array() || v.size() != 3) fail(ptr, "expected an array of 3 entries");
    return {complex(v[0], ptr + "/0"), complex(v[1], ptr + "/1"), complex(v[2], ptr + "/2")};
  }

  const json& object(const json& v, const std::string& ptr) const {
    if (!v.is_object()) fail(ptr, "expected an object");
    return v;
  }

  void known_keys(const json& obj, const std::string& ptr, const std::set<std::string>& keys) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!keys.count(it.key())) fail(ptr + "/" + escape_token(it.key()), "unknown key");
    }
  }

 private:
  std::filesystem::path source_;
  std::map<std::string, int> lines_;
};

void read_domain(const Reader& r, const json& j, DomainConfig& d) {
  const std::string p = "/domain";
  r.object(j, p);
  r.known_keys(j, p, {"beta", "beta_prime", "cap_nu", "cap_nv", "n_psi", "n_a", "quad_nodes"});
  if (j.contains("beta")) d.beta = r.number(j["beta"], p + "/beta");
  if (j.contains("beta_prime")) d.beta_prime = r.number(j["beta_prime"], p + "/beta_prime");
  if (!(d.beta_prime > 0.0 && d.beta_prime < d.beta && d.beta < 1.0)) {
    r.fail(j.contains("beta_prime") ? p + "/beta_prime" : p + "/beta",
           "need 0 < beta_prime < beta < 1");
  }
  auto sized = [&](const char* key, int& out, int minimum, bool even) {
    if (!j.contains(key)) return;
    const std::string q = p + "/" + key;
    out = r.integer(j[key], q);
    if (out < minimum) r.fail(q, "must be at least " + std::to_string(minimum));
    if (even && out % 2 != 0) r.fail(q, "must be even");
  };
  sized("cap_nu", d.cap_nu, 4, false);
  sized("cap_nv", d.cap_nv, 8, true);
  sized("n_psi", d.n_psi, 4, false);
  sized("n_a", d.n_a, 2, false);
  sized("quad_nodes", d.quad_nodes, 4, false);
}

Polynomial read_polynomial(const Reader& r, const json& j, const std::string& p) {
  if (!j.is_array()) r.fail(p, "expected an array of monomials");
  Polynomial poly;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string q = p + "/" + std::to_string(k);
    r.object(j[k], q);
    r.known_keys(j[k], q, {"coef", "powers"});
    Polynomial::Monomial m;
    if (j[k].contains("coef")) m.coef = r.complex(j[k]["coef"], q + "/coef");
    if (j[k].contains("powers")) {
      const auto& pw = j[k]["powers"];
      if (!pw.is_array() || pw.size() != 3) r.fail(q + "/powers", "expected 3 integers");
      for (int c = 0; c < 3; ++c) {
        m.powers[c] = r.integer(pw[c], q + "/powers/" + std::to_string(c));
        if (m.powers[c] < 0) r.fail(q + "/powers/" + std::to_string(c), "must be non-negative");
      }
    }
    poly.terms.push_back(m);
  }
  return poly;
}

VectorPotential read_potential(const Reader& r, const json& j, double sigma, double beta) {
  const std::string p = "/potential_family";
  if (!j.is_array()) r.fail(p, "expected an array of potential terms");
  std::vector<PotentialTerm> terms;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string q = p + "/" + std::to_string(k);
    const json& t = r.object(j[k], q);
    r.known_keys(t, q, {"kind", "center", "radius", "direction", "polynomial"});
    PotentialTerm term;
    const std::string kind = t.contains("kind") ? r.string(t["kind"], q + "/kind") : "directed";
    if (kind == "directed") {
      term.kind = PotentialTerm::Kind::directed;
    } else if (kind == "gradient") {
      term.kind = PotentialTerm::Kind::gradient;
    } else {
      r.fail(q + "/kind", "expected \"directed\" or \"gradient\"");
    }
    if (!t.contains("center")) r.fail(q, "missing \"center\"");
    if (!t.contains("radius")) r.fail(q, "missing \"radius\"");
    term.bump.center = r.vec3(t["center"], q + "/center");
    term.bump.radius = r.number(t["radius"], q + "/radius");
    if (!(term.bump.radius > 0.0)) r.fail(q + "/radius", "must be positive");
    if (t.contains("polynomial")) term.bump.poly = read_polynomial(r, t["polynomial"], q + "/polynomial");
    if (term.kind == PotentialTerm::Kind::directed) {
      if (!t.contains("direction")) r.fail(q, "directed terms need \"direction\"");
      term.direction = r.cvec3(t["direction"], q + "/direction");
    } else if (t.contains("direction")) {
      r.fail(q + "/direction", "gradient terms take no direction");
    }
    terms.push_back(term);
    try {
      VectorPotential({term}, sigma).check_cone(beta);
    } catch (const Error& e) {
      r.fail(q, e.what());
    }
  }
  return VectorPotential(std::move(terms), sigma);
}

void read_pair(const Reader& r, const json& j, const std::string& p, const DomainConfig& d,
               PairSpec& s) {
  r.object(j, p);
  r.known_keys(j, p, {"kind", "value", "seed", "file", "support_height"});
  if (j.contains("kind")) s.kind = r.string(j["kind"], p + "/kind");
  if (s.kind != "zero" && s.kind != "constant" && s.kind != "random" && s.kind != "file") {
    r.fail(p + "/kind", "expected one of zero, constant, random, file");
  }
  if (j.contains("value")) s.value = r.complex(j["value"], p + "/value");
  if (j.contains("seed")) s.seed = r.unsigned_integer(j["seed"], p + "/seed");
  if (j.contains("file")) s.file = r.string(j["file"], p + "/file");
  if (s.kind == "file" && s.file.empty()) r.fail(p, "kind \"file\" needs \"file\"");
  if (j.contains("support_height")) {
    const double h = r.number(j["support_height"], p + "/support_height");
    if (!(h >= d.beta_prime && h <= d.beta)) {
      r.fail(p + "/support_height", "must lie in [beta_prime, beta]");
    }
    s.support_height = h;
  }
}

void read_probe(const Reader& r, const json& j, ProbeConfig& c) {
  const std::string p = "/probe";
  r.object(j, p);
  r.known_keys(j, p, {"mode", "rings", "max_mode", "cap_nu", "cap_nv", "n_psi", "n_a",
                      "quad_nodes", "levels", "plant_kernel", "gram_cutoff", "floor"});
  auto& o = c.options;
  if (j.contains("mode")) {
    try {
      o.mode = parse_probe_mode(r.string(j["mode"], p + "/mode"));
    } catch (const ParameterError& e) {
      r.fail(p + "/mode", e.what());
    }
  }
  auto positive = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    out = r.integer(j[key], p + "/" + key);
    if (out < 1) r.fail(p + "/" + key, "must be positive");
  };
  positive("rings", o.rings);
  positive("cap_nu", o.cap_nu);
  positive("cap_nv", o.cap_nv);
  positive("n_psi", o.n_psi);
  positive("n_a", o.n_a);
  positive("quad_nodes", o.quad_nodes);
  positive("levels", o.levels);
  if (j.contains("max_mode")) {
    o.max_mode = r.integer(j["max_mode"], p + "/max_mode");
    if (o.max_mode < 0) r.fail(p + "/max_mode", "must be non-negative");
  }
  if (j.contains("plant_kernel")) o.plant_kernel = r.boolean(j["plant_kernel"], p + "/plant_kernel");
  if (o.plant_kernel && o.mode != ProbeMode::raw_pair) {
    r.fail(p + "/plant_kernel", "a planted kernel needs mode \"raw_pair\"");
  }
  if (j.contains("gram_cutoff")) o.gram_cutoff = r.number(j["gram_cutoff"], p + "/gram_cutoff");
  if (j.contains("floor")) c.floor = r.number(j["floor"], p + "/floor");
}

void read_dbar(const Reader& r, const json& j, DbarCheckConfig& c) {
  const std::string p = "/dbar_check";
  r.object(j, p);
  r.known_keys(j, p, {"n", "radius", "center", "pad"});
  if (j.contains("n")) {
    c.n = r.integer(j["n"], p + "/n");
    if (c.n < 16) r.fail(p + "/n", "must be at least 16");
  }
  if (j.contains("radius")) {
    c.radius = r.number(j["radius"], p + "/radius");
    if (!(c.radius > 0.0)) r.fail(p + "/radius", "must be positive");
  }
  if (j.contains("center")) c.center = r.complex(j["center"], p + "/center");
  if (j.contains("pad")) {
    c.pad = r.integer(j["pad"], p + "/pad");
    if (c.pad < 1) r.fail(p + "/pad", "must be at least 1");
  }
}

void read_fourier(const Reader& r, const json& j, FourierSplitConfig& c) {
  const std::string p = "/fourier_split";
  r.object(j, p);
  r.known_keys(j, p, {"samples", "smoothness", "beta", "epsilons"});
  if (j.contains("samples")) {
    c.samples = r.integer(j["samples"], p + "/samples");
    if (c.samples < 64 || (c.samples & (c.samples - 1)) != 0) {
      r.fail(p + "/samples", "must be a power of two >= 64");
    }
  }
  if (j.contains("smoothness")) {
    c.smoothness = r.number(j["smoothness"], p + "/smoothness");
    if (!(c.smoothness > 0.5)) r.fail(p + "/smoothness", "must exceed 1/2");
  }
  if (j.contains("beta")) c.beta = r.number(j["beta"], p + "/beta");
  if (!(c.beta > 0.0 && c.beta < c.smoothness - 0.5)) {
    r.fail(p + (j.contains("beta") ? "/beta" : ""), "beta must lie in (0, smoothness - 1/2)");
  }
  if (j.contains("epsilons")) {
    const auto& e = j["epsilons"];
    if (!e.is_array() || e.empty()) r.fail(p + "/epsilons", "expected a non-empty array");
    c.epsilons.clear();
    for (std::size_t k = 0; k < e.size(); ++k) {
      const std::string q = p + "/epsilons/" + std::to_string(k);
      const double x = r.number(e[k], q);
      if (!(x > 0.0 && x < 1.0)) r.fail(q, "must lie in (0, 1)");
      c.epsilons.push_back(x);
    }
  }
}

void read_modulus(const Reader& r, const json& j, ModulusPlotConfig& c) {
  const std::string p = "/modulus_plot";
  r.object(j, p);
  r.known_keys(j, p, {"kind", "sigma", "rows", "s_max", "log_s_max"});
  if (j.contains("kind")) {
    c.kind = r.string(j["kind"], p + "/kind");
    if (c.kind != "single_log" && c.kind != "double_log" && c.kind != "triple_log") {
      r.fail(p + "/kind", "expected single_log, double_log or triple_log");
    }
  }
  if (j.contains("sigma")) {
    c.sigma = r.number(j["sigma"], p + "/sigma");
    if (!(c.sigma > 0.0 && c.sigma <= 1.0)) r.fail(p + "/sigma", "must lie in (0, 1]");
  }
  if (j.contains("rows")) {
    c.rows = r.integer(j["rows"], p + "/rows");
    if (c.rows < 2) r.fail(p + "/rows", "must be at least 2");
  }
  if (j.contains("s_max")) {
    c.s_max = r.number(j["s_max"], p + "/s_max");
    if (!(c.s_max > 0.0 && c.s_max < 1.0)) r.fail(p + "/s_max", "must lie in (0, 1)");
  }
  if (j.contains("log_s_max")) {
    c.log_s_max = r.number(j["log_s_max"], p + "/log_s_max");
    if (!(c.log_s_max > -std::log(c.s_max))) r.fail(p + "/log_s_max", "must exceed -log(s_max)");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset of the error into a line number.
    const std::size_t at = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + at, '\n'));
    throw ConfigError(source.string() + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  const Reader r(text, source);
  ExperimentConfig cfg;
  cfg.source = source;
  r.object(doc, "");
  r.known_keys(doc, "",
               {"domain", "potential_family", "potential_sigma", "lambdas", "output_dir", "seed",
                "jobs", "transform", "adjoint", "probe", "identity_suite", "dbar_check",
                "fourier_split", "modulus_plot"});

  if (doc.contains("domain")) read_domain(r, doc["domain"], cfg.domain);

  double sigma = 0.25;
  if (doc.contains("potential_sigma")) {
    sigma = r.number(doc["potential_sigma"], "/potential_sigma");
    if (!(sigma > 0.0 && sigma < 0.5)) r.fail("/potential_sigma", "must lie in (0, 1/2)");
  }
  if (doc.contains("potential_family")) {
    cfg.potential = read_potential(r, doc["potential_family"], sigma, cfg.domain.beta);
  }

  if (doc.contains("lambdas")) {
    const auto& l = doc["lambdas"];
    if (!l.is_array()) r.fail("/lambdas", "expected an array of numbers");
    if (l.empty()) r.fail("/lambdas", "must not be empty");
    cfg.lambdas.clear();
    for (std::size_t k = 0; k < l.size(); ++k) {
      cfg.lambdas.push_back(r.number(l[k], "/lambdas/" + std::to_string(k)));
    }
  }
  if (doc.contains("output_dir")) {
    cfg.output_dir = r.string(doc["output_dir"], "/output_dir");
    if (cfg.output_dir.empty()) r.fail("/output_dir", "must not be empty");
  }
  if (doc.contains("seed")) cfg.seed = r.unsigned_integer(doc["seed"], "/seed");
  if (doc.contains("jobs")) {
    cfg.jobs = r.integer(doc["jobs"], "/jobs");
    if (cfg.jobs < 1) r.fail("/jobs", "must be at least 1");
  }

  if (doc.contains("transform")) {
    const json& t = r.object(doc["transform"], "/transform");
    r.known_keys(t, "/transform", {"pair", "lambda"});
    if (t.contains("pair")) read_pair(r, t["pair"], "/transform/pair", cfg.domain, cfg.transform.pair);
    if (t.contains("lambda")) cfg.transform.lambda = r.number(t["lambda"], "/transform/lambda");
  }
  if (doc.contains("adjoint")) {
    const json& a = r.object(doc["adjoint"], "/adjoint");
    r.known_keys(a, "/adjoint", {"sinogram"});
    if (a.contains("sinogram")) cfg.adjoint.sinogram = r.string(a["sinogram"], "/adjoint/sinogram");
  }
  if (doc.contains("probe")) read_probe(r, doc["probe"], cfg.probe);
  if (doc.contains("identity_suite")) {
    const json& s = r.object(doc["identity_suite"], "/identity_suite");
    r.known_keys(s, "/identity_suite", {"tolerances"});
    if (s.contains("tolerances")) {
      const json& t = r.object(s["tolerances"], "/identity_suite/tolerances");
      for (auto it = t.begin(); it != t.end(); ++it) {
        const std::string q = "/identity_suite/tolerances/" + escape_token(it.key());
        const double x = r.number(it.value(), q);
        if (!(x >= 0.0)) r.fail(q, "must be non-negative");
        cfg.tolerances[it.key()] = x;
      }
    }
  }
  if (doc.contains("dbar_check")) read_dbar(r, doc["dbar_check"], cfg.dbar_check);
  if (doc.contains("fourier_split")) read_fourier(r, doc["fourier_split"], cfg.fourier_split);
  if (doc.contains("modulus_plot")) read_modulus(r, doc["modulus_plot"], cfg.modulus_plot);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace capxray
