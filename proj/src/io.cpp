#include "capxray/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace capxray {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& p, bool binary = false) {
  std::ofstream out(p, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
  return out;
}

std::ifstream open_in(const fs::path& p, bool binary = false) {
  std::ifstream in(p, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open '" + p.string() + "' for reading");
  return in;
}

void finish(std::ostream& out, const fs::path& p) {
  out.flush();
  if (!out) throw IoError("write to '" + p.string() + "' failed");
}

// "# tag v1, key=value, key=value" -> map
std::map<std::string, std::string> parse_header(const std::string& line, const std::string& tag,
                                                const fs::path& p) {
  const std::string prefix = "# " + tag + " v1";
  if (line.rfind(prefix, 0) != 0) {
    throw IoError("'" + p.string() + "': expected header starting with '" + prefix + "'");
  }
  std::map<std::string, std::string> kv;
  std::stringstream ss(line.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(' ');
      const auto b = s.find_last_not_of(' ');
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return kv;
}

double get_num(const std::map<std::string, std::string>& kv, const std::string& key,
               const fs::path& p) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw IoError("'" + p.string() + "': header lacks '" + key + "'");
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw IoError("'" + p.string() + "': bad value for '" + key + "'");
  }
}

std::vector<double> parse_row(const std::string& line, std::size_t expected, const fs::path& p,
                              int lineno) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw IoError(p.string() + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
    }
  }
  if (v.size() != expected) {
    throw IoError(p.string() + ":" + std::to_string(lineno) + ": expected " +
                  std::to_string(expected) + " columns");
  }
  return v;
}

}  // namespace

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

void write_sinogram(const fs::path& csv, const Sinogram& s, const TransformOptions& opt) {
  const RayGrid& g = s.grid;
  {
    auto out = open_out(csv);
    out << "# capxray-sinogram v1, n=" << g.cap.dim << ", beta=" << format_double(g.cap.height)
        << ", beta_prime=" << format_double(g.cap.outer_height)
        << ", lambda=" << format_double(s.lambda) << ", n_psi=" << g.n_psi << ", n_a=" << g.n_a
        << "\n";
    for (int p = 0; p < g.n_psi; ++p) {
      for (int k = 0; k < g.n_a; ++k) {
        const cplx v = s.values[g.index(p, k)];
        out << p << ',' << k << ',' << format_double(v.real()) << ',' << format_double(v.imag())
            << '\n';
      }
    }
    finish(out, csv);
  }
  json meta = {
      {"format", "capxray-sinogram"},
      {"version", 1},
      {"n", g.cap.dim},
      {"beta", g.cap.height},
      {"beta_prime", g.cap.outer_height},
      {"lambda", s.lambda},
      {"rays", {{"n_psi", g.n_psi}, {"n_a", g.n_a},
                {"psi", "2 pi (p + 1/2) / n_psi"},
                {"a", "Gauss-Legendre nodes on (-pi/2, pi/2)"}}},
      {"quadrature", {{"nodes_per_max_chord", opt.quad_nodes}, {"min_nodes", opt.min_nodes}}},
      {"norm", s.norm()},
  };
  const auto side = sidecar_path(csv);
  auto out = open_out(side);
  out << meta.dump(2) << '\n';
  finish(out, side);
}

Sinogram read_sinogram(const fs::path& csv) {
  auto in = open_in(csv);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + csv.string() + "' is empty");
  const auto kv = parse_header(line, "capxray-sinogram", csv);
  const int n = static_cast<int>(get_num(kv, "n", csv));
  const SphericalCap cap(get_num(kv, "beta", csv), get_num(kv, "beta_prime", csv), n);
  const RayGrid grid(cap, static_cast<int>(get_num(kv, "n_psi", csv)),
                     static_cast<int>(get_num(kv, "n_a", csv)));
  Sinogram s(grid, get_num(kv, "lambda", csv));
  std::vector<char> seen(grid.size(), 0);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto r = parse_row(line, 4, csv, lineno);
    const int p = static_cast<int>(r[0]), k = static_cast<int>(r[1]);
    if (p < 0 || p >= grid.n_psi || k < 0 || k >= grid.n_a) {
      throw IoError(csv.string() + ":" + std::to_string(lineno) + ": ray index out of range");
    }
    s.values[grid.index(p, k)] = {r[2], r[3]};
    seen[grid.index(p, k)] = 1;
  }
  for (char c : seen) {
    if (!c) throw IoError("'" + csv.string() + "': missing sinogram rows");
  }
  return s;
}

void write_field_pair(const fs::path& csv, const FieldPair& p) {
  p.validate();
  const CapGrid& g = p.grid;
  auto out = open_out(csv);
  out << "# capxray-fieldpair v1, height=" << format_double(g.height) << ", nu=" << g.nu
      << ", nv=" << g.nv << "\n";
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      const int k = g.index(i, j);
      out << i << ',' << j << ',' << format_double(p.f[k].real()) << ','
          << format_double(p.f[k].imag());
      for (int c = 0; c < 3; ++c) {
        out << ',' << format_double(p.alpha[k](c).real()) << ','
            << format_double(p.alpha[k](c).imag());
      }
      out << '\n';
    }
  }
  finish(out, csv);
}

FieldPair read_field_pair(const fs::path& csv) {
  auto in = open_in(csv);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + csv.string() + "' is empty");
  const auto kv = parse_header(line, "capxray-fieldpair", csv);
  const CapGrid g(get_num(kv, "height", csv), static_cast<int>(get_num(kv, "nu", csv)),
                  static_cast<int>(get_num(kv, "nv", csv)));
  FieldPair p(g);
  std::vector<char> seen(g.size(), 0);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto r = parse_row(line, 10, csv, lineno);
    const int i = static_cast<int>(r[0]), j = static_cast<int>(r[1]);
    if (i < 0 || i >= g.nu || j < 0 || j >= g.nv) {
      throw IoError(csv.string() + ":" + std::to_string(lineno) + ": grid index out of range");
    }
    const int k = g.index(i, j);
    p.f[k] = {r[2], r[3]};
    p.alpha[k] = CVec3(cplx(r[4], r[5]), cplx(r[6], r[7]), cplx(r[8], r[9]));
    seen[k] = 1;
  }
  for (char c : seen) {
    if (!c) throw IoError("'" + csv.string() + "': missing field-pair rows");
  }
  p.validate();
  return p;
}

void write_complex_field(const fs::path& file, const ComplexField& g) {
  json head = {
      {"format", "capxray-complexfield"},
      {"version", 1},
      {"shape", {g.ny, g.nx}},
      {"extent", {g.x0, g.x1, g.y0, g.y1}},
      {"support_center", {g.support_center.real(), g.support_center.imag()}},
      {"support_radius", g.support_radius},
      {"layout", "row-major [iy][ix], float64 little-endian interleaved re, im"},
  };
  auto out = open_out(file, true);
  out << head.dump() << '\n';
  static_assert(sizeof(cplx) == 2 * sizeof(double));
  out.write(reinterpret_cast<const char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(cplx)));
  finish(out, file);
}

ComplexField read_complex_field(const fs::path& file) {
  auto in = open_in(file, true);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + file.string() + "' is empty");
  json head;
  try {
    head = json::parse(line);
    const int ny = head.at("shape").at(0).get<int>();
    const int nx = head.at("shape").at(1).get<int>();
    const auto& e = head.at("extent");
    const auto& c = head.at("support_center");
    ComplexField g(nx, ny, e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>(),
                   e.at(3).get<double>(), cplx(c.at(0).get<double>(), c.at(1).get<double>()),
                   head.at("support_radius").get<double>());
    in.read(reinterpret_cast<char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(cplx)));
    if (in.gcount() != static_cast<std::streamsize>(g.values.size() * sizeof(cplx))) {
      throw IoError("'" + file.string() + "': truncated field data");
    }
    return g;
  } catch (const json::exception& ex) {
    throw IoError("'" + file.string() + "': bad header: " + ex.what());
  }
}

}  // namespace capxray
