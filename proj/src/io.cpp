#include "zitter/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace zitter::io {
namespace {

class TokenReader {
 public:
  TokenReader(std::istream& is, std::string name) : is_(is), name_(std::move(name)) {}

  std::string next(const char* what) {
    std::string tok;
    if (!(is_ >> tok))
      fail(std::string("missing ") + what + " (token " + std::to_string(count_ + 1) + ")");
    ++count_;
    return tok;
  }
  double next_double(const char* what) {
    const std::string tok = next(what);
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail(std::string("non-numeric ") + what + " '" + tok + "' (token " +
           std::to_string(count_) + ")");
    }
    return 0.0;
  }
  int next_int(const char* what) {
    const double v = next_double(what);
    if (v != std::floor(v)) fail(std::string(what) + " must be an integer");
    return static_cast<int>(v);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(name_ + ": " + msg);
  }

 private:
  std::istream& is_;
  std::string name_;
  std::size_t count_ = 0;
};

void write_header(std::ostream& os, const char* kind, const Grid& g) {
  os << "zfield " << kind << ' ' << to_string(g.geometry()) << ' '
     << to_string(g.boundary()) << ' ' << g.dim();
  for (int a = 0; a < g.dim(); ++a) os << ' ' << g.extent(a);
  for (int a = 0; a < g.dim(); ++a) os << ' ' << fmt(g.spacing(a));
  for (int a = 0; a < g.dim(); ++a) os << ' ' << fmt(g.origin(a));
}

Grid read_grid(TokenReader& tr) {
  const Geometry geom = [&] {
    const std::string s = tr.next("geometry");
    try {
      return geometry_from_string(s);
    } catch (const std::exception& e) {
      tr.fail(e.what());
    }
  }();
  const Boundary bnd = [&] {
    const std::string s = tr.next("boundary");
    try {
      return boundary_from_string(s);
    } catch (const std::exception& e) {
      tr.fail(e.what());
    }
  }();
  const int dim = tr.next_int("dim");
  if (dim < 1 || dim > 3) tr.fail("dim out of range 1..3");
  std::vector<int> n(dim);
  std::vector<double> h(dim), o(dim);
  for (int a = 0; a < dim; ++a) n[a] = tr.next_int("extent");
  for (int a = 0; a < dim; ++a) h[a] = tr.next_double("spacing");
  for (int a = 0; a < dim; ++a) o[a] = tr.next_double("origin");
  try {
    return Grid(n, h, o, bnd, geom);
  } catch (const std::exception& e) {
    tr.fail(e.what());
  }
}

void write_values(std::ostream& os, const std::vector<double>& v, int perLine) {
  for (std::size_t i = 0; i < v.size(); ++i)
    os << (i % perLine == 0 ? '\n' : ' ') << fmt(v[i]);
  os << '\n';
}

}  // namespace

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field(std::ostream& os, const ScalarField& f) {
  write_header(os, "scalar", f.grid());
  write_values(os, f.values(), f.grid().extent(f.grid().dim() - 1));
}

void write_field(std::ostream& os, const VectorField& f) {
  write_header(os, "vector", f.grid());
  write_values(os, f.values(), f.grid().extent(f.grid().dim() - 1) * f.grid().dim());
}

void write_field(std::ostream& os, const WaveFunction& f) {
  write_header(os, "wave", f.grid());
  os << ' ' << fmt(f.mass()) << ' ' << fmt(f.hbar());
  std::vector<double> flat(2 * f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    flat[2 * i] = f[i].real();
    flat[2 * i + 1] = f[i].imag();
  }
  write_values(os, flat, f.grid().extent(f.grid().dim() - 1) * 2);
}

AnyField read_field(std::istream& is, const std::string& name) {
  TokenReader tr(is, name);
  if (tr.next("magic") != "zfield") tr.fail("not a zfield file (bad magic)");
  const std::string kind = tr.next("kind");
  if (kind == "scalar") {
    Grid g = read_grid(tr);
    std::vector<double> v(g.size());
    for (auto& x : v) x = tr.next_double("node value");
    return ScalarField(std::move(g), std::move(v));
  }
  if (kind == "vector") {
    Grid g = read_grid(tr);
    std::vector<double> v(g.size() * g.dim());
    for (auto& x : v) x = tr.next_double("node value");
    return VectorField(std::move(g), std::move(v));
  }
  if (kind == "wave") {
    Grid g = read_grid(tr);
    const double mass = tr.next_double("mass");
    const double hbar = tr.next_double("hbar");
    std::vector<std::complex<double>> psi(g.size());
    for (auto& p : psi) {
      const double re = tr.next_double("node value (re)");
      const double im = tr.next_double("node value (im)");
      p = {re, im};
    }
    return WaveFunction(std::move(g), std::move(psi), mass, hbar);
  }
  tr.fail("unknown field kind '" + kind + "'");
}

AnyField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(path + ": cannot open");
  return read_field(is, path);
}

ScalarField load_scalar(const std::string& path) {
  auto f = load_field(path);
  if (auto* s = std::get_if<ScalarField>(&f)) return std::move(*s);
  throw std::runtime_error(path + ": expected a scalar field");
}

VectorField load_vector(const std::string& path) {
  auto f = load_field(path);
  if (auto* v = std::get_if<VectorField>(&f)) return std::move(*v);
  throw std::runtime_error(path + ": expected a vector field");
}

WaveFunction load_wave(const std::string& path) {
  auto f = load_field(path);
  if (auto* w = std::get_if<WaveFunction>(&f)) return std::move(*w);
  throw std::runtime_error(path + ": expected a wave field");
}

namespace {
template <typename F>
void save_impl(const std::string& path, const F& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path + ": cannot open for writing");
  write_field(os, f);
  if (!os) throw std::runtime_error(path + ": write failed");
}

void csv_coords_header(std::ostream& os, const Grid& g) {
  static const char* names[3] = {"x0", "x1", "x2"};
  if (g.radial()) {
    os << "r";
    return;
  }
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << names[a];
}

void csv_coords_row(std::ostream& os, const Grid& g, std::size_t node) {
  const auto ijk = g.unpack(node);
  for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << fmt(g.coord(a, ijk[a]));
}
}  // namespace

void save_field(const std::string& path, const ScalarField& f) { save_impl(path, f); }
void save_field(const std::string& path, const VectorField& f) { save_impl(path, f); }
void save_field(const std::string& path, const WaveFunction& f) { save_impl(path, f); }

std::string field_csv(const ScalarField& f) {
  std::ostringstream os;
  csv_coords_header(os, f.grid());
  os << ",value\n";
  for (std::size_t n = 0; n < f.size(); ++n) {
    csv_coords_row(os, f.grid(), n);
    os << ',' << fmt(f[n]) << '\n';
  }
  return os.str();
}

std::string field_csv(const VectorField& f) {
  std::ostringstream os;
  csv_coords_header(os, f.grid());
  for (int c = 0; c < f.comps(); ++c) os << ",v" << c;
  os << '\n';
  for (std::size_t n = 0; n < f.grid().size(); ++n) {
    csv_coords_row(os, f.grid(), n);
    for (int c = 0; c < f.comps(); ++c) os << ',' << fmt(f.comp(n, c));
    os << '\n';
  }
  return os.str();
}

}  // namespace zitter::io
