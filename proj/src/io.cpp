#include "phasespace/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "phasespace/potential.hpp"

namespace phasespace {

namespace {

constexpr char kGridMagic[4] = {'P', 'S', 'Q', '1'};
constexpr char kStateMagic[4] = {'P', 'S', 'S', '1'};

// ---- little-endian primitives

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void bytes(const char* p, std::size_t n) { os_.write(p, static_cast<std::streamsize>(n)); }
  void u8(std::uint8_t v) { os_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    std::array<char, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
    bytes(b.data(), 4);
  }
  void f64(double x) {
    const auto v = std::bit_cast<std::uint64_t>(x);
    std::array<char, 8> b;
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
    bytes(b.data(), 8);
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  void bytes(char* p, std::size_t n, const char* what) {
    is_.read(p, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) {
      std::ostringstream os;
      os << "truncated file at byte offset " << off_ + static_cast<std::size_t>(is_.gcount())
         << " while reading " << what << " (" << n << " bytes expected)";
      throw IoError(os.str());
    }
    off_ += n;
  }
  std::uint8_t u8(const char* what) {
    char c;
    bytes(&c, 1, what);
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32(const char* what) {
    std::array<char, 4> b;
    bytes(b.data(), 4, what);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[k])) << (8 * k);
    return v;
  }
  double f64(const char* what) {
    std::array<char, 8> b;
    bytes(b.data(), 8, what);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[k])) << (8 * k);
    return std::bit_cast<double>(v);
  }
  std::size_t offset() const { return off_; }
  void expect_end() {
    if (is_.peek() != std::char_traits<char>::eof()) {
      std::ostringstream os;
      os << "trailing data after byte offset " << off_;
      throw IoError(os.str());
    }
  }

 private:
  std::istream& is_;
  std::size_t off_ = 0;
};

// ---- text helpers

std::string fmt(double x) {
  std::array<char, 32> buf;
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                               std::chars_format::general, 17);
  return std::string(buf.data(), r.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& where) {
  std::string t = trim(text);
  if (t.size() > 1 && t[0] == '+' && t[1] != '-' && t[1] != '+') t.erase(0, 1);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw IoError(where + ": cannot parse number '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string line_tag(std::size_t line) { return "line " + std::to_string(line); }

// Header block of `# key=value` lines; returns the first data line number.
struct CsvHeader {
  std::map<std::string, std::string> kv;
  std::vector<std::pair<std::size_t, std::string>> rows;  // (line number, text)
};

CsvHeader read_csv(std::istream& is) {
  CsvHeader h;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string body = trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      h.kv[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      continue;
    }
    h.rows.emplace_back(n, t);
  }
  return h;
}

const std::string& need(const CsvHeader& h, const std::string& key) {
  const auto it = h.kv.find(key);
  if (it == h.kv.end()) throw IoError("csv header: missing key '" + key + "'");
  return it->second;
}

Kind kind_from_name(const std::string& s) {
  for (auto k : {Kind::Wigner, Kind::SParam, Kind::Husimi, Kind::Kirkwood, Kind::Weyl,
                 Kind::Classical})
    if (kind_name(k) == s) return k;
  throw IoError("unknown kind '" + s + "'");
}

QuadratureGrid grid_from(double q_min, double q_max, double n, double hbar, const char* where) {
  try {
    if (!(n >= 0.0) || n != std::floor(n) || n > 1e9) throw std::invalid_argument("bad size");
    return QuadratureGrid(q_min, q_max, static_cast<std::size_t>(n), hbar);
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string(where) + ": invalid grid (" + e.what() + ")");
  }
}

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * scale; }

std::string read_magic(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::string head(4, '\0');
  f.read(head.data(), 4);
  head.resize(static_cast<std::size_t>(f.gcount()));
  return head;
}

std::string csv_format_key(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::size_t seen = 0;
  while (std::getline(f, line) && seen < 64) {
    ++seen;
    const auto t = trim(line);
    if (t.rfind("# format=", 0) == 0) return trim(t.substr(9));
    if (!t.empty() && t[0] != '#') break;
  }
  return {};
}

}  // namespace

// ---- grid binary

void write_grid_binary(std::ostream& os, const PhaseSpaceFunction& f) {
  Writer w(os);
  const auto& g = f.grid;
  w.bytes(kGridMagic, 4);
  w.u32(static_cast<std::uint32_t>(g.size()));
  w.u32(static_cast<std::uint32_t>(g.size()));
  w.f64(g.q_min());
  w.f64(g.q_max());
  w.f64(g.p_min());
  w.f64(g.p_max());
  w.f64(g.hbar());
  w.u8(static_cast<std::uint8_t>(f.kind));
  w.u8(f.is_complex() ? 1 : 0);
  w.f64(f.param);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      w.f64(f.re(i, j));
      if (f.is_complex()) w.f64(f.im(i, j));
    }
  if (!os) throw IoError("write failed");
}

PhaseSpaceFunction read_grid_binary(std::istream& is) {
  Reader r(is);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kGridMagic, 4) != 0)
    throw IoError("byte offset 0: bad magic, expected PSQ1");
  const std::uint32_t nq = r.u32("n_q");
  const std::uint32_t np = r.u32("n_p");
  if (nq != np) {
    std::ostringstream os;
    os << "byte offset 8: n_p = " << np << " differs from n_q = " << nq;
    throw IoError(os.str());
  }
  const double q_min = r.f64("q_min");
  const double q_max = r.f64("q_max");
  const double p_min = r.f64("p_min");
  const double p_max = r.f64("p_max");
  const double hbar = r.f64("hbar");
  const auto g = grid_from(q_min, q_max, nq, hbar, "grid header");
  const double ps = std::max(std::abs(g.p_min()), std::abs(g.p_max()));
  if (!close(p_min, g.p_min(), ps) || !close(p_max, g.p_max(), ps)) {
    std::ostringstream os;
    os << "byte offset 28: p range [" << p_min << ", " << p_max
       << "] is not the FFT axis of the q range (expected [" << g.p_min() << ", " << g.p_max()
       << "])";
    throw IoError(os.str());
  }
  const std::size_t koff = r.offset();
  const std::uint8_t kind = r.u8("kind");
  if (kind > 5) throw IoError("byte offset " + std::to_string(koff) + ": unknown kind code");
  const std::uint8_t cplx_flag = r.u8("complex flag");
  if (cplx_flag > 1) throw IoError("byte offset " + std::to_string(koff + 1) + ": bad complex flag");
  const double param = r.f64("kind parameter");
  PhaseSpaceFunction f(g, static_cast<Kind>(kind), param, cplx_flag == 1);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      f.re(i, j) = r.f64("values");
      if (cplx_flag) f.im(i, j) = r.f64("values");
    }
  r.expect_end();
  return f;
}

// ---- grid csv

void write_grid_csv(std::ostream& os, const PhaseSpaceFunction& f) {
  const auto& g = f.grid;
  os << "# format=psq-grid\n"
     << "# kind=" << kind_name(f.kind) << "\n"
     << "# param=" << fmt(f.param) << "\n"
     << "# complex=" << (f.is_complex() ? 1 : 0) << "\n"
     << "# q_min=" << fmt(g.q_min()) << "\n"
     << "# q_max=" << fmt(g.q_max()) << "\n"
     << "# n_q=" << g.size() << "\n"
     << "# hbar=" << fmt(g.hbar()) << "\n";
  const std::size_t n = g.size();
  for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << fmt(g.p(j));
  os << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    os << fmt(g.q(i));
    for (std::size_t j = 0; j < n; ++j) {
      os << "," << fmt(f.re(i, j));
      if (f.is_complex()) os << "," << fmt(f.im(i, j));
    }
    os << "\n";
  }
  if (!os) throw IoError("write failed");
}

PhaseSpaceFunction read_grid_csv(std::istream& is) {
  const CsvHeader h = read_csv(is);
  if (h.kv.count("format") && h.kv.at("format") != "psq-grid")
    throw IoError("csv header: format is '" + h.kv.at("format") + "', expected psq-grid");
  const Kind kind = kind_from_name(need(h, "kind"));
  const double param = parse_double(need(h, "param"), "csv header param");
  const bool cx = parse_double(need(h, "complex"), "csv header complex") != 0.0;
  const auto g = grid_from(parse_double(need(h, "q_min"), "csv header q_min"),
                           parse_double(need(h, "q_max"), "csv header q_max"),
                           parse_double(need(h, "n_q"), "csv header n_q"),
                           parse_double(need(h, "hbar"), "csv header hbar"), "csv header");
  const std::size_t n = g.size();
  if (h.rows.size() != n + 1) {
    std::ostringstream os;
    os << "csv: expected " << n + 1 << " data rows, found " << h.rows.size();
    throw IoError(os.str());
  }
  const auto& [pl, ptext] = h.rows[0];
  const auto pv = split(ptext, ',');
  if (pv.size() != n)
    throw IoError(line_tag(pl) + ": expected " + std::to_string(n) + " p values, found " +
                  std::to_string(pv.size()));
  const double ps = std::max(std::abs(g.p_min()), std::abs(g.p_max()));
  for (std::size_t j = 0; j < n; ++j) {
    const double p = parse_double(pv[j], line_tag(pl));
    if (!close(p, g.p(j), ps))
      throw IoError(line_tag(pl) + ": p value " + pv[j] + " does not match the grid axis");
  }
  PhaseSpaceFunction f(g, kind, param, cx);
  const std::size_t width = 1 + (cx ? 2 : 1) * n;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [ln, text] = h.rows[i + 1];
    const auto cells = split(text, ',');
    if (cells.size() != width)
      throw IoError(line_tag(ln) + ": expected " + std::to_string(width) + " fields, found " +
                    std::to_string(cells.size()));
    const double q = parse_double(cells[0], line_tag(ln));
    if (!close(q, g.q(i), g.length()))
      throw IoError(line_tag(ln) + ": q value " + cells[0] + " does not match the grid axis");
    for (std::size_t j = 0; j < n; ++j) {
      if (cx) {
        f.re(i, j) = parse_double(cells[1 + 2 * j], line_tag(ln));
        f.im(i, j) = parse_double(cells[2 + 2 * j], line_tag(ln));
      } else {
        f.re(i, j) = parse_double(cells[1 + j], line_tag(ln));
      }
    }
  }
  return f;
}

// ---- pgm

PgmRange write_pgm(std::ostream& os, const PhaseSpaceFunction& f) {
  const std::size_t n = f.n();
  auto val = [&](std::size_t i, std::size_t j) {
    return f.is_complex() ? std::abs(f.value(i, j)) : f.re(i, j);
  };
  PgmRange r{val(0, 0), val(0, 0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      r.min = std::min(r.min, val(i, j));
      r.max = std::max(r.max, val(i, j));
    }
  os << "P5\n" << n << " " << n << "\n255\n";
  const double span = r.max - r.min;
  std::vector<char> row(n);
  for (std::size_t y = 0; y < n; ++y) {
    const std::size_t j = n - 1 - y;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = span > 0.0 ? (val(i, j) - r.min) / span : 0.0;
      row[i] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
    }
    os.write(row.data(), static_cast<std::streamsize>(n));
  }
  if (!os) throw IoError("write failed");
  return r;
}

std::string pgm_sidecar(const PgmRange& r) {
  return "min=" + fmt(r.min) + " max=" + fmt(r.max) + "\n";
}

// ---- state files

void write_state_binary(std::ostream& os, const StateData& s) {
  Writer w(os);
  w.bytes(kStateMagic, 4);
  const bool dens = std::holds_alternative<DensityMatrix>(s);
  const QuadratureGrid& g =
      dens ? std::get<DensityMatrix>(s).grid : std::get<WaveFunction>(s).grid;
  w.u8(dens ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(g.size()));
  w.f64(g.q_min());
  w.f64(g.q_max());
  w.f64(g.hbar());
  const std::vector<cplx>& v =
      dens ? std::get<DensityMatrix>(s).rho.data() : std::get<WaveFunction>(s).psi;
  for (const cplx& c : v) {
    w.f64(c.real());
    w.f64(c.imag());
  }
  if (!os) throw IoError("write failed");
}

StateData read_state_binary(std::istream& is) {
  Reader r(is);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kStateMagic, 4) != 0)
    throw IoError("byte offset 0: bad magic, expected PSS1");
  const std::uint8_t type = r.u8("type");
  if (type > 1) throw IoError("byte offset 4: unknown state type");
  const std::uint32_t n = r.u32("n");
  const double q_min = r.f64("q_min");
  const double q_max = r.f64("q_max");
  const double hbar = r.f64("hbar");
  const auto g = grid_from(q_min, q_max, n, hbar, "state header");
  auto read_vec = [&](std::size_t len) {
    std::vector<cplx> v(len);
    for (auto& c : v) {
      const double re = r.f64("values");
      c = cplx(re, r.f64("values"));
    }
    return v;
  };
  StateData out;
  if (type == 0) {
    out = WaveFunction{g, read_vec(g.size())};
  } else {
    DensityMatrix d{g, ComplexMatrix(g.size(), g.size())};
    d.rho.data() = read_vec(g.size() * g.size());
    out = std::move(d);
  }
  r.expect_end();
  return out;
}

void write_state_csv(std::ostream& os, const StateData& s) {
  const bool dens = std::holds_alternative<DensityMatrix>(s);
  const QuadratureGrid& g =
      dens ? std::get<DensityMatrix>(s).grid : std::get<WaveFunction>(s).grid;
  os << "# format=psq-state\n"
     << "# type=" << (dens ? "density" : "wavefunction") << "\n"
     << "# q_min=" << fmt(g.q_min()) << "\n"
     << "# q_max=" << fmt(g.q_max()) << "\n"
     << "# n_q=" << g.size() << "\n"
     << "# hbar=" << fmt(g.hbar()) << "\n";
  const std::size_t n = g.size();
  if (!dens) {
    const auto& psi = std::get<WaveFunction>(s).psi;
    for (std::size_t i = 0; i < n; ++i)
      os << fmt(g.q(i)) << "," << fmt(psi[i].real()) << "," << fmt(psi[i].imag()) << "\n";
  } else {
    const auto& rho = std::get<DensityMatrix>(s).rho;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        os << (j ? "," : "") << fmt(rho(i, j).real()) << "," << fmt(rho(i, j).imag());
      os << "\n";
    }
  }
  if (!os) throw IoError("write failed");
}

StateData read_state_csv(std::istream& is) {
  const CsvHeader h = read_csv(is);
  if (h.kv.count("format") && h.kv.at("format") != "psq-state")
    throw IoError("csv header: format is '" + h.kv.at("format") + "', expected psq-state");
  const std::string type = need(h, "type");
  const auto g = grid_from(parse_double(need(h, "q_min"), "csv header q_min"),
                           parse_double(need(h, "q_max"), "csv header q_max"),
                           parse_double(need(h, "n_q"), "csv header n_q"),
                           parse_double(need(h, "hbar"), "csv header hbar"), "csv header");
  const std::size_t n = g.size();
  if (h.rows.size() != n)
    throw IoError("csv: expected " + std::to_string(n) + " data rows, found " +
                  std::to_string(h.rows.size()));
  if (type == "wavefunction") {
    WaveFunction w{g, std::vector<cplx>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const auto& [ln, text] = h.rows[i];
      const auto c = split(text, ',');
      if (c.size() != 3) throw IoError(line_tag(ln) + ": expected 3 fields (q, re, im)");
      if (!close(parse_double(c[0], line_tag(ln)), g.q(i), g.length()))
        throw IoError(line_tag(ln) + ": q value " + c[0] + " does not match the grid axis");
      w.psi[i] = cplx(parse_double(c[1], line_tag(ln)), parse_double(c[2], line_tag(ln)));
    }
    return w;
  }
  if (type != "density") throw IoError("csv header: unknown state type '" + type + "'");
  DensityMatrix d{g, ComplexMatrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [ln, text] = h.rows[i];
    const auto c = split(text, ',');
    if (c.size() != 2 * n)
      throw IoError(line_tag(ln) + ": expected " + std::to_string(2 * n) + " fields, found " +
                    std::to_string(c.size()));
    for (std::size_t j = 0; j < n; ++j)
      d.rho(i, j) = cplx(parse_double(c[2 * j], line_tag(ln)), parse_double(c[2 * j + 1], line_tag(ln)));
  }
  return d;
}

// ---- path-level helpers

bool is_grid_file(const std::string& path) {
  const auto m = read_magic(path);
  if (m == std::string(kGridMagic, 4)) return true;
  if (m == std::string(kStateMagic, 4)) return false;
  const auto f = csv_format_key(path);
  if (f == "psq-grid") return true;
  if (f == "psq-state") return false;
  throw IoError("'" + path + "' is neither a PSQ1/PSS1 binary nor a psq CSV file");
}

bool is_state_file(const std::string& path) { return !is_grid_file(path); }

FileFormat format_for_path(const std::string& path) {
  auto ends = [&](const char* ext) {
    const std::size_t k = std::strlen(ext);
    return path.size() >= k && path.compare(path.size() - k, k, ext) == 0;
  };
  if (ends(".csv")) return FileFormat::Csv;
  if (ends(".pgm")) return FileFormat::Pgm;
  return FileFormat::Binary;
}

FileFormat parse_format(const std::string& name) {
  if (name == "csv") return FileFormat::Csv;
  if (name == "bin") return FileFormat::Binary;
  if (name == "pgm") return FileFormat::Pgm;
  throw std::invalid_argument("unknown format '" + name + "' (csv | bin | pgm)");
}

void save_grid(const std::string& path, const PhaseSpaceFunction& f, FileFormat fmt_) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path + "'");
  if (fmt_ == FileFormat::Binary) {
    write_grid_binary(os, f);
  } else if (fmt_ == FileFormat::Csv) {
    write_grid_csv(os, f);
  } else {
    const auto r = write_pgm(os, f);
    std::ofstream side(path + ".txt");
    if (!side) throw IoError("cannot write '" + path + ".txt'");
    side << pgm_sidecar(r);
  }
}

PhaseSpaceFunction load_grid(const std::string& path) {
  if (!is_grid_file(path)) throw IoError("'" + path + "' holds a state, not a grid");
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  try {
    if (read_magic(path) == std::string(kGridMagic, 4)) return read_grid_binary(is);
    return read_grid_csv(is);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void save_state(const std::string& path, const StateData& s, FileFormat fmt_) {
  if (fmt_ == FileFormat::Pgm) throw std::invalid_argument("states cannot be written as PGM");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path + "'");
  if (fmt_ == FileFormat::Binary)
    write_state_binary(os, s);
  else
    write_state_csv(os, s);
}

StateData load_state(const std::string& path) {
  if (is_grid_file(path)) throw IoError("'" + path + "' holds a grid, not a state");
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  try {
    if (read_magic(path) == std::string(kStateMagic, 4)) return read_state_binary(is);
    return read_state_csv(is);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

// ---- state spec text

namespace {

std::map<std::string, double> parse_fields(const std::string& body, const std::string& tag,
                                           std::initializer_list<const char*> allowed) {
  std::map<std::string, double> kv;
  if (trim(body).empty()) return kv;
  for (const auto& item : split(body, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(tag + ": expected key=value, got '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw std::invalid_argument(tag + ": unknown key '" + key + "'");
    try {
      kv[key] = parse_double(item.substr(eq + 1), tag + " " + key);
    } catch (const IoError& e) {
      throw std::invalid_argument(e.what());
    }
  }
  return kv;
}

double get(const std::map<std::string, double>& kv, const char* k, double def) {
  const auto it = kv.find(k);
  return it == kv.end() ? def : it->second;
}

double require_key(const std::map<std::string, double>& kv, const char* k, const std::string& tag) {
  const auto it = kv.find(k);
  if (it == kv.end()) throw std::invalid_argument(tag + ": missing " + k);
  return it->second;
}

cplx parse_coefficient(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("sup: empty coefficient");
  auto num = [&](const std::string& s) {
    try {
      return parse_double(s, "sup coefficient");
    } catch (const IoError& e) {
      throw std::invalid_argument(e.what());
    }
  };
  if (t.back() != 'i') return num(t);
  t.pop_back();
  // split "a+b" / "a-b" at the last sign that is not an exponent sign or the leading sign
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      const std::string im = t.substr(k);
      return cplx(num(t.substr(0, k)), num(im == "+" || im == "-" ? im + "1" : im));
    }
  }
  if (t.empty() || t == "+" || t == "-") return cplx(0.0, t == "-" ? -1.0 : 1.0);
  return cplx(0.0, num(t));
}

StateSpec parse_simple(const std::string& text) {
  const std::string t = trim(text);
  const auto colon = t.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("state spec '" + t + "': expected tag:key=value,...");
  const std::string tag = t.substr(0, colon);
  const std::string body = t.substr(colon + 1);
  if (tag == "fock") {
    const auto kv = parse_fields(body, tag, {"n"});
    const double n = require_key(kv, "n", tag);
    if (n < 0 || n != std::floor(n)) throw std::invalid_argument("fock: n must be an integer >= 0");
    return StateSpec::fock(static_cast<int>(n));
  }
  if (tag == "coherent") {
    const auto kv = parse_fields(body, tag, {"re", "im"});
    return StateSpec::coherent(cplx(get(kv, "re", 0.0), get(kv, "im", 0.0)));
  }
  if (tag == "squeezed") {
    const auto kv = parse_fields(body, tag, {"re", "im", "s"});
    const double s = require_key(kv, "s", tag);
    if (!(s > 0.0)) throw std::invalid_argument("squeezed: s must be > 0");
    return StateSpec::squeezed(cplx(get(kv, "re", 0.0), get(kv, "im", 0.0)), s);
  }
  if (tag == "cat") {
    const auto kv = parse_fields(body, tag, {"alpha", "im", "theta"});
    return StateSpec::cat(cplx(require_key(kv, "alpha", tag), get(kv, "im", 0.0)),
                          get(kv, "theta", 0.0));
  }
  if (tag == "twogauss") {
    const auto kv = parse_fields(body, tag, {"d"});
    const double d = require_key(kv, "d", tag);
    if (!(d >= 0.0)) throw std::invalid_argument("twogauss: d must be >= 0");
    return StateSpec::two_gaussian(d);
  }
  if (tag == "thermal") {
    const auto kv = parse_fields(body, tag, {"nbar", "cutoff"});
    const double nbar = require_key(kv, "nbar", tag);
    const double cut = get(kv, "cutoff", 0.0);
    if (!(nbar >= 0.0)) throw std::invalid_argument("thermal: nbar must be >= 0");
    if (cut < 0 || cut != std::floor(cut)) throw std::invalid_argument("thermal: bad cutoff");
    return StateSpec::thermal(nbar, static_cast<int>(cut));
  }
  throw std::invalid_argument("state spec: unknown tag '" + tag + "'");
}

}  // namespace

StateSpec parse_state_spec(const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("sup:", 0) != 0) return parse_simple(t);
  std::vector<SuperpositionTerm> terms;
  std::size_t k = 4;
  while (k < t.size()) {
    if (t[k] != '(') throw std::invalid_argument("sup: expected '(' at position " + std::to_string(k));
    const auto close_p = t.find(')', k);
    if (close_p == std::string::npos) throw std::invalid_argument("sup: unbalanced '('");
    const cplx c = parse_coefficient(t.substr(k + 1, close_p - k - 1));
    const auto next = t.find("+(", close_p);
    const std::string sub = t.substr(close_p + 1, next == std::string::npos ? std::string::npos
                                                                             : next - close_p - 1);
    if (trim(sub).rfind("sup:", 0) == 0) throw std::invalid_argument("sup: terms cannot nest");
    terms.push_back({c, parse_simple(sub)});
    if (next == std::string::npos) break;
    k = next + 1;
  }
  if (terms.empty()) throw std::invalid_argument("sup: no terms");
  bool nonzero = false;
  for (const auto& term : terms) nonzero = nonzero || std::abs(term.coeff) > 0.0;
  if (!nonzero) throw std::invalid_argument("sup: all coefficients are zero");
  return superposition(std::move(terms));
}

PolynomialPotential parse_potential(const std::string& coeffs) {
  std::vector<double> c;
  for (const auto& item : split(coeffs, ',')) {
    try {
      c.push_back(parse_double(item, "potential"));
    } catch (const IoError& e) {
      throw std::invalid_argument(e.what());
    }
  }
  if (c.empty()) throw std::invalid_argument("potential: no coefficients");
  return PolynomialPotential(std::move(c));
}

// ---- configuration

QuadratureGrid RunConfig::grid() const { return make_grid(q_min, q_max, n_q, hbar); }

OscillatorFrame RunConfig::frame() const {
  OscillatorFrame f{mass, omega, hbar};
  f.validate();
  return f;
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto num = [&]() {
    try {
      return parse_double(value, key);
    } catch (const IoError& e) {
      throw std::invalid_argument(e.what());
    }
  };
  if (key == "q_min") {
    cfg.q_min = num();
  } else if (key == "q_max") {
    cfg.q_max = num();
  } else if (key == "n_q") {
    const double n = num();
    if (!(n >= 8) || n != std::floor(n)) throw std::invalid_argument("n_q must be an integer >= 8");
    cfg.n_q = static_cast<std::size_t>(n);
  } else if (key == "hbar" || key == "lambda_bar") {
    cfg.hbar = num();
  } else if (key == "mass") {
    cfg.mass = num();
  } else if (key == "omega") {
    cfg.omega = num();
  } else if (key == "output") {
    cfg.output = value;
  } else if (key == "format") {
    parse_format(value);
    cfg.format = value;
  } else if (key == "seed") {
    const double s = num();
    if (s < 0 || s != std::floor(s)) throw std::invalid_argument("seed must be an integer >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key.rfind("tol.", 0) == 0) {
    const std::string name = key.substr(4);
    if (!cfg.tol.count(name)) throw std::invalid_argument("unknown tolerance '" + name + "'");
    cfg.tol[name] = num();
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

void apply_config(RunConfig& cfg, std::istream& is, const std::string& source) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw IoError(source + ":" + std::to_string(n) + ": expected 'key = value'");
    try {
      apply_config_value(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw IoError(source + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

}  // namespace phasespace
