#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>

#include "phasespace/field.hpp"
#include "phasespace/potential.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

// Unreadable, truncated or malformed files. The message carries the line or byte offset.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- grid files ---------------------------------------------------------

// "PSQ1", u32 n_q, u32 n_p, f64 q_min, q_max, p_min, p_max, hbar, u8 kind, u8 complex,
// f64 param, then row-major f64 values (complex as re, im pairs). Little-endian.
void write_grid_binary(std::ostream& os, const PhaseSpaceFunction& f);
PhaseSpaceFunction read_grid_binary(std::istream& is);

// `# key=value` header, one row of p values, then rows `q, F(q, p_0), ...`. Complex
// functions write re, im pairs per cell. 17 significant digits.
void write_grid_csv(std::ostream& os, const PhaseSpaceFunction& f);
PhaseSpaceFunction read_grid_csv(std::istream& is);

// P5 8-bit raster: columns follow q upward, rows follow p downward from p_max, with the
// linear map [min, max] -> [0, 255]. Complex functions render their modulus.
struct PgmRange {
  double min = 0.0;
  double max = 0.0;
};
PgmRange write_pgm(std::ostream& os, const PhaseSpaceFunction& f);
std::string pgm_sidecar(const PgmRange& r);  // "min=<v> max=<v>\n"

// ---- state files --------------------------------------------------------

using StateData = std::variant<WaveFunction, DensityMatrix>;

// "PSS1", u8 type (0 wavefunction, 1 density), u32 n, f64 q_min, q_max, hbar, then complex
// samples as re, im pairs (density row-major).
void write_state_binary(std::ostream& os, const StateData& s);
StateData read_state_binary(std::istream& is);
// `# key=value` header then `q, re, im` rows (wavefunction) or n re, im pairs per row.
void write_state_csv(std::ostream& os, const StateData& s);
StateData read_state_csv(std::istream& is);

enum class FileFormat { Binary, Csv, Pgm };

// By magic bytes or the CSV header; throws IoError otherwise.
bool is_grid_file(const std::string& path);
bool is_state_file(const std::string& path);

void save_grid(const std::string& path, const PhaseSpaceFunction& f, FileFormat fmt);
PhaseSpaceFunction load_grid(const std::string& path);
void save_state(const std::string& path, const StateData& s, FileFormat fmt);
StateData load_state(const std::string& path);

// ".csv" -> Csv, ".pgm" -> Pgm, anything else Binary.
FileFormat format_for_path(const std::string& path);
FileFormat parse_format(const std::string& name);  // csv | bin | pgm

// ---- state spec text ----------------------------------------------------

// fock:n=3, coherent:re=1,im=0.5, squeezed:re=1,im=0,s=3, cat:alpha=2,theta=1.5708,
// twogauss:d=2, thermal:nbar=1[,cutoff=N], sup:(c1)spec1+(c2)spec2 with c like 1, -0.5i
// or 0.5+0.5i. Superpositions do not nest.
StateSpec parse_state_spec(const std::string& text);
PolynomialPotential parse_potential(const std::string& coeffs);  // "c0,c1,..."

// ---- configuration ------------------------------------------------------

struct RunConfig {
  double q_min = -8.0;
  double q_max = 8.0;
  std::size_t n_q = 512;
  double hbar = 1.0;
  double mass = 1.0;
  double omega = 1.0;
  std::string output;
  std::string format;  // empty: from the output extension
  std::uint64_t seed = 0;
  std::map<std::string, double> tol{{"tail", 1e-8}, {"norm", 1e-2}};

  QuadratureGrid grid() const;
  OscillatorFrame frame() const;
};

// `key = value` lines with `#` comments. Keys: q_min, q_max, n_q, hbar (alias
// lambda_bar), mass, omega, output, format, seed, tol.<name>.
void apply_config(RunConfig& cfg, std::istream& is, const std::string& source = "config");
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace phasespace
