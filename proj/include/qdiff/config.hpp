#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qdiff::cli {

/// Sweep grid over one variable.
struct SweepSpec {
  enum class Var { none, lambda, r_c, tau, r };
  Var var = Var::none;
  bool log_scale = true;
  double lo = 0;
  double hi = 0;
  int points = 0;

  bool operator==(const SweepSpec&) const = default;
};

enum class SchemeId { qcrb, position, momentum, optimal_homodyne, homodyne, heterodyne, sld };

std::string scheme_name(SchemeId id);
std::optional<SchemeId> scheme_from_name(const std::string& name);

/// Parsed run configuration. Dimensional quantities are stored in SI after
/// unit-suffix parsing at the boundary; squeezing is kept in dB as given.
struct Config {
  // scenario
  double mass_kg = 1e8 * 1.66053906660e-27;
  double omega = 1e5;          // rad/s
  double time_s = 100.0;
  double lambda = 0.0;         // m^-2 s^-1
  double thermal_variance = 1.6;
  double squeezing_db = 0.0;
  double squeeze_angle = 0.0;  // rad
  double homodyne_angle = 0.0; // rad, for scheme "homodyne"

  // repetitions: explicit nu wins; otherwise derived from duration * duty / time
  std::uint64_t nu = 0;
  double duration_s = 0.0;
  double duty_cycle = 1.0;

  // collapse-model mapping
  double sphere_mass_kg = 5.5e9 * 1.66053906660e-27;
  double sphere_radius_m = 100e-9;
  double reference_mass_kg = 1.66053906660e-27;

  // run control
  std::vector<SchemeId> schemes{SchemeId::qcrb, SchemeId::position, SchemeId::momentum,
                                SchemeId::optimal_homodyne, SchemeId::heterodyne};
  SweepSpec sweep{};
  bool table1_literal = false;
  std::uint64_t seed = 1;
  std::uint64_t chunk_size = 1 << 16;
  std::uint64_t replicates = 200;
  double true_lambda = 0.0;    // m^-2 s^-1, montecarlo truth
  int threads = 0;             // 0: QDIFF_THREADS or hardware
  std::string output;
  std::string overlay_file;

  bool operator==(const Config&) const = default;

  std::uint64_t effective_nu() const;
  double squeezing_r() const;  // e-folds from dB
};

/// key = value text, '#' comments; every dimensional value carries a unit
/// suffix. Throws std::invalid_argument with a line diagnostic on parse
/// errors.
Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

/// apply a single "key=value" override (CLI --set)
void apply_override(Config& cfg, const std::string& key_value);

/// canonical '# key = value' echo block; parse_config_text on the
/// uncommented body reproduces the config exactly.
std::string canonical_echo(const Config& cfg);

/// strips '# ' prefixes from an echo block and reparses it (round-trip).
Config parse_from_echo(const std::string& echo);

// table-literal fallback values for the published reference parameter set
inline constexpr double kLiteralTau = 6.3e7;
inline constexpr double kLiteralLambdaSql = 1.6e26;  // m^-2 s^-1

}  // namespace qdiff::cli
