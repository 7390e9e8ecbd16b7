#include "qdiff/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qdiff/real.hpp"

namespace qdiff::cli {

namespace {

using constants::amu_kg;
using constants::seconds_per_year;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

double parse_number(const std::string& t, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) fail(key + ": trailing characters in number '" + t + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail(key + ": expected a number, got '" + t + "'");
  } catch (const std::out_of_range&) {
    fail(key + ": number out of range '" + t + "'");
  }
}

struct UnitTable {
  std::map<std::string, double> factors;  // unit -> SI factor
  const char* canonical;
};

const UnitTable kMass{{{"kg", 1.0}, {"amu", amu_kg}, {"u", amu_kg}}, "kg"};
const UnitTable kTime{
    {{"s", 1.0}, {"ms", 1e-3}, {"min", 60.0}, {"h", 3600.0}, {"d", 86400.0},
     {"yr", seconds_per_year}},
    "s"};
const UnitTable kOmega{{{"rad/s", 1.0}}, "rad/s"};
const UnitTable kLambda{
    {{"/m^2/s", 1.0}, {"/m2/s", 1.0}, {"m^-2s^-1", 1.0}, {"m^-2-s^-1", 1.0}}, "/m^2/s"};
const UnitTable kLength{
    {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12}}, "m"};
const UnitTable kAngle{{{"rad", 1.0}, {"deg", 3.14159265358979323846 / 180.0}}, "rad"};
const UnitTable kSqueeze{{{"dB", 1.0}, {"db", 1.0}}, "dB"};

/// "<number> <unit>" with mandatory unit
double parse_unit_value(const std::vector<std::string>& toks, std::size_t& i,
                        const UnitTable& table, const std::string& key) {
  if (i >= toks.size()) fail(key + ": missing value");
  const double v = parse_number(toks[i++], key);
  if (i >= toks.size())
    fail(key + ": missing unit suffix (expected e.g. '" + std::string(table.canonical) + "')");
  const auto it = table.factors.find(toks[i]);
  if (it == table.factors.end()) fail(key + ": unknown unit '" + toks[i] + "'");
  ++i;
  return v * it->second;
}

std::uint64_t parse_count(const std::string& t, const std::string& key) {
  const double v = parse_number(t, key);
  if (v < 0 || v != std::floor(v)) fail(key + ": expected a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& t, const std::string& key) {
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  fail(key + ": expected true/false");
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* sweep_var_name(SweepSpec::Var v) {
  switch (v) {
    case SweepSpec::Var::lambda: return "lambda";
    case SweepSpec::Var::r_c: return "r_c";
    case SweepSpec::Var::tau: return "tau";
    case SweepSpec::Var::r: return "r";
    default: return "none";
  }
}

void apply_key(Config& c, const std::string& key, const std::string& value) {
  auto toks = tokens(value);
  std::size_t i = 0;
  if (toks.empty()) fail(key + ": empty value");

  if (key == "mass") {
    c.mass_kg = parse_unit_value(toks, i, kMass, key);
  } else if (key == "omega") {
    c.omega = parse_unit_value(toks, i, kOmega, key);
  } else if (key == "time") {
    c.time_s = parse_unit_value(toks, i, kTime, key);
  } else if (key == "lambda") {
    c.lambda = parse_unit_value(toks, i, kLambda, key);
  } else if (key == "true_lambda") {
    c.true_lambda = parse_unit_value(toks, i, kLambda, key);
  } else if (key == "thermal_variance") {
    c.thermal_variance = parse_number(toks[i++], key);
    if (c.thermal_variance < 1.0) fail("thermal_variance must be >= 1");
  } else if (key == "squeezing") {
    c.squeezing_db = parse_unit_value(toks, i, kSqueeze, key);
  } else if (key == "squeeze_angle") {
    c.squeeze_angle = parse_unit_value(toks, i, kAngle, key);
  } else if (key == "homodyne_angle") {
    c.homodyne_angle = parse_unit_value(toks, i, kAngle, key);
  } else if (key == "nu") {
    c.nu = parse_count(toks[i++], key);
  } else if (key == "duration") {
    c.duration_s = parse_unit_value(toks, i, kTime, key);
  } else if (key == "duty_cycle") {
    c.duty_cycle = parse_number(toks[i++], key);
    if (c.duty_cycle <= 0 || c.duty_cycle > 1) fail("duty_cycle must be in (0, 1]");
  } else if (key == "sphere_mass") {
    c.sphere_mass_kg = parse_unit_value(toks, i, kMass, key);
  } else if (key == "sphere_radius") {
    c.sphere_radius_m = parse_unit_value(toks, i, kLength, key);
  } else if (key == "reference_mass") {
    c.reference_mass_kg = parse_unit_value(toks, i, kMass, key);
  } else if (key == "schemes") {
    c.schemes.clear();
    std::string item;
    std::istringstream is(toks[0]);
    for (std::size_t k = 1; k < toks.size(); ++k) fail("schemes: use a comma-separated list");
    while (std::getline(is, item, ',')) {
      const auto id = scheme_from_name(trim(item));
      if (!id) fail("unknown scheme '" + item + "'");
      c.schemes.push_back(*id);
    }
    if (c.schemes.empty()) fail("schemes: empty list");
    i = 1;
  } else if (key == "sweep") {
    SweepSpec s;
    if (toks.size() < 4) fail("sweep: expected '<var> <log|linear> <lo> [unit] <hi> [unit] <n>'");
    const std::string var = toks[i++];
    if (var == "lambda") s.var = SweepSpec::Var::lambda;
    else if (var == "r_c") s.var = SweepSpec::Var::r_c;
    else if (var == "tau") s.var = SweepSpec::Var::tau;
    else if (var == "r") s.var = SweepSpec::Var::r;
    else fail("sweep: unknown variable '" + var + "' (lambda|r_c|tau|r)");
    const std::string scale = toks[i++];
    if (scale == "log") s.log_scale = true;
    else if (scale == "linear") s.log_scale = false;
    else fail("sweep: scale must be log or linear");
    if (s.var == SweepSpec::Var::lambda) {
      s.lo = parse_unit_value(toks, i, kLambda, "sweep lo");
      s.hi = parse_unit_value(toks, i, kLambda, "sweep hi");
    } else if (s.var == SweepSpec::Var::r_c) {
      s.lo = parse_unit_value(toks, i, kLength, "sweep lo");
      s.hi = parse_unit_value(toks, i, kLength, "sweep hi");
    } else if (s.var == SweepSpec::Var::r) {
      s.lo = parse_unit_value(toks, i, kSqueeze, "sweep lo");
      s.hi = parse_unit_value(toks, i, kSqueeze, "sweep hi");
    } else {
      s.lo = parse_number(toks[i++], "sweep lo");
      s.hi = parse_number(toks[i++], "sweep hi");
    }
    if (i >= toks.size()) fail("sweep: missing point count");
    s.points = static_cast<int>(parse_count(toks[i++], "sweep n"));
    if (s.points < 2) fail("sweep: grid needs at least 2 points");
    c.sweep = s;
  } else if (key == "table1_literal") {
    c.table1_literal = parse_bool(toks[i++], key);
  } else if (key == "seed") {
    c.seed = parse_count(toks[i++], key);
  } else if (key == "chunk_size") {
    c.chunk_size = parse_count(toks[i++], key);
    if (c.chunk_size < 1) fail("chunk_size must be >= 1");
  } else if (key == "replicates") {
    c.replicates = parse_count(toks[i++], key);
  } else if (key == "threads") {
    c.threads = static_cast<int>(parse_count(toks[i++], key));
  } else if (key == "output") {
    c.output = toks[i++];
  } else if (key == "overlay_file") {
    c.overlay_file = toks[i++];
  } else {
    fail("unknown key '" + key + "'");
  }
  if (i != toks.size()) fail(key + ": unexpected trailing tokens");
}

}  // namespace

std::string scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::qcrb: return "qcrb";
    case SchemeId::position: return "position";
    case SchemeId::momentum: return "momentum";
    case SchemeId::optimal_homodyne: return "optimal-homodyne";
    case SchemeId::homodyne: return "homodyne";
    case SchemeId::heterodyne: return "heterodyne";
    case SchemeId::sld: return "sld";
  }
  return "?";
}

std::optional<SchemeId> scheme_from_name(const std::string& name) {
  for (auto id : {SchemeId::qcrb, SchemeId::position, SchemeId::momentum,
                  SchemeId::optimal_homodyne, SchemeId::homodyne, SchemeId::heterodyne,
                  SchemeId::sld})
    if (scheme_name(id) == name) return id;
  return std::nullopt;
}

std::uint64_t Config::effective_nu() const {
  if (nu > 0) return nu;
  if (duration_s > 0 && time_s > 0)
    return static_cast<std::uint64_t>(std::floor(duty_cycle * duration_s / time_s));
  return 1;
}

double Config::squeezing_r() const { return squeezing_db / 20.0 * std::log(10.0); }

Config parse_config_text(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_key(c, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(e.what()) + " (line " + std::to_string(lineno) +
                                  ")");
    }
  }
  return c;
}

Config parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(Config& cfg, const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos) fail("override must be key=value: '" + key_value + "'");
  apply_key(cfg, trim(key_value.substr(0, eq)), trim(key_value.substr(eq + 1)));
}

std::string canonical_echo(const Config& c) {
  std::ostringstream os;
  auto put = [&](const std::string& k, const std::string& v) {
    os << "# " << k << " = " << v << "\n";
  };
  put("mass", fmt_g(c.mass_kg) + " kg");
  put("omega", fmt_g(c.omega) + " rad/s");
  put("time", fmt_g(c.time_s) + " s");
  put("lambda", fmt_g(c.lambda) + " /m^2/s");
  put("thermal_variance", fmt_g(c.thermal_variance));
  put("squeezing", fmt_g(c.squeezing_db) + " dB");
  put("squeeze_angle", fmt_g(c.squeeze_angle) + " rad");
  put("homodyne_angle", fmt_g(c.homodyne_angle) + " rad");
  if (c.nu > 0) put("nu", std::to_string(c.nu));
  if (c.duration_s > 0) put("duration", fmt_g(c.duration_s) + " s");
  put("duty_cycle", fmt_g(c.duty_cycle));
  put("sphere_mass", fmt_g(c.sphere_mass_kg) + " kg");
  put("sphere_radius", fmt_g(c.sphere_radius_m) + " m");
  put("reference_mass", fmt_g(c.reference_mass_kg) + " kg");
  std::string schemes;
  for (std::size_t i = 0; i < c.schemes.size(); ++i) {
    if (i) schemes += ",";
    schemes += scheme_name(c.schemes[i]);
  }
  put("schemes", schemes);
  if (c.sweep.var != SweepSpec::Var::none) {
    std::string sv = sweep_var_name(c.sweep.var);
    sv += c.sweep.log_scale ? " log " : " linear ";
    if (c.sweep.var == SweepSpec::Var::lambda)
      sv += fmt_g(c.sweep.lo) + " /m^2/s " + fmt_g(c.sweep.hi) + " /m^2/s ";
    else if (c.sweep.var == SweepSpec::Var::r_c)
      sv += fmt_g(c.sweep.lo) + " m " + fmt_g(c.sweep.hi) + " m ";
    else if (c.sweep.var == SweepSpec::Var::r)
      sv += fmt_g(c.sweep.lo) + " dB " + fmt_g(c.sweep.hi) + " dB ";
    else
      sv += fmt_g(c.sweep.lo) + " " + fmt_g(c.sweep.hi) + " ";
    sv += std::to_string(c.sweep.points);
    put("sweep", sv);
  }
  put("table1_literal", c.table1_literal ? "true" : "false");
  put("seed", std::to_string(c.seed));
  put("chunk_size", std::to_string(c.chunk_size));
  put("replicates", std::to_string(c.replicates));
  if (c.true_lambda > 0) put("true_lambda", fmt_g(c.true_lambda) + " /m^2/s");
  put("threads", std::to_string(c.threads));
  if (!c.output.empty()) put("output", c.output);
  if (!c.overlay_file.empty()) put("overlay_file", c.overlay_file);
  return os.str();
}

Config parse_from_echo(const std::string& echo) {
  std::istringstream is(echo);
  std::string line, body;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0 && line.find('=') != std::string::npos) {
      body += line.substr(2);
      body += '\n';
    }
  }
  return parse_config_text(body);
}

}  // namespace qdiff::cli
