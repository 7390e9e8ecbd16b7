#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdiff/config.hpp"
#include "qdiff/fisher.hpp"
#include "qdiff/gaussian.hpp"
#include "qdiff/mc.hpp"

namespace qdiff::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Scenario-derived dimensionless parameters, honoring table1_literal.
struct PointParams {
  double tau = 0;
  double lambda_sql = 0;
  double lambda_tilde = 0;
  gauss::SqueezedThermalSpecd state{};
  std::uint64_t nu = 1;
};

PointParams derive_point(const Config& cfg);

/// One evaluated scheme at one parameter point. value is the per-nu standard
/// deviation on Lambda in m^-2 s^-1 (or dB for the sld column); degenerate
/// corners carry a marker instead.
struct SchemeValue {
  SchemeId id{};
  std::optional<double> value;
  std::string marker;  // "degenerate" when value is absent
};

std::vector<SchemeValue> evaluate_schemes(const Config& cfg, const PointParams& p);

struct BoundRow {
  SchemeId id{};
  double per_shot_std = 0;  // sqrt(single-shot variance bound), m^-2 s^-1
  double per_nu_std = 0;
  double theta = 0;  // measurement angle used (homodyne family)
  double phi = 0;    // squeeze angle used
};

struct BoundReport {
  PointParams point{};
  std::vector<BoundRow> rows;
  double qcrb_optimal_squeeze_angle = 0;
  double optimal_homodyne_theta = 0;
  double optimal_homodyne_phi = 0;
  std::optional<double> sld_squeezing_db;
  std::string sld_marker;
};

BoundReport bound_report(const Config& cfg);

// command drivers; throw std::invalid_argument (config errors) or
// qdiff::degenerate_error (degenerate regime)
void run_bound(const Config& cfg, std::ostream& out, bool json);
void run_sweep(const Config& cfg, std::ostream& out);
void run_csl(const Config& cfg, std::ostream& out);
void run_montecarlo(const Config& cfg, std::ostream& out);

/// Overlay curve: two-column (r_C in m, lambda in s^-1), '#' comments.
struct OverlayCurve {
  std::vector<double> r_c;
  std::vector<double> lambda;
};
OverlayCurve load_overlay(const std::string& path);

}  // namespace qdiff::cli
