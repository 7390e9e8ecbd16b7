#include "qdiff/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qdiff/csl.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/scenario.hpp"
#include "qdiff/sld.hpp"

namespace qdiff::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("internal: non-finite value in ") + what);
}

template <class Fn>
void parallel_indices(std::size_t n, int threads, Fn&& fn) {
  const std::size_t nt =
      std::min<std::size_t>(static_cast<std::size_t>(mc::resolve_threads(threads)), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> make_grid(const SweepSpec& s) {
  std::vector<double> g(s.points);
  if (s.log_scale) {
    if (!(s.lo > 0) || !(s.hi > 0))
      throw std::invalid_argument("config: log sweep needs positive bounds");
    const double llo = std::log(s.lo), lhi = std::log(s.hi);
    for (int i = 0; i < s.points; ++i)
      g[i] = std::exp(llo + (lhi - llo) * i / (s.points - 1));
  } else {
    for (int i = 0; i < s.points; ++i) g[i] = s.lo + (s.hi - s.lo) * i / (s.points - 1);
  }
  return g;
}

/// lambda -> 0 limit of the single-shot CRB standard deviation for a scheme.
double lambda0_std(SchemeId id, const Config& cfg, const PointParams& p) {
  using fisher::Quadrature;
  const auto& st = p.state;
  switch (id) {
    case SchemeId::position:
      return fisher::quadrature_crb_lambda0_std(Quadrature<double>::from_angle(0.0), st, p.tau,
                                                p.lambda_sql);
    case SchemeId::momentum:
      return fisher::quadrature_crb_lambda0_std(
          Quadrature<double>::from_angle(num::pi_v<double>() / 2), st, p.tau, p.lambda_sql);
    case SchemeId::homodyne:
      return fisher::quadrature_crb_lambda0_std(
          Quadrature<double>::from_angle(cfg.homodyne_angle), st, p.tau, p.lambda_sql);
    case SchemeId::optimal_homodyne:
      return std::sqrt(2.0) * p.lambda_sql * st.thermal_variance * std::exp(-2.0 * st.r) *
             fisher::chi_at_optimal_angle(p.tau);
    case SchemeId::qcrb: {
      gauss::SqueezedThermalSpecd s0 = st;
      if (s0.r != 0.0) {
        const auto choice = fisher::qcrb_branch_select(s0, p.tau, 0.0);
        s0 = gauss::SqueezedThermalSpecd(s0.thermal_variance, std::fabs(s0.r), choice.phi);
      }
      return std::sqrt(
          fisher::qcrb_closed_form(s0, p.tau, 0.0, p.lambda_sql).variance_bound);
    }
    case SchemeId::heterodyne:
      return std::sqrt(
          fisher::heterodyne_crb(st, p.tau, 0.0, p.lambda_sql).variance_bound);
    case SchemeId::sld:
      throw degenerate_error(degeneracy::undefined_limit,
                             "sld scheme has no lambda->0 CRB limit to map");
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace

PointParams derive_point(const Config& cfg) {
  const auto sc = gauss::scenario_derive(cfg.mass_kg, cfg.omega, cfg.time_s, cfg.lambda,
                                         cfg.sphere_radius_m, cfg.effective_nu());
  PointParams p;
  p.tau = sc.tau;
  p.lambda_sql = sc.lambda_sql;
  if (cfg.table1_literal) {
    p.tau = kLiteralTau;
    p.lambda_sql = kLiteralLambdaSql;
  }
  p.lambda_tilde = cfg.lambda / p.lambda_sql;
  p.state = gauss::SqueezedThermalSpecd(cfg.thermal_variance, cfg.squeezing_r(),
                                        cfg.squeeze_angle);
  p.nu = cfg.effective_nu();
  return p;
}

namespace {

/// The fundamental-limit columns report the bound at the squeeze angle that
/// minimizes it (the stationary-angle pair); position/momentum/homodyne use
/// the configured input state as-is.
gauss::SqueezedThermalSpecd qcrb_state(const PointParams& p) {
  if (p.state.r == 0.0) return p.state;
  const auto choice = fisher::qcrb_branch_select(p.state, p.tau, p.lambda_tilde);
  return gauss::SqueezedThermalSpecd(p.state.thermal_variance, std::fabs(p.state.r),
                                     choice.phi);
}

}  // namespace

std::vector<SchemeValue> evaluate_schemes(const Config& cfg, const PointParams& p) {
  std::vector<SchemeValue> out;
  out.reserve(cfg.schemes.size());
  const double nu_scale = 1.0 / std::sqrt(static_cast<double>(p.nu));
  for (SchemeId id : cfg.schemes) {
    SchemeValue sv;
    sv.id = id;
    try {
      switch (id) {
        case SchemeId::qcrb:
          sv.value = std::sqrt(fisher::qcrb_closed_form(qcrb_state(p), p.tau, p.lambda_tilde,
                                                        p.lambda_sql)
                                   .variance_bound) *
                     nu_scale;
          break;
        case SchemeId::position:
          sv.value = std::sqrt(
                         fisher::position_crb(p.state, p.tau, p.lambda_tilde, p.lambda_sql)
                             .variance_bound) *
                     nu_scale;
          break;
        case SchemeId::momentum:
          sv.value = std::sqrt(
                         fisher::momentum_crb(p.state, p.tau, p.lambda_tilde, p.lambda_sql)
                             .variance_bound) *
                     nu_scale;
          break;
        case SchemeId::homodyne:
          sv.value = std::sqrt(fisher::homodyne_crb(cfg.homodyne_angle, p.state, p.tau,
                                                    p.lambda_tilde, p.lambda_sql)
                                   .variance_bound) *
                     nu_scale;
          break;
        case SchemeId::optimal_homodyne:
          sv.value = std::sqrt(fisher::optimal_homodyne_crb(p.state, p.tau, p.lambda_tilde,
                                                            p.lambda_sql)
                                   .variance_bound) *
                     nu_scale;
          break;
        case SchemeId::heterodyne:
          sv.value = std::sqrt(fisher::heterodyne_crb(p.state, p.tau, p.lambda_tilde,
                                                      p.lambda_sql)
                                   .variance_bound) *
                     nu_scale;
          break;
        case SchemeId::sld: {
          const auto s0 = gauss::initial_covariance(p.state);
          const auto st = gauss::evolve_covariance(s0, p.tau, p.lambda_tilde);
          const auto form = sld::l2_matrix(st, p.tau);
          const auto dec = sld::sld_spectrum(form, st, p.tau);
          sv.value = sld::required_squeezing_db(dec);
          break;
        }
      }
    } catch (const degenerate_error&) {
      sv.marker = "degenerate";
    }
    if (sv.value) check_finite(*sv.value, "scheme column");
    out.push_back(std::move(sv));
  }
  return out;
}

BoundReport bound_report(const Config& cfg) {
  const PointParams p = derive_point(cfg);
  BoundReport rep;
  rep.point = p;

  const double nu_scale = 1.0 / std::sqrt(static_cast<double>(p.nu));
  auto add = [&](SchemeId id, const fisher::PrecisionBound& b, double theta, double phi) {
    BoundRow row;
    row.id = id;
    row.per_shot_std = std::sqrt(b.variance_bound);
    row.per_nu_std = row.per_shot_std * nu_scale;
    row.theta = theta;
    row.phi = phi;
    rep.rows.push_back(row);
  };

  for (SchemeId id : cfg.schemes) {
    switch (id) {
      case SchemeId::qcrb: {
        const auto st = qcrb_state(p);
        add(id, fisher::qcrb_closed_form(st, p.tau, p.lambda_tilde, p.lambda_sql), 0.0,
            st.phi);
        break;
      }
      case SchemeId::position:
        add(id, fisher::position_crb(p.state, p.tau, p.lambda_tilde, p.lambda_sql), 0.0,
            p.state.phi);
        break;
      case SchemeId::momentum:
        add(id, fisher::momentum_crb(p.state, p.tau, p.lambda_tilde, p.lambda_sql),
            num::pi_v<double>() / 2, p.state.phi);
        break;
      case SchemeId::homodyne:
        add(id,
            fisher::homodyne_crb(cfg.homodyne_angle, p.state, p.tau, p.lambda_tilde,
                                 p.lambda_sql),
            fisher::Homodyne::canonical(cfg.homodyne_angle), p.state.phi);
        break;
      case SchemeId::optimal_homodyne: {
        const double th = fisher::optimal_homodyne_angle(p.tau);
        add(id, fisher::optimal_homodyne_crb(p.state, p.tau, p.lambda_tilde, p.lambda_sql), th,
            fisher::optimal_homodyne_pair_squeeze_angle(p.tau));
        break;
      }
      case SchemeId::heterodyne:
        add(id, fisher::heterodyne_crb(p.state, p.tau, p.lambda_tilde, p.lambda_sql), 0.0,
            p.state.phi);
        break;
      case SchemeId::sld:
        break;  // reported via sld_squeezing_db below
    }
  }

  rep.qcrb_optimal_squeeze_angle =
      fisher::qcrb_branch_select(p.state, p.tau, p.lambda_tilde).phi;
  rep.optimal_homodyne_theta = fisher::optimal_homodyne_angle(p.tau);
  rep.optimal_homodyne_phi = fisher::optimal_homodyne_pair_squeeze_angle(p.tau);
  try {
    const auto s0 = gauss::initial_covariance(p.state);
    const auto st = gauss::evolve_covariance(s0, p.tau, p.lambda_tilde);
    const auto dec = sld::sld_spectrum(sld::l2_matrix(st, p.tau), st, p.tau);
    rep.sld_squeezing_db = sld::required_squeezing_db(dec);
  } catch (const degenerate_error& e) {
    rep.sld_marker = e.what();
    // a degenerate point is a hard error for the single-point command
    throw;
  }
  return rep;
}

void run_bound(const Config& cfg, std::ostream& out, bool json) {
  const BoundReport rep = bound_report(cfg);
  const auto& p = rep.point;
  if (json) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["tau"] = p.tau;
    j["lambda_sql"] = p.lambda_sql;
    j["lambda_tilde"] = p.lambda_tilde;
    j["nu"] = p.nu;
    j["thermal_variance"] = p.state.thermal_variance;
    j["squeezing_r"] = p.state.r;
    j["squeeze_angle"] = p.state.phi;
    for (const auto& row : rep.rows) {
      nlohmann::json r;
      r["per_shot_std"] = row.per_shot_std;
      r["per_nu_std"] = row.per_nu_std;
      r["theta"] = row.theta;
      r["phi"] = row.phi;
      j["bounds"][scheme_name(row.id)] = r;
    }
    j["optimal_angles"]["qcrb_squeeze_angle"] = rep.qcrb_optimal_squeeze_angle;
    j["optimal_angles"]["homodyne_theta"] = rep.optimal_homodyne_theta;
    j["optimal_angles"]["homodyne_squeeze_angle"] = rep.optimal_homodyne_phi;
    if (rep.sld_squeezing_db) j["sld_required_squeezing_db"] = *rep.sld_squeezing_db;
    out << j.dump(2) << "\n";
    return;
  }
  out << "qdiff bound " << kVersion << "\n";
  out << "  tau = " << fmt(p.tau) << ", lambda_sql = " << fmt(p.lambda_sql)
      << " /m^2/s, lambda_tilde = " << fmt(p.lambda_tilde) << ", nu = " << p.nu << "\n";
  out << "  state: T = " << fmt(p.state.thermal_variance) << ", r = " << fmt(p.state.r)
      << " (" << fmt(cfg.squeezing_db) << " dB), phi = " << fmt(p.state.phi) << " rad\n\n";
  out << "  scheme             dLambda(1 shot)      dLambda(nu shots)    theta(rad)   phi(rad)\n";
  for (const auto& row : rep.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-18s %-20.12g %-20.12g %-12.6g %-12.6g\n",
                  scheme_name(row.id).c_str(), row.per_shot_std, row.per_nu_std, row.theta,
                  row.phi);
    out << line;
  }
  out << "\n  optimal squeeze angle (fundamental): " << fmt(rep.qcrb_optimal_squeeze_angle)
      << " rad\n";
  out << "  optimal homodyne angle: " << fmt(rep.optimal_homodyne_theta)
      << " rad (squeeze angle " << fmt(rep.optimal_homodyne_phi) << " rad)\n";
  if (rep.sld_squeezing_db)
    out << "  sld-optimal measurement requires " << fmt(*rep.sld_squeezing_db)
        << " dB of squeezing\n";
}

void run_sweep(const Config& cfg, std::ostream& out) {
  if (cfg.sweep.var == SweepSpec::Var::none)
    throw std::invalid_argument("config: sweep requires a 'sweep = ...' specification");
  if (cfg.sweep.var == SweepSpec::Var::r_c)
    throw std::invalid_argument("config: r_c sweeps are csl-command territory");

  if (cfg.sweep.var == SweepSpec::Var::tau && cfg.table1_literal)
    throw std::invalid_argument("config: tau sweep conflicts with table1_literal");
  derive_point(cfg);  // surface config errors before fanning out

  const auto grid = make_grid(cfg.sweep);
  struct Row {
    double value = 0;
    PointParams p{};
    std::vector<SchemeValue> cols;
  };
  std::vector<Row> rows(grid.size());

  parallel_indices(grid.size(), cfg.threads, [&](std::size_t i) {
    Config point_cfg = cfg;
    switch (cfg.sweep.var) {
      case SweepSpec::Var::lambda:
        point_cfg.lambda = grid[i];
        break;
      case SweepSpec::Var::tau:
        point_cfg.time_s = grid[i] / cfg.omega;
        break;
      case SweepSpec::Var::r:
        point_cfg.squeezing_db = grid[i];
        break;
      default:
        break;
    }
    rows[i].value = grid[i];
    rows[i].p = derive_point(point_cfg);
    rows[i].cols = evaluate_schemes(point_cfg, rows[i].p);
  });

  out << "# qdiff sweep " << kVersion << "\n" << canonical_echo(cfg) << "#\n";
  out << "sweep_var,value,tau,lambda_tilde,r_nats,phi_rad,theta_opt_rad";
  for (SchemeId id : cfg.schemes) out << "," << scheme_name(id);
  out << "\n";
  const char* var_name = cfg.sweep.var == SweepSpec::Var::lambda ? "lambda"
                         : cfg.sweep.var == SweepSpec::Var::tau  ? "tau"
                                                                 : "r";
  for (const auto& row : rows) {
    out << var_name << "," << fmt(row.value) << "," << fmt(row.p.tau) << ","
        << fmt(row.p.lambda_tilde) << "," << fmt(row.p.state.r) << "," << fmt(row.p.state.phi)
        << "," << fmt(fisher::optimal_homodyne_angle(row.p.tau));
    for (const auto& c : row.cols) {
      out << ",";
      if (c.value)
        out << fmt(*c.value);
      else
        out << c.marker;
    }
    out << "\n";
  }
}

OverlayCurve load_overlay(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open overlay file '" + path + "'");
  OverlayCurve c;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    double rc, lam;
    if (is >> rc >> lam) {
      c.r_c.push_back(rc);
      c.lambda.push_back(lam);
    }
  }
  if (c.r_c.size() < 2)
    throw std::invalid_argument("config: overlay file needs at least two points");
  return c;
}

namespace {

/// log-log interpolation within the overlay domain
std::optional<double> overlay_at(const OverlayCurve& c, double rc) {
  const auto lo = std::min_element(c.r_c.begin(), c.r_c.end());
  const auto hi = std::max_element(c.r_c.begin(), c.r_c.end());
  if (rc < *lo || rc > *hi) return std::nullopt;
  // assume sorted ascending; find bracketing pair
  for (std::size_t i = 0; i + 1 < c.r_c.size(); ++i) {
    const double a = c.r_c[i], b = c.r_c[i + 1];
    if ((rc >= a && rc <= b) || (rc >= b && rc <= a)) {
      const double t = std::log(rc / a) / std::log(b / a);
      return std::exp(std::log(c.lambda[i]) * (1 - t) + std::log(c.lambda[i + 1]) * t);
    }
  }
  return std::nullopt;
}

}  // namespace

void run_csl(const Config& cfg, std::ostream& out) {
  if (cfg.sweep.var != SweepSpec::Var::r_c)
    throw std::invalid_argument("config: csl requires 'sweep = r_c ...'");
  const auto grid = make_grid(cfg.sweep);
  const PointParams p = derive_point(cfg);
  const csl::SphereSpec sphere{cfg.sphere_mass_kg, cfg.sphere_radius_m, cfg.reference_mass_kg};

  std::optional<OverlayCurve> overlay;
  if (!cfg.overlay_file.empty()) overlay = load_overlay(cfg.overlay_file);

  // the lambda->0 std is r_C independent; compute once per scheme
  struct SchemeLimit {
    SchemeId id{};
    std::optional<double> std0;
  };
  std::vector<SchemeLimit> limits;
  for (SchemeId id : cfg.schemes) {
    SchemeLimit sl;
    sl.id = id;
    try {
      sl.std0 = lambda0_std(id, cfg, p);
    } catch (const degenerate_error&) {
      sl.std0 = std::nullopt;
    }
    limits.push_back(sl);
  }

  out << "# qdiff csl " << kVersion << "\n" << canonical_echo(cfg) << "#\n";
  out << "r_c_m";
  for (const auto& sl : limits) out << "," << scheme_name(sl.id) << "_lambda_min";
  if (overlay) out << ",overlay_lambda";
  out << "\n";
  for (double rc : grid) {
    out << fmt(rc);
    for (const auto& sl : limits) {
      out << ",";
      if (!sl.std0) {
        out << "degenerate";
        continue;
      }
      const double lm = csl::min_detectable_rate(*sl.std0, p.nu, rc, sphere);
      check_finite(lm, "lambda_min column");
      out << fmt(lm);
    }
    if (overlay) {
      out << ",";
      const auto v = overlay_at(*overlay, rc);
      if (v)
        out << fmt(*v);
      else
        out << "n/a";
    }
    out << "\n";
  }
}

void run_montecarlo(const Config& cfg, std::ostream& out) {
  const PointParams p = derive_point(cfg);
  if (cfg.schemes.size() != 1)
    throw std::invalid_argument("config: montecarlo needs exactly one scheme");
  const SchemeId id = cfg.schemes[0];

  mc::ExperimentRun run;
  run.state = p.state;
  run.tau = p.tau;
  run.true_lambda_tilde = cfg.true_lambda / p.lambda_sql;
  run.samples = p.nu;
  run.seed = cfg.seed;
  run.chunk_size = cfg.chunk_size;
  switch (id) {
    case SchemeId::position:
      run.scheme = fisher::Homodyne{0.0};
      break;
    case SchemeId::momentum:
      run.scheme = fisher::Homodyne{fisher::Homodyne::canonical(num::pi_v<double>() / 2)};
      break;
    case SchemeId::homodyne:
      run.scheme = fisher::Homodyne{fisher::Homodyne::canonical(cfg.homodyne_angle)};
      break;
    case SchemeId::optimal_homodyne:
      run.scheme =
          fisher::Homodyne{fisher::Homodyne::canonical(fisher::optimal_homodyne_angle(p.tau))};
      break;
    case SchemeId::heterodyne:
      run.scheme = fisher::Heterodyne{};
      break;
    default:
      throw std::invalid_argument(
          "config: montecarlo scheme must be a sampled measurement "
          "(position|momentum|homodyne|optimal-homodyne|heterodyne)");
  }
  if (!(run.true_lambda_tilde > 0))
    throw std::invalid_argument("config: montecarlo needs an interior true_lambda > 0");

  const auto rep = mc::saturation_study(run, cfg.replicates, cfg.threads);

  out << "# qdiff montecarlo " << kVersion << "\n" << canonical_echo(cfg) << "#\n";
  out << "key,value\n";
  out << "estimate_mean_lambda_tilde," << fmt(rep.estimate_mean) << "\n";
  out << "estimate_mean_lambda," << fmt(rep.estimate_mean * p.lambda_sql) << "\n";
  out << "true_lambda_tilde," << fmt(run.true_lambda_tilde) << "\n";
  out << "empirical_variance," << fmt(rep.empirical_variance) << "\n";
  out << "crb_at_truth," << fmt(rep.crb_at_truth) << "\n";
  out << "saturation_ratio," << fmt(rep.saturation_ratio) << "\n";
  out << "ratio_halfwidth_95," << fmt(rep.ratio_halfwidth) << "\n";
  out << "replicates," << rep.replicates << "\n";
  out << "nu," << run.samples << "\n";
  out << "seed," << run.seed << "\n";
}

}  // namespace qdiff::cli
