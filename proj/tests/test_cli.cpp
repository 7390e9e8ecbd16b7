#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qdiff/config.hpp"
#include "qdiff/real.hpp"
#include "qdiff/run.hpp"

using namespace qdiff;
using cli::Config;

TEST_CASE("config parsing: units, comments, errors") {
  const auto cfg = cli::parse_config_text(R"(
# scenario
mass = 1e8 amu
omega = 1e5 rad/s
time = 100 s
lambda = 1e15 /m^2/s
thermal_variance = 1.6
squeezing = 10 dB
squeeze_angle = 0 rad
nu = 1000000
schemes = position,momentum,qcrb
seed = 7
)");
  CHECK(cfg.mass_kg == doctest::Approx(1e8 * constants::amu_kg).epsilon(1e-15));
  CHECK(cfg.omega == 1e5);
  CHECK(cfg.time_s == 100.0);
  CHECK(cfg.lambda == 1e15);
  CHECK(cfg.squeezing_db == 10.0);
  CHECK(cfg.squeezing_r() == doctest::Approx(0.5 * std::log(10.0)).epsilon(1e-15));
  CHECK(cfg.nu == 1000000);
  CHECK(cfg.schemes.size() == 3);
  CHECK(cfg.seed == 7);

  CHECK_THROWS_AS(cli::parse_config_text("mass = 5\n"), std::invalid_argument);  // no unit
  CHECK_THROWS_AS(cli::parse_config_text("mass = 5 stone\n"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config_text("unknown_key = 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config_text("thermal_variance = 0.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config_text("schemes = quantum\n"), std::invalid_argument);
}

TEST_CASE("duration-derived repetitions with duty cycle") {
  auto cfg = cli::parse_config_text("time = 100 s\nduration = 3 yr\n");
  CHECK(cfg.effective_nu() == 946728);  // floor(3 * 365.25 * 86400 / 100)
  cli::apply_override(cfg, "duty_cycle = 0.5");
  CHECK(cfg.effective_nu() == 473364);
  cli::apply_override(cfg, "nu = 1234");
  CHECK(cfg.effective_nu() == 1234);  // explicit nu wins
}

TEST_CASE("canonical echo round-trips to an identical config") {
  auto cfg = cli::parse_config_text(R"(
mass = 5.5e9 amu
omega = 1e5 rad/s
time = 100 s
lambda = 3.7e14 /m^2/s
thermal_variance = 1.6
squeezing = 10 dB
squeeze_angle = 0.25 rad
homodyne_angle = -0.3 rad
sweep = lambda log 1e10 /m^2/s 1e20 /m^2/s 41
schemes = qcrb,position,momentum,optimal-homodyne,heterodyne,sld
table1_literal = true
seed = 99
replicates = 200
true_lambda = 2e14 /m^2/s
output = out.csv
)");
  const auto echoed = cli::parse_from_echo(cli::canonical_echo(cfg));
  CHECK(echoed == cfg);

  // a second round trip is byte-stable
  CHECK(cli::canonical_echo(echoed) == cli::canonical_echo(cfg));
}

TEST_CASE("table1_literal swaps in the published values") {
  auto cfg = cli::parse_config_text("mass = 1e8 amu\nomega = 1e5 rad/s\ntime = 100 s\n"
                                    "lambda = 1.6e20 /m^2/s\n");
  auto p = cli::derive_point(cfg);
  CHECK(p.tau == doctest::Approx(1e7));
  CHECK(p.lambda_sql == doctest::Approx(3.9365e24).epsilon(1e-3));
  cli::apply_override(cfg, "table1_literal = true");
  p = cli::derive_point(cfg);
  CHECK(p.tau == 6.3e7);
  CHECK(p.lambda_sql == 1.6e26);
  CHECK(p.lambda_tilde == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("sweep output: header round-trip, ordering, no NaN, determinism") {
  auto cfg = cli::parse_config_text(R"(
lambda = 1e15 /m^2/s
nu = 1000000
sweep = lambda log 1e10 /m^2/s 1e20 /m^2/s 11
schemes = qcrb,position,momentum,optimal-homodyne,heterodyne
table1_literal = true
)");
  std::ostringstream os1, os2;
  cli::run_sweep(cfg, os1);
  cli::run_sweep(cfg, os2);
  CHECK(os1.str() == os2.str());  // byte-identical on reruns

  const auto echoed = cli::parse_from_echo(os1.str());
  CHECK(echoed == cfg);

  // parse the data rows
  std::istringstream is(os1.str());
  std::string line;
  int rows = 0;
  double prev_value = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("sweep_var", 0) == 0) continue;
    CHECK(line.find("nan") == std::string::npos);
    CHECK(line.find("inf") == std::string::npos);
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // var name
    std::getline(ls, cell, ',');
    const double value = std::stod(cell);
    CHECK(value > prev_value);
    prev_value = value;
    ++rows;
  }
  CHECK(rows == 11);
}

TEST_CASE("sweep of one point matches the bound command") {
  auto cfg = cli::parse_config_text(R"(
lambda = 1e15 /m^2/s
nu = 1000000
sweep = lambda log 1e15 /m^2/s 1e16 /m^2/s 2
schemes = position,momentum
)");
  std::ostringstream sweep_os;
  cli::run_sweep(cfg, sweep_os);

  // first row of the sweep vs the single-point report at the same lambda
  const auto rep = cli::bound_report(cfg);
  std::istringstream is(sweep_os.str());
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#' && line.rfind("sweep_var", 0) != 0) break;
  std::istringstream ls(line);
  std::string cell;
  for (int i = 0; i < 7; ++i) std::getline(ls, cell, ',');  // skip metadata columns
  std::getline(ls, cell, ',');
  CHECK(std::stod(cell) == doctest::Approx(rep.rows[0].per_nu_std).epsilon(1e-14));
  std::getline(ls, cell, ',');
  CHECK(std::stod(cell) == doctest::Approx(rep.rows[1].per_nu_std).epsilon(1e-14));
}

TEST_CASE("bound command: ordering of the five bounds at the reference point") {
  auto cfg = cli::parse_config_text(R"(
lambda = 1e15 /m^2/s
table1_literal = true
nu = 1000000
schemes = qcrb,optimal-homodyne,momentum,position,heterodyne
)");
  const auto rep = cli::bound_report(cfg);
  REQUIRE(rep.rows.size() == 5);
  const double qcrb = rep.rows[0].per_shot_std;
  const double opt = rep.rows[1].per_shot_std;
  const double mom = rep.rows[2].per_shot_std;
  const double pos = rep.rows[3].per_shot_std;
  CHECK(qcrb <= opt * (1 + 1e-12));
  CHECK(opt <= mom * (1 + 1e-12));
  CHECK(mom <= pos * (1 + 1e-12));
}

TEST_CASE("bound command: 10 dB of momentum squeezing buys a factor 100 in variance") {
  auto base = cli::parse_config_text(R"(
lambda = 1e10 /m^2/s
table1_literal = true
nu = 1000000
schemes = momentum
)");
  auto squeezed = base;
  cli::apply_override(squeezed, "squeezing = 10 dB");
  const double v0 = std::pow(cli::bound_report(base).rows[0].per_shot_std, 2);
  const double v1 = std::pow(cli::bound_report(squeezed).rows[0].per_shot_std, 2);
  // lt << T e^{-2r}/tau here, so the variance improves by e^{-4r} = 1/100
  CHECK(v1 / v0 == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("degenerate point: lambda = 0 with T = 1 raises through bound_report") {
  auto cfg = cli::parse_config_text("lambda = 0 /m^2/s\nthermal_variance = 1\n");
  CHECK_THROWS_AS((void)cli::bound_report(cfg), degenerate_error);
}

TEST_CASE("csl curves: momentum a factor 3 below position, squeezing helps") {
  auto cfg = cli::parse_config_text(R"(
time = 100 s
duration = 3 yr
table1_literal = true
sphere_mass = 5.5e9 amu
sphere_radius = 100 nm
sweep = r_c log 1e-9 m 1e-4 m 16
schemes = position,momentum
)");
  std::ostringstream os;
  cli::run_csl(cfg, os);
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("r_c_m", 0) == 0) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    std::getline(ls, cell, ',');
    const double pos = std::stod(cell);
    std::getline(ls, cell, ',');
    const double mom = std::stod(cell);
    CHECK(mom == doctest::Approx(pos / 3.0).epsilon(1e-9));
    ++rows;
  }
  CHECK(rows == 16);

  // 20 dB curve lies below the 10 dB curve everywhere
  auto lo = cfg, hi = cfg;
  cli::apply_override(lo, "squeezing = 10 dB");
  cli::apply_override(hi, "squeezing = 20 dB");
  std::ostringstream os10, os20;
  cli::run_csl(lo, os10);
  cli::run_csl(hi, os20);
  std::istringstream i10(os10.str()), i20(os20.str());
  std::string l10, l20;
  while (std::getline(i10, l10) && std::getline(i20, l20)) {
    if (l10.empty() || l10[0] == '#' || l10.rfind("r_c_m", 0) == 0) continue;
    std::istringstream s10(l10), s20(l20);
    std::string c10, c20;
    std::getline(s10, c10, ',');
    std::getline(s20, c20, ',');
    std::getline(s10, c10, ',');
    std::getline(s20, c20, ',');
    CHECK(std::stod(c20) < std::stod(c10));
  }
}

TEST_CASE("montecarlo command: report serialization and config errors") {
  auto cfg = cli::parse_config_text(R"(
time = 100 s
nu = 20000
replicates = 60
seed = 3
true_lambda = 6.2972e21 /m^2/s
schemes = momentum
)");
  // with the default mass/omega: lambda_sql ~ 3.94e24, truth lt ~ 1.6e-3 = 10 T/tau
  std::ostringstream os;
  cli::run_montecarlo(cfg, os);
  const std::string text = os.str();
  CHECK(text.find("saturation_ratio,") != std::string::npos);
  CHECK(text.find("estimate_mean_lambda_tilde,") != std::string::npos);
  const auto echoed = cli::parse_from_echo(text);
  CHECK(echoed == cfg);

  auto bad = cfg;
  cli::apply_override(bad, "schemes = qcrb");
  std::ostringstream os2;
  CHECK_THROWS_AS(cli::run_montecarlo(bad, os2), std::invalid_argument);

  auto zero_truth = cfg;
  cli::apply_override(zero_truth, "true_lambda = 0 /m^2/s");
  std::ostringstream os3;
  CHECK_THROWS_AS(cli::run_montecarlo(zero_truth, os3), std::invalid_argument);
}

TEST_CASE("csl output: header round-trip and overlay passthrough") {
  const std::string overlay_path = "test_overlay_tmp.txt";
  {
    std::ofstream f(overlay_path);
    f << "# external bound: r_C (m), lambda (1/s)\n";
    f << "1e-9 1e-12\n1e-7 1e-14\n1e-5 1e-10\n";
  }
  auto cfg = cli::parse_config_text(R"(
time = 100 s
nu = 1000000
table1_literal = true
sweep = r_c log 1e-8 m 1e-6 m 5
schemes = momentum
)");
  cfg.overlay_file = overlay_path;
  std::ostringstream os;
  cli::run_csl(cfg, os);
  std::remove(overlay_path.c_str());

  CHECK(cli::parse_from_echo(os.str()) == cfg);
  std::istringstream is(os.str());
  std::string line;
  bool saw_overlay_header = false;
  int data_rows = 0;
  while (std::getline(is, line)) {
    if (line.rfind("r_c_m", 0) == 0) {
      saw_overlay_header = line.find("overlay_lambda") != std::string::npos;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    ++data_rows;
    // r_c = 1e-7 sits on an overlay vertex: interpolation must hit it
    if (line.rfind("9.9999", 0) == 0 || line.rfind("1e-07", 0) == 0) {
      const auto pos = line.rfind(',');
      CHECK(std::stod(line.substr(pos + 1)) == doctest::Approx(1e-14).epsilon(1e-6));
    }
  }
  CHECK(saw_overlay_header);
  CHECK(data_rows == 5);
}

TEST_CASE("squeezing sweep: momentum precision improves monotonically") {
  auto cfg = cli::parse_config_text(R"(
lambda = 1e12 /m^2/s
nu = 1000000
table1_literal = true
sweep = r linear 0 dB 20 dB 5
schemes = momentum
)");
  std::ostringstream os;
  cli::run_sweep(cfg, os);
  std::istringstream is(os.str());
  std::string line;
  double prev = 1e300;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("sweep_var", 0) == 0) continue;
    const auto pos = line.rfind(',');
    const double v = std::stod(line.substr(pos + 1));
    CHECK(v < prev);
    prev = v;
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("symplectic form constant squares to minus identity") {
  const auto& om = gauss::symplectic_form;
  const double sq00 = om[0][0] * om[0][0] + om[0][1] * om[1][0];
  const double sq01 = om[0][0] * om[0][1] + om[0][1] * om[1][1];
  const double sq11 = om[1][0] * om[0][1] + om[1][1] * om[1][1];
  CHECK(sq00 == -1.0);
  CHECK(sq01 == 0.0);
  CHECK(sq11 == -1.0);
}

TEST_CASE("precision bounds keep variance_bound = 1/fisher_info") {
  auto cfg = cli::parse_config_text("lambda = 1e15 /m^2/s\n");
  const auto p = cli::derive_point(cfg);
  const auto b = fisher::momentum_crb(p.state, p.tau, p.lambda_tilde, p.lambda_sql);
  CHECK(b.variance_bound * b.fisher_info == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.dimensionless_bound ==
        doctest::Approx(b.variance_bound / (p.lambda_sql * p.lambda_sql)).epsilon(1e-12));
}
