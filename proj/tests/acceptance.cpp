// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance run: one PASS/FAIL line per criterion, reference
// values and tolerances held here. Exit status is nonzero if any fails.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "capow/analytic.hpp"
#include "capow/flow.hpp"
#include "capow/kernels.hpp"
#include "capow/kinetics.hpp"
#include "capow/power.hpp"
#include "capow/table.hpp"
#include "capow/thermal.hpp"

using namespace capow;

namespace {

struct Outcome {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};
std::vector<Outcome> g_outcomes;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::fprintf(stderr, "  criterion %d done (%s)\n", id, pass ? "pass" : "fail");
  g_outcomes.push_back({id, title, pass, detail});
}

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

bool rel_within(double v, double ref, double tol) { return std::abs(v - ref) <= tol * std::abs(ref); }

ScenarioConfig design(const char* preset_name, int rings, bool pumps, double site_density = 3e21) {
  ScenarioConfig c = preset(preset_name);
  c.robot.rings = rings;
  c.robot.pumps = pumps;
  c.robot.site_density = site_density;
  c.robot.ring_starts.clear();
  validate(c);
  return c;
}

// Conservation residuals of every detailed run, for the audit criterion.
double g_worst_species = 0;
double g_worst_heat = 0;
int g_audited = 0;

struct Detailed {
  ScenarioConfig cfg;
  ScenarioModel model;
  PowerRun run;
  TemperatureField heat;
};

Detailed detailed(const ScenarioConfig& cfg) {
  Detailed d{cfg, prepare_model(cfg), {}, {}};
  d.run = run_design(d.model, cfg);
  d.heat = solve_heat(d.model.mesh, d.model.flow,
                      robot_heat_source(d.model.mesh, d.run.solution, cfg), cfg);
  g_worst_species = std::max(g_worst_species, std::abs(d.run.solution.balance.relative_residual));
  if (d.heat.source_power > 0) {
    g_worst_heat = std::max(g_worst_heat, std::abs(d.heat.relative_residual));
  }
  ++g_audited;
  return d;
}

// Average per-robot power in pW: rows 10-ring pumps, 10-ring free diffusion,
// 1-ring pumps, 1-ring free diffusion. Columns: high capacity C=3e22 and 7e22,
// then low capacity C=7e22; each over dP in {1e5, 5e5} x demand in {4, 60} kW/m^3.
constexpr std::array<std::array<double, 12>, 4> kTable = {{
    {12, 8, 14, 12, 17, 11, 24, 18, 17, 11, 24, 18},
    {11, 7, 12, 10, 15, 10, 22, 16, 6, 3, 8, 6},
    {44, 27, 49, 36, 69, 36, 99, 58, 69, 36, 99, 58},
    {31, 19, 34, 25, 49, 25, 71, 38, 9, 4, 12, 7},
}};
// Bold cells: the low- and high-demand scenarios (columns 4 and 7, 8 and 11).
constexpr std::array<int, 4> kBoldColumns = {4, 7, 8, 11};

void analytic_criteria(const ScenarioConfig& base) {
  const auto d = derived_quantities(base);
  {
    const double p3 = analytic::sphere_absorption_power(d.sphere_radius, 3e22, base) * 1e12;
    const double p7 = analytic::sphere_absorption_power(d.sphere_radius, 7e22, base) * 1e12;
    report(1, "isolated sphere power", rel_within(p3, 320, 0.02) && rel_within(p7, 750, 0.02),
           fmt("%.1f pW at 3e22 (320), ", p3) + fmt("%.1f pW at 7e22 (750)", p7));
  }
  {
    ScenarioConfig hi = base, lo = base;
    hi.robot.site_density = 3e21;
    lo.robot.site_density = 6e19;
    const auto bh = analytic::pump_benefit(hi, 3e22);
    const auto bl = analytic::pump_benefit(lo, 3e22);
    const bool ok = rel_within(bh.gain, 2.0, 0.05) && rel_within(bl.gain, 42, 0.05) &&
                    rel_within(bl.capped_gain, 34, 0.05);
    report(2, "pump benefit factors", ok,
           fmt("G_high %.3f (2.0), ", bh.gain) + fmt("G_low %.2f (42), ", bl.gain) +
               fmt("capped %.2f (34)", bl.capped_gain));

    double best = 0, at = 0;
    for (double x = 0.5; x <= 10.0; x += 0.001) {
      const double b = analytic::thin_shell_benefit(x);
      if (b > best) best = b, at = x;
    }
    const double bhp = (analytic::thin_shell_benefit(bh.a / bh.mu) - 1) * 100;
    const double blp = (analytic::thin_shell_benefit(bl.a / bl.mu) - 1) * 100;
    const double peak = (best - 1) * 100;
    const bool ok3 = std::abs(peak - 12) <= 3 && std::abs(at - 3.5) <= 0.5 &&
                     std::abs(bhp - 10) <= 3 && blp < 1;
    report(3, "thin-shell placement benefit", ok3,
           fmt("peak %.2f%% (12)", peak) + fmt(" at a/mu %.2f (3.5); ", at) +
               fmt("high %.2f%% (10), ", bhp) + fmt("low %.2f%% (<1)", blp));
  }
}

void kinetics_criterion(const ScenarioConfig& cfg) {
  const double n = cfg.rbc.hill_n;
  double worst = 0;
  int sign_bad = 0;
  for (int k = 0; k < 100; ++k) {
    const double a = 0.03 + 2.97 * k / 99.0;
    const double seq = std::pow(a, n) / (1 + std::pow(a, n));
    worst = std::max(worst, std::abs(unloading_function(a, seq, n)));
    const double c = a * cfg.rbc.p_half / cfg.oxygen.henry;
    for (int m = 1; m < 20; ++m) {
      const double s = m / 20.0;
      if (std::abs(s - seq) < 1e-12) continue;
      const double rate = unloading_rate(partial_pressure_ratio(c, cfg), s, cfg);
      if ((rate > 0) != (seq > s)) ++sign_bad;
    }
  }
  const bool hill = std::abs(hill_equilibrium(1, n) - 0.5) < 1e-15 && hill_equilibrium(0, n) == 0;
  report(16, "kinetics identities", worst < 1e-9 && sign_bad == 0 && hill,
         fmt("max |s(a,S_eq)| %.2e, ", worst) + std::to_string(sign_bad) +
             " sign mismatches, Hill identities " + (hill ? "hold" : "broken"));
}

void flow_criteria(const ScenarioConfig& low, const ScenarioConfig& high) {
  {
    ScenarioConfig hi = low;
    hi.fluid.pressure_gradient = 5e5;
    const double v1 = analytic::poiseuille(low).mean_speed;
    const double v5 = analytic::poiseuille(hi).mean_speed;
    const auto bare = design("low_demand", 0, true);
    const auto m = prepare_model(bare);
    const double l2 = poiseuille_l2_error(m.flow, m.mesh, bare);
    const double q_rel = m.flow.flow_rate / analytic::poiseuille(bare).flow_rate - 1;
    report(4, "Poiseuille flow", rel_within(v1, 2e-4, 0.005) && rel_within(v5, 1e-3, 0.005) && l2 < 0.005,
           fmt("v %.4g mm/s (0.2), ", v1 * 1e3) + fmt("%.4g mm/s (1.0); ", v5 * 1e3) +
               fmt("PDE L2 %.2e", l2) + fmt(", flow rate off by %.2e", q_rel));
  }

  const auto one = prepare_model(design("low_demand", 1, true));
  const auto ten = prepare_model(design("low_demand", 10, true));
  const double q0 = analytic::poiseuille(low).flow_rate;
  const double red1 = (1 - one.flow.flow_rate / q0) * 100;
  const double red10 = (1 - ten.flow.flow_rate / q0) * 100;
  report(5, "flow reduction by aggregates", std::abs(red1 - 6) <= 2 && std::abs(red10 - 20) <= 2,
         fmt("1-ring %.2f%% (6), ", red1) + fmt("10-ring %.2f%% (20)", red10));

  {
    const auto c1 = design("low_demand", 1, true);
    const auto c10 = design("low_demand", 10, true);
    const double a1 = wall_force(one.flow, one.mesh, c1).coefficient;
    const double a10 = wall_force(ten.flow, ten.mesh, c10).coefficient;
    auto c10h = design("high_demand", 10, true);
    const auto ten_h = prepare_model(c10h);
    const double a10h = wall_force(ten_h.flow, ten_h.mesh, c10h).coefficient;
    const double lin = std::abs(a10h / a10 - 1);
    report(6, "wall force coefficients",
           rel_within(a10, 1.56e-15, 0.10) && rel_within(a1, 5.02e-16, 0.10) && lin < 1e-3,
           fmt("10-ring %.3e m^3 (1.56e-15), ", a10) + fmt("1-ring %.3e m^3 (5.02e-16); ", a1) +
               fmt("coefficient change 1e5->5e5 Pa/m %.1e", lin));
  }

  {
    const auto ml = prepare_model(low);
    const auto mh = prepare_model(high);
    const double hl = core_hematocrit_value(low, ml.core);
    const double hh = core_hematocrit_value(high, mh.core);
    report(7, "core hematocrit", std::abs(hl - 0.31) <= 0.02 && std::abs(hh - 0.36) <= 0.02,
           fmt("h %.4f (0.31) at 1e5 Pa/m, ", hl) + fmt("%.4f (0.36) at 5e5 Pa/m", hh));
  }
}

void table_criteria(const ScenarioConfig& base) {
  const int workers = std::max(1u, std::thread::hardware_concurrency());
  const auto rows = table4_rows();
  const auto cols = table4_columns();
  const auto m = run_power_matrix(base, rows, cols, workers);

  auto pw = [&](int r, int c) { return m.at(r, c).robot_power * 1e12; };
  int within = 0, converged = 0;
  double worst = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 12; ++c) {
      const double dev = std::abs(pw(r, c) / kTable[r][c] - 1);
      worst = std::max(worst, dev);
      within += dev <= 0.25;
      converged += m.at(r, c).converged;
      g_worst_species = std::max(g_worst_species, std::abs(m.at(r, c).balance_residual));
    }
  }
  g_audited += 48;

  // Orderings, each checked on every pair the table supports.
  int order_bad = 0;
  std::string first_bad;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok && order_bad++ == 0) first_bad = what;
  };
  for (int c = 0; c < 12; ++c) {
    for (int r : {0, 2}) need(pw(r, c) >= pw(r + 1, c), "pumps >= no pumps");
    for (int r : {0, 1}) need(pw(r + 2, c) > pw(r, c), "1-ring > 10-ring");
  }
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) need(pw(r, 4 + c) >= pw(r, 8 + c), "high >= low capacity");
    for (int c = 0; c < 4; ++c) need(pw(r, 4 + c) > pw(r, c), "power rises with C_in");
    for (int g = 0; g < 3; ++g) {
      for (int q = 0; q < 2; ++q) {
        need(pw(r, 4 * g + 2 + q) > pw(r, 4 * g + q), "power rises with dP");
      }
      for (int p = 0; p < 2; ++p) {
        need(pw(r, 4 * g + 2 * p) > pw(r, 4 * g + 2 * p + 1), "power falls with demand");
      }
    }
  }
  std::string bold;
  int bold_ok = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c : kBoldColumns) {
      const bool ok = rel_within(pw(r, c), kTable[r][c], 0.25);
      bold_ok += ok;
      char b[48];
      std::snprintf(b, sizeof b, "%s%.1f/%g", bold.empty() ? "" : " ", pw(r, c), kTable[r][c]);
      bold += b;
    }
  }
  report(8, "power matrix", within == 48 && order_bad == 0 && bold_ok == 16 && converged == 48,
         std::to_string(within) + "/48 within 25% (worst " + fmt("%.1f%%", worst * 100) + "), " +
             std::to_string(converged) + "/48 converged, " + std::to_string(order_bad) +
             " ordering violations" + (order_bad ? " (first: " + first_bad + ")" : "") + ", bold " +
             std::to_string(bold_ok) + "/16 [" + bold + "]");

  // Halved spacings on the bold cells.
  ScenarioConfig fine = base;
  fine.mesh.refine = 2;
  std::vector<OperatingColumn> bold_cols;
  for (int c : kBoldColumns) bold_cols.push_back(cols[c]);
  const auto mf = run_power_matrix(fine, rows, bold_cols, workers);
  double worst_change = 0;
  for (int r = 0; r < 4; ++r) {
    for (int b = 0; b < 4; ++b) {
      const double coarse = pw(r, kBoldColumns[b]);
      worst_change = std::max(worst_change, std::abs(mf.at(r, b).robot_power * 1e12 / coarse - 1));
      g_worst_species = std::max(g_worst_species, std::abs(mf.at(r, b).balance_residual));
    }
  }
  g_audited += 16;
  report(18, "mesh refinement stability", worst_change < 0.03,
         fmt("largest bold-cell change at half spacing %.2f%% (<3%%)", worst_change * 100));
}

std::string profile_text(const std::vector<double>& p) {
  std::string s;
  for (double v : p) s += fmt(s.empty() ? "%.1f" : " %.1f", v * 1e12);
  return s;
}

}  // namespace

int main() {
  std::printf("capow acceptance: SIMD path %s\n", kernels::isa_name(kernels::active_isa()));
  const auto low = preset("low_demand");
  const auto high = preset("high_demand");

  analytic_criteria(low);
  flow_criteria(low, high);

  // Per-ring profile with high-capacity robots in both scenarios.
  std::vector<Detailed> runs;
  bool profile_ok = true;
  std::string profile_detail;
  for (const char* name : {"low_demand", "high_demand"}) {
    for (bool pumps : {true, false}) {
      runs.push_back(detailed(design(name, 10, pumps)));
      const auto p = ring_position_profile(runs.back().run.report);
      const bool ok = p.leading_max && p.trailing_above_interior_min;
      profile_ok = profile_ok && ok;
      profile_detail += std::string(profile_detail.empty() ? "" : "; ") + name +
                        (pumps ? " pumps [" : " no pumps [") + profile_text(p.robot_power) + "]" +
                        (ok ? "" : " wrong shape");
    }
  }
  report(9, "per-ring power profile", profile_ok, profile_detail);
  const Detailed& low_pumps = runs[0];
  const Detailed& high_pumps = runs[2];

  {
    const auto u = uniform_flux_search(low_pumps.model, low_pumps.cfg, &low_pumps.run.solution);
    const auto& full = low_pumps.run.report;
    const auto& rep = u.run.report;
    const double ratio = rep.uptake / full.uptake;
    const bool ok = rel_within(u.flux, 2.22e19, 0.20) && std::abs(ratio - 0.84) <= 0.05 &&
                    rep.min_robot_power > full.min_robot_power;
    g_worst_species = std::max(g_worst_species, std::abs(rep.balance_residual));
    ++g_audited;
    report(10, "uniform-flux pumping", ok,
           fmt("flux %.3e (2.22e19), ", u.flux) + fmt("aggregate %.1f%% of full (84 +/- 5), ", ratio * 100) +
               fmt("min robot %.2f -> ", full.min_robot_power * 1e12) +
               fmt("%.2f pW (must rise)", rep.min_robot_power * 1e12));
  }
  {
    const auto duty = duty_cycle_average(low_pumps.model, low_pumps.cfg);
    const auto& full = low_pumps.run.report;
    const double ratio = duty.average.uptake / full.uptake;
    const bool ok = std::abs(ratio - 0.79) <= 0.05 &&
                    duty.average.min_robot_power < full.min_robot_power;
    for (const auto* r : {&duty.odd_active.report, &duty.even_active.report}) {
      g_worst_species = std::max(g_worst_species, std::abs(r->balance_residual));
      ++g_audited;
    }
    report(11, "duty-cycle pumping", ok,
           fmt("aggregate %.1f%% of full (79 +/- 5), ", ratio * 100) +
               fmt("min robot %.2f -> ", full.min_robot_power * 1e12) +
               fmt("%.2f pW (must fall)", duty.average.min_robot_power * 1e12));
  }

  const Detailed bare_low = detailed(design("low_demand", 0, true));
  const Detailed bare_high = detailed(design("high_demand", 0, true));
  {
    const auto& sat = low_pumps.run.solution.saturation;
    const double s_out = sat.s.back();
    double dis = 0;
    const auto& bs = bare_low.run.solution.saturation;
    for (std::size_t k = 0; k < bs.s.size(); ++k) dis = std::max(dis, std::abs(bs.s[k] - bs.s_eq[k]));
    report(12, "downstream saturation", std::abs(s_out - 0.6) <= 0.05 && s_out < 0.7 && dis < 1e-3,
           fmt("10-ring pumps outlet S %.4f (0.6, below 0.7); ", s_out) +
               fmt("robot-free max |S - S_eq| %.2e (<1e-3)", dis));
  }
  {
    const double ul = low_pumps.run.report.uptake;
    const double uh = high_pumps.run.report.uptake;
    report(13, "aggregate uptake", rel_within(ul, 5e9, 0.25) && rel_within(uh, 5e9, 0.25),
           fmt("low demand %.3e, ", ul) + fmt("high demand %.3e molecule/s (5e9)", uh));
  }
  {
    const double tl = low_pumps.heat.max_rise;
    const double th = high_pumps.heat.max_rise;
    auto src = robot_heat_source(low_pumps.model.mesh, low_pumps.run.solution, low_pumps.cfg);
    for (double& s : src) s *= 2;
    const auto twice = solve_heat(low_pumps.model.mesh, low_pumps.model.flow, src, low_pumps.cfg);
    const double lin = std::abs(twice.max_rise / (2 * tl) - 1);
    auto in_band = [](double t) { return t >= 3e-5 && t <= 3e-4; };
    report(14, "temperature rise", in_band(tl) && in_band(th) && lin < 1e-3,
           fmt("max dT %.3e K low, ", tl) + fmt("%.3e K high (3e-5..3e-4); ", th) +
               fmt("doubling power changes dT/Q by %.1e", lin));
  }
  {
    const int worst_j = bare_low.model.mesh.z.locate(0.5 * low.geometry.vessel_length);
    const auto& mesh = bare_low.model.mesh;
    const double c_axis = bare_low.run.solution.field.c[mesh.index(0, worst_j)];
    double dev = 0;
    for (int i = mesh.i_wall; i < mesh.nr(); ++i) {
      const double k = analytic::krogh_profile(mesh.r.center(i), c_axis, bare_low.cfg);
      dev = std::max(dev, std::abs(bare_low.run.solution.field.c[mesh.index(i, worst_j)] / k - 1));
    }
    const auto& mh = bare_high.model.mesh;
    const int jh = mh.z.locate(0.5 * high.geometry.vessel_length);
    const double zero = analytic::krogh_zero_distance(bare_high.run.solution.field.c[mh.index(0, jh)],
                                                      bare_high.cfg);
    report(17, "Krogh cylinder comparison", zero > 0 && std::abs(zero - 10e-6) <= 2e-6 && dev < 0.05,
           fmt("high-demand zero crossing %.2f um from wall (10 +/- 2); ", zero * 1e6) +
               fmt("low-demand mid-vessel tissue deviation %.2f%% (<5%%)", dev * 100));
  }

  table_criteria(low);

  report(15, "conservation audits", g_worst_species < 0.01 && g_worst_heat < 0.01,
         std::to_string(g_audited) + fmt(" solves, worst species residual %.2e, ", g_worst_species) +
             fmt("worst heat residual %.2e (<1e-2)", g_worst_heat));
  kinetics_criterion(low);

  std::sort(g_outcomes.begin(), g_outcomes.end(),
            [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  int failed = 0;
  for (const auto& o : g_outcomes) {
    std::printf("[%s] criterion %2d  %s: %s\n", o.pass ? "PASS" : "FAIL", o.id, o.title.c_str(),
                o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("capow acceptance: %zu criteria, %d failed\n", g_outcomes.size(), failed);
  return failed == 0 ? 0 : 1;
}
