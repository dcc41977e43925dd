#include "ifsdim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "ifsdim/bound_lab.hpp"
#include "ifsdim/config.hpp"
#include "ifsdim/dimension.hpp"
#include "ifsdim/errors.hpp"
#include "ifsdim/ifs.hpp"
#include "ifsdim/pressure.hpp"
#include "ifsdim/rng.hpp"
#include "ifsdim/weight_program.hpp"

namespace ifsdim {

namespace {

namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = lo + (hi - lo) * double(i) / double(points - 1);
  return out;
}

double read_golden_scalar(const std::string& golden_dir, const std::string& name) {
  const fs::path path = fs::path(golden_dir) / name;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto from = line.find_first_not_of(" \t\r");
    if (from == std::string::npos || line[from] == '#') continue;
    return std::stod(line.substr(from));
  }
  throw ConfigError("cannot read golden value from '" + path.string() + "'");
}

// --- criterion 1: the full-system pressure vanishes at s = 1 --------------

Verdict normalization_at_one() {
  const double p1 = pressure_series(make_lueroth(kFullAlphabet), 1.0).value;
  const auto ext = pressure_tail_extrapolate(make_gauss(200), 1.0, {25, 50, 100, 200});
  const double width = ext.final.hi - ext.final.lo;
  const double cap = 2.0 / 201;
  const bool pass = std::abs(p1) <= 1e-9 && ext.final.lo <= 0.0 && 0.0 <= ext.final.hi &&
                    width <= cap * (1 + 1e-12);
  return {pass, "series |P(1)| = " + fmt(std::abs(p1)) + ", bracket [" + fmt(ext.final.lo) +
                    ", " + fmt(ext.final.hi) + "] width " + fmt(width) + " <= " + fmt(cap)};
}

// --- criterion 2: the pressure curve is strictly decreasing and convex ----

Verdict pressure_curve_shape() {
  const std::vector<double> grid = linspace(0.55, 1.3, 50);
  const auto lue = pressure_properties_check(make_lueroth(kFullAlphabet), grid, 1);
  const auto gau = pressure_properties_check(make_gauss(30), grid, 3);
  const std::size_t violations = lue.offending_s.size() + gau.offending_s.size();
  const bool pass =
      lue.decreasing && lue.convex && gau.decreasing && gau.convex && violations == 0;
  return {pass, "violations on the 50-point grid: " + std::to_string(violations)};
}

// --- criterion 3: spectral and partition backends agree -------------------

Verdict backend_agreement() {
  const std::vector<double> ss = {0.6, 0.8, 1.0};
  const auto gau = make_gauss(30);
  const auto gau_part = partition_sum_multi(gau, 6, ss);
  double worst_gauss = 0;
  for (std::size_t i = 0; i < ss.size(); ++i)
    worst_gauss = std::max(worst_gauss, std::abs(pressure_eigenvalue(gau, ss[i], 512).value -
                                                 gau_part[i].value));
  const auto lue = make_lueroth(30);
  const auto lue_part = partition_sum_multi(lue, 6, ss);
  double worst_affine = 0;
  for (std::size_t i = 0; i < ss.size(); ++i)
    worst_affine = std::max(worst_affine, std::abs(pressure_eigenvalue(lue, ss[i], 512).value -
                                                   lue_part[i].value));
  const bool pass = worst_gauss <= 0.05 && worst_affine <= 1e-12;
  return {pass, "nonlinear gap " + fmt(worst_gauss) + " <= 0.05, affine gap " +
                    fmt(worst_affine) + " <= 1e-12"};
}

// --- criterion 4: the exponent program against a lattice oracle -----------

// Lattice minimizer at an effective step of 1e-4.  Up to two positions the
// whole simplex fits; beyond that the scan refines box lattices around the
// running argmin (the objective is a max of affine functions of b, hence
// convex, so the minimum never escapes the shrinking boxes).
double lattice_oracle(const std::vector<double>& t, double d, double s) {
  const std::size_t k = t.size();
  if (k <= 2) return a_of_s_grid(t, d, s, 1e-4).A;

  GridScan coarse = a_of_s_grid(t, d, s, k == 3 ? 1e-3 : 1e-2);
  std::vector<double> center = coarse.b;
  double best = coarse.A;
  double step = (k == 3) ? 1e-3 : 1e-2;
  while (step > 1e-4 * (1 + 1e-9)) {
    const double fine = std::max(step / 10, 1e-4);
    const int w = 15;  // box spans 1.5 coarse cells each way
    std::vector<double> cur(k, 0.0), arg = center;
    auto rec = [&](auto&& self, std::size_t j, double used) -> void {
      if (j + 1 == k) {
        if (used > 1.0 + 1e-12) return;
        cur[j] = std::max(0.0, (1.0 - used) / t[j]);
        const double val = a_objective(t, d, s, cur);
        if (val < best) {
          best = val;
          arg = cur;
        }
        return;
      }
      for (int i = -w; i <= w; ++i) {
        const double b = center[j] + double(i) * fine;
        if (b < 0) continue;
        const double next = used + t[j] * b;
        if (next > 1.0 + 1e-12) break;
        cur[j] = b;
        self(self, j + 1, next);
      }
    };
    rec(rec, 0, 0.0);
    center = arg;
    step = fine;
  }
  return best;
}

Verdict exponent_program_oracle() {
  double worst_analytic = 0;
  for (const double s : {0.4, 0.55, 0.7, 0.85, 1.0})
    worst_analytic = std::max(worst_analytic, std::abs(a_of_s({1.0, 1.0}, 2.0, s).A - s * s));

  const SplitRng root(2026);
  double worst_lattice = 0;
  std::size_t failures = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const SplitRng inst = root.child(i);
    const std::size_t k = 1 + std::size_t(inst.below(0, 4));
    std::vector<double> t(k);
    for (std::size_t m = 0; m < k; ++m) t[m] = 0.5 + 1.5 * inst.unit(1 + m);
    const double d = 1.5 + 1.5 * inst.unit(10);
    const double s = 0.4 + 0.6 * inst.unit(11);
    const double gap = std::abs(a_of_s(t, d, s).A - lattice_oracle(t, d, s));
    worst_lattice = std::max(worst_lattice, gap);
    if (gap > 1e-3) ++failures;
  }
  const bool pass = worst_analytic <= 1e-9 && failures == 0;
  return {pass, "analytic gap " + fmt(worst_analytic) + " <= 1e-9, worst lattice gap " +
                    fmt(worst_lattice) + " <= 1e-3 over 50 instances"};
}

// --- criterion 5: threshold-base limits of the critical exponent ----------

Verdict threshold_limits() {
  const auto sys = make_gauss(200);
  const auto big = critical_exponent(sys, make_target({1.0}, 1e8), 1e-8);
  const auto near1 = critical_exponent(sys, make_target({1.0}, 1.0 + 1e-4), 1e-8);
  const auto sweep =
      critical_exponent_sweep(sys, make_target({1.0}, 2.0), {2.0, 4.0, 8.0, 16.0}, 1e-8);
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < sweep.size(); ++i)
    decreasing = decreasing && sweep[i].s0 > sweep[i + 1].s0;
  const bool pass =
      std::abs(big.s0 - 0.5) <= 0.05 && std::abs(near1.s0 - 1.0) <= 0.05 && decreasing;
  return {pass, "s0(1e8) = " + fmt(big.s0) + ", s0(1+1e-4) = " + fmt(near1.s0) +
                    ", sweep " + fmt(sweep.front().s0) + " .. " + fmt(sweep.back().s0) +
                    (decreasing ? " strictly decreasing" : " NOT decreasing")};
}

// --- criterion 6: the root against the frozen independent oracle ----------

Verdict scalar_root_oracle(const std::string& golden_dir) {
  const double golden = read_golden_scalar(golden_dir, "critical_exponent_base_e.txt");
  const auto r = critical_exponent(make_lueroth(kFullAlphabet),
                                   make_target({1.0}, std::exp(1.0)), 1e-10);
  const double gap = std::abs(r.s0 - golden);
  return {gap <= 1e-8, "|s0 - oracle| = " + fmt(gap) + " <= 1e-8"};
}

// --- criterion 7: cover-cost decay flips sign at the critical exponent ----

Verdict cover_transition() {
  const auto sys = make_lueroth(kFullAlphabet);
  double worst_gap = 0;
  bool pass = true;
  std::string breakdown;
  for (const std::size_t k : {std::size_t(1), std::size_t(2)}) {
    for (const double B : {1.5, 2.0}) {
      const TargetSpec target =
          k == 1 ? make_target({1.0}, B) : make_target({1.0, 1.0}, B);
      const double s0 = critical_exponent(sys, target, 1e-10).s0;
      std::vector<double> grid(11);
      for (int i = 0; i <= 10; ++i) grid[i] = s0 + 0.01 * (i - 5);
      const TransitionEstimate est = cover_cost_transition(sys, target, 6, 14, grid);
      const double gap = std::abs(est.s_cross - s0);
      const double slope_below = est.rows.front().slope;  // at s0 - 0.05
      const double slope_above = est.rows.back().slope;   // at s0 + 0.05
      worst_gap = std::max(worst_gap, gap);
      pass = pass && gap <= 0.03 && slope_below > 0 && slope_above < 0;
      if (!breakdown.empty()) breakdown += ", ";
      breakdown += "k=" + std::to_string(k) + " B=" + fmt(B) + ": " + fmt(gap);
    }
  }
  return {pass, "crossing gaps (cap 0.03): " + breakdown};
}

// --- criterion 8: the measure-carrying subset at depth 36 -----------------

Verdict subset_construction() {
  const auto sys = make_lueroth(kFullAlphabet);
  const auto target = make_target({1.0}, 2.0);
  const CantorSpec spec = make_cantor_spec(sys, target, 6, 2, 300);

  double conservation = 0;
  for (std::size_t stage = 1; stage <= spec.levels.size(); ++stage)
    conservation = std::max(conservation, cantor_conservation(sys, target, spec, stage));

  // The same leaf streams the ratio statistics draw from below.
  const SplitRng root(0);
  std::size_t outside = 0;
  for (std::uint64_t i = 0; i < 1000; ++i)
    if (!cantor_leaf_in_target(sys, target, spec, cantor_sample_leaf(sys, target, spec,
                                                                     root.child(i))))
      ++outside;

  const LocalDimStats stats = local_dimension_sample(sys, target, spec, 1000, 0);
  const double sigma = natural_cover_exponent(sys, target, spec);
  const double floor = spec.s - 0.1;
  const bool pass = conservation <= 1e-12 && outside == 0 && stats.min_ratio >= floor &&
                    std::abs(sigma - spec.s) <= 0.05;
  return {pass, "conservation " + fmt(conservation) + ", leaves outside: " +
                    std::to_string(outside) + ", min ratio " + fmt(stats.min_ratio) +
                    " >= " + fmt(floor) + ", |natural exponent - s| = " +
                    fmt(std::abs(sigma - spec.s)) + " <= 0.05"};
}

// --- criterion 9: validate output trees are byte-identical ----------------

Verdict validate_determinism(const std::string& golden_dir) {
  const Config cfg = Config::parse_text("validate.golden_dir = " + golden_dir + "\nseed = 0\n");
  const fs::path base = fs::temp_directory_path() / "ifsdim_acceptance";
  fs::remove_all(base);
  std::ostringstream sink;
  const int rc1 = run_command(cfg, "validate", (base / "run1").string(), sink);
  const int rc2 = run_command(cfg, "validate", (base / "run2").string(), sink);
  if (rc1 != 0 || rc2 != 0)
    return {false, "validate exited " + std::to_string(rc1) + " / " + std::to_string(rc2)};

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(base / "run1"))
    names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  std::size_t count2 = 0;
  for (const auto& entry : fs::directory_iterator(base / "run2")) (void)entry, ++count2;
  if (count2 != names.size())
    return {false, "run trees hold different file counts"};

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  for (const std::string& name : names)
    if (!fs::exists(base / "run2" / name) ||
        slurp(base / "run1" / name) != slurp(base / "run2" / name))
      return {false, "'" + name + "' differs between runs"};
  return {true, std::to_string(names.size()) + " artifact files byte-identical across runs"};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::string& golden_dir,
                                            std::ostream& progress) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> gate = {
      {"pressure-normalization", normalization_at_one},
      {"pressure-shape", pressure_curve_shape},
      {"backend-agreement", backend_agreement},
      {"exponent-program", exponent_program_oracle},
      {"threshold-limits", threshold_limits},
      {"scalar-root-oracle", [&] { return scalar_root_oracle(golden_dir); }},
      {"cover-transition", cover_transition},
      {"subset-construction", subset_construction},
      {"determinism", [&] { return validate_determinism(golden_dir); }},
  };

  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < gate.size(); ++i) {
    CriterionResult r;
    r.index = int(i + 1);
    r.name = gate[i].first;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Verdict v = gate[i].second();
      r.pass = v.pass;
      r.detail = v.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("threw: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line.precision(1);
    line << std::fixed;
    line << "criterion " << r.index << " " << r.name << ": " << (r.pass ? "PASS" : "FAIL")
         << " [" << r.seconds << " s] " << r.detail << "\n";
    progress << line.str() << std::flush;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace ifsdim
