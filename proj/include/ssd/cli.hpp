#pragma once

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ssd/bp_decoder.hpp"
#include "ssd/channel.hpp"
#include "ssd/detectors.hpp"
#include "ssd/experiments.hpp"
#include "ssd/io_util.hpp"
#include "ssd/measurement.hpp"
#include "ssd/pt_analysis.hpp"
#include "ssd/signal_model.hpp"

namespace ssd {

// Raised when a numeric self-check fails; maps to exit code 2.
struct NumericalGateError : std::runtime_error {
  explicit NumericalGateError(const std::string& what)
      : std::runtime_error(what) {}
};

// Grid rule for comparing closed forms against the numeric oracle at one
// channel point: wide enough to hold the shifted slab, fine enough to sample
// the narrowest of the message width and the posterior slab width.
inline GridSpec oracle_grid(const ChannelPoint& p, int max_points = 1 << 16) {
  const PosteriorParams params = posterior_params(p);
  const double theta = std::sqrt(params.theta2);
  const double target_dx = std::min(p.sigma_w, theta) / 4.0;
  const double half_width = std::abs(p.x0) + 8.0 * p.prior.sigma_x;
  int n = 1024;
  while (n < max_points && 2.0 * half_width / n > target_dx) n *= 2;
  return GridSpec::make(half_width, n);
}

namespace cli {

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0.0, hi = 0.0;
    int count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
        count < 1)
      throw std::invalid_argument("grid spec must be 'lo:hi:count' or 'a,b,c'");
    for (int k = 0; k < count; ++k)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty grid spec");
  return out;
}

// Removes files already written by a failed command so partial outputs are
// never mistaken for complete artifacts.
class ArtifactTracker {
 public:
  void add(const std::filesystem::path& p) { written_.push_back(p); }
  void rollback() {
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
  }

 private:
  std::vector<std::filesystem::path> written_;
};

// ---- posterior ------------------------------------------------------------

struct PosteriorCmd {
  double q = 0.05;
  double sigma_x = 5.0;
  double x0 = 2.5;
  int l = 4;
  std::string sigma_w_list = "0.5,1,2,4";
  int grid_points = 1024;
  std::string out_dir = ".";
};

inline int run_posterior(const PosteriorCmd& cmd) {
  const auto sigma_ws = parse_grid(cmd.sigma_w_list);
  const SpikeSlabPrior prior{cmd.q, cmd.sigma_x, GaussianSlab{}};
  const GridSpec grid = default_grid(cmd.sigma_x, cmd.grid_points);
  ArtifactTracker tracker;
  try {
    std::vector<std::string> files;
    for (double sw : sigma_ws) {
      const ChannelPoint point{cmd.x0, sw, cmd.l, prior};
      const HybridDensity d = posterior_density(posterior_params(point), grid);
      std::ostringstream os;
      write_density_csv(d, os);
      const auto path = std::filesystem::path(cmd.out_dir) /
                        ("posterior_sw" + fmt_short(sw) + ".csv");
      write_text_file(path, os.str());
      tracker.add(path);
      files.push_back(path.filename().string());
      std::cout << "wrote " << path.string() << "\n";
    }
    nlohmann::json side;
    side["command"] = "posterior";
    side["q"] = cmd.q;
    side["sigma_x"] = cmd.sigma_x;
    side["x0"] = cmd.x0;
    side["l"] = cmd.l;
    side["sigma_w"] = sigma_ws;
    side["grid_points"] = cmd.grid_points;
    side["files"] = files;
    write_text_file(std::filesystem::path(cmd.out_dir) / "posterior.json",
                    side.dump(2) + "\n");
  } catch (...) {
    tracker.rollback();
    throw;
  }
  return 0;
}

// ---- boundary ---------------------------------------------------------------

struct BoundaryCmd {
  std::string q_list = "0.02,0.05";
  std::string sigma_x_list = "10,5";
  int l = 4;
  std::string sigma_w_spec = "0.1:6:60";
  double x_max = 20.0;
  double tol = 1e-6;
  double delta = 0.0;  // 0 -> spacing of the default grid for sigma_x
  int grid_points = 1024;
  std::string out_dir = ".";
  std::string config_path;
};

inline void run_boundary_set(double q, double sigma_x, const BoundaryCmd& cmd,
                             const std::vector<double>& sigma_ws,
                             ArtifactTracker& tracker) {
  const double delta = cmd.delta > 0.0
                           ? cmd.delta
                           : default_grid(sigma_x, cmd.grid_points).spacing();
  const BoundarySolver solver{cmd.x_max, cmd.tol, 64, 4096};
  const PTBoundary bht = boundary_curve(DetectorKind{Detector::bht, 0.0},
                                        sigma_ws, q, sigma_x, cmd.l, solver);
  const PTBoundary csbp = boundary_curve(DetectorKind{Detector::csbp, delta},
                                         sigma_ws, q, sigma_x, cmd.l, solver);
  // The CS-BP curve depends on the spike-width convention; emit the
  // half-delta companion so that sensitivity is visible.
  const PTBoundary csbp_half = boundary_curve(
      DetectorKind{Detector::csbp, delta / 2.0}, sigma_ws, q, sigma_x, cmd.l, solver);

  const std::string base = "boundary_q" + fmt_short(q) + "_sx" +
                           fmt_short(sigma_x) + "_L" + std::to_string(cmd.l);
  const auto dir = std::filesystem::path(cmd.out_dir);

  std::ostringstream main_csv;
  write_boundary_csv(bht, csbp, main_csv);
  write_text_file(dir / (base + ".csv"), main_csv.str());
  tracker.add(dir / (base + ".csv"));

  std::ostringstream half_csv;
  write_boundary_csv(bht, csbp_half, half_csv);
  write_text_file(dir / (base + "_delta_half.csv"), half_csv.str());
  tracker.add(dir / (base + "_delta_half.csv"));

  const DominanceReport rep = region_dominance(bht, csbp);
  nlohmann::json side;
  side["command"] = "boundary";
  side["config"] = {{"q", q},           {"sigma_x", sigma_x},
                    {"l", cmd.l},       {"sigma_w_grid", sigma_ws},
                    {"x_max", cmd.x_max}, {"tol", cmd.tol},
                    {"delta", delta},   {"grid_points", cmd.grid_points}};
  side["files"] = {base + ".csv", base + "_delta_half.csv"};
  side["dominance"] = {{"bht_dominates_csbp", rep.dominates},
                       {"max_gap", rep.max_gap},
                       {"mean_gap", rep.mean_gap},
                       {"upper_half_gap_slope", rep.upper_half_gap_slope}};
  write_text_file(dir / (base + ".json"), side.dump(2) + "\n");
  tracker.add(dir / (base + ".json"));
  std::cout << "wrote " << (dir / (base + ".csv")).string()
            << " (bht dominates csbp: " << (rep.dominates ? "yes" : "no")
            << ", mean gap " << rep.mean_gap << ")\n";
}

inline int run_boundary(BoundaryCmd cmd) {
  std::vector<double> qs, sxs, sigma_ws;
  if (!cmd.config_path.empty()) {
    const nlohmann::json j =
        nlohmann::json::parse(read_text_file(cmd.config_path));
    const nlohmann::json& c = j.contains("config") ? j.at("config") : j;
    qs = {c.at("q").get<double>()};
    sxs = {c.at("sigma_x").get<double>()};
    sigma_ws = c.at("sigma_w_grid").get<std::vector<double>>();
    cmd.l = c.at("l").get<int>();
    cmd.x_max = c.at("x_max").get<double>();
    cmd.tol = c.at("tol").get<double>();
    cmd.delta = c.at("delta").get<double>();
    cmd.grid_points = c.value("grid_points", cmd.grid_points);
  } else {
    qs = parse_grid(cmd.q_list);
    sxs = parse_grid(cmd.sigma_x_list);
    sigma_ws = parse_grid(cmd.sigma_w_spec);
  }
  ArtifactTracker tracker;
  try {
    for (double q : qs)
      for (double sx : sxs) run_boundary_set(q, sx, cmd, sigma_ws, tracker);
  } catch (...) {
    tracker.rollback();
    throw;
  }
  return 0;
}

// ---- sweep ------------------------------------------------------------------

struct SweepCmd {
  SweepConfig config;
  std::string sigma_w_spec;
  std::string x0_spec;
  std::string detector = "both";
  std::string mode = "full";
  std::string matrix_policy = "fresh";
  std::string out_dir = ".";
  std::string config_path;
};

inline int run_sweep_cmd(SweepCmd cmd, const CLI::App* app) {
  SweepConfig cfg;
  const bool have_file = !cmd.config_path.empty();
  if (have_file) cfg = load_sweep_sidecar(cmd.config_path);

  // Flags override file values field by field.
  auto given = [&](const std::string& name) {
    return app != nullptr && app->count(name) > 0;
  };
  if (!have_file || given("--n")) cfg.n = cmd.config.n;
  if (!have_file || given("--m")) cfg.m = cmd.config.m;
  if (!have_file || given("--L")) cfg.l = cmd.config.l;
  if (!have_file || given("--q")) cfg.q = cmd.config.q;
  if (!have_file || given("--sigma-x")) cfg.sigma_x = cmd.config.sigma_x;
  if (!have_file || given("--trials")) cfg.trials = cmd.config.trials;
  if (!have_file || given("--seed")) cfg.seed = cmd.config.seed;
  if (!have_file || given("--bp-iters")) cfg.bp_max_iters = cmd.config.bp_max_iters;
  if (!have_file || given("--bp-tol")) cfg.bp_tol = cmd.config.bp_tol;
  if (!have_file || given("--bp-damping")) cfg.bp_damping = cmd.config.bp_damping;
  if (!have_file || given("--grid-half-width"))
    cfg.grid_half_width = cmd.config.grid_half_width;
  if (!have_file || given("--grid-points")) cfg.grid_points = cmd.config.grid_points;
  if (!have_file || given("--delta")) cfg.csbp_delta = cmd.config.csbp_delta;
  if (!have_file || given("--mode"))
    cfg.mode = cmd.mode == "decoupled" ? SweepMode::decoupled : SweepMode::full_vector;
  if (!have_file || given("--matrix-policy"))
    cfg.matrix_policy = cmd.matrix_policy == "fixed" ? MatrixPolicy::fixed
                                                     : MatrixPolicy::fresh_per_trial;
  if (!have_file || given("--detector")) {
    cfg.detectors.clear();
    if (cmd.detector == "bht" || cmd.detector == "both")
      cfg.detectors.push_back(Detector::bht);
    if (cmd.detector == "csbp" || cmd.detector == "both")
      cfg.detectors.push_back(Detector::csbp);
    if (cfg.detectors.empty())
      throw std::invalid_argument("--detector must be bht, csbp or both");
  }
  if (!cmd.sigma_w_spec.empty()) cfg.sigma_w_grid = parse_grid(cmd.sigma_w_spec);
  if (!cmd.x0_spec.empty()) cfg.x0_grid = parse_grid(cmd.x0_spec);
  cfg.threads = cmd.config.threads;

  cfg.validate();
  const FailureHeatmap hm = run_sweep(cfg);
  const ArtifactPaths paths = write_results(hm, cmd.out_dir);
  std::cout << "wrote " << paths.csv.string() << "\n"
            << "wrote " << paths.sidecar.string() << "\n";
  return 0;
}

// ---- decode -----------------------------------------------------------------

struct DecodeCmd {
  int n = 32;
  int m = 16;
  int l = 4;
  double q = 0.1;
  double sigma_x = 5.0;
  double sigma_w = 1.0;
  double x0 = 0.0;  // 0 -> no forced probe
  std::uint64_t seed = 1;
  int grid_points = 512;
  int bp_iters = 20;
  double bp_tol = 1e-4;
  double bp_damping = 0.0;
  std::string trace_out;
};

inline int run_decode(const DecodeCmd& cmd) {
  Rng rng = make_rng(cmd.seed, {0xdecu});
  const SparseBinaryMatrix matrix =
      build_matrix(cmd.n, cmd.m, cmd.l, rng, 50, &std::cerr);
  const SpikeSlabPrior prior{cmd.q, cmd.sigma_x, GaussianSlab{}};
  auto support = sample_support(prior, cmd.n, rng);
  std::optional<int> probe;
  std::optional<double> magnitude;
  if (cmd.x0 > 0.0) {
    std::uniform_int_distribution<int> pick(0, cmd.n - 1);
    probe = pick(rng);
    support[static_cast<size_t>(*probe)] = 1;
    magnitude = cmd.x0;
  }
  const SignalInstance signal = sample_signal(prior, support, probe, magnitude, rng);
  const Measurement meas = measure(matrix, signal, cmd.sigma_w, rng);

  const BpConfig bp_cfg{cmd.bp_iters, cmd.bp_tol, cmd.bp_damping,
                        default_grid(cmd.sigma_x, cmd.grid_points)};
  const BpResult result = run_bp(matrix, meas.y, prior, cmd.sigma_w, bp_cfg);

  const DetectorKind bht{Detector::bht, 0.0};
  const DetectorKind csbp{Detector::csbp, bp_cfg.grid.spacing()};
  std::printf("%6s %8s %12s %12s %5s %5s %5s\n", "i", "true", "spike_mass",
              "slab_mean", "S", "bht", "csbp");
  for (int i = 0; i < cmd.n; ++i) {
    const HybridDensity& b = result.beliefs[static_cast<size_t>(i)];
    const Moments mom = moments(b);
    std::printf("%6d %8.3f %12.6f %12.6f %5d %5d %5d\n", i,
                signal.values[static_cast<size_t>(i)], b.spike_mass(), mom.mean,
                static_cast<int>(signal.support[static_cast<size_t>(i)]),
                detect(b, bht, prior).support_detected ? 1 : 0,
                detect(b, csbp, prior).support_detected ? 1 : 0);
  }
  std::printf("iterations=%d converged=%s final_delta=%.3g\n",
              result.diag.iterations, result.diag.converged ? "yes" : "no",
              result.diag.final_delta);
  if (probe) std::printf("probe index %d magnitude %.3f\n", *probe, cmd.x0);
  if (!cmd.trace_out.empty()) {
    std::ostringstream os;
    write_bp_trace_csv(result.diag, os);
    write_text_file(cmd.trace_out, os.str());
  }
  return 0;
}

// ---- selftest ---------------------------------------------------------------

// Oracle-agreement gates: the c2 sign gate (closed form vs direct numeric
// posterior) and BP exactness on trees. Exits nonzero through
// NumericalGateError when a gate fails.
inline int run_selftest(int points, int trees) {
  std::printf("selftest: posterior oracle gate (%d points)\n", points);
  Rng rng(20240915);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst_l1 = 0.0;
  for (int k = 0; k < points; ++k) {
    const double sigma_w = 0.1 + 19.9 * u01(rng);
    const double x0 = 15.0 * u01(rng);
    const double q = u01(rng) < 0.5 ? 0.02 : 0.05;
    const double sigma_x = u01(rng) < 0.5 ? 5.0 : 10.0;
    const ChannelPoint p{x0, sigma_w, 4, SpikeSlabPrior{q, sigma_x, GaussianSlab{}}};
    const GridSpec grid = oracle_grid(p);
    const double l1 = l1_distance(posterior_density(posterior_params(p), grid),
                                  oracle_posterior(p, grid));
    worst_l1 = std::max(worst_l1, l1);
  }
  std::printf("  max l1 closed-form vs oracle: %.3g (gate 1e-6)\n", worst_l1);
  if (worst_l1 > 1e-6)
    throw NumericalGateError("posterior oracle gate failed: l1 " +
                             std::to_string(worst_l1));

  std::printf("selftest: tree BP exactness (%d instances)\n", trees);
  double worst_tree = 0.0;
  for (int t = 0; t < trees; ++t) {
    Rng trng = make_rng(977, {static_cast<std::uint64_t>(t)});
    const int n = 4 + static_cast<int>(trng() % 4);  // 4..7
    const int m = n + 2;
    const int l = 2;
    // Acyclic placement via union-find over variable and check nodes.
    std::vector<int> parent(static_cast<size_t>(n + m));
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int a) {
      while (parent[static_cast<size_t>(a)] != a) a = parent[static_cast<size_t>(a)];
      return a;
    };
    std::vector<std::vector<int>> cols(static_cast<size_t>(n));
    std::uniform_int_distribution<int> pick(0, m - 1);
    for (int i = 0; i < n; ++i) {
      while (static_cast<int>(cols[static_cast<size_t>(i)].size()) < l) {
        const int j = pick(trng);
        const int a = find(i), b = find(n + j);
        if (a == b) continue;
        parent[static_cast<size_t>(a)] = b;
        cols[static_cast<size_t>(i)].push_back(j);
      }
    }
    const SparseBinaryMatrix matrix(m, n, l, std::move(cols), 0);
    const SpikeSlabPrior prior{0.2, 3.0, GaussianSlab{}};
    auto support = sample_support(prior, n, trng);
    const SignalInstance signal =
        sample_signal(prior, support, std::nullopt, std::nullopt, trng);
    const double sigma_w = 0.5 + u01(trng);
    const Measurement meas = measure(matrix, signal, sigma_w, trng);
    const GridSpec grid = GridSpec::make(24.0, 512);
    const BpConfig cfg{40, 1e-9, 0.0, grid};
    const BpResult bp = run_bp(matrix, meas.y, prior, sigma_w, cfg);
    const auto exact = brute_force_posterior(matrix, meas.y, prior, sigma_w, grid);
    for (int i = 0; i < n; ++i)
      worst_tree = std::max(
          worst_tree, l1_distance(bp.beliefs[static_cast<size_t>(i)],
                                  exact[static_cast<size_t>(i)]));
  }
  std::printf("  max l1 BP vs brute force on trees: %.3g (gate 2e-2)\n", worst_tree);
  if (worst_tree > 2e-2)
    throw NumericalGateError("tree BP exactness gate failed: l1 " +
                             std::to_string(worst_tree));

  std::printf("selftest: all gates passed\n");
  return 0;
}

// ---- dispatch ---------------------------------------------------------------

inline int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Bayesian sparse support detection from noisy measurements"};
  app.require_subcommand(1);

  PosteriorCmd post;
  CLI::App* post_app = app.add_subcommand(
      "posterior", "Emit decoupled-channel posterior densities as CSV");
  post_app->add_option("--q", post.q, "support mixing rate");
  post_app->add_option("--sigma-x", post.sigma_x, "slab std");
  post_app->add_option("--x0", post.x0, "true element value");
  post_app->add_option("--L", post.l, "column weight");
  post_app->add_option("--sigma-w-grid", post.sigma_w_list,
                       "noise levels, 'a,b,c' or 'lo:hi:count'");
  post_app->add_option("--grid-points", post.grid_points, "grid nodes (power of two)");
  post_app->add_option("--out", post.out_dir, "output directory");

  BoundaryCmd bnd;
  CLI::App* bnd_app = app.add_subcommand(
      "boundary", "Compute BHT/CS-BP phase-transition boundary curves");
  bnd_app->add_option("--q", bnd.q_list, "mixing rates (comma list)");
  bnd_app->add_option("--sigma-x", bnd.sigma_x_list, "slab stds (comma list)");
  bnd_app->add_option("--L", bnd.l, "column weight");
  bnd_app->add_option("--sigma-w-grid", bnd.sigma_w_spec, "noise grid");
  bnd_app->add_option("--x-max", bnd.x_max, "search upper bound for |x0|");
  bnd_app->add_option("--tol", bnd.tol, "bisection tolerance");
  bnd_app->add_option("--delta", bnd.delta, "CS-BP spike-width convention");
  bnd_app->add_option("--grid-points", bnd.grid_points,
                      "grid nodes behind the default delta");
  bnd_app->add_option("--out", bnd.out_dir, "output directory");
  bnd_app->add_option("--config", bnd.config_path, "replay a boundary sidecar");

  SweepCmd swp;
  CLI::App* swp_app = app.add_subcommand(
      "sweep", "Monte Carlo failure-probability sweep (full or decoupled)");
  swp_app->add_option("--n", swp.config.n, "signal length N");
  swp_app->add_option("--m", swp.config.m, "measurement count M");
  swp_app->add_option("--L", swp.config.l, "column weight");
  swp_app->add_option("--q", swp.config.q, "mixing rate");
  swp_app->add_option("--sigma-x", swp.config.sigma_x, "slab std");
  swp_app->add_option("--sigma-w-grid", swp.sigma_w_spec, "noise grid");
  swp_app->add_option("--x0-grid", swp.x0_spec, "probe magnitude grid");
  swp_app->add_option("--trials", swp.config.trials, "trials per cell");
  swp_app->add_option("--seed", swp.config.seed, "master seed");
  swp_app->add_option("--threads", swp.config.threads, "worker cap (0 = auto)");
  swp_app->add_option("--detector", swp.detector, "bht, csbp or both");
  swp_app->add_option("--mode", swp.mode, "full or decoupled");
  swp_app->add_option("--matrix-policy", swp.matrix_policy, "fresh or fixed");
  swp_app->add_option("--bp-iters", swp.config.bp_max_iters, "BP iteration cap");
  swp_app->add_option("--bp-tol", swp.config.bp_tol, "BP convergence tol");
  swp_app->add_option("--bp-damping", swp.config.bp_damping, "BP damping");
  swp_app->add_option("--grid-half-width", swp.config.grid_half_width,
                      "BP grid half width (0 = 8 sigma_x)");
  swp_app->add_option("--grid-points", swp.config.grid_points, "BP grid nodes");
  swp_app->add_option("--delta", swp.config.csbp_delta,
                      "CS-BP spike-width convention (0 = grid spacing)");
  swp_app->add_option("--out", swp.out_dir, "output directory");
  swp_app->add_option("--config", swp.config_path, "replay a sweep sidecar");

  DecodeCmd dec;
  CLI::App* dec_app = app.add_subcommand(
      "decode", "Run one BP decode and print per-element posteriors");
  dec_app->add_option("--n", dec.n, "signal length N");
  dec_app->add_option("--m", dec.m, "measurement count M");
  dec_app->add_option("--L", dec.l, "column weight");
  dec_app->add_option("--q", dec.q, "mixing rate");
  dec_app->add_option("--sigma-x", dec.sigma_x, "slab std");
  dec_app->add_option("--sigma-w", dec.sigma_w, "noise level");
  dec_app->add_option("--x0", dec.x0, "forced probe magnitude (0 = none)");
  dec_app->add_option("--seed", dec.seed, "master seed");
  dec_app->add_option("--grid-points", dec.grid_points, "BP grid nodes");
  dec_app->add_option("--bp-iters", dec.bp_iters, "BP iteration cap");
  dec_app->add_option("--bp-tol", dec.bp_tol, "BP convergence tol");
  dec_app->add_option("--bp-damping", dec.bp_damping, "BP damping");
  dec_app->add_option("--trace-out", dec.trace_out, "per-iteration CSV log");

  int selftest_points = 40;
  int selftest_trees = 10;
  CLI::App* self_app = app.add_subcommand(
      "selftest", "Run the oracle-agreement gates; nonzero exit on failure");
  self_app->add_option("--points", selftest_points, "oracle gate sample size");
  self_app->add_option("--trees", selftest_trees, "tree instances");

  try {
    app.parse(argc, argv);
    if (post_app->parsed()) return run_posterior(post);
    if (bnd_app->parsed()) return run_boundary(bnd);
    if (swp_app->parsed()) return run_sweep_cmd(swp, swp_app);
    if (dec_app->parsed()) return run_decode(dec);
    if (self_app->parsed()) return run_selftest(selftest_points, selftest_trees);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NumericalGateError& e) {
    std::cerr << "numerical gate failure: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cli
}  // namespace ssd
