#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssd/bp_decoder.hpp"
#include "ssd/detectors.hpp"
#include "ssd/io_util.hpp"
#include "ssd/measurement.hpp"
#include "ssd/pt_analysis.hpp"
#include "ssd/rng.hpp"
#include "ssd/signal_model.hpp"

namespace ssd {

enum class SweepMode { decoupled, full_vector };
enum class MatrixPolicy { fresh_per_trial, fixed };

inline std::string to_string(SweepMode m) {
  return m == SweepMode::decoupled ? "decoupled" : "full";
}
inline std::string to_string(MatrixPolicy p) {
  return p == MatrixPolicy::fresh_per_trial ? "fresh" : "fixed";
}
inline std::string to_string(Detector d) {
  return d == Detector::bht ? "bht" : "csbp";
}

struct SweepConfig {
  SweepMode mode = SweepMode::full_vector;
  int n = 256;
  int m = 128;
  int l = 4;
  double q = 0.02;
  double sigma_x = 10.0;
  std::vector<Detector> detectors = {Detector::bht, Detector::csbp};
  std::vector<double> sigma_w_grid;
  std::vector<double> x0_grid;
  int trials = 100;
  std::uint64_t seed = 1;
  MatrixPolicy matrix_policy = MatrixPolicy::fresh_per_trial;
  int bp_max_iters = 20;
  double bp_tol = 1e-4;
  double bp_damping = 0.0;
  double grid_half_width = 0.0;  // 0 -> 8 * sigma_x
  int grid_points = 512;
  double csbp_delta = 0.0;  // 0 -> BP grid spacing
  int threads = 0;          // 0 -> hardware concurrency

  GridSpec bp_grid() const {
    const double hw = grid_half_width > 0.0 ? grid_half_width : 8.0 * sigma_x;
    return GridSpec::make(hw, grid_points);
  }
  double effective_csbp_delta() const {
    return csbp_delta > 0.0 ? csbp_delta : bp_grid().spacing();
  }
  DetectorKind detector_kind(Detector d) const {
    return DetectorKind{d, effective_csbp_delta()};
  }

  void validate() const {
    if (trials < 1) throw std::invalid_argument("SweepConfig: trials >= 1");
    if (sigma_w_grid.empty() || x0_grid.empty())
      throw std::invalid_argument("SweepConfig: grids must be nonempty");
    for (double v : sigma_w_grid)
      if (!(v > 0.0)) throw std::invalid_argument("SweepConfig: sigma_w must be > 0");
    for (double v : x0_grid)
      if (!(v > 0.0)) throw std::invalid_argument("SweepConfig: x0 must be > 0");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("SweepConfig: q in (0,1)");
    if (!(sigma_x > 0.0)) throw std::invalid_argument("SweepConfig: sigma_x > 0");
    if (detectors.empty()) throw std::invalid_argument("SweepConfig: no detectors");
    if (mode == SweepMode::full_vector) {
      if (l < 1 || l > m) throw std::invalid_argument("SweepConfig: need 1 <= L <= M");
      if (m >= n)
        throw std::invalid_argument("SweepConfig: full_vector mode needs M < N");
      bp_config().validate();
    }
  }

  BpConfig bp_config() const {
    return BpConfig{bp_max_iters, bp_tol, bp_damping, bp_grid()};
  }
};

struct CellStats {
  int failures = 0;
  int trials = 0;
  int nonconverged = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t cell_seed = 0;
};

// Empirical Pr{failure | S_probe = 1} per (sigma_w, x0) cell and detector,
// with full provenance for replay.
struct FailureHeatmap {
  SweepConfig config;
  // cells[d][iw][ix] follows config.detectors / sigma_w_grid / x0_grid order.
  std::vector<std::vector<std::vector<CellStats>>> cells;

  const CellStats& at(size_t detector, size_t iw, size_t ix) const {
    return cells[detector][iw][ix];
  }
};

namespace detail {

inline void parallel_for(int n_jobs, int threads, const std::function<void(int)>& fn) {
  int n_workers = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  n_workers = std::min(n_workers, n_jobs);
  if (n_workers <= 1) {
    for (int k = 0; k < n_jobs; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= n_jobs) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// Deterministic phase diagram from the decoupled closed form: each cell is a
// 0/1 failure indicator that must match the boundary-curve classification
// exactly.
inline FailureHeatmap run_decoupled_sweep(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SweepMode::decoupled)
    throw std::invalid_argument("run_decoupled_sweep: mode must be decoupled");
  FailureHeatmap out;
  out.config = cfg;
  out.cells.assign(cfg.detectors.size(),
                   std::vector<std::vector<CellStats>>(
                       cfg.sigma_w_grid.size(),
                       std::vector<CellStats>(cfg.x0_grid.size())));
  for (size_t d = 0; d < cfg.detectors.size(); ++d) {
    const DetectorKind kind = cfg.detector_kind(cfg.detectors[d]);
    for (size_t iw = 0; iw < cfg.sigma_w_grid.size(); ++iw) {
      for (size_t ix = 0; ix < cfg.x0_grid.size(); ++ix) {
        const double h = detection_h(kind, cfg.sigma_w_grid[iw],
                                     cfg.x0_grid[ix], cfg.q, cfg.sigma_x, cfg.l);
        CellStats& cell = out.cells[d][iw][ix];
        cell.trials = 1;
        cell.failures = h <= 0.0 ? 1 : 0;
        cell.estimate = cell.failures;
        cell.std_error = 0.0;
        cell.cell_seed = substream(cfg.seed, {iw, ix});
      }
    }
  }
  return out;
}

// Full-vector Monte Carlo sweep. Per trial: draw a matrix (fresh by default),
// draw a support with one designated probe element forced on, give every
// nonzero the cell magnitude with a random sign, measure at sigma_w, run BP,
// and score failure when the probe decision is H0. Detection always uses the
// Gaussian-slab prior regardless of how values were generated.
inline FailureHeatmap run_full_sweep(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SweepMode::full_vector)
    throw std::invalid_argument("run_full_sweep: mode must be full_vector");

  const size_t n_w = cfg.sigma_w_grid.size();
  const size_t n_x = cfg.x0_grid.size();
  const size_t n_det = cfg.detectors.size();
  const int n_cells = static_cast<int>(n_w * n_x);
  const int n_jobs = n_cells * cfg.trials;

  const BpConfig bp_cfg = cfg.bp_config();
  const SpikeSlabPrior det_prior{cfg.q, cfg.sigma_x, GaussianSlab{}};

  struct TrialOutcome {
    std::vector<std::uint8_t> failed;  // per detector
    std::uint8_t converged = 1;
  };
  std::vector<TrialOutcome> outcomes(static_cast<size_t>(n_jobs));

  // Fixed-matrix policy shares one operator across all trials.
  std::unique_ptr<SparseBinaryMatrix> fixed_matrix;
  if (cfg.matrix_policy == MatrixPolicy::fixed) {
    Rng mrng = make_rng(cfg.seed, {0x4d41u});
    fixed_matrix = std::make_unique<SparseBinaryMatrix>(
        build_matrix(cfg.n, cfg.m, cfg.l, mrng));
  }

  detail::parallel_for(n_jobs, cfg.threads, [&](int job) {
    const int cell = job / cfg.trials;
    const int trial = job % cfg.trials;
    const size_t iw = static_cast<size_t>(cell) / n_x;
    const size_t ix = static_cast<size_t>(cell) % n_x;
    const double sigma_w = cfg.sigma_w_grid[iw];
    const double x0 = cfg.x0_grid[ix];

    Rng rng = make_rng(cfg.seed, {iw, ix, static_cast<std::uint64_t>(trial)});

    const SparseBinaryMatrix* matrix = fixed_matrix.get();
    std::unique_ptr<SparseBinaryMatrix> own;
    if (!matrix) {
      own = std::make_unique<SparseBinaryMatrix>(
          build_matrix(cfg.n, cfg.m, cfg.l, rng));
      matrix = own.get();
    }

    const SpikeSlabPrior gen_prior{cfg.q, cfg.sigma_x, TwoPointSlab{x0}};
    auto support = sample_support(gen_prior, cfg.n, rng);
    std::uniform_int_distribution<int> pick(0, cfg.n - 1);
    const int probe = pick(rng);
    support[static_cast<size_t>(probe)] = 1;
    const SignalInstance signal =
        sample_signal(gen_prior, support, probe, x0, rng);
    const Measurement meas = measure(*matrix, signal, sigma_w, rng);

    const BpResult bp = run_bp(*matrix, meas.y, det_prior, sigma_w, bp_cfg);
    const HybridDensity& belief = bp.beliefs[static_cast<size_t>(probe)];

    TrialOutcome& out = outcomes[static_cast<size_t>(job)];
    out.failed.resize(n_det);
    for (size_t d = 0; d < n_det; ++d) {
      const DetectionResult r =
          detect(belief, cfg.detector_kind(cfg.detectors[d]), det_prior);
      out.failed[d] = r.support_detected ? 0 : 1;
    }
    out.converged = bp.diag.converged ? 1 : 0;
  });

  FailureHeatmap out;
  out.config = cfg;
  out.cells.assign(n_det, std::vector<std::vector<CellStats>>(
                              n_w, std::vector<CellStats>(n_x)));
  for (int cell = 0; cell < n_cells; ++cell) {
    const size_t iw = static_cast<size_t>(cell) / n_x;
    const size_t ix = static_cast<size_t>(cell) % n_x;
    for (size_t d = 0; d < n_det; ++d) {
      CellStats& cs = out.cells[d][iw][ix];
      cs.trials = cfg.trials;
      cs.cell_seed = substream(cfg.seed, {iw, ix});
      for (int t = 0; t < cfg.trials; ++t)
        cs.failures +=
            outcomes[static_cast<size_t>(cell * cfg.trials + t)].failed[d];
      cs.estimate = static_cast<double>(cs.failures) / cfg.trials;
      cs.std_error =
          std::sqrt(cs.estimate * (1.0 - cs.estimate) / cfg.trials);
    }
    int nonconv = 0;
    for (int t = 0; t < cfg.trials; ++t)
      if (!outcomes[static_cast<size_t>(cell * cfg.trials + t)].converged)
        ++nonconv;
    for (size_t d = 0; d < n_det; ++d)
      out.cells[d][iw][ix].nonconverged = nonconv;
  }
  return out;
}

inline FailureHeatmap run_sweep(const SweepConfig& cfg) {
  return cfg.mode == SweepMode::decoupled ? run_decoupled_sweep(cfg)
                                          : run_full_sweep(cfg);
}

// ---- persistence ----------------------------------------------------------

inline nlohmann::json sweep_config_to_json(const SweepConfig& cfg) {
  nlohmann::json j;
  j["mode"] = to_string(cfg.mode);
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["l"] = cfg.l;
  j["q"] = cfg.q;
  j["sigma_x"] = cfg.sigma_x;
  std::vector<std::string> dets;
  for (Detector d : cfg.detectors) dets.push_back(to_string(d));
  j["detectors"] = dets;
  j["sigma_w_grid"] = cfg.sigma_w_grid;
  j["x0_grid"] = cfg.x0_grid;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["matrix_policy"] = to_string(cfg.matrix_policy);
  j["bp"] = {{"max_iters", cfg.bp_max_iters},
             {"tol", cfg.bp_tol},
             {"damping", cfg.bp_damping},
             {"grid_half_width", cfg.grid_half_width},
             {"grid_points", cfg.grid_points}};
  j["csbp_delta"] = cfg.csbp_delta;
  return j;
}

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "decoupled")
    cfg.mode = SweepMode::decoupled;
  else if (mode == "full")
    cfg.mode = SweepMode::full_vector;
  else
    throw std::invalid_argument("sweep config: unknown mode '" + mode + "'");
  cfg.n = j.at("n").get<int>();
  cfg.m = j.at("m").get<int>();
  cfg.l = j.at("l").get<int>();
  cfg.q = j.at("q").get<double>();
  cfg.sigma_x = j.at("sigma_x").get<double>();
  cfg.detectors.clear();
  for (const auto& d : j.at("detectors")) {
    const std::string name = d.get<std::string>();
    if (name == "bht")
      cfg.detectors.push_back(Detector::bht);
    else if (name == "csbp")
      cfg.detectors.push_back(Detector::csbp);
    else
      throw std::invalid_argument("sweep config: unknown detector '" + name + "'");
  }
  cfg.sigma_w_grid = j.at("sigma_w_grid").get<std::vector<double>>();
  cfg.x0_grid = j.at("x0_grid").get<std::vector<double>>();
  cfg.trials = j.at("trials").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  const std::string policy = j.at("matrix_policy").get<std::string>();
  cfg.matrix_policy = policy == "fixed" ? MatrixPolicy::fixed
                                        : MatrixPolicy::fresh_per_trial;
  const auto& bp = j.at("bp");
  cfg.bp_max_iters = bp.at("max_iters").get<int>();
  cfg.bp_tol = bp.at("tol").get<double>();
  cfg.bp_damping = bp.at("damping").get<double>();
  cfg.grid_half_width = bp.at("grid_half_width").get<double>();
  cfg.grid_points = bp.at("grid_points").get<int>();
  cfg.csbp_delta = j.value("csbp_delta", 0.0);
  return cfg;
}

// Long-format CSV: one row per (sigma_w, x0, detector).
inline std::string heatmap_csv(const FailureHeatmap& hm) {
  std::ostringstream os;
  os << "sigma_w,x0,detector,failures,trials,estimate\n";
  const SweepConfig& cfg = hm.config;
  for (size_t iw = 0; iw < cfg.sigma_w_grid.size(); ++iw)
    for (size_t ix = 0; ix < cfg.x0_grid.size(); ++ix)
      for (size_t d = 0; d < cfg.detectors.size(); ++d) {
        const CellStats& cs = hm.cells[d][iw][ix];
        os << fmt17(cfg.sigma_w_grid[iw]) << ',' << fmt17(cfg.x0_grid[ix])
           << ',' << to_string(cfg.detectors[d]) << ',' << cs.failures << ','
           << cs.trials << ',' << fmt17(cs.estimate) << "\n";
      }
  return os.str();
}

struct ArtifactPaths {
  std::filesystem::path csv;
  std::filesystem::path sidecar;
};

// Writes the CSV plus a JSON sidecar holding the full config and per-cell
// seeds; re-running from the sidecar reproduces the CSV byte-for-byte.
inline ArtifactPaths write_results(const FailureHeatmap& hm,
                                   const std::filesystem::path& out_dir) {
  const SweepConfig& cfg = hm.config;
  std::ostringstream base;
  base << "sweep_" << to_string(cfg.mode) << "_q" << fmt_short(cfg.q) << "_sx"
       << fmt_short(cfg.sigma_x) << "_L" << cfg.l;
  ArtifactPaths paths{out_dir / (base.str() + ".csv"),
                      out_dir / (base.str() + ".json")};

  write_text_file(paths.csv, heatmap_csv(hm));

  nlohmann::json side;
  side["command"] = "sweep";
  side["config"] = sweep_config_to_json(cfg);
  side["results_csv"] = paths.csv.filename().string();
  nlohmann::json cell_seeds = nlohmann::json::array();
  nlohmann::json nonconv = nlohmann::json::array();
  for (size_t iw = 0; iw < cfg.sigma_w_grid.size(); ++iw) {
    nlohmann::json seeds_row = nlohmann::json::array();
    nlohmann::json nc_row = nlohmann::json::array();
    for (size_t ix = 0; ix < cfg.x0_grid.size(); ++ix) {
      seeds_row.push_back(hm.cells[0][iw][ix].cell_seed);
      nc_row.push_back(hm.cells[0][iw][ix].nonconverged);
    }
    cell_seeds.push_back(seeds_row);
    nonconv.push_back(nc_row);
  }
  side["cell_seeds"] = cell_seeds;
  side["nonconverged_trials"] = nonconv;
  write_text_file(paths.sidecar, side.dump(2) + "\n");
  return paths;
}

inline SweepConfig load_sweep_sidecar(const std::filesystem::path& path) {
  const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  return sweep_config_from_json(j.contains("config") ? j.at("config") : j);
}

}  // namespace ssd
