#ifndef KZMPS_HARNESS_HPP
#define KZMPS_HARNESS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kzmps/kzm.hpp"
#include "kzmps/lattice_model.hpp"
#include "kzmps/observables.hpp"
#include "kzmps/tdvp.hpp"
#include "kzmps/vumps.hpp"

namespace kzmps::harness {

/// Full campaign description: model, quench grid, truncations, integrator.
struct CampaignConfig {
  double lambda0 = 3.0;
  int d = 10;
  double mu0sq_start = 0.5;
  std::vector<double> tauQ_values{8, 12, 16, 24, 32, 48};
  std::vector<int> chi_values{8, 12};          // last entry is chi_max
  std::vector<double> mu0sq_final_values{-1.05, -1.1, -1.15};
  double t_relax = 15.0;
  double step = 1e-2;
  int sample_every = 100;
  double env_tol = 1e-12;
  double fp_tol = 1e-13;
  double pinv_cutoff = 1e-12;
  int r_max = 200;
  // equilibrium sweep grid
  double sweep_from = 0.5;
  double sweep_to = -1.3;
  double sweep_step = 0.02;
  double vumps_tol = 1e-8;
  int vumps_max_iter = 2000;
  // analysis settings
  double ratio_threshold = 0.9;
  double t_R_average = 15.0;
  double t_R_nest = 10.0;
  double fit_window_uni = 5.0;
  double fit_window_kink = 10.0;
  std::vector<double> tauQ_fit_subset;  // empty = use all
  std::string outdir = "runs";
  int jobs = 1;
  bool resume = true;

  EvolverConfig evolver() const;
  ModelParams model(double mu0sq) const;
  std::string canonical_string() const;  // physical parameters only
  std::uint64_t hash() const;
};

CampaignConfig load_config(const std::string& path);        // JSON file
CampaignConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const CampaignConfig& cfg);

/// Named parameter profiles: "desk" (CI default) and "paper".
CampaignConfig profile(const std::string& name);

struct RunKey {
  double tauQ = 0.0;
  int chi = 0;
  double mu0sq_final = 0.0;
  std::string tag() const;
};

struct RunManifest {
  RunKey key;
  std::string status;  // done | failed | running
  std::uint64_t config_hash = 0;
  std::string snapshot_csv;
  std::string checkpoint_file;
  std::string error;
  double wall_seconds = 0.0;
  std::string version;
};

// --- equilibrium sweep ----------------------------------------------------
struct SweepPoint {
  double mu0sq = 0.0;
  int chi = 0;
  double energy_density = 0.0;
  double vev = 0.0;
  double xi = 0.0;
  double entropy = 0.0;
  double g2k0 = 0.0;  // connected zero-momentum vacuum correlator
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double mc_sq_estimate = 0.0;  // argmax of xi over the sweep (chi-limited)
};

SweepResult run_sweep(const CampaignConfig& cfg, int chi);
void write_sweep_csv(const SweepResult& s, const CampaignConfig& cfg,
                     const std::string& path);
SweepResult read_sweep_csv(const std::string& path);

// --- quench campaign --------------------------------------------------------
struct QuenchRunResult {
  RunKey key;
  std::vector<CorrelatorRecord> records;
};

/// Ground-state cache: broken-phase vacua and the initial symmetric state.
struct VacuumInfo {
  double mu0sq = 0.0;
  int chi = 0;
  double v = 0.0;       // |<phi>|
  double m_S = 0.0;
  double d_K = 0.0;
  double energy_density = 0.0;
  std::vector<double> g2_r_connected;
};

/// Run (or resume) every quench in the campaign; snapshots and manifests are
/// written under cfg.outdir. Returns the number of failed runs.
int run_campaign(const CampaignConfig& cfg);

/// Per-run snapshot CSV path, r-resolved: columns time,r,G2r,norm,energy,entropy.
std::string snapshot_path(const CampaignConfig& cfg, const RunKey& key);
std::vector<CorrelatorRecord> read_snapshots(const std::string& path);

VacuumInfo compute_vacuum(const CampaignConfig& cfg, double mu0sq, int chi,
                          const CanonicalUMPS* warm = nullptr,
                          CanonicalUMPS* state_out = nullptr);

// --- analysis ---------------------------------------------------------------
struct AnalysisResult {
  double mc_sq = 0.0;
  // freeze-out scaling
  std::vector<double> tauQ;
  std::vector<double> eps_hat;
  kzm::FitResult eps_fit;  // params (A, exponent)
  // defect-density scaling at the reference mu0sq_final
  std::vector<double> g2bar_minus_vac;  // at k = 0, per tauQ
  std::vector<double> g2bar_err;        // chi-difference estimate
  kzm::FitResult density_fit;
  std::vector<double> n_fit;  // fit-derived density per tauQ
  // n_est consistency across mu0sq_final values
  std::map<double, std::vector<double>> n_est_by_muF;  // tauQ-indexed
  // collapse
  std::vector<Eigen::VectorXd> guni_x, guni_y;      // per tauQ, vs k/n_est
  std::vector<Eigen::VectorXd> gunik_x, gunik_y;    // divided by g_kink
  double spread_uni = 0.0;    // window [0, fit_window_uni]
  double spread_at8_raw = 0.0;
  double spread_at8_div = 0.0;
  kzm::FitResult gcorr_fit_uni, gcorr_fit_div;
  // two-parameter matter fits per tauQ
  std::vector<kzm::FitResult> matter_fits;
  VacuumInfo vacuum_ref;
};

AnalysisResult run_analysis(const CampaignConfig& cfg);
void write_analysis(const AnalysisResult& a, const CampaignConfig& cfg);

/// Minimal SVG polyline plot of CSV-style series (one per call).
void write_svg_plot(const std::string& path,
                    const std::vector<std::vector<double>>& xs,
                    const std::vector<std::vector<double>>& ys,
                    const std::string& title, bool loglog = false);

std::string version_string();

}  // namespace kzmps::harness

#endif
