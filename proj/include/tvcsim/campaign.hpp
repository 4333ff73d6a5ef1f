#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvcsim/dynamics.hpp"

namespace tvcsim {

struct RunMetrics {
    int case_id = 0;
    std::uint64_t seed = 0;
    double rms_theta_err = 0;  // rad
    double rms_beta_rate = 0;  // rad/s, from the actuator's beta_dot state
    double max_abs_Qalpha = 0; // Pa rad
    bool diverged = false;     // metrics are NaN when set
};

// sqrt(mean of squares); throws on an empty series.
double rms(const std::vector<double>& series);

RunMetrics compute_metrics(const TelemetryLog& log, int case_id, std::uint64_t seed);

// One simulation at the scenario's own case_id/dispersion; divergence is
// flagged instead of propagated.
RunMetrics run_case(const SimScenario& scenario);

// All 2^8 parameter corners at dispersion scale delta, one row per case
// ordered by case_id. Every run sees the same wind realization because the
// wind stream seed does not involve case_id.
std::vector<RunMetrics> run_campaign(const SimScenario& tmpl, double delta,
                                     int case_stride = 1);

// Header: case_id,seed,rms_theta_err,rms_beta_rate,max_abs_Qalpha,diverged.
void save_metrics(const std::vector<RunMetrics>& rows, const std::string& path);

struct SensitivityOptions {
    std::vector<double> noise_levels_dps = {0.0, 0.05, 0.1}; // gyro 3sigma
    std::vector<int> delay_samples = {0, 1, 2};              // GNC ticks
    double delta = 1.0; // corner dispersion scale
    int case_stride = 1; // 8 keeps every 8th corner (32-case subsample)
};

struct SensitivityCell {
    double noise_3sigma_dps = 0;
    int delay_samples = 0;
    std::vector<RunMetrics> runs;
    // Aggregates over non-diverged runs (NaN when none survive).
    double mean_rms_theta_err = 0;
    double mean_rms_beta_rate = 0;
    double max_rms_theta_err = 0;
    double max_rms_beta_rate = 0;
    int n_diverged = 0;
};

// Full noise x delay grid, a corner campaign per cell, row-major over
// (noise, delay) in the given order.
std::vector<SensitivityCell> sensitivity_grid(const SimScenario& tmpl,
                                              const SensitivityOptions& opt = {});

// Per-run rows. Header: noise_3sigma_dps,delay_samples,case_id,seed,
// rms_theta_err,rms_beta_rate,max_abs_Qalpha,diverged.
void save_sensitivity(const std::vector<SensitivityCell>& cells,
                      const std::string& path);

// Per-cell aggregates. Header: noise_3sigma_dps,delay_samples,
// mean_rms_theta_err,mean_rms_beta_rate,max_rms_theta_err,max_rms_beta_rate,
// n_diverged.
void save_sensitivity_summary(const std::vector<SensitivityCell>& cells,
                              const std::string& path);

struct ParetoRow {
    double bandwidth = 0; // rad/s: omega_qdot for pd_qdot, omega_beta for indi_lpf
    double rms_theta_err = 0;
    double rms_beta_rate = 0;
};

struct ParetoResult {
    std::vector<ParetoRow> rows; // grid order
    // True when rms_theta_err never increases along an ascending grid.
    bool theta_err_non_increasing = false;
    // Index of the row nearest calibration_target in rms_theta_err, or -1
    // when no row lands within calibration_rel_tol of it.
    int calibrated_index = -1;
};

struct ParetoOptions {
    double calibration_target = 0; // rad; 0 disables calibration
    double calibration_rel_tol = 0.02;
};

// One nominal (undispersed) run per bandwidth. kind selects which filter
// bandwidth the grid drives: pd_qdot sweeps omega_qdot, indi_lpf sweeps
// omega_beta; other kinds are rejected.
ParetoResult pareto_sweep(ControllerKind kind, const std::vector<double>& grid,
                          const SimScenario& tmpl, const ParetoOptions& opt = {});

// Header: bandwidth,rms_theta_err,rms_beta_rate.
void save_pareto(const ParetoResult& result, const std::string& path);

} // namespace tvcsim
