// Gain/phase margin extraction with crossing refinement, Nyquist-winding
// stability flag, Nichols export data, and margin sweeps over corner cases
// and flight time.
#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tvcsim/linear.hpp"

namespace tvcsim {

struct MarginResult {
    // +inf when the corresponding crossing does not exist.
    double pm_deg = std::numeric_limits<double>::infinity();
    double gm_db = std::numeric_limits<double>::infinity();
    double wgc = std::numeric_limits<double>::quiet_NaN(); // rad/s
    double wpc = std::numeric_limits<double>::quiet_NaN(); // rad/s
    bool stable = false;

    // All crossings found, worst first is not guaranteed; (omega, margin).
    std::vector<std::pair<double, double>> gain_crossings;  // (w, pm_deg)
    std::vector<std::pair<double, double>> phase_crossings; // (w, gm_db)
};

// Open-loop model: point evaluator plus the pole counts the Nyquist
// criterion needs (P = open-loop poles strictly in the right half plane,
// n0 = poles at the origin).
struct LoopModel {
    std::function<std::complex<double>(double)> G; // L(jw)
    int rhp_poles = 0;
    int origin_poles = 0;
};

// L given as a rational transfer function; pole counts derived from the
// denominator (origin poles exactly from trailing zero coefficients).
LoopModel loop_from_tf(const TransferFunction& L);

// Outer attitude loop of the inversion controllers, cut at the virtual
// acceleration command: L(jw) = (kP + kD jw) G_nu_to_theta(jw) with
// kP = omega_theta^2, kD = 2 zeta omega_theta.
LoopModel indi_outer_loop(const LinearSystem& nu_to_theta, const TuningSpec& tuning);

// Unity-feedback loop cut at the attitude error: L = G_thetaerr_to_theta.
LoopModel error_loop(const LinearSystem& thetaerr_to_theta);

// PM = 180 deg + arg L at |L| = 1, GM = -20 log10|L| at phase -180 deg
// (mod 360), each minimized over all crossings; crossings located on a
// dense log grid and refined by bisection. Stability from the Nyquist
// winding count of 1 + L using the supplied pole counts.
MarginResult gain_phase_margins(const LoopModel& loop);

// Margin estimate from a fixed sampled response (log-domain interpolation,
// no refinement). The stability flag uses the supplied pole counts.
MarginResult gain_phase_margins(const FrequencyResponse& response,
                                int rhp_poles = 0, int origin_poles = 0);

// (unwrapped phase deg, gain dB) per grid point.
std::vector<std::pair<double, double>> nichols_data(const FrequencyResponse& response);

struct SweepCase {
    int id = 0;
    UncertaintySet u;
};

struct MarginCell {
    int case_id = 0;
    double t = 0;
    bool ok = false;
    std::string error;
    MarginResult m;
};

// For each (case, t): freeze parameters, linearize the loop for the
// template's controller (outer-loop cut for inversion kinds, error cut for
// the PD kinds), and extract margins. Failures are recorded per cell.
std::vector<MarginCell> margin_sweep(const SimScenario& tmpl,
                                     const std::vector<SweepCase>& cases,
                                     const std::vector<double>& times,
                                     const LinearizeOptions& opt = {});

// Header: t,case_id,pm_deg,gm_db,wgc,wpc,stable. Infinite margins are
// written as "inf".
void save_margin_sweep(const std::vector<MarginCell>& cells, const std::string& path);

struct SweepSummaryRow {
    double t = 0;
    double min_pm_deg = std::numeric_limits<double>::infinity();
    double min_gm_db = std::numeric_limits<double>::infinity();
    int n_unstable = 0;
    int n_failed = 0;
};

// Per-time worst-case rows, ordered by time.
std::vector<SweepSummaryRow> summarize_margin_sweep(const std::vector<MarginCell>& cells);

} // namespace tvcsim
