#include "tvcsim/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvcsim/csv.hpp"

namespace tvcsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void mark_diverged(RunMetrics& m) {
    m.diverged = true;
    m.rms_theta_err = kNaN;
    m.rms_beta_rate = kNaN;
    m.max_abs_Qalpha = kNaN;
}

} // namespace

double rms(const std::vector<double>& series) {
    if (series.empty()) throw std::invalid_argument("rms of empty series");
    double acc = 0.0;
    for (double v : series) acc += v * v;
    return std::sqrt(acc / static_cast<double>(series.size()));
}

RunMetrics compute_metrics(const TelemetryLog& log, int case_id, std::uint64_t seed) {
    RunMetrics m;
    m.case_id = case_id;
    m.seed = seed;
    m.rms_theta_err = rms(log.theta_err);
    m.rms_beta_rate = rms(log.beta_dot);
    double peak = 0.0;
    for (double v : log.Qalpha) peak = std::max(peak, std::abs(v));
    m.max_abs_Qalpha = peak;
    return m;
}

RunMetrics run_case(const SimScenario& scenario) {
    RunMetrics m;
    m.case_id = scenario.case_id;
    m.seed = scenario.master_seed;
    try {
        m = compute_metrics(simulate(scenario), scenario.case_id, scenario.master_seed);
    } catch (const SimDiverged&) {
        mark_diverged(m);
    }
    return m;
}

std::vector<RunMetrics> run_campaign(const SimScenario& tmpl, double delta,
                                     int case_stride) {
    if (case_stride < 1) throw std::invalid_argument("case_stride must be >= 1");
    const auto corners = enumerate_corner_cases(delta);
    std::vector<RunMetrics> rows;
    rows.reserve((corners.size() + case_stride - 1) / case_stride);
    for (std::size_t i = 0; i < corners.size(); i += case_stride) {
        SimScenario sc = tmpl;
        sc.case_id = static_cast<int>(i);
        sc.dispersion = corners[i];
        rows.push_back(run_case(sc));
    }
    return rows;
}

void save_metrics(const std::vector<RunMetrics>& rows, const std::string& path) {
    CsvWriter out(path, {"case_id", "seed", "rms_theta_err", "rms_beta_rate",
                         "max_abs_Qalpha", "diverged"});
    for (const auto& m : rows)
        out.row({static_cast<double>(m.case_id), static_cast<double>(m.seed),
                 m.rms_theta_err, m.rms_beta_rate, m.max_abs_Qalpha,
                 m.diverged ? 1.0 : 0.0});
    out.close();
}

std::vector<SensitivityCell> sensitivity_grid(const SimScenario& tmpl,
                                              const SensitivityOptions& opt) {
    std::vector<SensitivityCell> cells;
    cells.reserve(opt.noise_levels_dps.size() * opt.delay_samples.size());
    for (double noise : opt.noise_levels_dps) {
        for (int delay : opt.delay_samples) {
            SimScenario sc = tmpl;
            sc.sensors.gyro_3sigma_dps = noise;
            sc.delays.tvc_samples = delay;

            SensitivityCell cell;
            cell.noise_3sigma_dps = noise;
            cell.delay_samples = delay;
            cell.runs = run_campaign(sc, opt.delta, opt.case_stride);

            double sum_te = 0, sum_br = 0, max_te = 0, max_br = 0;
            int n_ok = 0;
            for (const auto& m : cell.runs) {
                if (m.diverged) {
                    ++cell.n_diverged;
                    continue;
                }
                ++n_ok;
                sum_te += m.rms_theta_err;
                sum_br += m.rms_beta_rate;
                max_te = std::max(max_te, m.rms_theta_err);
                max_br = std::max(max_br, m.rms_beta_rate);
            }
            if (n_ok > 0) {
                cell.mean_rms_theta_err = sum_te / n_ok;
                cell.mean_rms_beta_rate = sum_br / n_ok;
                cell.max_rms_theta_err = max_te;
                cell.max_rms_beta_rate = max_br;
            } else {
                cell.mean_rms_theta_err = kNaN;
                cell.mean_rms_beta_rate = kNaN;
                cell.max_rms_theta_err = kNaN;
                cell.max_rms_beta_rate = kNaN;
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void save_sensitivity(const std::vector<SensitivityCell>& cells,
                      const std::string& path) {
    CsvWriter out(path, {"noise_3sigma_dps", "delay_samples", "case_id", "seed",
                         "rms_theta_err", "rms_beta_rate", "max_abs_Qalpha",
                         "diverged"});
    for (const auto& cell : cells)
        for (const auto& m : cell.runs)
            out.row({cell.noise_3sigma_dps, static_cast<double>(cell.delay_samples),
                     static_cast<double>(m.case_id), static_cast<double>(m.seed),
                     m.rms_theta_err, m.rms_beta_rate, m.max_abs_Qalpha,
                     m.diverged ? 1.0 : 0.0});
    out.close();
}

void save_sensitivity_summary(const std::vector<SensitivityCell>& cells,
                              const std::string& path) {
    CsvWriter out(path, {"noise_3sigma_dps", "delay_samples", "mean_rms_theta_err",
                         "mean_rms_beta_rate", "max_rms_theta_err",
                         "max_rms_beta_rate", "n_diverged"});
    for (const auto& cell : cells)
        out.row({cell.noise_3sigma_dps, static_cast<double>(cell.delay_samples),
                 cell.mean_rms_theta_err, cell.mean_rms_beta_rate,
                 cell.max_rms_theta_err, cell.max_rms_beta_rate,
                 static_cast<double>(cell.n_diverged)});
    out.close();
}

ParetoResult pareto_sweep(ControllerKind kind, const std::vector<double>& grid,
                          const SimScenario& tmpl, const ParetoOptions& opt) {
    if (kind != ControllerKind::pd_qdot && kind != ControllerKind::indi_lpf)
        throw std::invalid_argument(
            "pareto_sweep expects pd_qdot (omega_qdot grid) or indi_lpf (omega_beta grid)");
    if (grid.empty()) throw std::invalid_argument("pareto_sweep: empty bandwidth grid");

    ParetoResult result;
    result.rows.reserve(grid.size());
    for (double bw : grid) {
        if (!(bw > 0)) throw std::invalid_argument("pareto_sweep: bandwidth must be > 0");
        SimScenario sc = tmpl;
        sc.controller = kind;
        sc.dispersion = UncertaintySet::identity();
        if (kind == ControllerKind::pd_qdot)
            sc.tuning.omega_qdot = bw;
        else
            sc.tuning.omega_beta = bw;
        const RunMetrics m = run_case(sc);
        if (m.diverged)
            result.rows.push_back({bw, kNaN, kNaN});
        else
            result.rows.push_back({bw, m.rms_theta_err, m.rms_beta_rate});
    }

    result.theta_err_non_increasing = true;
    for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
        const bool ordered_bw = result.rows[i + 1].bandwidth > result.rows[i].bandwidth;
        const bool ordered_err =
            result.rows[i + 1].rms_theta_err <= result.rows[i].rms_theta_err;
        if (!ordered_bw || !ordered_err) {
            result.theta_err_non_increasing = false;
            break;
        }
    }

    if (opt.calibration_target > 0) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
            const double err = result.rows[i].rms_theta_err;
            if (std::isnan(err)) continue;
            const double rel = std::abs(err / opt.calibration_target - 1.0);
            if (rel < best) {
                best = rel;
                if (rel <= opt.calibration_rel_tol)
                    result.calibrated_index = static_cast<int>(i);
            }
        }
        if (best > opt.calibration_rel_tol) result.calibrated_index = -1;
    }
    return result;
}

void save_pareto(const ParetoResult& result, const std::string& path) {
    CsvWriter out(path, {"bandwidth", "rms_theta_err", "rms_beta_rate"});
    for (const auto& r : result.rows)
        out.row({r.bandwidth, r.rms_theta_err, r.rms_beta_rate});
    out.close();
}

} // namespace tvcsim
