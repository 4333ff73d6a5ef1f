#include <CLI11.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "tvcsim/campaign.hpp"
#include "tvcsim/csv.hpp"
#include "tvcsim/linear.hpp"
#include "tvcsim/scenario.hpp"
#include "tvcsim/stability.hpp"

namespace fs = std::filesystem;

namespace {

using namespace tvcsim;

constexpr double kRadToDeg = 180.0 / M_PI;

struct CommonOpts {
    std::string config;
    std::string out = ".";
    std::string controller; // empty keeps the config's kind
};

void add_common(CLI::App* sub, CommonOpts& c, bool with_out = true) {
    sub->add_option("--config", c.config, "Scenario config JSON (default: built-in)")
        ->check(CLI::ExistingFile);
    if (with_out)
        sub->add_option("--out", c.out, "Output directory (created if missing)");
    sub->add_option("--controller", c.controller,
                    "Override controller kind: pd|pd_qdot|indi|indi_lpf");
}

SimScenario make_scenario(const CommonOpts& c) {
    SimScenario sc = c.config.empty() ? default_scenario() : load_scenario(c.config);
    if (!c.controller.empty())
        sc.controller = controller_kind_from_string(c.controller);
    return sc;
}

std::string out_file(const std::string& out_dir, const char* name) {
    fs::create_directories(out_dir);
    return (fs::path(out_dir) / name).string();
}

std::vector<double> time_grid(const SimScenario& sc, int n) {
    const double t0 = sc.table.start_time();
    if (n < 2) return {t0};
    std::vector<double> ts(n);
    for (int i = 0; i < n; ++i)
        ts[i] = t0 + sc.duration * static_cast<double>(i) / (n - 1);
    return ts;
}

LoopModel build_loop(const SimScenario& sc, double t, const LinearizeOptions& opt) {
    const bool is_indi = sc.controller == ControllerKind::indi ||
                         sc.controller == ControllerKind::indi_lpf;
    const LinearSystem sys = linearize_closed_loop(
        sc, t, is_indi ? LoopChannel::nu_to_theta : LoopChannel::thetaerr_to_theta,
        opt);
    return is_indi ? indi_outer_loop(sys, sc.tuning) : error_loop(sys);
}

int cmd_simulate(const CommonOpts& c, std::uint64_t seed, int case_id, double delta) {
    SimScenario sc = make_scenario(c);
    sc.master_seed = seed;
    if (case_id >= 0) {
        const auto corners = enumerate_corner_cases(delta);
        if (case_id >= static_cast<int>(corners.size()))
            throw std::runtime_error("case id out of range (0..255)");
        sc.case_id = static_cast<std::uint64_t>(case_id);
        sc.dispersion = corners[case_id];
    }
    const TelemetryLog log = simulate(sc);
    const std::string path = out_file(c.out, "telemetry.csv");
    log.save(path);
    std::printf("wrote %s (%zu rows, controller %s)\n", path.c_str(), log.size(),
                to_string(sc.controller).c_str());
    return 0;
}

int cmd_tune(const CommonOpts& c) {
    const SimScenario sc = make_scenario(c);
    const GainSchedule g = make_schedule(sc.controller, sc.table, sc.tuning);
    std::printf("controller %s, %zu nodes\n", to_string(sc.controller).c_str(),
                g.t.size());
    const bool has_ka = !g.kA.empty();
    std::printf("%4s %10s %14s %14s %s%14s\n", "node", "t", "kP", "kD",
                has_ka ? "            kA " : "", "mu_c");
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        if (has_ka)
            std::printf("%4zu %10.4f %14.6g %14.6g %14.6g %14.6g\n", i, g.t[i],
                        g.kP[i], g.kD[i], g.kA[i], g.mu_c[i]);
        else
            std::printf("%4zu %10.4f %14.6g %14.6g %14.6g\n", i, g.t[i], g.kP[i],
                        g.kD[i], g.mu_c[i]);
    }
    return 0;
}

int cmd_campaign(const CommonOpts& c, double delta, int stride) {
    const SimScenario sc = make_scenario(c);
    const auto rows = run_campaign(sc, delta, stride);
    const std::string path = out_file(c.out, "campaign.csv");
    save_metrics(rows, path);
    int diverged = 0;
    double worst = 0;
    for (const auto& m : rows) {
        if (m.diverged)
            ++diverged;
        else
            worst = std::max(worst, m.rms_theta_err);
    }
    std::printf("wrote %s (%zu runs, %d diverged, max rms theta err %.6g deg)\n",
                path.c_str(), rows.size(), diverged, worst * kRadToDeg);
    return 0;
}

int cmd_sensitivity(const CommonOpts& c, const SensitivityOptions& opt) {
    const SimScenario sc = make_scenario(c);
    const auto cells = sensitivity_grid(sc, opt);
    const std::string runs_path = out_file(c.out, "sensitivity.csv");
    const std::string summary_path = out_file(c.out, "sensitivity_summary.csv");
    save_sensitivity(cells, runs_path);
    save_sensitivity_summary(cells, summary_path);
    std::printf("wrote %s and %s (%zu cells x %zu runs)\n", runs_path.c_str(),
                summary_path.c_str(), cells.size(),
                cells.empty() ? 0 : cells.front().runs.size());
    return 0;
}

int cmd_pareto(const CommonOpts& c, const std::vector<double>& grid,
               double target_deg) {
    const SimScenario sc = make_scenario(c);
    ParetoOptions opt;
    opt.calibration_target = target_deg / kRadToDeg;
    const ParetoResult res = pareto_sweep(sc.controller, grid, sc, opt);
    const std::string path = out_file(c.out, "pareto.csv");
    save_pareto(res, path);
    std::printf("wrote %s (%zu rows, theta err non-increasing: %s)\n", path.c_str(),
                res.rows.size(), res.theta_err_non_increasing ? "yes" : "no");
    if (opt.calibration_target > 0) {
        if (res.calibrated_index >= 0)
            std::printf("calibrated bandwidth %.6g rad/s (rms theta err %.6g deg)\n",
                        res.rows[res.calibrated_index].bandwidth,
                        res.rows[res.calibrated_index].rms_theta_err * kRadToDeg);
        else
            std::printf("no bandwidth within 2%% of target %.6g deg\n", target_deg);
    }
    return 0;
}

int cmd_linearize(const CommonOpts& c, double t, bool has_t,
                  const std::string& channel, const LinearizeOptions& opt,
                  double w_lo, double w_hi, int n_freq) {
    const SimScenario sc = make_scenario(c);
    const double at = has_t ? t : sc.table.start_time();
    LoopChannel ch;
    if (channel == "auto")
        ch = (sc.controller == ControllerKind::indi ||
              sc.controller == ControllerKind::indi_lpf)
                 ? LoopChannel::nu_to_theta
                 : LoopChannel::thetaerr_to_theta;
    else if (channel == "nu")
        ch = LoopChannel::nu_to_theta;
    else if (channel == "err")
        ch = LoopChannel::thetaerr_to_theta;
    else
        throw std::runtime_error("unknown channel \"" + channel + "\" (auto|nu|err)");
    const LinearSystem sys = linearize_closed_loop(sc, at, ch, opt);
    const FrequencyResponse resp = freq_response(sys, log_grid(w_lo, w_hi, n_freq));
    const std::string path = out_file(c.out, "freq_response.csv");
    resp.save(path);
    std::printf("wrote %s (order %d system at t=%.3f)\n", path.c_str(),
                static_cast<int>(sys.order()), at);
    return 0;
}

int cmd_margins(const CommonOpts& c, double delta, int ntimes, int stride,
                bool pade, double nichols_t, bool has_nichols_t) {
    SimScenario sc = make_scenario(c);
    LinearizeOptions opt;
    opt.pade_delay = pade;

    const auto corners = enumerate_corner_cases(delta);
    std::vector<SweepCase> cases;
    for (std::size_t i = 0; i < corners.size(); i += static_cast<std::size_t>(stride))
        cases.push_back({static_cast<int>(i), corners[i]});
    const std::vector<double> times = time_grid(sc, ntimes);

    const auto cells = margin_sweep(sc, cases, times, opt);
    const std::string path = out_file(c.out, "margins_vs_time.csv");
    save_margin_sweep(cells, path);

    const auto summary = summarize_margin_sweep(cells);
    {
        CsvWriter out(out_file(c.out, "margins_summary.csv"),
                      {"t", "min_pm_deg", "min_gm_db", "n_unstable", "n_failed"});
        for (const auto& r : summary)
            out.row({r.t, r.min_pm_deg, r.min_gm_db,
                     static_cast<double>(r.n_unstable),
                     static_cast<double>(r.n_failed)});
        out.close();
    }

    const double nt = has_nichols_t
                          ? nichols_t
                          : sc.table.start_time() + 0.5 * sc.duration;
    {
        sc.dispersion = UncertaintySet::identity();
        const LoopModel loop = build_loop(sc, nt, opt);
        FrequencyResponse resp;
        resp.omega = log_grid(1e-2, 1e3, 400);
        for (double w : resp.omega) resp.H.push_back(loop.G(w));
        const auto pts = nichols_data(resp);
        CsvWriter out(out_file(c.out, "nichols.csv"),
                      {"omega", "phase_deg", "mag_db"});
        for (std::size_t i = 0; i < pts.size(); ++i)
            out.row({resp.omega[i], pts[i].first, pts[i].second});
        out.close();
    }

    double min_pm = std::numeric_limits<double>::infinity();
    double min_gm = std::numeric_limits<double>::infinity();
    int unstable = 0, failed = 0;
    for (const auto& r : summary) {
        min_pm = std::min(min_pm, r.min_pm_deg);
        min_gm = std::min(min_gm, r.min_gm_db);
        unstable += r.n_unstable;
        failed += r.n_failed;
    }
    std::printf("wrote %s (%zu cells: min PM %.3f deg, min GM %.3f dB, "
                "%d unstable, %d failed)\n",
                path.c_str(), cells.size(), min_pm, min_gm, unstable, failed);
    return 0;
}

int cmd_synth_traj(const std::string& out, double duration, double spacing) {
    const TrajectoryTable table = synth_reference_trajectory(duration, spacing);
    const std::string path = out_file(out, "trajectory.csv");
    save_trajectory(table, path);
    std::printf("wrote %s (%zu nodes)\n", path.c_str(), table.points.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Launcher ascent TVC attitude-control simulator"};
    app.require_subcommand(1);

    CommonOpts sim_c;
    std::uint64_t sim_seed = 0;
    int sim_case = -1;
    double sim_delta = 1.0;
    auto* sim = app.add_subcommand("simulate", "Run one scenario, write telemetry.csv");
    add_common(sim, sim_c);
    sim->add_option("--seed", sim_seed, "Master seed for sensor noise streams");
    sim->add_option("--case-id", sim_case, "Corner case id 0..255 (default nominal)");
    sim->add_option("--delta", sim_delta, "Dispersion scale for --case-id");

    CommonOpts tune_c;
    auto* tune = app.add_subcommand("tune", "Print the scheduled gain table");
    add_common(tune, tune_c, false);

    CommonOpts camp_c;
    double camp_delta = 1.0;
    int camp_stride = 1;
    auto* camp = app.add_subcommand("campaign",
                                    "Corner-case Monte-Carlo, write campaign.csv");
    add_common(camp, camp_c);
    camp->add_option("--delta", camp_delta, "Dispersion scale (1 = table levels)");
    camp->add_option("--stride", camp_stride, "Keep every n-th corner")
        ->check(CLI::PositiveNumber);

    CommonOpts sens_c;
    SensitivityOptions sens_opt;
    auto* sens = app.add_subcommand(
        "sensitivity", "Noise x delay grid of campaigns, write sensitivity.csv");
    add_common(sens, sens_c);
    sens->add_option("--noise", sens_opt.noise_levels_dps,
                     "Gyro noise 3-sigma levels, deg/s")
        ->delimiter(',');
    sens->add_option("--delay", sens_opt.delay_samples, "TVC delays, GNC samples")
        ->delimiter(',');
    sens->add_option("--delta", sens_opt.delta, "Dispersion scale");
    sens->add_option("--stride", sens_opt.case_stride, "Keep every n-th corner")
        ->check(CLI::PositiveNumber);

    CommonOpts par_c;
    std::vector<double> par_grid = {4, 6, 8, 10, 15, 20, 30};
    double par_target = 0;
    auto* par = app.add_subcommand(
        "pareto", "Bandwidth sweep on the nominal scenario, write pareto.csv");
    add_common(par, par_c);
    par->add_option("--grid", par_grid, "Bandwidths, rad/s")->delimiter(',');
    par->add_option("--target-deg", par_target,
                    "Equal-error calibration target, deg RMS");

    CommonOpts lin_c;
    double lin_t = 0;
    std::string lin_channel = "auto";
    LinearizeOptions lin_opt;
    double lin_wlo = 1e-2, lin_whi = 1e3;
    int lin_n = 400;
    auto* lin = app.add_subcommand(
        "linearize", "Frozen-time loop linearization, write freq_response.csv");
    add_common(lin, lin_c);
    auto* lin_t_opt = lin->add_option("--t", lin_t, "Linearization time, s");
    lin->add_option("--channel", lin_channel, "auto|nu|err");
    lin->add_flag("--bypass-filters", lin_opt.bypass_filters,
                  "Perfect rate-derivative and deflection knowledge");
    lin->add_flag("--exact-mu-c", lin_opt.exact_mu_c,
                  "Invert with the true local mu_c, not the schedule");
    lin->add_flag("--pade", lin_opt.pade_delay, "Model the half-sample GNC lag");
    lin->add_option("--wlo", lin_wlo, "Grid start, rad/s");
    lin->add_option("--whi", lin_whi, "Grid end, rad/s");
    lin->add_option("--nfreq", lin_n, "Grid points");

    CommonOpts mar_c;
    double mar_delta = 1.0;
    int mar_ntimes = 33;
    int mar_stride = 1;
    bool mar_pade = false;
    double mar_nichols_t = 0;
    auto* mar = app.add_subcommand(
        "margins", "Corner x time margin sweep, write margins_vs_time.csv");
    add_common(mar, mar_c);
    mar->add_option("--delta", mar_delta, "Dispersion scale");
    mar->add_option("--ntimes", mar_ntimes, "Time grid points over the flight");
    mar->add_option("--stride", mar_stride, "Keep every n-th corner")
        ->check(CLI::PositiveNumber);
    mar->add_flag("--pade", mar_pade, "Model the half-sample GNC lag");
    auto* mar_nt_opt =
        mar->add_option("--nichols-t", mar_nichols_t,
                        "Time for the nominal nichols.csv trace (default mid-flight)");

    std::string st_out = ".";
    double st_duration = 80, st_spacing = 1;
    auto* st = app.add_subcommand("synth-traj",
                                  "Write the synthetic reference trajectory.csv");
    st->add_option("--out", st_out, "Output directory");
    st->add_option("--duration", st_duration, "Flight time, s")
        ->check(CLI::PositiveNumber);
    st->add_option("--spacing", st_spacing, "Node spacing, s")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_c, sim_seed, sim_case, sim_delta);
        if (tune->parsed()) return cmd_tune(tune_c);
        if (camp->parsed()) return cmd_campaign(camp_c, camp_delta, camp_stride);
        if (sens->parsed()) return cmd_sensitivity(sens_c, sens_opt);
        if (par->parsed()) return cmd_pareto(par_c, par_grid, par_target);
        if (lin->parsed())
            return cmd_linearize(lin_c, lin_t, !lin_t_opt->empty(), lin_channel,
                                 lin_opt, lin_wlo, lin_whi, lin_n);
        if (mar->parsed())
            return cmd_margins(mar_c, mar_delta, mar_ntimes, mar_stride, mar_pade,
                               mar_nichols_t, !mar_nt_opt->empty());
        if (st->parsed()) return cmd_synth_traj(st_out, st_duration, st_spacing);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
