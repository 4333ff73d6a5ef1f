#include "tvcsim/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "tvcsim/csv.hpp"
#include "tvcsim/environment.hpp"
#include "tvcsim/rng.hpp"

namespace tvcsim {

double angle_of_attack(const PlantState& s, const TrajectoryPoint& p, double v_w) {
    return s.theta + std::atan((s.w - p.l_alpha * s.q - v_w) / p.V);
}

PlantState plant_derivatives(const PlantState& s, const TrajectoryPoint& p,
                             double beta, double beta_ddot, double v_w) {
    const double Q = dynamic_pressure(p);
    const double alpha = angle_of_attack(s, p, v_w);
    const double F_alpha = -p.S * p.C_N_alpha * Q * alpha;
    const double M_alpha = -p.l_alpha * F_alpha;
    const double F_c = -p.T * std::sin(beta);
    const double M_c = p.l_c * F_c;
    const double F_n = -p.m_n * p.l_n * beta_ddot;
    const double M_n = p.l_c * F_n - p.J_n * beta_ddot;
    PlantState d;
    d.z = s.w;
    d.w = (F_alpha + F_c + F_n) / p.m - p.g * std::sin(s.theta);
    d.theta = s.q;
    d.q = (M_alpha + M_c + M_n) / p.J;
    return d;
}

std::pair<double, double> tvc_derivatives(const ActuatorState& a, double beta_cmd) {
    const double beta_ddot =
        kTvcOmegaSq * (beta_cmd - a.beta) - kTvcDampingCoeff * a.beta_dot;
    return {a.beta_dot, beta_ddot};
}

namespace {

long integer_ratio(double num, double den, const char* what) {
    const double r = num / den;
    const long n = std::lround(r);
    if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9)
        throw std::runtime_error(std::string("rates: ") + what +
                                 " must divide evenly into f_int");
    return n;
}

} // namespace

void SimScenario::validate() const {
    table.validate();
    tuning.validate();
    if (!(duration > 0))
        throw std::runtime_error("scenario: duration must be > 0");
    if (duration > table.duration() * (1.0 + 1e-12))
        throw std::runtime_error("scenario: duration exceeds trajectory span");
    if (!(rates.f_gnc > 0) || !(rates.f_wind > 0) || !(rates.f_int > 0))
        throw std::runtime_error("scenario: rates must be positive");
    integer_ratio(rates.f_int, rates.f_gnc, "f_gnc");
    integer_ratio(rates.f_int, rates.f_wind, "f_wind");
    if (delays.tvc_samples < 0)
        throw std::runtime_error("scenario: delay samples must be >= 0");
    if (wind.sigma < 0)
        throw std::runtime_error("scenario: wind sigma must be >= 0");
    if (sensors.gyro_3sigma_dps < 0 || sensors.attitude_3sigma_deg < 0)
        throw std::runtime_error("scenario: sensor noise must be >= 0");
    for (double m : dispersion.multipliers)
        if (!(m > 0))
            throw std::runtime_error("scenario: dispersion multipliers must be > 0");
}

void TelemetryLog::save(const std::string& path) const {
    CsvWriter out(path, {"t", "theta_cmd", "theta", "theta_err", "q", "qdot_est", "w",
                         "z", "alpha", "Qalpha", "beta_cmd", "beta", "beta_dot", "nu",
                         "v_w"});
    for (std::size_t i = 0; i < t.size(); ++i)
        out.row({t[i], theta_cmd[i], theta[i], theta_err[i], q[i], qdot_est[i], w[i],
                 z[i], alpha[i], Qalpha[i], beta_cmd[i], beta[i], beta_dot[i], nu[i],
                 v_w[i]});
    out.close();
}

TelemetryLog simulate(const SimScenario& sc) {
    sc.validate();
    constexpr double deg = M_PI / 180.0;

    // Gains are scheduled on the nominal trajectory; only the plant sees the
    // dispersed parameters.
    Controller ctrl(sc.controller, sc.tuning,
                    make_schedule(sc.controller, sc.table, sc.tuning));
    ctrl.use_actuator_beta = sc.use_actuator_beta;

    TrajectoryTable dispersed = sc.table;
    for (auto& p : dispersed.points) p = apply_dispersion(p, sc.dispersion);
    ParamSampler params(dispersed);

    const double t0 = sc.table.start_time();
    const double t_hi = sc.table.end_time();
    const double dt_gnc = 1.0 / sc.rates.f_gnc;
    const double dt_int = 1.0 / sc.rates.f_int;
    const double dt_wind = 1.0 / sc.rates.f_wind;
    const long substeps = integer_ratio(sc.rates.f_int, sc.rates.f_gnc, "f_gnc");
    const long wind_every = integer_ratio(sc.rates.f_int, sc.rates.f_wind, "f_wind");
    const long n_ticks = std::lround(sc.duration * sc.rates.f_gnc);

    DrydenFilter wind(sc.wind.enabled ? sc.wind.sigma : 0.0,
                      derive_stream_seed(sc.wind.seed, 0, "wind"));
    GaussianStream gyro_rng(derive_stream_seed(sc.master_seed, sc.case_id, "gyro"));
    GaussianStream att_rng(derive_stream_seed(sc.master_seed, sc.case_id, "attitude"));
    DelayLine delay(sc.delays.tvc_samples);

    const double gyro_3s = sc.sensors.gyro_3sigma_dps * deg;  // rad/s
    const double att_3s = sc.sensors.attitude_3sigma_deg * deg; // rad
    const double beta_lim = 6.0 * deg;
    const double rate_lim = 20.0 * deg;

    using Vec6 = Eigen::Matrix<double, 6, 1>; // z, w, theta, q, beta, beta_dot
    Vec6 x = Vec6::Zero();
    double v_w = 0.0;
    double beta_applied = 0.0; // post-delay command, zero-order held

    auto deriv = [&](double ts, const Vec6& s) -> Vec6 {
        const TrajectoryPoint p = params.at(std::clamp(ts, t0, t_hi));
        const PlantState ps{s[0], s[1], s[2], s[3]};
        double beta, beta_dot_d, beta_ddot;
        if (sc.model.actuator) {
            const auto [bd, bdd] = tvc_derivatives({s[4], s[5]}, beta_applied);
            beta = s[4];
            beta_dot_d = bd;
            beta_ddot = bdd;
        } else {
            beta = beta_applied;
            beta_dot_d = 0.0;
            beta_ddot = 0.0;
        }
        const PlantState d =
            plant_derivatives(ps, p, beta, sc.model.twd ? beta_ddot : 0.0, v_w);
        Vec6 out;
        out << (sc.model.drift ? d.z : 0.0), (sc.model.drift ? d.w : 0.0), d.theta,
            d.q, beta_dot_d, beta_ddot;
        return out;
    };

    TelemetryLog log;
    const std::size_t rows = static_cast<std::size_t>(n_ticks) + 1;
    for (auto* col : {&log.t, &log.theta_cmd, &log.theta, &log.theta_err, &log.q,
                      &log.qdot_est, &log.w, &log.z, &log.alpha, &log.Qalpha,
                      &log.beta_cmd, &log.beta, &log.beta_dot, &log.nu, &log.v_w})
        col->reserve(rows);

    for (long i = 0; i <= n_ticks; ++i) {
        const double t = t0 + i * dt_gnc;

        if (!x.allFinite())
            throw SimDiverged(t, "non-finite state");
        if (std::abs(x[2]) > M_PI)
            throw SimDiverged(t, "|theta| exceeded pi");
        if (std::abs(x[1]) > 1e4)
            throw SimDiverged(t, "|w| exceeded 1e4 m/s");

        // Sense, then control, then push through the command delay.
        const double q_meas = gyro_measure(x[3], gyro_3s, gyro_rng);
        const double theta_meas = gyro_measure(x[2], att_3s, att_rng);
        const double theta_cmd = (sc.command.step_amplitude != 0.0 &&
                                  t - t0 >= sc.command.step_time)
                                     ? sc.command.step_amplitude
                                     : 0.0;
        const double beta_now = sc.model.actuator ? x[4] : beta_applied;
        const double beta_cmd =
            ctrl.step(t, theta_cmd, theta_meas, q_meas, dt_gnc, &beta_now);
        beta_applied = delay.push_pop(beta_cmd);

        const TrajectoryPoint pt = params.at(std::clamp(t, t0, t_hi));
        const PlantState ps{x[0], x[1], x[2], x[3]};
        const double alpha = angle_of_attack(ps, pt, v_w);
        const double nan = std::nan("");

        log.t.push_back(t);
        log.theta_cmd.push_back(theta_cmd);
        log.theta.push_back(x[2]);
        log.theta_err.push_back(theta_cmd - x[2]);
        log.q.push_back(x[3]);
        log.qdot_est.push_back(ctrl.has_qdot_est() ? ctrl.last_qdot_est() : nan);
        log.w.push_back(x[1]);
        log.z.push_back(x[0]);
        log.alpha.push_back(alpha);
        log.Qalpha.push_back(dynamic_pressure(pt) * alpha);
        log.beta_cmd.push_back(beta_cmd);
        log.beta.push_back(sc.model.actuator ? x[4] : beta_applied);
        log.beta_dot.push_back(sc.model.actuator ? x[5] : 0.0);
        log.nu.push_back(ctrl.has_nu() ? ctrl.last_nu() : nan);
        log.v_w.push_back(v_w);

        if (i == n_ticks) break;

        for (long j = 0; j < substeps; ++j) {
            const long k = i * substeps + j;
            if (k % wind_every == 0)
                v_w = wind.step(dt_wind);
            const double ts = t0 + static_cast<double>(k) * dt_int;
            x = rk4_step(deriv, x, ts, dt_int);
            if (sc.model.limits && sc.model.actuator) {
                x[5] = std::clamp(x[5], -rate_lim, rate_lim);
                if (std::abs(x[4]) > beta_lim) {
                    x[4] = std::clamp(x[4], -beta_lim, beta_lim);
                    if (x[4] * x[5] > 0) x[5] = 0.0;
                }
            }
        }
    }
    return log;
}

} // namespace tvcsim
