#include "tvcsim/control.hpp"

#include <cmath>
#include <stdexcept>

namespace tvcsim {

ControllerKind controller_kind_from_string(const std::string& s) {
    if (s == "pd") return ControllerKind::pd;
    if (s == "pd_qdot") return ControllerKind::pd_qdot;
    if (s == "indi") return ControllerKind::indi;
    if (s == "indi_lpf") return ControllerKind::indi_lpf;
    throw std::runtime_error("unknown controller kind: " + s);
}

std::string to_string(ControllerKind k) {
    switch (k) {
        case ControllerKind::pd: return "pd";
        case ControllerKind::pd_qdot: return "pd_qdot";
        case ControllerKind::indi: return "indi";
        case ControllerKind::indi_lpf: return "indi_lpf";
    }
    throw std::logic_error("bad controller kind");
}

void TuningSpec::validate() const {
    if (!(omega_theta > 0)) throw std::runtime_error("tuning: omega_theta must be > 0");
    if (!(zeta > 0 && zeta < 2)) throw std::runtime_error("tuning: zeta must be in (0, 2)");
    if (G0 == 1.0) throw std::runtime_error("tuning: G0 must differ from 1");
    if (!(omega_qdot > 0)) throw std::runtime_error("tuning: omega_qdot must be > 0");
    if (!(omega_beta > 0)) throw std::runtime_error("tuning: omega_beta must be > 0");
    if (!(omega_beta0 > 0)) throw std::runtime_error("tuning: omega_beta0 must be > 0");
    if (n_nodes < 2) throw std::runtime_error("tuning: need at least 2 schedule nodes");
}

std::vector<ScheduleNode> schedule_nodes_from(const TrajectoryTable& table, int n_nodes) {
    if (n_nodes < 2)
        throw std::invalid_argument("need at least 2 schedule nodes");
    std::vector<ScheduleNode> nodes;
    nodes.reserve(static_cast<std::size_t>(n_nodes));
    const double t0 = table.start_time();
    const double t1 = table.end_time();
    for (int i = 0; i < n_nodes; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / (n_nodes - 1);
        const TrajectoryPoint p = sample_params(table, t);
        const PlantCoefficients c = plant_coefficients(p);
        nodes.push_back({t, c.mu_alpha, c.mu_c, p.l_alpha, p.V});
    }
    return nodes;
}

namespace {

void check_nodes(const std::vector<ScheduleNode>& nodes) {
    if (nodes.size() < 2)
        throw std::invalid_argument("gain schedule needs at least 2 nodes");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i].t > nodes[i - 1].t))
            throw std::invalid_argument("schedule node times must increase");
    for (auto& n : nodes)
        if (n.mu_c == 0.0)
            throw std::runtime_error("tuning: mu_c is zero at a schedule node");
}

} // namespace

GainSchedule tune_pd(const std::vector<ScheduleNode>& nodes, const TuningSpec& spec) {
    spec.validate();
    check_nodes(nodes);
    const double w = spec.omega_theta;
    GainSchedule s;
    for (auto& n : nodes) {
        s.t.push_back(n.t);
        s.kP.push_back(-(n.mu_alpha + w * w) / n.mu_c);
        s.kD.push_back((n.l_alpha * n.mu_alpha / n.V - 2.0 * spec.zeta * w) / n.mu_c);
        s.mu_c.push_back(n.mu_c);
    }
    return s;
}

GainSchedule tune_pd_qdot(const std::vector<ScheduleNode>& nodes, const TuningSpec& spec) {
    spec.validate();
    check_nodes(nodes);
    const double w = spec.omega_theta;
    GainSchedule s;
    for (auto& n : nodes) {
        const double kP = (n.mu_alpha / n.mu_c) * spec.G0 / (1.0 - spec.G0);
        const double kA = (1.0 + (n.mu_alpha + n.mu_c * kP) / (w * w)) / n.mu_c;
        const double kD = (n.l_alpha * n.mu_alpha / n.V -
                           2.0 * spec.zeta * w * (1.0 - n.mu_c * kA)) /
                          n.mu_c;
        s.t.push_back(n.t);
        s.kP.push_back(kP);
        s.kA.push_back(kA);
        s.kD.push_back(kD);
        s.mu_c.push_back(n.mu_c);
    }
    return s;
}

GainSchedule tune_indi(const std::vector<ScheduleNode>& nodes, const TuningSpec& spec) {
    spec.validate();
    check_nodes(nodes);
    const double w = spec.omega_theta;
    GainSchedule s;
    for (auto& n : nodes) {
        s.t.push_back(n.t);
        s.kP.push_back(w * w);
        s.kD.push_back(2.0 * spec.zeta * w);
        s.mu_c.push_back(n.mu_c);
    }
    return s;
}

GainSchedule make_schedule(ControllerKind kind, const TrajectoryTable& table,
                           const TuningSpec& spec) {
    const auto nodes = schedule_nodes_from(table, spec.n_nodes);
    switch (kind) {
        case ControllerKind::pd: return tune_pd(nodes, spec);
        case ControllerKind::pd_qdot: return tune_pd_qdot(nodes, spec);
        case ControllerKind::indi:
        case ControllerKind::indi_lpf: return tune_indi(nodes, spec);
    }
    throw std::logic_error("bad controller kind");
}

ScheduledGains lookup_gains(const GainSchedule& schedule, double t) {
    const auto& tt = schedule.t;
    if (tt.size() < 2)
        throw std::runtime_error("gain schedule has fewer than 2 nodes");
    ScheduledGains g;
    if (t <= tt.front()) {
        g.kP = schedule.kP.front();
        g.kD = schedule.kD.front();
        g.kA = schedule.kA.empty() ? 0.0 : schedule.kA.front();
        g.mu_c = schedule.mu_c.front();
        return g;
    }
    if (t >= tt.back()) {
        g.kP = schedule.kP.back();
        g.kD = schedule.kD.back();
        g.kA = schedule.kA.empty() ? 0.0 : schedule.kA.back();
        g.mu_c = schedule.mu_c.back();
        return g;
    }
    std::size_t i = 1;
    while (tt[i] < t) ++i;
    const double s = (t - tt[i - 1]) / (tt[i] - tt[i - 1]);
    auto mix = [s](const std::vector<double>& v, std::size_t k) {
        return v[k - 1] + s * (v[k] - v[k - 1]);
    };
    g.kP = mix(schedule.kP, i);
    g.kD = mix(schedule.kD, i);
    g.kA = schedule.kA.empty() ? 0.0 : mix(schedule.kA, i);
    g.mu_c = mix(schedule.mu_c, i);
    return g;
}

double tustin_step(Filter1State& st, double b1, double b0, double a0, double u,
                   double dt) {
    if (!(dt > 0))
        throw std::invalid_argument("filter dt must be > 0");
    const double K = 2.0 / dt;
    const double y = (b1 * K * (u - st.prev_u) + b0 * (u + st.prev_u) +
                      (K - a0) * st.prev_y) /
                     (K + a0);
    st.prev_u = u;
    st.prev_y = y;
    return y;
}

double derivative_filter_step(Filter1State& st, double u, double dt, double omega) {
    return tustin_step(st, omega, 0.0, omega, u, dt);
}

double lowpass_step(Filter1State& st, double u, double dt, double omega) {
    return tustin_step(st, 0.0, omega, omega, u, dt);
}

double pd_step(double theta_cmd, double theta_meas, double q_meas,
               const ScheduledGains& g) {
    return g.kP * (theta_cmd - theta_meas) - g.kD * q_meas;
}

double pd_qdot_step(ControllerState& st, double theta_cmd, double theta_meas,
                    double q_meas, double dt, const ScheduledGains& g,
                    double omega_qdot) {
    const double qdot_est = derivative_filter_step(st.qdot_filter, q_meas, dt, omega_qdot);
    st.last_qdot_est = qdot_est;
    return g.kP * (theta_cmd - theta_meas) - g.kD * q_meas - g.kA * qdot_est;
}

double indi_step(ControllerState& st, double theta_cmd, double theta_meas,
                 double q_meas, double dt, const TuningSpec& spec, double mu_c,
                 bool use_lpf, const double* beta_meas) {
    if (mu_c == 0.0)
        throw std::runtime_error("inversion step: mu_c is zero");
    const double qdot0 = derivative_filter_step(st.qdot_filter, q_meas, dt, spec.omega_qdot);
    // The estimator filter runs on whichever source is configured. Feeding it
    // the measured deflection keeps the beta0 path lag equal to the qdot0 path
    // lag when omega_beta0 == omega_qdot, which is what makes the increment
    // cancellation hold under transport delay.
    const double beta0 = lowpass_step(st.beta0_lpf,
                                      beta_meas ? *beta_meas : st.prev_beta_cmd,
                                      dt, spec.omega_beta0);
    const double w = spec.omega_theta;
    const double nu = w * w * (theta_cmd - theta_meas) - 2.0 * spec.zeta * w * q_meas;
    const double beta_raw = beta0 - (nu - qdot0) / mu_c;
    const double beta_cmd =
        use_lpf ? lowpass_step(st.output_lpf, beta_raw, dt, spec.omega_beta) : beta_raw;
    st.prev_beta_cmd = beta_cmd;
    st.last_qdot_est = qdot0;
    st.last_nu = nu;
    st.has_nu = true;
    return beta_cmd;
}

Controller::Controller(ControllerKind kind, const TuningSpec& spec, GainSchedule schedule)
    : kind_(kind), spec_(spec), schedule_(std::move(schedule)) {
    spec_.validate();
    if (schedule_.t.size() < 2)
        throw std::runtime_error("controller needs a schedule with >= 2 nodes");
}

double Controller::step(double t, double theta_cmd, double theta_meas, double q_meas,
                        double dt, const double* beta_meas) {
    const ScheduledGains g = lookup_gains(schedule_, t);
    switch (kind_) {
        case ControllerKind::pd:
            return pd_step(theta_cmd, theta_meas, q_meas, g);
        case ControllerKind::pd_qdot:
            return pd_qdot_step(state_, theta_cmd, theta_meas, q_meas, dt, g,
                                spec_.omega_qdot);
        case ControllerKind::indi:
            return indi_step(state_, theta_cmd, theta_meas, q_meas, dt, spec_, g.mu_c,
                             false, use_actuator_beta ? beta_meas : nullptr);
        case ControllerKind::indi_lpf:
            return indi_step(state_, theta_cmd, theta_meas, q_meas, dt, spec_, g.mu_c,
                             true, use_actuator_beta ? beta_meas : nullptr);
    }
    throw std::logic_error("bad controller kind");
}

} // namespace tvcsim
