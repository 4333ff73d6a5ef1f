// The four attitude control laws (scheduled PD, scheduled PD with angular
// acceleration feedback, incremental inversion with and without an output
// low-pass), their pole-placement tuning rules, and the discrete filters
// they need.
#pragma once

#include <string>
#include <vector>

#include "tvcsim/trajectory.hpp"

namespace tvcsim {

enum class ControllerKind { pd, pd_qdot, indi, indi_lpf };

ControllerKind controller_kind_from_string(const std::string& s);
std::string to_string(ControllerKind k);

struct TuningSpec {
    double omega_theta = 2.5; // rad/s, target natural frequency
    double zeta = 0.8;        // target damping ratio
    double G0 = 1.05;         // target DC gain (PD with qdot feedback only)
    double omega_qdot = 15.0; // rad/s, derivative filter bandwidth
    double omega_beta = 10.0; // rad/s, output low-pass bandwidth
    double omega_beta0 = 30.0; // rad/s, deflection estimator bandwidth
    int n_nodes = 9;          // schedule nodes, evenly spaced over the flight

    void validate() const;
};

// Per-node plant data the tuning rules consume.
struct ScheduleNode {
    double t = 0;
    double mu_alpha = 0;
    double mu_c = 0;
    double l_alpha = 0;
    double V = 1;
};

struct GainSchedule {
    std::vector<double> t;    // node times, strictly increasing
    std::vector<double> kP;
    std::vector<double> kD;
    std::vector<double> kA;   // empty unless tuned with qdot feedback
    std::vector<double> mu_c; // control effectiveness grid for inversion
};

// Gains at one instant, after interpolation.
struct ScheduledGains {
    double kP = 0;
    double kD = 0;
    double kA = 0;
    double mu_c = 0;
};

// Nominal plant data at n evenly spaced nodes over the table's span.
std::vector<ScheduleNode> schedule_nodes_from(const TrajectoryTable& table, int n_nodes);

// kP = -(mu_alpha + w^2)/mu_c, kD = (l_alpha mu_alpha/V - 2 zeta w)/mu_c.
// Places the attitude loop poles at damping zeta, frequency w = omega_theta.
GainSchedule tune_pd(const std::vector<ScheduleNode>& nodes, const TuningSpec& spec);

// Three-gain variant with acceleration feedback; additionally fixes the
// closed-loop DC gain at G0:
//   kP = (mu_alpha/mu_c) G0/(1 - G0)
//   kA = (1/mu_c) (1 + (mu_alpha + mu_c kP)/w^2)
//   kD = (1/mu_c) (l_alpha mu_alpha/V - 2 zeta w (1 - mu_c kA))
GainSchedule tune_pd_qdot(const std::vector<ScheduleNode>& nodes, const TuningSpec& spec);

// Inversion controllers only need the mu_c grid; the outer loop uses the
// fixed gains kP = w^2, kD = 2 zeta w.
GainSchedule tune_indi(const std::vector<ScheduleNode>& nodes, const TuningSpec& spec);

GainSchedule make_schedule(ControllerKind kind, const TrajectoryTable& table,
                           const TuningSpec& spec);

// Linear interpolation per channel, clamped at the schedule ends.
ScheduledGains lookup_gains(const GainSchedule& schedule, double t);

// First-order filter state for the Tustin (bilinear) discretizations below.
struct Filter1State {
    double prev_u = 0;
    double prev_y = 0;
};

// One Tustin step of (b1 s + b0)/(s + a0) at sample time dt.
double tustin_step(Filter1State& st, double b1, double b0, double a0, double u, double dt);

// Derivative filter s w/(s + w): band-limited differentiator, zero at DC.
double derivative_filter_step(Filter1State& st, double u, double dt, double omega);

// Low-pass w/(s + w): unit DC gain.
double lowpass_step(Filter1State& st, double u, double dt, double omega);

// beta_cmd = kP (theta_cmd - theta) - kD q.
double pd_step(double theta_cmd, double theta_meas, double q_meas,
               const ScheduledGains& g);

struct ControllerState {
    Filter1State qdot_filter;
    Filter1State output_lpf;
    Filter1State beta0_lpf;
    double prev_beta_cmd = 0; // last issued command, input to the estimator
    double last_qdot_est = 0;
    double last_nu = 0;
    bool has_nu = false;

    void reset() { *this = ControllerState{}; }
};

// beta_cmd = kP (theta_cmd - theta) - kD q - kA qdot_est, with qdot_est from
// the derivative filter on q_meas.
double pd_qdot_step(ControllerState& st, double theta_cmd, double theta_meas,
                    double q_meas, double dt, const ScheduledGains& g,
                    double omega_qdot);

// Incremental inversion step:
//   qdot0 from the derivative filter on q_meas
//   beta0 = low-pass of the previously issued command (or the measured
//           deflection when beta_meas is supplied)
//   nu    = w^2 (theta_cmd - theta) - 2 zeta w q
//   beta  = beta0 - (nu - qdot0)/mu_c, optionally low-pass filtered.
double indi_step(ControllerState& st, double theta_cmd, double theta_meas,
                 double q_meas, double dt, const TuningSpec& spec, double mu_c,
                 bool use_lpf, const double* beta_meas = nullptr);

// One discrete controller stepped once per GNC tick.
class Controller {
public:
    Controller(ControllerKind kind, const TuningSpec& spec, GainSchedule schedule);

    // beta_meas is only consumed by the inversion laws when configured to
    // estimate beta0 from the actuator instead of the issued command.
    double step(double t, double theta_cmd, double theta_meas, double q_meas,
                double dt, const double* beta_meas = nullptr);

    void reset() { state_.reset(); }
    ControllerKind kind() const { return kind_; }
    const GainSchedule& schedule() const { return schedule_; }
    const TuningSpec& tuning() const { return spec_; }

    // Telemetry taps for the last step.
    double last_qdot_est() const { return state_.last_qdot_est; }
    double last_nu() const { return state_.last_nu; }
    bool has_nu() const { return state_.has_nu; }
    bool has_qdot_est() const { return kind_ != ControllerKind::pd; }

    bool use_actuator_beta = false;

private:
    ControllerKind kind_;
    TuningSpec spec_;
    GainSchedule schedule_;
    ControllerState state_;
};

} // namespace tvcsim
