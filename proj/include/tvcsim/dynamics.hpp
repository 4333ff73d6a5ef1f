// Nonlinear pitch-plane plant (drift + attitude + nozzle reaction terms),
// second-order TVC actuator, and the deterministic multirate simulation loop.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tvcsim/control.hpp"
#include "tvcsim/trajectory.hpp"

namespace tvcsim {

// TVC actuator model 67.8^2/(s^2 + 90.9 s + 67.8^2).
inline constexpr double kTvcOmega = 67.8;                    // rad/s
inline constexpr double kTvcOmegaSq = kTvcOmega * kTvcOmega; // 4596.84
inline constexpr double kTvcDampingCoeff = 90.9;             // 1/s

struct PlantState {
    double z = 0;     // m, lateral drift
    double w = 0;     // m/s, drift rate
    double theta = 0; // rad
    double q = 0;     // rad/s
};

struct ActuatorState {
    double beta = 0;     // rad
    double beta_dot = 0; // rad/s
};

// alpha = theta + arctan((w - l_alpha q - v_w)/V).
double angle_of_attack(const PlantState& s, const TrajectoryPoint& p, double v_w);

// Newton-Euler pitch-plane derivatives:
//   m wdot = F_alpha + F_c + F_n - m g sin(theta)
//   J qdot = M_alpha + M_c + M_n
// with F_alpha = -S C_N_alpha Q alpha, M_alpha = -l_alpha F_alpha,
// F_c = -T sin(beta), M_c = l_c F_c, F_n = -m_n l_n beta_ddot,
// M_n = l_c F_n - J_n beta_ddot.
PlantState plant_derivatives(const PlantState& s, const TrajectoryPoint& p,
                             double beta, double beta_ddot, double v_w);

// (beta_dot, beta_ddot) of the actuator: beta_ddot = w0^2 (cmd - beta) - 2 sigma beta_dot
// with w0^2 = 4596.84 and 2 sigma = 90.9.
std::pair<double, double> tvc_derivatives(const ActuatorState& a, double beta_cmd);

// Classical fixed-step Runge-Kutta update; Vec needs +, scalar *.
template <class Vec, class F>
Vec rk4_step(const F& f, const Vec& x, double t, double dt) {
    const Vec k1 = f(t, x);
    const Vec k2 = f(t + dt / 2, Vec(x + (dt / 2) * k1));
    const Vec k3 = f(t + dt / 2, Vec(x + (dt / 2) * k2));
    const Vec k4 = f(t + dt, Vec(x + dt * k3));
    return x + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

struct WindConfig {
    bool enabled = true;
    double sigma = 3.0;      // m/s, stationary output sigma
    std::uint64_t seed = 1;  // shared across a campaign's runs
};

struct SensorConfig {
    double gyro_3sigma_dps = 0.0;     // deg/s
    double attitude_3sigma_deg = 0.0; // deg
};

struct DelayConfig {
    int tvc_samples = 0; // GNC samples of command delay
};

struct RateConfig {
    double f_gnc = 25.0;  // Hz
    double f_wind = 20.0; // Hz
    double f_int = 500.0; // Hz, integrator substep rate
};

// theta_cmd(t) = step_amplitude for t >= step_time, else 0.
struct CommandProfile {
    double step_time = 0.0;      // s
    double step_amplitude = 0.0; // rad; 0 means pure regulation
};

struct ModelConfig {
    bool actuator = true; // second-order TVC; false applies beta_cmd directly
    bool twd = true;      // nozzle reaction force/moment terms
    bool drift = true;    // integrate z, w
    bool limits = false;  // |beta| <= 6 deg, |beta_dot| <= 20 deg/s
};

struct SimScenario {
    TrajectoryTable table;      // nominal trajectory
    UncertaintySet dispersion;  // applied to the table for the plant only
    ControllerKind controller = ControllerKind::indi_lpf;
    bool use_actuator_beta = false; // inversion beta0 source switch
    TuningSpec tuning;
    WindConfig wind;
    SensorConfig sensors;
    DelayConfig delays;
    RateConfig rates;
    CommandProfile command;
    ModelConfig model;
    double duration = 80.0;        // s, <= table duration
    std::uint64_t master_seed = 0; // sensor noise stream root
    std::uint64_t case_id = 0;

    void validate() const;
};

struct TelemetryLog {
    std::vector<double> t, theta_cmd, theta, theta_err, q, qdot_est, w, z, alpha,
        Qalpha, beta_cmd, beta, beta_dot, nu, v_w;

    std::size_t size() const { return t.size(); }
    // Header: t,theta_cmd,theta,theta_err,q,qdot_est,w,z,alpha,Qalpha,
    //         beta_cmd,beta,beta_dot,nu,v_w.
    void save(const std::string& path) const;
};

// Raised when a run exceeds the blow-up bounds (|theta| > pi, |w| > 1e4 m/s,
// or any state non-finite).
class SimDiverged : public std::runtime_error {
public:
    SimDiverged(double t, const std::string& what)
        : std::runtime_error("diverged at t=" + std::to_string(t) + ": " + what),
          time(t) {}
    double time;
};

// Multirate closed-loop run: integrator substeps at f_int, controller at
// f_gnc on noisy measurements, wind colored at f_wind, TVC command through
// the delay line. One telemetry row per GNC tick, inclusive of t = duration.
// Deterministic for fixed (scenario, seeds).
TelemetryLog simulate(const SimScenario& scenario);

} // namespace tvcsim
