#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <vector>

#include "tvcsim/csv.hpp"
#include "tvcsim/dynamics.hpp"
#include "tvcsim/scenario.hpp"

using namespace tvcsim;

namespace {

TrajectoryPoint reference_point() {
    TrajectoryPoint p;
    p.m = 6e4;
    p.J = 5e6;
    p.g = 9.81;
    p.T = 9e5;
    p.l_c = 8;
    p.l_alpha = 3;
    p.S = 2.5;
    p.C_N_alpha = 4.5;
    p.rho = 1.225;
    p.V = 100;
    p.m_n = 300;
    p.l_n = 1.2;
    p.J_n = 600;
    return p;
}

double rms_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s / v.size());
}

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("angle of attack combines attitude and flow direction") {
    PlantState s;
    s.theta = 0.1;
    s.w = 10;
    s.q = 0.2;
    const TrajectoryPoint p = reference_point();
    CHECK(angle_of_attack(s, p, 0.5) ==
          doctest::Approx(0.1 + std::atan((10 - 3 * 0.2 - 0.5) / 100.0)).epsilon(1e-15));
}

TEST_CASE("zero state with zero inputs is an equilibrium of the plant") {
    const PlantState d = plant_derivatives(PlantState{}, reference_point(), 0.0, 0.0, 0.0);
    CHECK(d.z == 0.0);
    CHECK(d.w == 0.0);
    CHECK(d.theta == 0.0);
    CHECK(d.q == 0.0);
}

TEST_CASE("forces and moments follow the stated force law") {
    const TrajectoryPoint p = reference_point();

    // Pure TVC deflection: F_c = -T sin(beta), M_c = l_c F_c, so both the
    // drift and pitch accelerations act opposite to beta.
    PlantState d = plant_derivatives(PlantState{}, p, 0.01, 0.0, 0.0);
    CHECK(d.w == doctest::Approx(-15.0 * std::sin(0.01)).epsilon(1e-14));
    CHECK(d.q == doctest::Approx(-1.44 * std::sin(0.01)).epsilon(1e-14));

    // Nozzle reaction terms scale with beta_ddot through mu_n and n_n.
    PlantState r = plant_derivatives(PlantState{}, p, 0.0, 2.0, 0.0);
    CHECK(r.w == doctest::Approx(-6e-3 * 2.0).epsilon(1e-14));
    CHECK(r.q == doctest::Approx(-6.96e-4 * 2.0).epsilon(1e-14));

    // Gravity pulls the drift axis through sin(theta).
    PlantState tilted;
    tilted.theta = 0.2;
    PlantState g = plant_derivatives(tilted, p, 0.0, 0.0, 0.0);
    const double alpha = 0.2;
    const double n_alpha = 1.1484375, mu_alpha = 0.04134375;
    CHECK(g.w == doctest::Approx(-n_alpha * alpha - 9.81 * std::sin(0.2)).epsilon(1e-12));
    CHECK(g.q == doctest::Approx(mu_alpha * alpha).epsilon(1e-12));
    CHECK(g.theta == 0.0);
    CHECK(g.z == 0.0);
}

TEST_CASE("TVC actuator derivative oracle") {
    auto [bd0, bdd0] = tvc_derivatives(ActuatorState{0.0, 0.0}, 1.0);
    CHECK(bd0 == 0.0);
    CHECK(bdd0 == doctest::Approx(4596.84).epsilon(1e-15));
    auto [bd1, bdd1] = tvc_derivatives(ActuatorState{0.0, 1.0}, 0.0);
    CHECK(bd1 == 1.0);
    CHECK(bdd1 == doctest::Approx(-90.9).epsilon(1e-15));
}

TEST_CASE("integrator converges at fourth order on the harmonic oscillator") {
    auto f = [](double, const Eigen::Vector2d& x) {
        return Eigen::Vector2d(x[1], -x[0]);
    };
    auto err_at = [&](int n) {
        Eigen::Vector2d x(1.0, 0.0);
        const double dt = 2.0 * M_PI / n;
        for (int k = 0; k < n; ++k) x = rk4_step(f, x, k * dt, dt);
        return (x - Eigen::Vector2d(1.0, 0.0)).norm();
    };
    const double e64 = err_at(64), e128 = err_at(128), e256 = err_at(256);
    CHECK(e64 / e128 > 14.0);
    CHECK(e64 / e128 < 18.0);
    CHECK(e128 / e256 > 14.0);
    CHECK(e128 / e256 < 18.0);
}

TEST_CASE("quiet scenario holds the equilibrium exactly") {
    SimScenario sc = default_scenario();
    sc.wind.enabled = false;
    const TelemetryLog log = simulate(sc);
    REQUIRE(log.size() == 2001);
    CHECK(log.t.front() == 0.0);
    CHECK(log.t.back() == doctest::Approx(80.0).epsilon(1e-12));
    CHECK(log.t[1] - log.t[0] == doctest::Approx(0.04).epsilon(1e-12));
    for (std::size_t k = 0; k < log.size(); ++k) {
        CHECK(log.theta[k] == 0.0);
        CHECK(log.q[k] == 0.0);
        CHECK(log.beta_cmd[k] == 0.0);
        CHECK(log.v_w[k] == 0.0);
    }
}

TEST_CASE("telemetry has one row per control tick inclusive of both ends") {
    SimScenario sc = default_scenario();
    sc.duration = 10.0;
    const TelemetryLog log = simulate(sc);
    CHECK(log.size() == 251);
    CHECK(log.theta.size() == log.size());
    CHECK(log.beta_dot.size() == log.size());
    CHECK(log.nu.size() == log.size());
}

TEST_CASE("identical scenarios replay bitwise identical telemetry") {
    SimScenario sc = default_scenario();
    sc.sensors.gyro_3sigma_dps = 0.05;
    sc.sensors.attitude_3sigma_deg = 0.01;
    sc.master_seed = 99;
    sc.case_id = 3;
    const TelemetryLog a = simulate(sc);
    const TelemetryLog b = simulate(sc);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.theta[k] == b.theta[k]);
        CHECK(a.beta_cmd[k] == b.beta_cmd[k]);
        CHECK(a.v_w[k] == b.v_w[k]);
    }
}

TEST_CASE("wind realization is shared across cases and master seeds") {
    SimScenario sc = default_scenario();
    sc.case_id = 7;
    sc.master_seed = 5;
    const TelemetryLog a = simulate(sc);

    SimScenario sc2 = sc;
    sc2.case_id = 13;
    sc2.master_seed = 9;
    const TelemetryLog b = simulate(sc2);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.v_w[k] == b.v_w[k]);

    SimScenario sc3 = sc;
    sc3.wind.seed = 2;
    const TelemetryLog c = simulate(sc3);
    bool any_differs = false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a.v_w[k] != c.v_w[k]) any_differs = true;
    CHECK(any_differs);
}

TEST_CASE("sensor streams separate by case id") {
    SimScenario sc = default_scenario();
    sc.sensors.gyro_3sigma_dps = 0.05;
    sc.case_id = 7;
    const TelemetryLog a = simulate(sc);
    sc.case_id = 13;
    const TelemetryLog b = simulate(sc);
    bool any_differs = false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a.theta[k] != b.theta[k]) any_differs = true;
    CHECK(any_differs);
}

TEST_CASE("faster control rates tighten the inversion") {
    // The mismatch between the commanded and realized angular acceleration
    // shrinks as the control period shrinks.
    std::vector<double> mismatch;
    for (double f : {25.0, 50.0, 100.0}) {
        SimScenario sc = default_scenario();
        sc.rates.f_gnc = f;
        const TelemetryLog log = simulate(sc);
        const double h = 1.0 / f;
        std::vector<double> m;
        for (std::size_t k = 1; k + 1 < log.size(); ++k)
            m.push_back(log.nu[k] - (log.q[k + 1] - log.q[k - 1]) / (2 * h));
        mismatch.push_back(rms_of(m));
    }
    CHECK(mismatch[1] < mismatch[0]);
    CHECK(mismatch[2] < mismatch[1]);
}

TEST_CASE("actuator limits clamp deflection and rate") {
    SimScenario sc = default_scenario();
    sc.model.limits = true;
    sc.command.step_time = 1.0;
    sc.command.step_amplitude = 20.0 * M_PI / 180.0;
    const TelemetryLog log = simulate(sc);
    const double beta_lim = 6.0 * M_PI / 180.0;
    const double rate_lim = 20.0 * M_PI / 180.0;
    double max_b = 0, max_bd = 0;
    for (std::size_t k = 0; k < log.size(); ++k) {
        max_b = std::max(max_b, std::abs(log.beta[k]));
        max_bd = std::max(max_bd, std::abs(log.beta_dot[k]));
    }
    CHECK(max_b <= beta_lim * (1 + 1e-12));
    CHECK(max_bd <= rate_lim * (1 + 1e-12));
    CHECK(max_b > 0.9 * beta_lim);
}

TEST_CASE("blow-up detection raises the divergence error") {
    SimScenario sc = default_scenario();
    sc.tuning.omega_theta = 300.0;
    CHECK_THROWS_AS(simulate(sc), SimDiverged);
}

TEST_CASE("telemetry export round-trips through the CSV layer") {
    SimScenario sc = default_scenario();
    sc.duration = 2.0;
    const TelemetryLog log = simulate(sc);
    const std::string path = "/tmp/tvcsim_test_telemetry.csv";
    log.save(path);
    const CsvTable t = read_csv(path);
    REQUIRE(t.header.size() == 15);
    REQUIRE(t.rows.size() == log.size());
    const std::size_t ith = t.column("theta");
    const std::size_t ivw = t.column("v_w");
    for (std::size_t k = 0; k < log.size(); ++k) {
        CHECK(t.rows[k][ith] == log.theta[k]);
        CHECK(t.rows[k][ivw] == log.v_w[k]);
    }
    std::remove(path.c_str());
}

} // TEST_SUITE
