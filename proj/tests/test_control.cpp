#include <doctest.h>

#include <cmath>
#include <vector>

#include "tvcsim/control.hpp"
#include "tvcsim/linear.hpp"
#include "tvcsim/trajectory.hpp"

using namespace tvcsim;

namespace {

std::vector<ScheduleNode> twin_nodes(double mu_alpha, double mu_c, double l_alpha,
                                     double V) {
    ScheduleNode n;
    n.t = 0;
    n.mu_alpha = mu_alpha;
    n.mu_c = mu_c;
    n.l_alpha = l_alpha;
    n.V = V;
    ScheduleNode n2 = n;
    n2.t = 1;
    return {n, n2};
}

} // namespace

TEST_SUITE("control") {

TEST_CASE("controller kind strings round-trip") {
    for (ControllerKind k : {ControllerKind::pd, ControllerKind::pd_qdot,
                             ControllerKind::indi, ControllerKind::indi_lpf})
        CHECK(controller_kind_from_string(to_string(k)) == k);
    CHECK_THROWS(controller_kind_from_string("pid"));
}

TEST_CASE("tuning validation rejects degenerate targets") {
    TuningSpec s;
    s.validate();
    TuningSpec bad = s;
    bad.omega_theta = 0;
    CHECK_THROWS(bad.validate());
    bad = s;
    bad.G0 = 1.0;
    CHECK_THROWS(bad.validate());
    bad = s;
    bad.omega_beta0 = -1;
    CHECK_THROWS(bad.validate());
    bad = s;
    bad.n_nodes = 1;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("derivative filter rejects DC and tracks a unit ramp") {
    const double dt = 0.04, w = 15.0;
    Filter1State st;
    double y = 0;
    for (int k = 0; k < 500; ++k) y = derivative_filter_step(st, 5.0, dt, w);
    CHECK(std::abs(y) < 1e-6);

    Filter1State st2;
    for (int k = 1; k <= 500; ++k) y = derivative_filter_step(st2, k * dt, dt, w);
    CHECK(y == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("low-pass filter has unit DC gain") {
    const double dt = 0.04;
    Filter1State st;
    double y = 0;
    for (int k = 0; k < 500; ++k) y = lowpass_step(st, 5.0, dt, 10.0);
    CHECK(y == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("pure-gain plant places the nominal PD gains") {
    // mu_alpha = 0, mu_c = 1: kP = -omega^2, kD = -2 zeta omega.
    const GainSchedule g = tune_pd(twin_nodes(0.0, 1.0, 0.0, 1.0), TuningSpec{});
    CHECK(g.kP[0] == doctest::Approx(-6.25).epsilon(1e-14));
    CHECK(g.kD[0] == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(g.kA.empty());
}

TEST_CASE("acceleration-feedback tuning reproduces the hand solution") {
    // mu_alpha = 1, mu_c = 1, l_alpha = 0, G0 = 1.05.
    const GainSchedule g = tune_pd_qdot(twin_nodes(1.0, 1.0, 0.0, 1.0), TuningSpec{});
    REQUIRE(g.kA.size() == 2);
    CHECK(g.kP[0] == doctest::Approx(-21.0).epsilon(1e-12));
    CHECK(g.kA[0] == doctest::Approx(-2.2).epsilon(1e-12));
    CHECK(g.kD[0] == doctest::Approx(-12.8).epsilon(1e-12));
}

TEST_CASE("tuned gains land the closed-loop polynomial on the target") {
    PlantCoefficients c;
    c.mu_alpha = 0.8;
    c.mu_c = 1.7;
    const double V = 200, l_alpha = 3;

    const GainSchedule pd = tune_pd(twin_nodes(c.mu_alpha, c.mu_c, l_alpha, V),
                                    TuningSpec{});
    TransferFunction t1 = closed_loop_pd_tf(c, pd.kP[0], pd.kD[0], V, l_alpha);
    REQUIRE(t1.den.size() == 3);
    CHECK(t1.den[1] / t1.den[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(t1.den[2] / t1.den[0] == doctest::Approx(6.25).epsilon(1e-12));

    const GainSchedule pq = tune_pd_qdot(twin_nodes(c.mu_alpha, c.mu_c, l_alpha, V),
                                         TuningSpec{});
    TransferFunction t2 =
        closed_loop_pd_qdot_tf(c, pq.kP[0], pq.kD[0], pq.kA[0], V, l_alpha);
    REQUIRE(t2.den.size() == 3);
    CHECK(t2.den[1] / t2.den[0] == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(t2.den[2] / t2.den[0] == doctest::Approx(6.25).epsilon(1e-9));
    const auto dc = t2.eval(0.0);
    CHECK(dc.real() == doctest::Approx(1.05).epsilon(1e-9));
    CHECK(dc.imag() == 0.0);
}

TEST_CASE("inversion schedule carries the fixed outer gains and the mu_c grid") {
    const TrajectoryTable tab = synth_reference_trajectory();
    const TuningSpec spec;
    const GainSchedule g = make_schedule(ControllerKind::indi, tab, spec);
    REQUIRE(g.t.size() == 9);
    CHECK(g.kA.empty());
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        CHECK(g.kP[i] == doctest::Approx(6.25).epsilon(1e-15));
        CHECK(g.kD[i] == doctest::Approx(4.0).epsilon(1e-15));
        const PlantCoefficients c = plant_coefficients(sample_params(tab, g.t[i]));
        CHECK(g.mu_c[i] == doctest::Approx(c.mu_c).epsilon(1e-12));
    }
}

TEST_CASE("gain lookup interpolates and clamps") {
    GainSchedule g;
    g.t = {0, 10};
    g.kP = {1, 3};
    g.kD = {-2, -4};
    g.mu_c = {1.5, 2.5};
    CHECK(lookup_gains(g, 5).kP == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lookup_gains(g, 5).mu_c == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lookup_gains(g, -5).kP == 1.0);
    CHECK(lookup_gains(g, 15).kP == 3.0);
    CHECK(lookup_gains(g, 5).kA == 0.0);
}

TEST_CASE("incremental step reduces to the hand increment on a fresh state") {
    // nu = 6.25 * 0.16 = 1 with zero qdot0 and zero beta0 gives beta = -1.
    ControllerState st;
    const double beta =
        indi_step(st, 0.16, 0.0, 0.0, 0.04, TuningSpec{}, 1.0, false, nullptr);
    CHECK(beta == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("zero increment passes the deflection estimate through") {
    TuningSpec spec;
    ControllerState st;
    const double b1 = indi_step(st, 0.16, 0.0, 0.0, 0.04, spec, 1.0, false, nullptr);

    // Twin estimator fed the same command history predicts beta0 exactly.
    Filter1State twin;
    lowpass_step(twin, 0.0, 0.04, spec.omega_beta0);
    const double beta0 = lowpass_step(twin, b1, 0.04, spec.omega_beta0);

    // nu = qdot0 = 0, so the command must equal beta0 with no increment.
    const double b2 = indi_step(st, 0.0, 0.0, 0.0, 0.04, spec, 1.0, false, nullptr);
    CHECK(b2 == beta0);
}

TEST_CASE("inversion divides the increment by the scheduled effectiveness") {
    ControllerState a, b;
    const double inc1 = indi_step(a, 0.16, 0.0, 0.0, 0.04, TuningSpec{}, 1.0, false);
    const double inc2 = indi_step(b, 0.16, 0.0, 0.0, 0.04, TuningSpec{}, 2.0, false);
    CHECK(inc1 == doctest::Approx(2.0 * inc2).epsilon(1e-14));
    ControllerState c;
    CHECK_THROWS(indi_step(c, 0.1, 0.0, 0.0, 0.04, TuningSpec{}, 0.0, false));
}

TEST_CASE("rate-feedback law combines the filtered derivative") {
    ControllerState st;
    ScheduledGains g{-21.0, -12.8, -2.2, 1.0};
    const double q = 0.03, dt = 0.04, wq = 15.0;
    Filter1State twin;
    const double qdot_expect = derivative_filter_step(twin, q, dt, wq);
    const double beta = pd_qdot_step(st, 0.1, 0.02, q, dt, g, wq);
    CHECK(beta == doctest::Approx(g.kP * (0.1 - 0.02) - g.kD * q - g.kA * qdot_expect)
                      .epsilon(1e-14));
    CHECK(st.last_qdot_est == qdot_expect);
}

TEST_CASE("controller facade dispatches the pure PD law") {
    const TrajectoryTable tab = synth_reference_trajectory();
    Controller ctrl(ControllerKind::pd, TuningSpec{},
                    make_schedule(ControllerKind::pd, tab, TuningSpec{}));
    const ScheduledGains g = lookup_gains(ctrl.schedule(), 12.0);
    CHECK(ctrl.step(12.0, 0.1, 0.02, 0.005, 0.04) ==
          doctest::Approx(pd_step(0.1, 0.02, 0.005, g)).epsilon(1e-15));
    CHECK_FALSE(ctrl.has_qdot_est());

    GainSchedule tiny;
    tiny.t = {0};
    tiny.kP = {1};
    tiny.kD = {1};
    tiny.mu_c = {1};
    CHECK_THROWS(Controller(ControllerKind::pd, TuningSpec{}, tiny));
}

} // TEST_SUITE
