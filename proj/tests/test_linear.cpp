#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "tvcsim/linear.hpp"
#include "tvcsim/scenario.hpp"
#include "tvcsim/stability.hpp"

using namespace tvcsim;
using cplx = std::complex<double>;

TEST_SUITE("linear") {

TEST_CASE("polynomial arithmetic") {
    const Poly a({1, 1});            // 1 + s
    const Poly sq = a * a;           // 1 + 2s + s^2
    REQUIRE(sq.c.size() == 3);
    CHECK(sq.c[0] == 1.0);
    CHECK(sq.c[1] == 2.0);
    CHECK(sq.c[2] == 1.0);
    CHECK(sq.degree() == 2);

    const Poly diff = sq - Poly({0, 0, 1}); // 1 + 2s
    CHECK(diff.degree() == 1);

    Poly z({1, 1});
    z = z - z;
    CHECK(z.degree() == 0);
    CHECK(z.c[0] == 0.0);

    const Poly s3 = 3.0 * a;
    CHECK(s3.c[0] == 3.0);
    CHECK(s3.c[1] == 3.0);

    CHECK(a.eval(cplx(0, 1)) == cplx(1, 1));
}

TEST_CASE("transfer function evaluation") {
    TransferFunction tf;
    tf.num = {1};       // 1
    tf.den = {1, 0};    // s
    const cplx h = tf.eval(cplx(0, 1.0));
    CHECK(h.real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h.imag() == doctest::Approx(-1.0).epsilon(1e-15));

    const TransferFunction built =
        TransferFunction::from_polys(Poly({6.25, 4}), Poly({0, 0, 1}));
    REQUIRE(built.num.size() == 2);
    CHECK(built.num[0] == 4.0);
    CHECK(built.num[1] == 6.25);
    REQUIRE(built.den.size() == 3);
    CHECK(built.den[0] == 1.0);
}

TEST_CASE("companion-matrix roots of a factored cubic") {
    // (s+1)(s+2)(s+5) = s^3 + 8s^2 + 17s + 10
    auto roots = poly_roots({1, 8, 17, 10});
    REQUIRE(roots.size() == 3);
    std::sort(roots.begin(), roots.end(),
              [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(roots[0].real() == doctest::Approx(-5.0).epsilon(1e-10));
    CHECK(roots[1].real() == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(roots[2].real() == doctest::Approx(-1.0).epsilon(1e-10));
    for (const auto& r : roots) CHECK(std::abs(r.imag()) < 1e-10);
}

TEST_CASE("log grid spans the requested decades") {
    const auto g = log_grid(1e-2, 1e3, 200);
    REQUIRE(g.size() == 200);
    CHECK(g.front() == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(g.back() == doctest::Approx(1e3).epsilon(1e-12));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("state-space evaluation matches the transfer function") {
    // 1/s^2 as a double integrator in state space.
    LinearSystem sys;
    sys.A = Eigen::MatrixXd::Zero(2, 2);
    sys.A(0, 1) = 1;
    sys.B = Eigen::MatrixXd::Zero(2, 1);
    sys.B(1, 0) = 1;
    sys.C = Eigen::MatrixXd::Zero(1, 2);
    sys.C(0, 0) = 1;
    sys.D = Eigen::MatrixXd::Zero(1, 1);
    for (double w : {0.1, 1.0, 10.0}) {
        const cplx h = sys.eval(w);
        CHECK(std::abs(h - cplx(-1.0 / (w * w), 0)) < 1e-12);
    }
}

TEST_CASE("pitch and drift decouple when the coupling terms vanish") {
    // With no aero force, no TVC force, no nozzle reaction, and no gravity
    // component, the exact pitch channel collapses to the simplified one.
    PlantCoefficients c;
    c.mu_alpha = 0.8;
    c.mu_c = 1.7;
    c.mu_n = 0;
    c.n_alpha = 0;
    c.n_c = 0;
    c.n_n = 0;
    const double V = 200, l_alpha = 3;
    const TransferFunction simple = simplified_attitude_tf(c, V, l_alpha);
    const auto [full, drift] = coupled_tf(c, V, l_alpha, 0.0, 0.0);
    (void)drift;

    const auto rel_err = [&](double w) {
        const cplx s(0, w);
        return std::abs(simple.eval(s) - full.eval(s)) /
               std::max(1e-30, std::abs(simple.eval(s)));
    };
    for (double w : {0.01, 0.1, 1.0, 3.0, 10.0, 100.0}) CHECK(rel_err(w) < 1e-9);
}

TEST_CASE("finite differences recover an analytic linear system") {
    Eigen::MatrixXd A(2, 2), B(2, 1), C(1, 2), D(1, 1);
    A << 0, 1, -2, -3;
    B << 0, 1;
    C << 1, 0;
    D << 0;
    auto f = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
        return Eigen::VectorXd(A * x + B * u);
    };
    auto g = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
        return Eigen::VectorXd(C * x + D * u);
    };
    const LinearSystem sys = fd_linearize(f, g, Eigen::VectorXd::Zero(2),
                                          Eigen::VectorXd::Zero(1));
    CHECK((sys.A - A).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((sys.B - B).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((sys.C - C).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((sys.D - D).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("finite differences capture a scalar nonlinearity") {
    auto f = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
        Eigen::VectorXd d(1);
        d[0] = std::sin(x[0]) + u[0] * u[0];
        return d;
    };
    auto g = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
        return Eigen::VectorXd(x);
    };
    Eigen::VectorXd x0(1), u0(1);
    x0 << 0.3;
    u0 << 0.2;
    const LinearSystem sys = fd_linearize(f, g, x0, u0);
    CHECK(sys.A(0, 0) == doctest::Approx(std::cos(0.3)).epsilon(1e-9));
    CHECK(sys.B(0, 0) == doctest::Approx(0.4).epsilon(1e-8));
}

TEST_CASE("perfect inversion turns the attitude loop into a double integrator") {
    SimScenario sc = default_scenario();
    sc.model.actuator = false;
    sc.model.twd = false;
    sc.model.drift = false;
    LinearizeOptions opt;
    opt.bypass_filters = true;
    opt.exact_mu_c = true;
    const LinearSystem sys = linearize_closed_loop(sc, 40.0, LoopChannel::nu_to_theta, opt);
    for (double w : {0.01, 0.5, 2.5, 40.0, 800.0}) {
        const cplx h = sys.eval(w);
        const cplx want(-1.0 / (w * w), 0.0);
        CHECK(std::abs(h - want) / std::abs(want) < 1e-6);
    }
}

TEST_CASE("half-sample lag option erodes phase, not low-frequency gain") {
    // The lag element itself is all-pass, but it sits inside the inversion
    // controller's deflection-estimate feedback, so the channel magnitude may
    // shift away from DC. The contract is: unchanged low-frequency gain, more
    // lag at the loop frequencies, and a smaller phase margin.
    SimScenario sc = default_scenario();
    LinearizeOptions plain, lagged;
    lagged.pade_delay = true;
    const LinearSystem a = linearize_closed_loop(sc, 40.0, LoopChannel::nu_to_theta, plain);
    const LinearSystem b = linearize_closed_loop(sc, 40.0, LoopChannel::nu_to_theta, lagged);
    const double wlo = 0.01;
    CHECK(std::abs(b.eval(wlo)) / std::abs(a.eval(wlo)) ==
          doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::arg(b.eval(10.0)) < std::arg(a.eval(10.0)));

    const MarginResult ma = gain_phase_margins(indi_outer_loop(a, sc.tuning));
    const MarginResult mb = gain_phase_margins(indi_outer_loop(b, sc.tuning));
    CHECK(ma.stable);
    CHECK(mb.pm_deg < ma.pm_deg);
}

} // TEST_SUITE
