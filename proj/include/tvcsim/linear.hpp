// Rational transfer functions, state-space models, frequency responses, and
// finite-difference linearization of the closed attitude loop.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "tvcsim/dynamics.hpp"
#include "tvcsim/trajectory.hpp"

namespace tvcsim {

// Dense polynomial in s with ascending coefficients (c[k] multiplies s^k).
struct Poly {
    std::vector<double> c;

    Poly() = default;
    explicit Poly(std::vector<double> ascending) : c(std::move(ascending)) { trim(); }
    static Poly constant(double v) { return Poly({v}); }

    int degree() const;
    void trim(); // drop leading (highest-power) zeros, keep at least one term
    std::complex<double> eval(std::complex<double> s) const;
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(double k, const Poly& a);

struct TransferFunction {
    std::vector<double> num; // descending powers of s
    std::vector<double> den; // descending powers of s, nonzero leading term

    std::complex<double> eval(std::complex<double> s) const;
    static TransferFunction from_polys(const Poly& num, const Poly& den);
};

// Roots via the companion matrix of the polynomial (descending coefficients).
std::vector<std::complex<double>> poly_roots(const std::vector<double>& descending);

struct LinearSystem {
    Eigen::MatrixXd A, B, C, D;

    int order() const { return static_cast<int>(A.rows()); }
    // SISO response C (jw I - A)^-1 B + D; throws unless 1x1.
    std::complex<double> eval(double omega) const;
};

struct FrequencyResponse {
    std::vector<double> omega;               // rad/s, strictly increasing
    std::vector<std::complex<double>> H;

    // Header: omega,re,im,mag_db,phase_deg (phase unwrapped).
    void save(const std::string& path) const;
};

std::vector<double> log_grid(double w_lo = 1e-2, double w_hi = 1e3, int n = 200);

FrequencyResponse freq_response(const TransferFunction& tf,
                                const std::vector<double>& omega);
FrequencyResponse freq_response(const LinearSystem& sys,
                                const std::vector<double>& omega);

// theta/beta ~ -mu_c / (s^2 + l_alpha (mu_alpha/V) s - mu_alpha): attitude
// plant with drift and nozzle reaction neglected.
TransferFunction simplified_attitude_tf(const PlantCoefficients& c, double V,
                                        double l_alpha);

// Full pitch/drift 2x2 polynomial system solved by Cramer's rule; returns
// (theta/beta, w/beta) including the nozzle-reaction numerator terms.
std::pair<TransferFunction, TransferFunction> coupled_tf(const PlantCoefficients& c,
                                                         double V, double l_alpha,
                                                         double g, double theta0);

// theta/theta_cmd = -mu_c kP / (s^2 + (l_alpha mu_alpha/V - mu_c kD) s
//                               - (mu_alpha + mu_c kP)).
TransferFunction closed_loop_pd_tf(const PlantCoefficients& c, double kP, double kD,
                                   double V, double l_alpha);

// Same loop with acceleration feedback kA; all coefficients divided by
// (1 - mu_c kA).
TransferFunction closed_loop_pd_qdot_tf(const PlantCoefficients& c, double kP,
                                        double kD, double kA, double V,
                                        double l_alpha);

// Central-difference Jacobian linearization of xdot = f(x, u), y = g(x, u)
// about (x0, u0). Step per direction: max(abs_step, abs_step * |x_i|).
using VectorFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
LinearSystem fd_linearize(const VectorFn& f, const VectorFn& g,
                          const Eigen::VectorXd& x0, const Eigen::VectorXd& u0,
                          double abs_step = 1e-6);

enum class LoopChannel {
    nu_to_theta,       // outer loop cut at the virtual acceleration command
    thetaerr_to_theta, // attitude loop cut at the error signal
};

struct LinearizeOptions {
    bool bypass_filters = false; // perfect qdot and deflection knowledge
    bool exact_mu_c = false;     // invert with the true local mu_c, not the schedule
    bool pade_delay = false;     // half-sample transport lag approximation
    double fd_step = 1e-6;
};

// Frozen-parameter continuous-time linear model of the closed loop at time t,
// wind and noise off, about the zero-error operating point. The controller's
// discrete filters are represented by their continuous prototypes. States:
// [theta, q, (w), (beta, beta_dot), filter states...]; lateral position is
// dropped (it feeds nothing).
LinearSystem linearize_closed_loop(const SimScenario& scenario, double t,
                                   LoopChannel channel,
                                   const LinearizeOptions& opt = {});

} // namespace tvcsim
