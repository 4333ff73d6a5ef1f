#include "tvcsim/linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvcsim/csv.hpp"

namespace tvcsim {

int Poly::degree() const {
    return static_cast<int>(c.size()) - 1;
}

void Poly::trim() {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    if (c.empty()) c.push_back(0.0);
}

std::complex<double> Poly::eval(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
    return acc;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    r.trim();
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    return a + (-1.0 * b);
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    r.trim();
    return r;
}

Poly operator*(double k, const Poly& a) {
    Poly r = a;
    for (auto& v : r.c) v *= k;
    r.trim();
    return r;
}

std::complex<double> TransferFunction::eval(std::complex<double> s) const {
    std::complex<double> n = 0.0, d = 0.0;
    for (double v : num) n = n * s + v;
    for (double v : den) d = d * s + v;
    return n / d;
}

TransferFunction TransferFunction::from_polys(const Poly& num, const Poly& den) {
    Poly n = num, d = den;
    n.trim();
    d.trim();
    if (d.c.size() == 1 && d.c[0] == 0.0)
        throw std::runtime_error("transfer function denominator is zero");
    TransferFunction tf;
    tf.num.assign(n.c.rbegin(), n.c.rend());
    tf.den.assign(d.c.rbegin(), d.c.rend());
    return tf;
}

std::vector<std::complex<double>> poly_roots(const std::vector<double>& descending) {
    std::vector<double> c = descending;
    std::size_t lead = 0;
    while (lead < c.size() && c[lead] == 0.0) ++lead;
    c.erase(c.begin(), c.begin() + static_cast<long>(lead));
    if (c.size() <= 1) return {};
    const std::size_t n = c.size() - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
    for (std::size_t i = 1; i < n; ++i) comp(static_cast<long>(i), static_cast<long>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        comp(static_cast<long>(i), static_cast<long>(n - 1)) = -c[n - i] / c[0];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<std::complex<double>> roots(n);
    for (std::size_t i = 0; i < n; ++i) roots[i] = es.eigenvalues()(static_cast<long>(i));
    return roots;
}

std::complex<double> LinearSystem::eval(double omega) const {
    if (B.cols() != 1 || C.rows() != 1)
        throw std::runtime_error("frequency evaluation requires a SISO system");
    const long n = A.rows();
    const std::complex<double> jw(0.0, omega);
    Eigen::MatrixXcd M = -A.cast<std::complex<double>>();
    for (long i = 0; i < n; ++i) M(i, i) += jw;
    const Eigen::VectorXcd x = M.partialPivLu().solve(B.cast<std::complex<double>>());
    const std::complex<double> h =
        (C.cast<std::complex<double>>() * x)(0, 0) + std::complex<double>(D(0, 0), 0.0);
    return h;
}

std::vector<double> log_grid(double w_lo, double w_hi, int n) {
    if (!(w_lo > 0) || !(w_hi > w_lo) || n < 2)
        throw std::invalid_argument("bad frequency grid spec");
    std::vector<double> w(static_cast<std::size_t>(n));
    const double l0 = std::log10(w_lo), l1 = std::log10(w_hi);
    for (int i = 0; i < n; ++i)
        w[static_cast<std::size_t>(i)] = std::pow(10.0, l0 + (l1 - l0) * i / (n - 1));
    return w;
}

namespace {

void check_response_finite(const FrequencyResponse& r) {
    for (std::size_t i = 0; i < r.H.size(); ++i)
        if (!std::isfinite(r.H[i].real()) || !std::isfinite(r.H[i].imag()))
            throw std::runtime_error("frequency response is singular at omega = " +
                                     format_full(r.omega[i]));
}

} // namespace

FrequencyResponse freq_response(const TransferFunction& tf,
                                const std::vector<double>& omega) {
    FrequencyResponse r;
    r.omega = omega;
    r.H.reserve(omega.size());
    for (double w : omega) r.H.push_back(tf.eval(std::complex<double>(0.0, w)));
    check_response_finite(r);
    return r;
}

FrequencyResponse freq_response(const LinearSystem& sys,
                                const std::vector<double>& omega) {
    FrequencyResponse r;
    r.omega = omega;
    r.H.reserve(omega.size());
    for (double w : omega) r.H.push_back(sys.eval(w));
    check_response_finite(r);
    return r;
}

void FrequencyResponse::save(const std::string& path) const {
    CsvWriter out(path, {"omega", "re", "im", "mag_db", "phase_deg"});
    double prev = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double mag_db = 20.0 * std::log10(std::abs(H[i]));
        double ph = std::arg(H[i]);
        if (first) {
            first = false;
        } else {
            // Unwrap onto the branch nearest the previous sample.
            ph += 2.0 * M_PI * std::round((prev - ph) / (2.0 * M_PI));
        }
        prev = ph;
        out.row({omega[i], H[i].real(), H[i].imag(), mag_db, ph * 180.0 / M_PI});
    }
    out.close();
}

TransferFunction simplified_attitude_tf(const PlantCoefficients& c, double V,
                                        double l_alpha) {
    TransferFunction tf;
    tf.num = {-c.mu_c};
    tf.den = {1.0, l_alpha * c.mu_alpha / V, -c.mu_alpha};
    return tf;
}

std::pair<TransferFunction, TransferFunction> coupled_tf(const PlantCoefficients& c,
                                                         double V, double l_alpha,
                                                         double g, double theta0) {
    const Poly a11({-c.mu_alpha, l_alpha * c.mu_alpha / V, 1.0});
    const Poly a12({-c.mu_alpha / V});
    const Poly a21({c.n_alpha + g * std::sin(theta0), -l_alpha * c.n_alpha / V});
    const Poly a22({c.n_alpha / V, 1.0});
    const Poly b1({-c.mu_c, 0.0, -c.mu_n});
    const Poly b2({-c.n_c, 0.0, -c.n_n});

    const Poly det = a11 * a22 - a12 * a21;
    Poly dchk = det;
    dchk.trim();
    if (dchk.c.size() == 1 && dchk.c[0] == 0.0)
        throw std::runtime_error("coupled model determinant is identically zero");

    const Poly num_theta = b1 * a22 - a12 * b2;
    const Poly num_w = a11 * b2 - b1 * a21;
    return {TransferFunction::from_polys(num_theta, det),
            TransferFunction::from_polys(num_w, det)};
}

TransferFunction closed_loop_pd_tf(const PlantCoefficients& c, double kP, double kD,
                                   double V, double l_alpha) {
    TransferFunction tf;
    tf.num = {-c.mu_c * kP};
    tf.den = {1.0, l_alpha * c.mu_alpha / V - c.mu_c * kD, -(c.mu_alpha + c.mu_c * kP)};
    return tf;
}

TransferFunction closed_loop_pd_qdot_tf(const PlantCoefficients& c, double kP,
                                        double kD, double kA, double V,
                                        double l_alpha) {
    const double d = 1.0 - c.mu_c * kA;
    if (d == 0.0)
        throw std::runtime_error("closed loop singular: mu_c kA = 1");
    TransferFunction tf;
    tf.num = {-c.mu_c * kP / d};
    tf.den = {1.0, (l_alpha * c.mu_alpha / V - c.mu_c * kD) / d,
              -(c.mu_alpha + c.mu_c * kP) / d};
    return tf;
}

LinearSystem fd_linearize(const VectorFn& f, const VectorFn& g,
                          const Eigen::VectorXd& x0, const Eigen::VectorXd& u0,
                          double abs_step) {
    const long n = x0.size();
    const long m = u0.size();
    const Eigen::VectorXd y0 = g(x0, u0);
    const long p = y0.size();

    LinearSystem sys;
    sys.A.resize(n, n);
    sys.B.resize(n, m);
    sys.C.resize(p, n);
    sys.D.resize(p, m);

    for (long j = 0; j < n; ++j) {
        const double h = std::max(abs_step, abs_step * std::abs(x0(j)));
        Eigen::VectorXd hi = x0, lo = x0;
        hi(j) += h;
        lo(j) -= h;
        sys.A.col(j) = (f(hi, u0) - f(lo, u0)) / (2.0 * h);
        sys.C.col(j) = (g(hi, u0) - g(lo, u0)) / (2.0 * h);
    }
    for (long j = 0; j < m; ++j) {
        const double h = std::max(abs_step, abs_step * std::abs(u0(j)));
        Eigen::VectorXd hi = u0, lo = u0;
        hi(j) += h;
        lo(j) -= h;
        sys.B.col(j) = (f(x0, hi) - f(x0, lo)) / (2.0 * h);
        sys.D.col(j) = (g(x0, hi) - g(x0, lo)) / (2.0 * h);
    }
    if (!sys.A.allFinite() || !sys.B.allFinite() || !sys.C.allFinite() ||
        !sys.D.allFinite())
        throw std::runtime_error("linearization produced non-finite Jacobians");
    return sys;
}

LinearSystem linearize_closed_loop(const SimScenario& sc, double t, LoopChannel channel,
                                   const LinearizeOptions& opt) {
    sc.tuning.validate();
    const TrajectoryPoint nominal_pt = sample_params(sc.table, t);
    const TrajectoryPoint p = apply_dispersion(nominal_pt, sc.dispersion);
    const PlantCoefficients coeff = plant_coefficients(p);

    const GainSchedule schedule = make_schedule(sc.controller, sc.table, sc.tuning);
    const ScheduledGains gains = lookup_gains(schedule, t);
    const double mu_inv = opt.exact_mu_c ? coeff.mu_c : gains.mu_c;
    if (mu_inv == 0.0)
        throw std::runtime_error("linearize: inversion mu_c is zero");

    const bool is_indi = sc.controller == ControllerKind::indi ||
                         sc.controller == ControllerKind::indi_lpf;
    if (channel == LoopChannel::nu_to_theta && !is_indi)
        throw std::runtime_error(
            "nu_to_theta channel requires an inversion controller");
    if (sc.use_actuator_beta && !sc.model.actuator && is_indi && !opt.bypass_filters)
        throw std::runtime_error(
            "actuator-fed deflection estimate needs the actuator model");

    // State indices; -1 marks an absent state.
    int idx = 0;
    const int i_theta = idx++;
    const int i_q = idx++;
    const int i_w = sc.model.drift ? idx++ : -1;
    const bool act = sc.model.actuator;
    const int i_beta = act ? idx++ : -1;
    const int i_bdot = act ? idx++ : -1;
    const bool need_qfilt = !opt.bypass_filters &&
                            sc.controller != ControllerKind::pd;
    const int i_xq = need_qfilt ? idx++ : -1;
    const bool need_b0 = is_indi && !opt.bypass_filters && !sc.use_actuator_beta;
    const int i_xb0 = need_b0 ? idx++ : -1;
    const bool need_lpf = sc.controller == ControllerKind::indi_lpf &&
                          !opt.bypass_filters;
    const int i_xlpf = need_lpf ? idx++ : -1;
    const int i_pade = opt.pade_delay ? idx++ : -1;
    const int n_states = idx;

    const double w_q = sc.tuning.omega_qdot;
    const double w_b = sc.tuning.omega_beta;
    const double w_b0 = sc.tuning.omega_beta0;
    const double kPo = sc.tuning.omega_theta * sc.tuning.omega_theta;
    const double kDo = 2.0 * sc.tuning.zeta * sc.tuning.omega_theta;
    const double pade_tau =
        (0.5 + sc.delays.tvc_samples) / sc.rates.f_gnc; // transport lag modeled
    const double pade_a = 2.0 / pade_tau;

    auto dynamics = [&](const Eigen::VectorXd& x,
                        const Eigen::VectorXd& u) -> Eigen::VectorXd {
        const double theta = x(i_theta);
        const double q = x(i_q);
        const double w = sc.model.drift ? x(i_w) : 0.0;
        const PlantState ps{0.0, w, theta, q};

        // Torque with the nozzle centered; the inversion laws subtract it.
        const double qdot_free =
            plant_derivatives(ps, p, 0.0, 0.0, 0.0).q;

        double qdot_est = 0.0;
        if (need_qfilt) qdot_est = w_q * (q - x(i_xq));

        double beta_raw = 0.0, beta_cmd = 0.0;
        switch (sc.controller) {
            case ControllerKind::pd: {
                const double e = u(0); // thetaerr channel enforced above
                beta_raw = gains.kP * e - gains.kD * q;
                beta_cmd = beta_raw;
                break;
            }
            case ControllerKind::pd_qdot: {
                const double e = u(0);
                if (opt.bypass_filters)
                    throw std::runtime_error(
                        "bypass_filters is only defined for inversion controllers");
                beta_raw = gains.kP * e - gains.kD * q - gains.kA * qdot_est;
                beta_cmd = beta_raw;
                break;
            }
            case ControllerKind::indi:
            case ControllerKind::indi_lpf: {
                const double nu = (channel == LoopChannel::nu_to_theta)
                                      ? u(0)
                                      : kPo * u(0) - kDo * q;
                if (opt.bypass_filters) {
                    // Perfect derivative and deflection knowledge collapses the
                    // incremental law to direct inversion of the control torque.
                    const double r = (qdot_free - nu) / mu_inv;
                    beta_raw = std::asin(std::clamp(r, -1.0, 1.0));
                    beta_cmd = beta_raw;
                } else {
                    const double beta0 = sc.use_actuator_beta ? x(i_beta) : x(i_xb0);
                    beta_raw = beta0 - (nu - qdot_est) / mu_inv;
                    beta_cmd = need_lpf ? x(i_xlpf) : beta_raw;
                }
                break;
            }
        }

        const double beta_to_act =
            opt.pade_delay ? (2.0 * x(i_pade) - beta_cmd) : beta_cmd;

        double beta_plant, beta_ddot, beta_dot_d = 0.0;
        if (act) {
            const auto [bd, bdd] = tvc_derivatives({x(i_beta), x(i_bdot)}, beta_to_act);
            beta_plant = x(i_beta);
            beta_dot_d = bd;
            beta_ddot = bdd;
        } else {
            beta_plant = beta_to_act;
            beta_ddot = 0.0;
        }

        const PlantState d = plant_derivatives(
            ps, p, beta_plant, sc.model.twd ? beta_ddot : 0.0, 0.0);

        Eigen::VectorXd dx = Eigen::VectorXd::Zero(n_states);
        dx(i_theta) = d.theta;
        dx(i_q) = d.q;
        if (i_w >= 0) dx(i_w) = d.w;
        if (act) {
            dx(i_beta) = beta_dot_d;
            dx(i_bdot) = beta_ddot;
        }
        if (i_xq >= 0) dx(i_xq) = w_q * (q - x(i_xq));
        if (i_xb0 >= 0) dx(i_xb0) = w_b0 * (beta_cmd - x(i_xb0));
        if (i_xlpf >= 0) dx(i_xlpf) = w_b * (beta_raw - x(i_xlpf));
        if (i_pade >= 0) dx(i_pade) = pade_a * (beta_cmd - x(i_pade));
        return dx;
    };

    auto output = [&](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
        Eigen::VectorXd y(1);
        y(0) = x(i_theta);
        return y;
    };

    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n_states);
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(1);
    return fd_linearize(dynamics, output, x0, u0, opt.fd_step);
}

} // namespace tvcsim
