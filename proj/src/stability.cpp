#include "tvcsim/stability.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tvcsim/csv.hpp"

namespace tvcsim {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kDeg = 180.0 / M_PI;

// Winding/crossing searches run on this internal grid so that crossings
// outside a caller's export grid are still found.
constexpr double kScanLo = 1e-6;
constexpr double kScanHi = 1e6;
constexpr int kScanPoints = 961; // 80 per decade

// Eigenvalues with |lambda| below this count as origin poles; the loops
// analyzed here have no physical poles that slow (the slowest is the wind
// filter pole at 0.32 rad/s), while finite-difference noise on structural
// integrators stays orders of magnitude smaller.
constexpr double kOriginTol = 1e-4;

double principal(double rad) {
    return std::remainder(rad, kTwoPi);
}

// Fold to [-180, 180).
double fold_deg(double deg) {
    return deg - 360.0 * std::floor((deg + 180.0) / 360.0);
}

struct Samples {
    std::vector<double> w;
    std::vector<std::complex<double>> H;
    std::vector<double> mag_db;
    std::vector<double> phase; // rad, unwrapped; start normalized to (-pi, pi]
};

double unwrap_onto(double raw, double reference) {
    return raw + kTwoPi * std::round((reference - raw) / kTwoPi);
}

Samples build_samples(const std::vector<double>& grid,
                      const std::vector<std::complex<double>>& H) {
    Samples s;
    s.w = grid;
    s.H = H;
    s.mag_db.resize(grid.size());
    s.phase.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s.mag_db[i] = 20.0 * std::log10(std::abs(H[i]));
        double ph = std::arg(H[i]);
        if (i == 0) {
            // A start on the negative real axis is -180, not +180.
            if (ph > M_PI - 1e-12) ph -= kTwoPi;
        } else {
            ph = unwrap_onto(ph, s.phase[i - 1]);
        }
        s.phase[i] = ph;
    }
    return s;
}

Samples sample_fn(const std::function<std::complex<double>(double)>& G,
                  const std::vector<double>& grid) {
    std::vector<std::complex<double>> H;
    H.reserve(grid.size());
    for (double w : grid) H.push_back(G(w));
    return build_samples(grid, H);
}

struct Crossing {
    double w;
    double mag_db;
    double phase; // rad, unwrapped
};

// Bisection in log-frequency on value(w) - target, where value is either the
// magnitude in dB or the unwrapped phase. Phase continuity at midpoints is
// kept by unwrapping onto the current bracket mean.
Crossing refine(const std::function<std::complex<double>(double)>& G, double wa,
                double va, double pha, double wb, double vb, double phb,
                bool on_phase, double target) {
    for (int it = 0; it < 120; ++it) {
        const double wm = std::sqrt(wa * wb);
        const std::complex<double> Hm = G(wm);
        const double mag = 20.0 * std::log10(std::abs(Hm));
        const double ph = unwrap_onto(std::arg(Hm), 0.5 * (pha + phb));
        const double vm = on_phase ? ph : mag;
        if (wm <= wa || wm >= wb) {
            return {wm, mag, ph};
        }
        if ((va - target) * (vm - target) > 0) {
            wa = wm;
            va = vm;
            pha = ph;
        } else {
            wb = wm;
            vb = vm;
            phb = ph;
        }
    }
    (void)vb;
    const double wm = std::sqrt(wa * wb);
    const std::complex<double> Hm = G(wm);
    return {wm, 20.0 * std::log10(std::abs(Hm)),
            unwrap_onto(std::arg(Hm), 0.5 * (pha + phb))};
}

// Accumulated argument sweep of 1 + L over [wa, wb], subdividing until each
// chord turns by less than 0.5 rad.
double arg_sweep(const std::function<std::complex<double>(double)>& G, double wa,
                 std::complex<double> Fa, double wb, std::complex<double> Fb,
                 int depth) {
    const double d = principal(std::arg(Fb) - std::arg(Fa));
    if (depth <= 0 || std::abs(d) <= 0.5) return d;
    const double wm = std::sqrt(wa * wb);
    const std::complex<double> Fm = 1.0 + G(wm);
    return arg_sweep(G, wa, Fa, wm, Fm, depth - 1) +
           arg_sweep(G, wm, Fm, wb, Fb, depth - 1);
}

bool nyquist_stable(const std::function<std::complex<double>(double)>& G,
                    const Samples& s, int rhp_poles, int origin_poles) {
    double sweep = 0.0;
    std::complex<double> Fa = 1.0 + s.H.front();
    for (std::size_t i = 0; i + 1 < s.w.size(); ++i) {
        const std::complex<double> Fb = 1.0 + s.H[i + 1];
        sweep += arg_sweep(G, s.w[i], Fa, s.w[i + 1], Fb, 36);
        Fa = Fb;
    }
    // Close toward F(inf) = 1 + L(inf); strictly proper loops end at arg 0.
    sweep += -principal(std::arg(Fa));
    const double total = 2.0 * sweep - origin_poles * M_PI;
    const long n_ccw = std::lround(total / kTwoPi);
    const long z = rhp_poles - n_ccw;
    return z == 0;
}

MarginResult margins_impl(const std::function<std::complex<double>(double)>& G,
                          const Samples& s, int rhp_poles, int origin_poles,
                          bool can_refine) {
    MarginResult r;

    auto note_gain_crossing = [&](double w, double phase) {
        const double pm = fold_deg(180.0 + phase * kDeg);
        r.gain_crossings.emplace_back(w, pm);
        if (!(pm >= r.pm_deg)) { // also replaces the +inf sentinel
            r.pm_deg = pm;
            r.wgc = w;
        }
    };
    auto note_phase_crossing = [&](double w, double mag_db) {
        const double gm = -mag_db;
        r.phase_crossings.emplace_back(w, gm);
        if (!(gm >= r.gm_db)) {
            r.gm_db = gm;
            r.wpc = w;
        }
    };

    const std::size_t n = s.w.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (s.mag_db[i] == 0.0) note_gain_crossing(s.w[i], s.phase[i]);
        if (i + 1 >= n) break;
        if (s.mag_db[i] * s.mag_db[i + 1] < 0.0) {
            if (can_refine) {
                const Crossing c = refine(G, s.w[i], s.mag_db[i], s.phase[i],
                                          s.w[i + 1], s.mag_db[i + 1], s.phase[i + 1],
                                          false, 0.0);
                note_gain_crossing(c.w, c.phase);
            } else {
                const double f = s.mag_db[i] / (s.mag_db[i] - s.mag_db[i + 1]);
                const double lw =
                    std::log(s.w[i]) + f * (std::log(s.w[i + 1]) - std::log(s.w[i]));
                note_gain_crossing(std::exp(lw),
                                   s.phase[i] + f * (s.phase[i + 1] - s.phase[i]));
            }
        }
    }

    auto level_index = [](double phase) {
        return std::floor((phase + M_PI) / kTwoPi);
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double ua = (s.phase[i] + M_PI) / kTwoPi;
        if (ua == std::round(ua)) // exact grid hit of the negative real axis
            note_phase_crossing(s.w[i], s.mag_db[i]);
        const double fa = level_index(s.phase[i]);
        const double fb = level_index(s.phase[i + 1]);
        if (fa == fb) continue;
        const double lo = std::min(fa, fb), hi = std::max(fa, fb);
        for (double k = lo + 1.0; k <= hi; k += 1.0) {
            const double target = -M_PI + kTwoPi * k;
            if (can_refine) {
                const Crossing c = refine(G, s.w[i], s.phase[i], s.phase[i],
                                          s.w[i + 1], s.phase[i + 1], s.phase[i + 1],
                                          true, target);
                note_phase_crossing(c.w, c.mag_db);
            } else {
                const double f =
                    (target - s.phase[i]) / (s.phase[i + 1] - s.phase[i]);
                const double lw =
                    std::log(s.w[i]) + f * (std::log(s.w[i + 1]) - std::log(s.w[i]));
                note_phase_crossing(std::exp(lw),
                                    s.mag_db[i] + f * (s.mag_db[i + 1] - s.mag_db[i]));
            }
        }
    }
    {
        const double ub = (s.phase[n - 1] + M_PI) / kTwoPi;
        if (ub == std::round(ub)) note_phase_crossing(s.w[n - 1], s.mag_db[n - 1]);
    }

    r.stable = nyquist_stable(G, s, rhp_poles, origin_poles);
    return r;
}

LoopModel classify_poles(const LinearSystem& sys) {
    LoopModel loop;
    const Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A, false);
    for (long i = 0; i < sys.A.rows(); ++i) {
        const std::complex<double> ev = es.eigenvalues()(i);
        if (std::abs(ev) <= kOriginTol)
            ++loop.origin_poles;
        else if (ev.real() > 0.0)
            ++loop.rhp_poles;
    }
    return loop;
}

} // namespace

LoopModel loop_from_tf(const TransferFunction& L) {
    LoopModel loop;
    std::vector<double> den = L.den;
    while (den.size() > 1 && den.back() == 0.0) {
        den.pop_back();
        ++loop.origin_poles;
    }
    for (const auto& root : poly_roots(den))
        if (root.real() > 1e-9 * (1.0 + std::abs(root))) ++loop.rhp_poles;
    TransferFunction tf = L;
    loop.G = [tf](double w) { return tf.eval(std::complex<double>(0.0, w)); };
    return loop;
}

LoopModel indi_outer_loop(const LinearSystem& nu_to_theta, const TuningSpec& tuning) {
    LoopModel loop = classify_poles(nu_to_theta);
    const double kP = tuning.omega_theta * tuning.omega_theta;
    const double kD = 2.0 * tuning.zeta * tuning.omega_theta;
    const LinearSystem sys = nu_to_theta;
    loop.G = [sys, kP, kD](double w) {
        return std::complex<double>(kP, kD * w) * sys.eval(w);
    };
    return loop;
}

LoopModel error_loop(const LinearSystem& thetaerr_to_theta) {
    LoopModel loop = classify_poles(thetaerr_to_theta);
    const LinearSystem sys = thetaerr_to_theta;
    loop.G = [sys](double w) { return sys.eval(w); };
    return loop;
}

MarginResult gain_phase_margins(const LoopModel& loop) {
    const Samples s = sample_fn(loop.G, log_grid(kScanLo, kScanHi, kScanPoints));
    return margins_impl(loop.G, s, loop.rhp_poles, loop.origin_poles, true);
}

MarginResult gain_phase_margins(const FrequencyResponse& response, int rhp_poles,
                                int origin_poles) {
    if (response.omega.size() < 2)
        throw std::invalid_argument("margin estimate needs at least 2 samples");
    const Samples s = build_samples(response.omega, response.H);
    // Interpolation only: the winding subdivision falls back to straight
    // chords between the given samples.
    auto G = [&s](double w) -> std::complex<double> {
        auto it = std::lower_bound(s.w.begin(), s.w.end(), w);
        if (it == s.w.begin()) return s.H.front();
        if (it == s.w.end()) return s.H.back();
        const std::size_t i = static_cast<std::size_t>(it - s.w.begin());
        const double f = (std::log(w) - std::log(s.w[i - 1])) /
                         (std::log(s.w[i]) - std::log(s.w[i - 1]));
        return s.H[i - 1] + f * (s.H[i] - s.H[i - 1]);
    };
    return margins_impl(G, s, rhp_poles, origin_poles, false);
}

std::vector<std::pair<double, double>> nichols_data(const FrequencyResponse& response) {
    const Samples s = build_samples(response.omega, response.H);
    std::vector<std::pair<double, double>> out;
    out.reserve(s.w.size());
    for (std::size_t i = 0; i < s.w.size(); ++i)
        out.emplace_back(s.phase[i] * kDeg, s.mag_db[i]);
    return out;
}

std::vector<MarginCell> margin_sweep(const SimScenario& tmpl,
                                     const std::vector<SweepCase>& cases,
                                     const std::vector<double>& times,
                                     const LinearizeOptions& opt) {
    const bool is_indi = tmpl.controller == ControllerKind::indi ||
                         tmpl.controller == ControllerKind::indi_lpf;
    std::vector<MarginCell> cells;
    cells.reserve(cases.size() * times.size());
    for (const auto& c : cases) {
        SimScenario sc = tmpl;
        sc.dispersion = c.u;
        for (double t : times) {
            MarginCell cell;
            cell.case_id = c.id;
            cell.t = t;
            try {
                const LinearSystem sys = linearize_closed_loop(
                    sc, t,
                    is_indi ? LoopChannel::nu_to_theta : LoopChannel::thetaerr_to_theta,
                    opt);
                const LoopModel loop =
                    is_indi ? indi_outer_loop(sys, sc.tuning) : error_loop(sys);
                cell.m = gain_phase_margins(loop);
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void save_margin_sweep(const std::vector<MarginCell>& cells, const std::string& path) {
    CsvWriter out(path, {"t", "case_id", "pm_deg", "gm_db", "wgc", "wpc", "stable"});
    const double nan = std::nan("");
    for (const auto& c : cells) {
        if (c.ok)
            out.row({c.t, static_cast<double>(c.case_id), c.m.pm_deg, c.m.gm_db,
                     c.m.wgc, c.m.wpc, c.m.stable ? 1.0 : 0.0});
        else
            out.row({c.t, static_cast<double>(c.case_id), nan, nan, nan, nan, 0.0});
    }
    out.close();
}

std::vector<SweepSummaryRow> summarize_margin_sweep(const std::vector<MarginCell>& cells) {
    std::map<double, SweepSummaryRow> by_time;
    for (const auto& c : cells) {
        SweepSummaryRow& row = by_time[c.t];
        row.t = c.t;
        if (!c.ok) {
            ++row.n_failed;
            continue;
        }
        row.min_pm_deg = std::min(row.min_pm_deg, c.m.pm_deg);
        row.min_gm_db = std::min(row.min_gm_db, c.m.gm_db);
        if (!c.m.stable) ++row.n_unstable;
    }
    std::vector<SweepSummaryRow> rows;
    rows.reserve(by_time.size());
    for (auto& [t, row] : by_time) rows.push_back(row);
    return rows;
}

} // namespace tvcsim
