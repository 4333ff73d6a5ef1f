#include "tvcsim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvcsim/csv.hpp"

namespace tvcsim {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw std::runtime_error(std::string("non-finite trajectory field: ") + name);
}

} // namespace

void TrajectoryPoint::validate() const {
    const struct {
        double v;
        const char* name;
    } fields[] = {{t, "t"},     {m, "m"},       {J, "J"},
                  {g, "g"},     {T, "T"},       {l_c, "l_c"},
                  {l_alpha, "l_alpha"}, {S, "S"}, {C_N_alpha, "C_N_alpha"},
                  {rho, "rho"}, {V, "V"},       {m_n, "m_n"},
                  {l_n, "l_n"}, {J_n, "J_n"},   {theta0, "theta0"}};
    for (auto& f : fields) require_finite(f.v, f.name);
    if (m <= 0) throw std::runtime_error("trajectory: m must be > 0");
    if (J <= 0) throw std::runtime_error("trajectory: J must be > 0");
    if (V <= 0) throw std::runtime_error("trajectory: V must be > 0");
    if (T < 0) throw std::runtime_error("trajectory: T must be >= 0");
    if (rho < 0) throw std::runtime_error("trajectory: rho must be >= 0");
}

void TrajectoryTable::validate() const {
    if (points.size() < 2)
        throw std::runtime_error("trajectory: need at least 2 nodes");
    for (auto& p : points) p.validate();
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].t > points[i - 1].t))
            throw std::runtime_error("trajectory: non-increasing time");
}

double& UncertaintySet::by_name(std::string_view name) {
    for (std::size_t i = 0; i < kDispersedParams.size(); ++i)
        if (kDispersedParams[i] == name) return multipliers[i];
    throw std::runtime_error("unknown dispersed parameter: " + std::string(name));
}

double UncertaintySet::by_name(std::string_view name) const {
    return const_cast<UncertaintySet*>(this)->by_name(name);
}

double dynamic_pressure(const TrajectoryPoint& p) {
    return 0.5 * p.rho * p.V * p.V;
}

PlantCoefficients plant_coefficients(const TrajectoryPoint& p) {
    const double Q = dynamic_pressure(p);
    const double aero = Q * p.S * p.C_N_alpha;
    PlantCoefficients c;
    c.mu_alpha = p.l_alpha * aero / p.J;
    c.mu_c = p.l_c * p.T / p.J;
    c.mu_n = (p.m_n * p.l_n * p.l_c + p.J_n) / p.J;
    c.n_alpha = aero / p.m;
    c.n_c = p.T / p.m;
    c.n_n = p.m_n * p.l_n / p.m;
    return c;
}

namespace {

TrajectoryPoint lerp(const TrajectoryPoint& a, const TrajectoryPoint& b, double t) {
    const double s = (t - a.t) / (b.t - a.t);
    auto mix = [s](double x, double y) { return x + s * (y - x); };
    TrajectoryPoint p;
    p.t = t;
    p.m = mix(a.m, b.m);
    p.J = mix(a.J, b.J);
    p.g = mix(a.g, b.g);
    p.T = mix(a.T, b.T);
    p.l_c = mix(a.l_c, b.l_c);
    p.l_alpha = mix(a.l_alpha, b.l_alpha);
    p.S = mix(a.S, b.S);
    p.C_N_alpha = mix(a.C_N_alpha, b.C_N_alpha);
    p.rho = mix(a.rho, b.rho);
    p.V = mix(a.V, b.V);
    p.m_n = mix(a.m_n, b.m_n);
    p.l_n = mix(a.l_n, b.l_n);
    p.J_n = mix(a.J_n, b.J_n);
    p.theta0 = mix(a.theta0, b.theta0);
    return p;
}

std::size_t segment_of(const TrajectoryTable& table, double t) {
    const auto& pts = table.points;
    if (t < pts.front().t || t > pts.back().t)
        throw std::out_of_range("trajectory query t out of range");
    auto it = std::upper_bound(pts.begin(), pts.end(), t,
                               [](double v, const TrajectoryPoint& p) { return v < p.t; });
    std::size_t hi = static_cast<std::size_t>(it - pts.begin());
    if (hi == 0) return 0;
    if (hi >= pts.size()) return pts.size() - 2;
    return hi - 1;
}

} // namespace

TrajectoryPoint sample_params(const TrajectoryTable& table, double t) {
    const std::size_t i = segment_of(table, t);
    const auto& a = table.points[i];
    if (t == a.t) return a;
    const auto& b = table.points[i + 1];
    if (t == b.t) return b;
    return lerp(a, b, t);
}

TrajectoryPoint apply_dispersion(const TrajectoryPoint& p, const UncertaintySet& u) {
    TrajectoryPoint q = p;
    q.C_N_alpha *= u.multipliers[0];
    q.l_alpha *= u.multipliers[1];
    q.rho *= u.multipliers[2];
    q.V *= u.multipliers[3];
    q.m *= u.multipliers[4];
    q.J *= u.multipliers[5];
    q.l_c *= u.multipliers[6];
    q.T *= u.multipliers[7];
    return q;
}

std::vector<UncertaintySet> enumerate_corner_cases(double delta) {
    if (delta < 0)
        throw std::invalid_argument("corner-case scale must be >= 0");
    std::vector<UncertaintySet> out;
    out.reserve(256);
    for (unsigned mask = 0; mask < 256; ++mask) {
        UncertaintySet u;
        for (std::size_t i = 0; i < 8; ++i) {
            const double sign = (mask >> i) & 1u ? 1.0 : -1.0;
            u.multipliers[i] = 1.0 + sign * delta * kUncertaintyLevels[i];
        }
        out.push_back(u);
    }
    return out;
}

namespace {

constexpr const char* kTrajectoryColumns[] = {
    "t",   "m",   "J",   "g",   "T",       "l_c", "l_alpha", "S",
    "C_N_alpha", "rho", "V", "m_n", "l_n", "J_n", "theta0"};

} // namespace

TrajectoryTable load_trajectory(const std::string& path) {
    CsvTable csv = read_csv(path);
    std::array<std::size_t, 15> col{};
    for (std::size_t i = 0; i < 15; ++i) col[i] = csv.column(kTrajectoryColumns[i]);

    TrajectoryTable table;
    table.points.reserve(csv.rows.size());
    for (auto& row : csv.rows) {
        TrajectoryPoint p;
        p.t = row[col[0]];
        p.m = row[col[1]];
        p.J = row[col[2]];
        p.g = row[col[3]];
        p.T = row[col[4]];
        p.l_c = row[col[5]];
        p.l_alpha = row[col[6]];
        p.S = row[col[7]];
        p.C_N_alpha = row[col[8]];
        p.rho = row[col[9]];
        p.V = row[col[10]];
        p.m_n = row[col[11]];
        p.l_n = row[col[12]];
        p.J_n = row[col[13]];
        p.theta0 = row[col[14]];
        table.points.push_back(p);
    }
    table.validate();
    return table;
}

void save_trajectory(const TrajectoryTable& table, const std::string& path) {
    std::vector<std::string> header(std::begin(kTrajectoryColumns),
                                    std::end(kTrajectoryColumns));
    CsvWriter out(path, header);
    for (auto& p : table.points)
        out.row({p.t, p.m, p.J, p.g, p.T, p.l_c, p.l_alpha, p.S, p.C_N_alpha, p.rho,
                 p.V, p.m_n, p.l_n, p.J_n, p.theta0});
    out.close();
}

TrajectoryTable synth_reference_trajectory(double duration_s, double node_spacing_s) {
    if (!(duration_s > 0))
        throw std::invalid_argument("trajectory duration must be > 0");
    if (!(node_spacing_s > 0))
        throw std::invalid_argument("trajectory node spacing must be > 0");

    constexpr double deg = M_PI / 180.0;
    const double m0 = 60000.0;   // kg, mass at window start
    const double mdot = 420.0;   // kg/s, constant burn rate
    const double J0 = 5.0e6;     // kg m^2 at window start

    const std::size_t n = static_cast<std::size_t>(std::ceil(duration_s / node_spacing_s));
    TrajectoryTable table;
    table.points.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = std::min(i * node_spacing_s, duration_s);
        TrajectoryPoint p;
        p.t = t;
        p.m = m0 - mdot * t;
        p.J = J0 * (0.55 + 0.45 * p.m / m0);
        p.g = 9.81;
        p.T = 900.0e3;
        // Density falls with altitude ~ t^2 under near-constant acceleration;
        // V grows quadratically, so Q = rho V^2 / 2 peaks once, late in the
        // window. The window is the atmospheric phase, entered already
        // supersonic: mu_alpha stays within ~[0.25, 0.95] 1/s^2 at every
        // node, where all four control designs are well posed (in particular
        // the fixed-DC-gain rule keeps 1 - mu_c kA = 3.2 mu_alpha healthy).
        p.rho = 1.225 * std::exp(-t * t / 3600.0);
        p.V = 250.0 + 0.1 * t * t;
        p.S = 2.5;
        // Normal-force slope bumps near transonic passage.
        const double x = (t - 45.0) / 18.0;
        p.C_N_alpha = 4.5 + 0.6 * std::exp(-x * x);
        p.l_alpha = 3.0 + 0.01 * t;
        p.l_c = 8.0 + 0.025 * t;
        p.m_n = 300.0;
        p.l_n = 1.2;
        p.J_n = 600.0;
        p.theta0 = (90.0 - 45.0 * t / duration_s) * deg;
        table.points.push_back(p);
    }
    table.validate();
    return table;
}

ParamSampler::ParamSampler(const TrajectoryTable& table) : table_(&table) {
    table.validate();
}

TrajectoryPoint ParamSampler::at(double t) const {
    const auto& pts = table_->points;
    if (t < pts.front().t || t > pts.back().t)
        throw std::out_of_range("trajectory query t out of range");
    // Fast path: stay on or step forward from the cached segment.
    while (cursor_ + 2 < pts.size() && t >= pts[cursor_ + 1].t) ++cursor_;
    if (t < pts[cursor_].t) {
        while (cursor_ > 0 && t < pts[cursor_].t) --cursor_;
    }
    const auto& a = pts[cursor_];
    const auto& b = pts[cursor_ + 1];
    if (t == a.t) return a;
    if (t == b.t) return b;
    return lerp(a, b, t);
}

} // namespace tvcsim
