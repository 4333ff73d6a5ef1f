// Time-tagged vehicle and environment parameters, linear interpolation along
// the flight, dispersion multipliers, and corner-case enumeration.
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tvcsim {

struct TrajectoryPoint {
    double t = 0;         // s
    double m = 0;         // kg
    double J = 0;         // kg m^2, lateral inertia
    double g = 9.81;      // m/s^2
    double T = 0;         // N, thrust
    double l_c = 0;       // m, nozzle pivot to CG
    double l_alpha = 0;   // m, center of pressure to CG
    double S = 0;         // m^2, reference area
    double C_N_alpha = 0; // 1/rad
    double rho = 0;       // kg/m^3
    double V = 0;         // m/s
    double m_n = 0;       // kg, nozzle mass
    double l_n = 0;       // m, nozzle CG offset from pivot
    double J_n = 0;       // kg m^2, nozzle inertia about pivot
    double theta0 = 0;    // rad, trim pitch for linear models

    // Throws std::runtime_error naming the offending field.
    void validate() const;
};

struct TrajectoryTable {
    std::vector<TrajectoryPoint> points;

    double start_time() const { return points.front().t; }
    double end_time() const { return points.back().t; }
    double duration() const { return end_time() - start_time(); }

    // Strictly increasing t, >= 2 points, every point valid.
    void validate() const;
};

// Parameters subject to dispersion, in the fixed enumeration order
// (aero group first, then mass/propulsion).
inline constexpr std::array<std::string_view, 8> kDispersedParams = {
    "C_N_alpha", "l_alpha", "rho", "V", "m", "J", "l_c", "T"};

// Relative uncertainty level per parameter: 20% aero, 10% mass/propulsion.
inline constexpr std::array<double, 8> kUncertaintyLevels = {
    0.20, 0.20, 0.20, 0.20, 0.10, 0.10, 0.10, 0.10};

struct UncertaintySet {
    // multipliers[i] scales kDispersedParams[i].
    std::array<double, 8> multipliers{1, 1, 1, 1, 1, 1, 1, 1};

    static UncertaintySet identity() { return {}; }
    double& by_name(std::string_view name);
    double by_name(std::string_view name) const;
};

struct PlantCoefficients {
    double mu_alpha = 0; // 1/s^2, aero moment per alpha over J
    double mu_c = 0;     // 1/s^2, TVC moment authority over J
    double mu_n = 0;     // -, tail-wags-dog moment per beta_ddot over J
    double n_alpha = 0;  // m/s^2, aero force per alpha over m
    double n_c = 0;      // m/s^2, TVC force authority over m
    double n_n = 0;      // m, tail-wags-dog force per beta_ddot over m
};

// mu_alpha = l_alpha Q S C_N_alpha / J, mu_c = l_c T / J,
// mu_n = (m_n l_n l_c + J_n) / J, n_alpha = Q S C_N_alpha / m,
// n_c = T / m, n_n = m_n l_n / m, with Q = rho V^2 / 2.
PlantCoefficients plant_coefficients(const TrajectoryPoint& p);

double dynamic_pressure(const TrajectoryPoint& p);

// Componentwise linear interpolation; exact at nodes; throws out of range.
TrajectoryPoint sample_params(const TrajectoryTable& table, double t);

// Multiplies the 8 dispersed parameters; all other fields unchanged.
TrajectoryPoint apply_dispersion(const TrajectoryPoint& p, const UncertaintySet& u);

// All 2^8 corner cases at multipliers 1 +/- delta * level, ordered by binary
// counting over kDispersedParams (bit i low -> 1 - delta*level_i).
std::vector<UncertaintySet> enumerate_corner_cases(double delta);

// CSV schema: t,m,J,g,T,l_c,l_alpha,S,C_N_alpha,rho,V,m_n,l_n,J_n,theta0.
TrajectoryTable load_trajectory(const std::string& path);
void save_trajectory(const TrajectoryTable& table, const std::string& path);

// Smooth 80 s reference ascent: monotone m and J, constant T, falling rho,
// rising V, single interior max-Q, pitch-over from 90 to 45 deg.
TrajectoryTable synth_reference_trajectory(double duration_s = 80.0,
                                           double node_spacing_s = 1.0);

// Interpolates a pre-dispersed table with a cached segment cursor. Queries
// with nondecreasing t advance in O(1); arbitrary t still works.
class ParamSampler {
public:
    explicit ParamSampler(const TrajectoryTable& table);
    TrajectoryPoint at(double t) const;

private:
    const TrajectoryTable* table_;
    mutable std::size_t cursor_ = 0;
};

} // namespace tvcsim
