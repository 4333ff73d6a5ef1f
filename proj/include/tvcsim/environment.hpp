// Wind turbulence and imperfection models: first-order colored wind noise,
// gyro/attitude measurement noise, TVC command delay line.
#pragma once

#include <cstdint>
#include <vector>

#include "tvcsim/rng.hpp"

namespace tvcsim {

// Wind shaping filter 3.54/(s + 0.32), DC gain 11.0625.
inline constexpr double kWindPole = 0.32;     // rad/s
inline constexpr double kWindNumerator = 3.54;
inline constexpr double kWindDcGain = kWindNumerator / kWindPole;

// Per-sample input sigma that makes the stationary output sigma of the
// ZOH-discretized filter equal sigma_out when stepped at period dt.
double dryden_input_sigma(double sigma_out, double dt);

// Colored wind noise v_w. The continuous filter is discretized exactly for
// zero-order-hold inputs: x+ = phi x + dc (1 - phi) u, phi = exp(-0.32 dt).
class DrydenFilter {
public:
    // sigma_out: stationary standard deviation of v_w in m/s (0 disables).
    DrydenFilter(double sigma_out, std::uint64_t seed)
        : rng_(seed), sigma_out_(sigma_out) {}

    // Draws one white-noise sample, advances by dt, returns v_w.
    double step(double dt);

    // Advances with a caller-supplied unit input (deterministic tests).
    double step_with_input(double u, double dt);

    double output() const { return x_; }

private:
    GaussianStream rng_;
    double sigma_out_;
    double x_ = 0.0;
};

// q_true + n with n ~ Normal(0, (three_sigma/3)^2). Draws exactly one sample.
double gyro_measure(double q_true, double three_sigma, GaussianStream& rng);

// Fixed-depth FIFO for the TVC command path, pre-filled with zeros.
// Depth 0 passes the input through in the same call.
class DelayLine {
public:
    explicit DelayLine(int depth_samples);

    // Pushes the new command, returns the depth-samples-old one.
    double push_pop(double value);

    int depth() const { return static_cast<int>(buffer_.size()); }

private:
    std::vector<double> buffer_;
    std::size_t head_ = 0;
};

} // namespace tvcsim
