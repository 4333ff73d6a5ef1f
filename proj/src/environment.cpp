#include "tvcsim/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace tvcsim {

double dryden_input_sigma(double sigma_out, double dt) {
    const double phi = std::exp(-kWindPole * dt);
    const double gamma = kWindDcGain * (1.0 - phi);
    // Stationary variance of x+ = phi x + gamma u: sigma_x^2 = gamma^2 su^2/(1-phi^2).
    return sigma_out * std::sqrt(1.0 - phi * phi) / gamma;
}

double DrydenFilter::step(double dt) {
    if (!(dt > 0))
        throw std::invalid_argument("wind step dt must be > 0");
    const double u = dryden_input_sigma(sigma_out_, dt) * rng_.next();
    const double phi = std::exp(-kWindPole * dt);
    x_ = phi * x_ + kWindDcGain * (1.0 - phi) * u;
    return x_;
}

double DrydenFilter::step_with_input(double u, double dt) {
    if (!(dt > 0))
        throw std::invalid_argument("wind step dt must be > 0");
    const double phi = std::exp(-kWindPole * dt);
    x_ = phi * x_ + kWindDcGain * (1.0 - phi) * u;
    return x_;
}

double gyro_measure(double q_true, double three_sigma, GaussianStream& rng) {
    return q_true + (three_sigma / 3.0) * rng.next();
}

DelayLine::DelayLine(int depth_samples) {
    if (depth_samples < 0)
        throw std::invalid_argument("delay depth must be >= 0");
    buffer_.assign(static_cast<std::size_t>(depth_samples), 0.0);
}

double DelayLine::push_pop(double value) {
    if (buffer_.empty()) return value;
    const double out = buffer_[head_];
    buffer_[head_] = value;
    head_ = (head_ + 1) % buffer_.size();
    return out;
}

} // namespace tvcsim
