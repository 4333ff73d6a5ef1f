#pragma once

#include <string>

#include "tvcsim/dynamics.hpp"

namespace tvcsim {

// Synthetic reference trajectory, INDI with output low-pass, wind on, clean
// sensors, no delay, full 80 s flight.
SimScenario default_scenario();

// Validating JSON loader. Every section and key is optional and falls back to
// the default_scenario() value; unknown keys anywhere are rejected. Relative
// trajectory paths resolve against base_dir (for load_scenario, the config
// file's directory).
//
// Schema (values shown are the defaults):
// {
//   "trajectory": {"path": "traj.csv"}            // or:
//                 {"synthetic": {"duration": 80, "spacing": 1}},
//   "controller": {"kind": "indi_lpf",            // pd|pd_qdot|indi|indi_lpf
//                  "use_actuator_beta": false},
//   "tuning":     {"omega_theta": 2.5, "zeta": 0.8, "G0": 1.05,
//                  "omega_qdot": 15, "omega_beta": 10, "omega_beta0": 30,
//                  "nodes": 9},
//   "wind":       {"enabled": true, "sigma": 3.0, "seed": 1},
//   "sensors":    {"gyro_3sigma_dps": 0, "attitude_3sigma_deg": 0},
//   "delays":     {"tvc_samples": 0},
//   "rates":      {"f_gnc": 25, "f_wind": 20, "f_int": 500},
//   "command":    {"step_time": 0, "step_amplitude_deg": 0},
//   "seeds":      {"master": 0},
//   "model":      {"actuator": true, "twd": true, "drift": true,
//                  "limits": false},
//   "duration":   80
// }
SimScenario scenario_from_json_text(const std::string& text,
                                    const std::string& base_dir = ".");

SimScenario load_scenario(const std::string& path);

} // namespace tvcsim
