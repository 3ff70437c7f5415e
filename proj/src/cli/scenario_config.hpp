#pragma once

#include "risid/errors.hpp"
#include "risid/montecarlo.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace risid::cli {

// Bad command line or scenario file; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

// Scenario file, INI syntax:
//
//   [scenario]  name, code_length, trials, seed, thr_norm,
//               offset_range (full | nonzero), workers, out
//   [frame]     carrier_amplitude, noise_power | snr_db, channel_mode
//               (reciprocal | independent), leakage_re, leakage_im
//   [ris<k>]    one section per RIS, k = 1..L: n_elements, reachable,
//               a_min, delta, gamma, phi_1, phi_2, code_row,
//               offset (random | integer)
//
// Angles are radians and may be written as a multiple of pi ("0.43pi").
// Unknown sections or keys are rejected.
struct ScenarioConfig {
    ScenarioSpec spec;
    std::optional<int> workers;
    std::optional<std::filesystem::path> out;
};

ScenarioConfig parse_scenario_config(std::istream& in, const std::string& source);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

double parse_angle(const std::string& text);

} // namespace risid::cli
