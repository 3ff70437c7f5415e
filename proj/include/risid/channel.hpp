#pragma once

// Cascaded UE -> RIS -> UE channel draws and received-frame synthesis.

#include "risid/rng.hpp"
#include "risid/ris_model.hpp"

#include <complex>
#include <span>
#include <string_view>
#include <vector>

namespace risid {

using ComplexFrame = std::vector<std::complex<double>>;

enum class ChannelMode {
    reciprocal,  // h_tilde = sum_n h_n^2, same vector on both legs
    independent, // h_tilde = sum_n g_n h_n, independent legs
};

ChannelMode parse_channel_mode(std::string_view text);
std::string_view to_string(ChannelMode mode) noexcept;

// E|h_tilde|^2 for unit-variance element gains: 2N reciprocal, N independent.
double mean_cascade_power(int n_elements, ChannelMode mode) noexcept;

struct ChannelRealization {
    std::complex<double> h_tilde{1.0, 0.0};
    ChannelMode mode = ChannelMode::reciprocal;
};

struct FrameSynthesisConfig {
    double carrier_amplitude = 1.0;
    double noise_power = 0.0; // linear, per collected symbol
    std::complex<double> leakage{0.0, 0.0};
    int frame_length = 16;
};

std::complex<double> cascade_from_elements(std::span<const std::complex<double>> h);
std::complex<double> cascade_from_elements(std::span<const std::complex<double>> g,
                                           std::span<const std::complex<double>> h);

ChannelRealization draw_cascade(int n_elements, ChannelMode mode, CounterRng& rng);

// y_m = x * sum_l a_m e^{j phi_m} h_l mu_l + leakage + n_m.
// Noise is drawn from `noise_rng` only; unreachable profiles are skipped
// entirely, so their code and channel have no influence on the output.
ComplexFrame synthesize_frame(std::span<const RisProfile> profiles, std::span<const ChannelRealization> channels,
                              const FrameSynthesisConfig& config, CounterRng& noise_rng);

// Adds independent CN(0, noise_power) samples in place.
void add_awgn(std::span<std::complex<double>> samples, double noise_power, CounterRng& rng);

} // namespace risid
