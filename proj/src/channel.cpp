#include "risid/channel.hpp"

#include "risid/errors.hpp"

#include <cmath>
#include <string>

namespace risid {

ChannelMode parse_channel_mode(std::string_view text) {
    if (text == "reciprocal") {
        return ChannelMode::reciprocal;
    }
    if (text == "independent") {
        return ChannelMode::independent;
    }
    throw InvalidArgument("unknown channel mode '" + std::string(text) + "' (expected reciprocal or independent)");
}

std::string_view to_string(ChannelMode mode) noexcept {
    return mode == ChannelMode::reciprocal ? "reciprocal" : "independent";
}

double mean_cascade_power(int n_elements, ChannelMode mode) noexcept {
    return mode == ChannelMode::reciprocal ? 2.0 * n_elements : static_cast<double>(n_elements);
}

std::complex<double> cascade_from_elements(std::span<const std::complex<double>> h) {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& hn : h) {
        acc += hn * hn;
    }
    return acc;
}

std::complex<double> cascade_from_elements(std::span<const std::complex<double>> g,
                                           std::span<const std::complex<double>> h) {
    if (g.size() != h.size()) {
        throw InvalidArgument("channel legs differ in length");
    }
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < h.size(); ++n) {
        acc += g[n] * h[n];
    }
    return acc;
}

ChannelRealization draw_cascade(int n_elements, ChannelMode mode, CounterRng& rng) {
    if (n_elements < 1) {
        throw InvalidArgument("n_elements must be >= 1, got " + std::to_string(n_elements));
    }
    std::vector<std::complex<double>> h(n_elements);
    for (auto& hn : h) {
        hn = complex_gaussian(rng);
    }
    if (mode == ChannelMode::reciprocal) {
        return {cascade_from_elements(h), mode};
    }
    std::vector<std::complex<double>> g(n_elements);
    for (auto& gn : g) {
        gn = complex_gaussian(rng);
    }
    return {cascade_from_elements(g, h), mode};
}

ComplexFrame synthesize_frame(std::span<const RisProfile> profiles, std::span<const ChannelRealization> channels,
                              const FrameSynthesisConfig& config, CounterRng& noise_rng) {
    if (profiles.size() != channels.size()) {
        throw InvalidArgument("need one channel per RIS profile: " + std::to_string(profiles.size()) +
                              " profiles, " + std::to_string(channels.size()) + " channels");
    }
    if (config.frame_length < 1) {
        throw InvalidArgument("frame length must be >= 1");
    }
    if (!(config.noise_power >= 0.0)) {
        throw InvalidArgument("noise power must be >= 0");
    }
    const int m_len = config.frame_length;
    ComplexFrame y(m_len, config.leakage);
    for (std::size_t l = 0; l < profiles.size(); ++l) {
        const RisProfile& ris = profiles[l];
        if (static_cast<int>(ris.code.length()) != m_len) {
            throw InvalidArgument("RIS " + std::to_string(ris.ris_id) + " code length " +
                                  std::to_string(ris.code.length()) + " != frame length " + std::to_string(m_len));
        }
        if (!ris.reachable) {
            continue;
        }
        const auto coeffs = reflection_sequence(ris, m_len);
        const std::complex<double> gain = config.carrier_amplitude * channels[l].h_tilde;
        for (int m = 0; m < m_len; ++m) {
            y[m] += coeffs[m] * gain;
        }
    }
    add_awgn(y, config.noise_power, noise_rng);
    return y;
}

void add_awgn(std::span<std::complex<double>> samples, double noise_power, CounterRng& rng) {
    if (noise_power <= 0.0) {
        return;
    }
    for (auto& s : samples) {
        s += complex_gaussian(rng, noise_power);
    }
}

} // namespace risid
