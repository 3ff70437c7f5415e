#pragma once

// Phase-dependent reflection amplitude of an RIS element and the per-symbol
// reflection coefficients that imprint an ARP on the reflected carrier.

#include "risid/codebook.hpp"

#include <complex>
#include <numbers>
#include <vector>

namespace risid {

struct AmplitudeModelParams {
    double a_min = 0.2;
    double delta = 0.43 * std::numbers::pi; // radians
    double gamma = 1.6;

    // Throws InvalidArgument when a_min is outside [0, 1] or delta/gamma < 0.
    void validate() const;
};

struct PhaseStatePair {
    double phi_1 = 0.0; // applied where the code symbol is +1
    double phi_2 = 0.0; // applied where the code symbol is -1

    // States at the peak and trough of the amplitude curve.
    static PhaseStatePair widest(const AmplitudeModelParams& params) noexcept {
        return {params.delta + std::numbers::pi / 2, params.delta - std::numbers::pi / 2};
    }
};

struct RisProfile {
    int ris_id = 1;
    int n_elements = 76;
    bool reachable = true;
    AmplitudeModelParams amp_params;
    PhaseStatePair phases = PhaseStatePair::widest(AmplitudeModelParams{});
    ArpCode code;
    int offset_c = 0; // index of the code symbol on the first collected symbol

    // Checks parameter ranges, distinct ASK levels and offset_c < M.
    void validate() const;
};

// (1 - a_min) * ((sin(phi - delta) + 1) / 2)^gamma + a_min
double amplitude_of_phase(double phi, const AmplitudeModelParams& params) noexcept;

// The two complex reflection coefficients a(phi) * exp(j phi).
struct AskLevels {
    std::complex<double> plus;  // code symbol +1
    std::complex<double> minus; // code symbol -1
};

AskLevels ask_levels(const PhaseStatePair& phases, const AmplitudeModelParams& params) noexcept;

// Entry m (0-based) is the coefficient for code symbol (offset_c + m) mod M.
std::vector<std::complex<double>> reflection_sequence(const RisProfile& profile, int frame_length);

} // namespace risid
