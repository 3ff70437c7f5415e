#include "risid/ris_model.hpp"

#include "risid/errors.hpp"

#include <cmath>
#include <string>

namespace risid {

void AmplitudeModelParams::validate() const {
    if (!(a_min >= 0.0 && a_min <= 1.0)) {
        throw InvalidArgument("a_min must lie in [0, 1], got " + std::to_string(a_min));
    }
    if (!(delta >= 0.0)) {
        throw InvalidArgument("delta must be >= 0, got " + std::to_string(delta));
    }
    if (!(gamma >= 0.0)) {
        throw InvalidArgument("gamma must be >= 0, got " + std::to_string(gamma));
    }
}

void RisProfile::validate() const {
    const std::string who = "RIS " + std::to_string(ris_id) + ": ";
    amp_params.validate();
    if (n_elements < 1) {
        throw InvalidArgument(who + "n_elements must be >= 1");
    }
    const double a1 = amplitude_of_phase(phases.phi_1, amp_params);
    const double a2 = amplitude_of_phase(phases.phi_2, amp_params);
    if (!(std::abs(a1 - a2) > 0.0)) {
        throw InvalidArgument(who + "phase states give equal amplitudes, nothing to modulate");
    }
    const int m = static_cast<int>(code.length());
    if (offset_c < 0 || offset_c >= m) {
        throw InvalidArgument(who + "offset " + std::to_string(offset_c) + " outside [0, " +
                              std::to_string(m - 1) + "]");
    }
}

double amplitude_of_phase(double phi, const AmplitudeModelParams& params) noexcept {
    const double base = (std::sin(phi - params.delta) + 1.0) / 2.0;
    return (1.0 - params.a_min) * std::pow(base, params.gamma) + params.a_min;
}

AskLevels ask_levels(const PhaseStatePair& phases, const AmplitudeModelParams& params) noexcept {
    return {std::polar(amplitude_of_phase(phases.phi_1, params), phases.phi_1),
            std::polar(amplitude_of_phase(phases.phi_2, params), phases.phi_2)};
}

std::vector<std::complex<double>> reflection_sequence(const RisProfile& profile, int frame_length) {
    const auto& q = profile.code.symbols;
    if (frame_length != static_cast<int>(q.size())) {
        throw InvalidArgument("frame length " + std::to_string(frame_length) + " does not match code length " +
                              std::to_string(q.size()));
    }
    if (profile.offset_c < 0 || profile.offset_c >= frame_length) {
        throw InvalidArgument("offset " + std::to_string(profile.offset_c) + " outside the frame");
    }
    const AskLevels levels = ask_levels(profile.phases, profile.amp_params);
    std::vector<std::complex<double>> out(frame_length);
    for (int m = 0; m < frame_length; ++m) {
        out[m] = q[(profile.offset_c + m) % frame_length] > 0 ? levels.plus : levels.minus;
    }
    return out;
}

} // namespace risid
