#pragma once

// Non-coherent RIS detection: amplitude extraction, zero-centering, and a
// maximum over cyclic shifts of the squared normalized correlation against a
// candidate ARP.

#include "risid/codebook.hpp"

#include <complex>
#include <span>
#include <vector>

namespace risid {

// Zero-mean real amplitude frame. The public constructor enforces the
// zero-sum invariant to within 1e-9 * M * max|sample|.
class CenteredFrame {
public:
    explicit CenteredFrame(std::vector<double> samples);

    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }

private:
    struct Centered {};
    // Output of extract_and_center: centered relative to max|y|, which can be
    // far larger than max|y~| under strong leakage.
    CenteredFrame(Centered, std::vector<double> samples) noexcept : samples_(std::move(samples)) {}
    friend CenteredFrame extract_and_center(std::span<const std::complex<double>> y);

    std::vector<double> samples_;
};

// |y_m| minus the frame mean of |y|. The mean is summed in sorted order so it
// does not depend on where the frame starts.
CenteredFrame extract_and_center(std::span<const std::complex<double>> y);

struct CorrelationValue {
    double d = 0.0; // normalized correlation
    double D = 0.0; // d^2
};

struct DetectionReport {
    int ris_id = 0;
    double d_max = 0.0;
    int best_shift = 0;
    bool decided_reachable = false;
    double threshold_used = 0.0;
};

// Correlation against the code circularly shifted right by `shift`
// (shifted[m] = q[(m - shift) mod M]). Terms are accumulated in code-index
// order, d = sum_k q[k] * y~[(k + shift) mod M] / sqrt(M), so rotating the
// frame and the shift together reproduces d bit for bit.
CorrelationValue detection_statistic(const CenteredFrame& frame, const ArpCode& code, int shift);

// Max of D over all M shifts; ties go to the smallest shift. Reachable iff
// d_max > threshold (equality decides unreachable).
DetectionReport detect(const CenteredFrame& frame, const ArpCode& code, double threshold);

std::vector<DetectionReport> detect_all(std::span<const std::complex<double>> y, std::span<const ArpCode> codebook,
                                        double threshold);
std::vector<DetectionReport> detect_all(const CenteredFrame& frame, std::span<const ArpCode> codebook,
                                        double threshold);

// thr = thr_norm * noise_power.
double normalize_threshold(double thr_norm, double noise_power);

// Mean of |s|^2 over a noise-only stretch; needs at least 100 samples.
double estimate_noise_power(std::span<const std::complex<double>> quiet_samples);

inline constexpr std::size_t kMinNoiseSamples = 100;

} // namespace risid
