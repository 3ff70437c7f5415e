#include "risid/detector.hpp"

#include "risid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace risid {

CenteredFrame::CenteredFrame(std::vector<double> samples) : samples_(std::move(samples)) {
    double sum = 0.0;
    double peak = 0.0;
    for (double v : samples_) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("centered frame contains a non-finite sample");
        }
        sum += v;
        peak = std::max(peak, std::abs(v));
    }
    const double tol = 1e-9 * static_cast<double>(samples_.size()) * peak;
    if (std::abs(sum) > tol) {
        throw InvalidArgument("frame is not zero-centered (sum " + std::to_string(sum) + ")");
    }
}

CenteredFrame extract_and_center(std::span<const std::complex<double>> y) {
    if (y.empty()) {
        throw InvalidArgument("cannot center an empty frame");
    }
    std::vector<double> mag(y.size());
    std::transform(y.begin(), y.end(), mag.begin(), [](const std::complex<double>& v) { return std::abs(v); });

    std::vector<double> sorted = mag;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (double v : sorted) {
        total += v;
    }
    const double mean = total / static_cast<double>(mag.size());
    for (double& v : mag) {
        v -= mean;
    }
    return CenteredFrame(CenteredFrame::Centered{}, std::move(mag));
}

namespace {

void check_lengths(const CenteredFrame& frame, const ArpCode& code) {
    if (frame.size() != code.length() || frame.size() == 0) {
        throw InvalidArgument("frame length " + std::to_string(frame.size()) + " does not match code length " +
                              std::to_string(code.length()));
    }
}

double correlate(std::span<const double> y, std::span<const std::int8_t> q, std::size_t shift) {
    const std::size_t m = q.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double v = y[(k + shift) % m];
        acc += q[k] > 0 ? v : -v;
    }
    return acc / std::sqrt(static_cast<double>(m));
}

} // namespace

CorrelationValue detection_statistic(const CenteredFrame& frame, const ArpCode& code, int shift) {
    check_lengths(frame, code);
    if (shift < 0 || shift >= static_cast<int>(code.length())) {
        throw InvalidArgument("shift " + std::to_string(shift) + " outside [0, " + std::to_string(code.length() - 1) +
                              "]");
    }
    const double d = correlate(frame.samples(), code.symbols, static_cast<std::size_t>(shift));
    return {d, d * d};
}

DetectionReport detect(const CenteredFrame& frame, const ArpCode& code, double threshold) {
    check_lengths(frame, code);
    if (!(threshold >= 0.0)) {
        throw InvalidArgument("threshold must be >= 0");
    }
    DetectionReport report;
    report.ris_id = code.ris_id;
    report.threshold_used = threshold;
    for (std::size_t s = 0; s < code.length(); ++s) {
        const double d = correlate(frame.samples(), code.symbols, s);
        const double big_d = d * d;
        if (big_d > report.d_max) {
            report.d_max = big_d;
            report.best_shift = static_cast<int>(s);
        }
    }
    report.decided_reachable = report.d_max > threshold;
    return report;
}

std::vector<DetectionReport> detect_all(const CenteredFrame& frame, std::span<const ArpCode> codebook,
                                        double threshold) {
    if (codebook.empty()) {
        throw InvalidArgument("codebook is empty");
    }
    std::vector<DetectionReport> reports;
    reports.reserve(codebook.size());
    for (const ArpCode& code : codebook) {
        reports.push_back(detect(frame, code, threshold));
    }
    return reports;
}

std::vector<DetectionReport> detect_all(std::span<const std::complex<double>> y, std::span<const ArpCode> codebook,
                                        double threshold) {
    if (codebook.empty()) {
        throw InvalidArgument("codebook is empty");
    }
    return detect_all(extract_and_center(y), codebook, threshold);
}

double normalize_threshold(double thr_norm, double noise_power) {
    if (!(noise_power > 0.0)) {
        throw InvalidArgument("noise power must be > 0 to normalize a threshold, got " + std::to_string(noise_power));
    }
    return thr_norm * noise_power;
}

double estimate_noise_power(std::span<const std::complex<double>> quiet_samples) {
    if (quiet_samples.size() < kMinNoiseSamples) {
        throw InsufficientData("noise estimate needs at least " + std::to_string(kMinNoiseSamples) +
                               " samples, got " + std::to_string(quiet_samples.size()));
    }
    double acc = 0.0;
    for (const auto& s : quiet_samples) {
        acc += std::norm(s);
    }
    return acc / static_cast<double>(quiet_samples.size());
}

} // namespace risid
