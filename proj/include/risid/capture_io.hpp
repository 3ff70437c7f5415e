#pragma once

// Baseband IQ captures: raw interleaved little-endian float32 (I then Q) with
// a JSON sidecar describing sample rate and symbol timing, plus reduction of
// oversampled captures to candidate symbol-rate frames.

#include "risid/channel.hpp"
#include "risid/codebook.hpp"
#include "risid/detector.hpp"

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace risid {

using IqSample = std::complex<float>;

inline constexpr std::string_view kCaptureFormatTag = "iq-f32le-interleaved";

struct CaptureMeta {
    double sample_rate_hz = 1.0;
    int samples_per_symbol = 1;
    double center_freq_hz = 0.0; // informational only
    int frame_length = 16;
    std::string format_tag{kCaptureFormatTag};

    void validate() const;
};

CaptureMeta read_capture_meta(const std::filesystem::path& path);
void write_capture_meta(const std::filesystem::path& path, const CaptureMeta& meta);

// Throws IoError if the file cannot be opened, FormatError if its size is not
// a whole number of samples.
std::vector<IqSample> read_capture(const std::filesystem::path& path);
std::vector<IqSample> read_capture(const std::filesystem::path& path, const CaptureMeta& meta);
void write_capture(const std::filesystem::path& path, std::span<const IqSample> samples);

std::vector<IqSample> to_iq(std::span<const std::complex<double>> samples);

// Integrate-and-dump for every integer timing offset o in [0, sps) that
// leaves room for M symbols: symbol m is the mean of
// samples[o + m*sps, o + (m+1)*sps). Element i of the result is offset i.
std::vector<ComplexFrame> symbols_from_samples(std::span<const IqSample> samples, const CaptureMeta& meta);

struct TimingSearchResult {
    int timing_offset = 0;
    std::vector<DetectionReport> reports;
};

// Runs every code on every candidate frame. Each offset is scored by its
// largest D_max over codes plus that of its two neighbouring offsets; the
// best score wins and ties go to the smallest offset.
TimingSearchResult detect_with_timing_search(std::span<const IqSample> samples, const CaptureMeta& meta,
                                             std::span<const ArpCode> codebook, double threshold);

// Repeats a symbol-rate frame periodically at `sps` samples per symbol so the
// first symbol boundary falls on sample `timing_offset`. The output holds
// M + 1 symbol periods; the leading partial period is the tail of the last
// symbol.
std::vector<std::complex<double>> oversample_periodic(std::span<const std::complex<double>> symbols, int sps,
                                                      int timing_offset);

} // namespace risid
