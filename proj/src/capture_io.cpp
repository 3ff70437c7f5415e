#include "risid/capture_io.hpp"

#include "risid/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>

namespace risid {

namespace fs = std::filesystem;
using nlohmann::json;

void CaptureMeta::validate() const {
    if (format_tag != kCaptureFormatTag) {
        throw FormatError("unsupported capture format '" + format_tag + "' (expected " +
                          std::string(kCaptureFormatTag) + ")");
    }
    if (samples_per_symbol < 1) {
        throw FormatError("samples_per_symbol must be >= 1, got " + std::to_string(samples_per_symbol));
    }
    if (!is_power_of_two(frame_length) || frame_length < 2) {
        throw FormatError("frame_length must be a power of two >= 2, got " + std::to_string(frame_length));
    }
    if (!(sample_rate_hz > 0.0)) {
        throw FormatError("sample_rate_hz must be > 0");
    }
}

CaptureMeta read_capture_meta(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open capture metadata " + path.string());
    }
    CaptureMeta meta;
    try {
        const json doc = json::parse(in);
        meta.sample_rate_hz = doc.at("sample_rate_hz").get<double>();
        meta.samples_per_symbol = doc.at("samples_per_symbol").get<int>();
        meta.center_freq_hz = doc.at("center_freq_hz").get<double>();
        meta.frame_length = doc.at("frame_length").get<int>();
        meta.format_tag = doc.at("format_tag").get<std::string>();
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    try {
        meta.validate();
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return meta;
}

void write_capture_meta(const fs::path& path, const CaptureMeta& meta) {
    meta.validate();
    const json doc = {{"sample_rate_hz", meta.sample_rate_hz},
                      {"samples_per_symbol", meta.samples_per_symbol},
                      {"center_freq_hz", meta.center_freq_hz},
                      {"frame_length", meta.frame_length},
                      {"format_tag", meta.format_tag}};
    std::ofstream out(path);
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

namespace {

float load_f32le(const unsigned char* p) {
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

void store_f32le(float v, char* p) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) {
        p[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    }
}

} // namespace

std::vector<IqSample> read_capture(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open capture " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("failed reading capture " + path.string());
    }
    if (bytes.size() % 8 != 0) {
        const std::size_t offset = bytes.size() - bytes.size() % 8;
        throw FormatError(path.string() + ": truncated sample at byte offset " + std::to_string(offset) + " (size " +
                          std::to_string(bytes.size()) + " is not a multiple of 8)");
    }
    std::vector<IqSample> samples(bytes.size() / 8);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = {load_f32le(&bytes[8 * i]), load_f32le(&bytes[8 * i + 4])};
    }
    return samples;
}

std::vector<IqSample> read_capture(const fs::path& path, const CaptureMeta& meta) {
    meta.validate();
    return read_capture(path);
}

void write_capture(const fs::path& path, std::span<const IqSample> samples) {
    std::vector<char> bytes(samples.size() * 8);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        store_f32le(samples[i].real(), &bytes[8 * i]);
        store_f32le(samples[i].imag(), &bytes[8 * i + 4]);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::vector<IqSample> to_iq(std::span<const std::complex<double>> samples) {
    std::vector<IqSample> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(), [](const std::complex<double>& s) {
        return IqSample(static_cast<float>(s.real()), static_cast<float>(s.imag()));
    });
    return out;
}

std::vector<ComplexFrame> symbols_from_samples(std::span<const IqSample> samples, const CaptureMeta& meta) {
    meta.validate();
    const std::size_t sps = static_cast<std::size_t>(meta.samples_per_symbol);
    const std::size_t m_len = static_cast<std::size_t>(meta.frame_length);
    const std::size_t needed = sps * m_len;
    if (samples.size() < needed) {
        throw InsufficientData("capture holds " + std::to_string(samples.size()) + " samples, need at least " +
                               std::to_string(needed) + " for " + std::to_string(m_len) + " symbols at " +
                               std::to_string(sps) + " samples/symbol");
    }
    std::vector<ComplexFrame> candidates;
    for (std::size_t o = 0; o < sps && o + needed <= samples.size(); ++o) {
        ComplexFrame frame(m_len);
        for (std::size_t m = 0; m < m_len; ++m) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t i = 0; i < sps; ++i) {
                const IqSample& s = samples[o + m * sps + i];
                acc += std::complex<double>(s.real(), s.imag());
            }
            frame[m] = acc / static_cast<double>(sps);
        }
        candidates.push_back(std::move(frame));
    }
    return candidates;
}

TimingSearchResult detect_with_timing_search(std::span<const IqSample> samples, const CaptureMeta& meta,
                                             std::span<const ArpCode> codebook, double threshold) {
    if (codebook.empty()) {
        throw InvalidArgument("codebook is empty");
    }
    for (const ArpCode& code : codebook) {
        if (static_cast<int>(code.length()) != meta.frame_length) {
            throw InvalidArgument("code for RIS " + std::to_string(code.ris_id) + " has length " +
                                  std::to_string(code.length()) + ", capture frame length is " +
                                  std::to_string(meta.frame_length));
        }
    }
    const auto candidates = symbols_from_samples(samples, meta);
    std::vector<std::vector<DetectionReport>> reports;
    std::vector<double> score;
    for (const ComplexFrame& frame : candidates) {
        reports.push_back(detect_all(frame, codebook, threshold));
        double s = 0.0;
        for (const auto& r : reports.back()) {
            s = std::max(s, r.d_max);
        }
        score.push_back(s);
    }

    // With antipodal ASK levels D_max is flat within about a sample of the
    // symbol boundary, so rank offsets by D_max summed with both neighbours.
    // Offsets wrap when every offset in [0, sps) was evaluated; a missing
    // neighbour counts as the offset itself.
    const std::size_t n = candidates.size();
    const bool cyclic = n == static_cast<std::size_t>(meta.samples_per_symbol) && n >= 3;
    auto at = [&](std::size_t o, std::ptrdiff_t step) {
        const auto j = static_cast<std::ptrdiff_t>(o) + step;
        if (cyclic) {
            return score[static_cast<std::size_t>((j + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n))];
        }
        return (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) ? score[o] : score[static_cast<std::size_t>(j)];
    };
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t o = 0; o < n; ++o) {
        const double s = at(o, -1) + score[o] + at(o, 1);
        if (s > best_score) {
            best_score = s;
            best = o;
        }
    }
    return TimingSearchResult{static_cast<int>(best), std::move(reports[best])};
}

std::vector<std::complex<double>> oversample_periodic(std::span<const std::complex<double>> symbols, int sps,
                                                      int timing_offset) {
    if (symbols.empty()) {
        throw InvalidArgument("no symbols to oversample");
    }
    if (sps < 1 || timing_offset < 0 || timing_offset >= sps) {
        throw InvalidArgument("need sps >= 1 and 0 <= timing_offset < sps");
    }
    const long m_len = static_cast<long>(symbols.size());
    const long total = static_cast<long>(sps) * (m_len + 1);
    std::vector<std::complex<double>> out(total);
    for (long i = 0; i < total; ++i) {
        const long shifted = i - timing_offset;
        const long symbol = (shifted >= 0 ? shifted / sps : -1 - (-shifted - 1) / sps);
        out[i] = symbols[((symbol % m_len) + m_len) % m_len];
    }
    return out;
}

} // namespace risid
