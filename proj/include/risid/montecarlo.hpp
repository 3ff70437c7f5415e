#pragma once

// Monte Carlo estimation of miss / false-detection probabilities and the mean
// maximum detection value, plus parameter sweeps over them.
//
// Randomness: every trial owns independent counter-based substreams keyed by
// (seed, trial, ris index, purpose), so results do not depend on the number
// of worker threads. Sweep points reuse the same seed (common random numbers),
// which keeps threshold sweeps exactly monotone.

#include "risid/channel.hpp"
#include "risid/codebook.hpp"
#include "risid/ris_model.hpp"
#include "risid/rng.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace risid {

inline constexpr int kDefaultTrials = 300;
inline constexpr int kDefaultElements = 76;

enum class OffsetRange {
    full,    // c uniform on {0, ..., M-1}
    nonzero, // c uniform on {1, ..., M-1}
};

OffsetRange parse_offset_range(std::string_view text);
std::string_view to_string(OffsetRange range) noexcept;

int draw_offset(OffsetRange range, int code_length, CounterRng& rng);

// Code-length independent description of one RIS.
struct RisSetup {
    int ris_id = 1;
    int n_elements = kDefaultElements;
    bool reachable = true;
    AmplitudeModelParams amp_params;
    std::optional<PhaseStatePair> phases; // default: PhaseStatePair::widest
    std::optional<int> code_row;          // default: codebook assignment
    std::optional<int> fixed_offset;      // default: drawn per trial
};

struct ScenarioSpec {
    std::string name = "scenario";
    int code_length = 16;
    std::vector<RisSetup> ris;
    double carrier_amplitude = 1.0;
    // Exactly one of these sets the noise level. snr_db is relative to the
    // mean noiseless frame power of the strongest reachable RIS (of all RISs
    // when none is reachable).
    std::optional<double> noise_power;
    std::optional<double> snr_db;
    ChannelMode channel_mode = ChannelMode::reciprocal;
    std::complex<double> leakage{0.0, 0.0};
    OffsetRange offset_range = OffsetRange::full;
    double thr_norm = 1.0;
    int trials = kDefaultTrials;
    std::uint64_t seed = 1;
};

struct TrialRis {
    RisProfile profile;
    bool random_offset = true;
};

struct TrialConfig {
    std::string scenario;
    std::vector<TrialRis> ris;
    FrameSynthesisConfig frame;
    ChannelMode channel_mode = ChannelMode::reciprocal;
    OffsetRange offset_range = OffsetRange::full;
    double thr_norm = 1.0;
    int trials = kDefaultTrials;
    std::uint64_t seed = 1;

    std::vector<ArpCode> codebook() const;
    void validate() const;
};

// Builds the codebook for spec.code_length and resolves the noise power.
TrialConfig materialize(const ScenarioSpec& spec);

// Mean noiseless frame power x^2 E|h|^2 (|a1|^2 + |a2|^2) / 2 of one RIS.
double mean_frame_power(const RisProfile& profile, ChannelMode mode, double carrier_amplitude);

// Power the SNR is referenced to (see ScenarioSpec::snr_db).
double reference_frame_power(std::span<const TrialRis> ris, ChannelMode mode, double carrier_amplitude);

double effective_snr_db(const TrialConfig& config);

struct MetricsRow {
    int ris_id = 0;
    bool reachable = false;
    // Each probability is conditional on the true reachability, so exactly
    // one of p_miss / p_false is present.
    std::optional<double> p_miss;
    std::optional<double> p_miss_se;
    std::optional<double> p_false;
    std::optional<double> p_false_se;
    double d_max_avg = 0.0;
    int trials = 0;
};

// workers == 0 uses the hardware concurrency.
std::vector<MetricsRow> run_trials(const TrialConfig& config, int workers = 1);

enum class SweepAxis { none, thr_norm, snr_db, code_length };

SweepAxis parse_sweep_axis(std::string_view text);
std::string_view to_string(SweepAxis axis) noexcept;

struct SweepPoint {
    std::optional<double> swept_value; // absent for SweepAxis::none
    int code_length = 0;
    double snr_db = 0.0;
    double thr_norm = 0.0;
    std::vector<MetricsRow> rows;
};

struct SweepResult {
    std::string scenario;
    SweepAxis axis = SweepAxis::none;
    std::uint64_t seed = 0;
    std::vector<SweepPoint> points;
};

// One run_trials per value. The snr_db axis models transmit gain: the noise
// power of the base scenario is held fixed and the carrier amplitude is
// scaled to reach each SNR. SweepAxis::none runs the base once and ignores
// `values`.
SweepResult sweep(const ScenarioSpec& base, SweepAxis axis, std::span<const double> values, int workers = 1);

inline constexpr std::string_view kCsvHeader =
    "scenario,ris_id,reachable,code_length,snr_db,thr_norm,swept_axis,swept_value,"
    "p_miss,p_miss_se,p_false,p_false_se,d_max_avg,trials,seed";

void write_csv(std::ostream& out, const SweepResult& result);

} // namespace risid
