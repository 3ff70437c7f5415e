#include "risid/montecarlo.hpp"

#include "risid/detector.hpp"
#include "risid/errors.hpp"
#include "risid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

namespace risid {

OffsetRange parse_offset_range(std::string_view text) {
    if (text == "full") {
        return OffsetRange::full;
    }
    if (text == "nonzero") {
        return OffsetRange::nonzero;
    }
    throw InvalidArgument("unknown offset range '" + std::string(text) + "' (expected full or nonzero)");
}

std::string_view to_string(OffsetRange range) noexcept {
    return range == OffsetRange::full ? "full" : "nonzero";
}

SweepAxis parse_sweep_axis(std::string_view text) {
    if (text == "none") {
        return SweepAxis::none;
    }
    if (text == "thr_norm") {
        return SweepAxis::thr_norm;
    }
    if (text == "snr_db") {
        return SweepAxis::snr_db;
    }
    if (text == "code_length") {
        return SweepAxis::code_length;
    }
    throw InvalidArgument("unknown sweep axis '" + std::string(text) + "' (expected thr_norm, snr_db or code_length)");
}

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
    case SweepAxis::thr_norm:
        return "thr_norm";
    case SweepAxis::snr_db:
        return "snr_db";
    case SweepAxis::code_length:
        return "code_length";
    case SweepAxis::none:
        break;
    }
    return "none";
}

int draw_offset(OffsetRange range, int code_length, CounterRng& rng) {
    const int lo = range == OffsetRange::full ? 0 : 1;
    if (code_length - 1 < lo) {
        throw InvalidArgument("no admissible offsets for code length " + std::to_string(code_length));
    }
    return std::uniform_int_distribution<int>(lo, code_length - 1)(rng);
}

std::vector<ArpCode> TrialConfig::codebook() const {
    std::vector<ArpCode> codes;
    codes.reserve(ris.size());
    for (const TrialRis& r : ris) {
        codes.push_back(r.profile.code);
    }
    return codes;
}

void TrialConfig::validate() const {
    if (ris.empty()) {
        throw InvalidArgument("scenario '" + scenario + "' declares no RIS");
    }
    if (trials < 1) {
        throw InvalidArgument("trials must be >= 1, got " + std::to_string(trials));
    }
    if (!(frame.noise_power > 0.0)) {
        throw InvalidArgument("noise power must be > 0 when the threshold is normalized to it");
    }
    if (!(thr_norm >= 0.0)) {
        throw InvalidArgument("thr_norm must be >= 0");
    }
    for (const TrialRis& r : ris) {
        if (static_cast<int>(r.profile.code.length()) != frame.frame_length) {
            throw InvalidArgument("RIS " + std::to_string(r.profile.ris_id) + " code length differs from frame length");
        }
        r.profile.validate();
    }
    if (offset_range == OffsetRange::nonzero && frame.frame_length < 2) {
        throw InvalidArgument("nonzero offset range needs M >= 2");
    }
}

double mean_frame_power(const RisProfile& profile, ChannelMode mode, double carrier_amplitude) {
    const AskLevels levels = ask_levels(profile.phases, profile.amp_params);
    const double symbol_power = (std::norm(levels.plus) + std::norm(levels.minus)) / 2.0;
    return carrier_amplitude * carrier_amplitude * mean_cascade_power(profile.n_elements, mode) * symbol_power;
}

double reference_frame_power(std::span<const TrialRis> ris, ChannelMode mode, double carrier_amplitude) {
    const bool any_reachable = std::any_of(ris.begin(), ris.end(), [](const TrialRis& r) { return r.profile.reachable; });
    double best = 0.0;
    for (const TrialRis& r : ris) {
        if (r.profile.reachable || !any_reachable) {
            best = std::max(best, mean_frame_power(r.profile, mode, carrier_amplitude));
        }
    }
    return best;
}

double effective_snr_db(const TrialConfig& config) {
    const double p_ref = reference_frame_power(config.ris, config.channel_mode, config.frame.carrier_amplitude);
    return 10.0 * std::log10(p_ref / config.frame.noise_power);
}

TrialConfig materialize(const ScenarioSpec& spec) {
    if (spec.ris.empty()) {
        throw InvalidArgument("scenario '" + spec.name + "' declares no RIS");
    }
    if (spec.name.empty() || spec.name.find_first_of(",\"\r\n") != std::string::npos) {
        throw InvalidArgument("scenario name must be non-empty and free of commas, quotes and newlines");
    }
    if (spec.noise_power.has_value() == spec.snr_db.has_value()) {
        throw InvalidArgument("exactly one of noise_power and snr_db must be given");
    }
    std::vector<std::optional<int>> pinned;
    for (std::size_t i = 0; i < spec.ris.size(); ++i) {
        if (spec.ris[i].ris_id != static_cast<int>(i) + 1) {
            throw InvalidArgument("RIS ids must be 1..L in order, found " + std::to_string(spec.ris[i].ris_id) +
                                  " at position " + std::to_string(i + 1));
        }
        pinned.push_back(spec.ris[i].code_row);
    }
    const CodebookReport book = build_codebook(spec.code_length, pinned);

    TrialConfig config;
    config.scenario = spec.name;
    config.channel_mode = spec.channel_mode;
    config.offset_range = spec.offset_range;
    config.thr_norm = spec.thr_norm;
    config.trials = spec.trials;
    config.seed = spec.seed;
    config.frame.carrier_amplitude = spec.carrier_amplitude;
    config.frame.leakage = spec.leakage;
    config.frame.frame_length = spec.code_length;
    for (std::size_t i = 0; i < spec.ris.size(); ++i) {
        const RisSetup& setup = spec.ris[i];
        TrialRis entry;
        entry.profile.ris_id = setup.ris_id;
        entry.profile.n_elements = setup.n_elements;
        entry.profile.reachable = setup.reachable;
        entry.profile.amp_params = setup.amp_params;
        entry.profile.phases = setup.phases.value_or(PhaseStatePair::widest(setup.amp_params));
        entry.profile.code = book.codes[i];
        entry.random_offset = !setup.fixed_offset.has_value();
        entry.profile.offset_c = setup.fixed_offset.value_or(0);
        config.ris.push_back(std::move(entry));
    }

    if (spec.noise_power) {
        config.frame.noise_power = *spec.noise_power;
    } else {
        const double p_ref = reference_frame_power(config.ris, spec.channel_mode, spec.carrier_amplitude);
        config.frame.noise_power = p_ref / std::pow(10.0, *spec.snr_db / 10.0);
    }
    config.validate();
    return config;
}

namespace {

enum StreamPurpose : std::uint64_t { kChannelStream = 1, kOffsetStream = 2, kNoiseStream = 3 };

struct TrialOutcomes {
    std::size_t ris_count;
    std::vector<double> d_max;       // [trial * ris_count + l]
    std::vector<std::uint8_t> decided;
};

void run_one_trial(const TrialConfig& config, const std::vector<ArpCode>& codes, double threshold, int trial,
                   TrialOutcomes& out) {
    const std::size_t count = config.ris.size();
    const int m_len = config.frame.frame_length;
    const auto t = static_cast<std::uint64_t>(trial);

    std::vector<RisProfile> profiles;
    std::vector<ChannelRealization> channels(count);
    profiles.reserve(count);
    for (std::size_t l = 0; l < count; ++l) {
        RisProfile profile = config.ris[l].profile;
        if (profile.reachable) {
            CounterRng channel_rng = substream(config.seed, {t, l, kChannelStream});
            channels[l] = draw_cascade(profile.n_elements, config.channel_mode, channel_rng);
        }
        if (config.ris[l].random_offset) {
            CounterRng offset_rng = substream(config.seed, {t, l, kOffsetStream});
            profile.offset_c = draw_offset(config.offset_range, m_len, offset_rng);
        }
        profiles.push_back(std::move(profile));
    }

    CounterRng noise_rng = substream(config.seed, {t, kNoiseStream});
    const ComplexFrame y = synthesize_frame(profiles, channels, config.frame, noise_rng);
    const auto reports = detect_all(y, codes, threshold);
    for (std::size_t l = 0; l < count; ++l) {
        out.d_max[t * count + l] = reports[l].d_max;
        out.decided[t * count + l] = reports[l].decided_reachable ? 1 : 0;
    }
}

} // namespace

std::vector<MetricsRow> run_trials(const TrialConfig& config, int workers) {
    config.validate();
    const double threshold = normalize_threshold(config.thr_norm, config.frame.noise_power);
    const std::vector<ArpCode> codes = config.codebook();
    const std::size_t count = config.ris.size();
    const int trials = config.trials;

    TrialOutcomes out{count, std::vector<double>(count * trials), std::vector<std::uint8_t>(count * trials)};

    if (workers <= 0) {
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    workers = std::min(workers, trials);
    if (workers == 1) {
        for (int k = 0; k < trials; ++k) {
            run_one_trial(config, codes, threshold, k, out);
        }
    } else {
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int k = w; k < trials; k += workers) {
                        run_one_trial(config, codes, threshold, k, out);
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    // Reduce in trial order so sums are identical for any worker count.
    std::vector<MetricsRow> rows;
    for (std::size_t l = 0; l < count; ++l) {
        double d_sum = 0.0;
        long positives = 0;
        for (int k = 0; k < trials; ++k) {
            d_sum += out.d_max[k * count + l];
            positives += out.decided[k * count + l];
        }
        MetricsRow row;
        row.ris_id = config.ris[l].profile.ris_id;
        row.reachable = config.ris[l].profile.reachable;
        row.trials = trials;
        row.d_max_avg = d_sum / trials;
        if (row.reachable) {
            const double p = static_cast<double>(trials - positives) / trials;
            row.p_miss = p;
            row.p_miss_se = std::sqrt(p * (1.0 - p) / trials);
        } else {
            const double p = static_cast<double>(positives) / trials;
            row.p_false = p;
            row.p_false_se = std::sqrt(p * (1.0 - p) / trials);
        }
        rows.push_back(row);
    }
    return rows;
}

SweepResult sweep(const ScenarioSpec& base, SweepAxis axis, std::span<const double> values, int workers) {
    SweepResult result;
    result.scenario = base.name;
    result.axis = axis;
    result.seed = base.seed;

    auto run_point = [&](const TrialConfig& config, std::optional<double> swept) {
        SweepPoint point;
        point.swept_value = swept;
        point.code_length = config.frame.frame_length;
        point.snr_db = effective_snr_db(config);
        point.thr_norm = config.thr_norm;
        point.rows = run_trials(config, workers);
        result.points.push_back(std::move(point));
    };

    if (axis == SweepAxis::none) {
        run_point(materialize(base), std::nullopt);
        return result;
    }
    if (values.empty()) {
        throw InvalidArgument("sweep needs at least one value");
    }
    if (!std::is_sorted(values.begin(), values.end())) {
        throw InvalidArgument("sweep values must be sorted ascending");
    }

    const TrialConfig base_config = materialize(base);
    for (double v : values) {
        switch (axis) {
        case SweepAxis::thr_norm: {
            TrialConfig config = base_config;
            config.thr_norm = v;
            run_point(config, v);
            break;
        }
        case SweepAxis::snr_db: {
            TrialConfig config = base_config;
            const double p_unit = reference_frame_power(config.ris, config.channel_mode, 1.0);
            const double target = config.frame.noise_power * std::pow(10.0, v / 10.0);
            config.frame.carrier_amplitude = std::sqrt(target / p_unit);
            run_point(config, v);
            break;
        }
        case SweepAxis::code_length: {
            const double rounded = std::round(v);
            if (rounded != v || !is_power_of_two(static_cast<long long>(rounded)) || rounded < 4) {
                throw InvalidArgument("code_length sweep values must be powers of two >= 4, got " +
                                      std::to_string(v));
            }
            ScenarioSpec spec = base;
            spec.code_length = static_cast<int>(rounded);
            // Hold the per-symbol noise level of the base scenario.
            spec.snr_db.reset();
            spec.noise_power = base_config.frame.noise_power;
            run_point(materialize(spec), v);
            break;
        }
        case SweepAxis::none:
            break;
        }
    }
    return result;
}

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

} // namespace

void write_csv(std::ostream& out, const SweepResult& result) {
    out << kCsvHeader << '\n';
    const std::string axis(to_string(result.axis));
    for (const SweepPoint& point : result.points) {
        for (const MetricsRow& row : point.rows) {
            out << result.scenario << ',' << row.ris_id << ',' << (row.reachable ? 1 : 0) << ','
                << point.code_length << ',' << format_number(point.snr_db) << ',' << format_number(point.thr_norm)
                << ',' << axis << ',' << format_optional(point.swept_value) << ',' << format_optional(row.p_miss)
                << ',' << format_optional(row.p_miss_se) << ',' << format_optional(row.p_false) << ','
                << format_optional(row.p_false_se) << ',' << format_number(row.d_max_avg) << ',' << row.trials
                << ',' << result.seed << '\n';
        }
    }
}

} // namespace risid
