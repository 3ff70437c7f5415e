#include "cli/commands.hpp"

#include "cli/csv_table.hpp"
#include "cli/scenario_config.hpp"
#include "cli/svg_chart.hpp"
#include "risid/capture_io.hpp"
#include "risid/codebook.hpp"
#include "risid/detector.hpp"
#include "risid/errors.hpp"
#include "risid/montecarlo.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#ifndef RISID_VERSION
#define RISID_VERSION "0.0.0"
#endif

namespace risid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> parse_value_list(const std::string& text) {
    auto number = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument(s);
            }
            return v;
        } catch (const std::exception&) {
            throw UsageError("bad sweep value '" + s + "' in '" + text + "'");
        }
    };
    std::vector<std::string> parts;
    char sep = text.find(':') != std::string::npos ? ':' : ',';
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, sep);) {
        parts.push_back(part);
    }
    if (parts.empty()) {
        throw UsageError("empty sweep value list");
    }
    std::vector<double> values;
    if (sep == ':') {
        if (parts.size() != 3) {
            throw UsageError("range must be start:step:stop, got '" + text + "'");
        }
        const double start = number(parts[0]);
        const double step = number(parts[1]);
        const double stop = number(parts[2]);
        if (!(step > 0.0) || stop < start) {
            throw UsageError("range needs step > 0 and stop >= start, got '" + text + "'");
        }
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) {
            // Round away accumulated binary error so 0.6 + 2 * 0.2 prints as 1.
            const double v = start + static_cast<double>(i) * step;
            values.push_back(std::round(v * 1e9) / 1e9);
        }
    } else {
        for (const auto& p : parts) {
            values.push_back(number(p));
        }
    }
    return values;
}

namespace {

json codebook_json(int code_length, const CodebookReport& report) {
    json codes = json::array();
    for (const ArpCode& c : report.codes) {
        codes.push_back({{"ris_id", c.ris_id}, {"hadamard_row", c.hadamard_row}, {"symbols", c.symbols}});
    }
    return {{"code_length", code_length},
            {"codes", codes},
            {"classes", report.ambiguity_classes},
            {"max_pairwise_cyclic_corr", report.max_pairwise_cyclic_corr}};
}

std::vector<ArpCode> load_codebook(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open codebook " + path.string());
    }
    std::vector<ArpCode> codes;
    try {
        const json doc = json::parse(in);
        for (const auto& entry : doc.at("codes")) {
            ArpCode code;
            code.ris_id = entry.at("ris_id").get<int>();
            code.hadamard_row = entry.value("hadamard_row", 0);
            code.symbols = entry.at("symbols").get<Symbols>();
            codes.push_back(std::move(code));
        }
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (codes.empty()) {
        throw FormatError(path.string() + ": no codes");
    }
    for (const ArpCode& c : codes) {
        long sum = 0;
        for (auto s : c.symbols) {
            if (s != 1 && s != -1) {
                throw FormatError(path.string() + ": RIS " + std::to_string(c.ris_id) + " has a symbol outside {-1, +1}");
            }
            sum += s;
        }
        if (!is_power_of_two(static_cast<long long>(c.length())) || c.length() < 2 || sum != 0) {
            throw FormatError(path.string() + ": RIS " + std::to_string(c.ris_id) +
                              " code must be zero-mean with power-of-two length");
        }
    }
    return codes;
}

json report_json(const DetectionReport& r, int timing_offset) {
    return {{"ris_id", r.ris_id},
            {"d_max", r.d_max},
            {"best_shift", r.best_shift},
            {"decided_reachable", r.decided_reachable},
            {"threshold_used", r.threshold_used},
            {"timing_offset", timing_offset}};
}

// Writes next to `target` and renames into place, so a failure leaves no
// partial file behind.
template <class Writer>
void write_atomically(const fs::path& target, Writer&& writer) {
    fs::path tmp = target;
    tmp += ".tmp";
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw IoError("cannot open " + tmp.string() + " for writing");
            }
            writer(out);
            out.flush();
            if (!out) {
                throw IoError("failed writing " + tmp.string());
            }
        }
        fs::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

struct CodebookArgs {
    int length = 16;
    int count = 2;
    std::string report;
};

int cmd_codebook(const CodebookArgs& a, std::ostream& out) {
    CodebookReport report;
    try {
        report = build_codebook(a.length, a.count);
    } catch (const CapacityExceeded&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const json doc = codebook_json(a.length, report);
    out << doc.dump(2) << '\n';
    if (!a.report.empty()) {
        write_atomically(a.report, [&](std::ostream& f) { f << doc.dump(2) << '\n'; });
    }
    return kExitOk;
}

struct SimulateArgs {
    std::string config;
    std::string sweep_axis;
    std::string values;
    std::optional<int> trials;
    std::optional<long long> seed;
    std::optional<int> workers;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    SweepAxis axis = SweepAxis::none;
    std::vector<double> values;
    try {
        if (!a.sweep_axis.empty()) {
            axis = parse_sweep_axis(a.sweep_axis);
        }
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    if (axis != SweepAxis::none) {
        if (a.values.empty()) {
            throw UsageError("--sweep " + a.sweep_axis + " needs --values");
        }
        values = parse_value_list(a.values);
    } else if (!a.values.empty()) {
        throw UsageError("--values given without --sweep");
    }

    ScenarioConfig config = load_scenario_config(a.config);
    if (a.trials) {
        config.spec.trials = *a.trials;
    }
    if (a.seed) {
        if (*a.seed < 0) {
            throw UsageError("--seed must be >= 0");
        }
        config.spec.seed = static_cast<std::uint64_t>(*a.seed);
    }
    const int workers = a.workers.value_or(config.workers.value_or(0));
    std::optional<fs::path> target = config.out;
    if (!a.out.empty()) {
        target = fs::path(a.out);
    }

    SweepResult result;
    try {
        result = sweep(config.spec, axis, values, workers);
    } catch (const InvalidArgument& e) {
        throw UsageError(a.config + ": " + e.what());
    }
    if (target) {
        write_atomically(*target, [&](std::ostream& f) { write_csv(f, result); });
    } else {
        write_csv(out, result);
    }
    return kExitOk;
}

struct DetectArgs {
    std::string capture;
    std::string meta;
    std::string codebook;
    std::optional<double> thr_norm;
    std::optional<double> noise_power;
    std::optional<int> noise_from_head;
    std::string out;
};

int cmd_detect(const DetectArgs& a, std::ostream& out) {
    if (!a.thr_norm) {
        throw UsageError("--thr-norm is required");
    }
    if (!a.noise_power && !a.noise_from_head) {
        throw UsageError("--thr-norm needs a noise reference: give --noise-power or --noise-from-head");
    }
    if (*a.thr_norm < 0.0) {
        throw UsageError("--thr-norm must be >= 0");
    }
    const CaptureMeta meta = read_capture_meta(a.meta);
    const std::vector<ArpCode> codes = load_codebook(a.codebook);
    std::vector<IqSample> samples = read_capture(a.capture, meta);

    double noise_power = 0.0;
    std::span<const IqSample> payload(samples);
    if (a.noise_from_head) {
        const auto head = static_cast<std::size_t>(std::max(0, *a.noise_from_head));
        if (head > samples.size()) {
            throw InsufficientData("--noise-from-head " + std::to_string(head) + " exceeds the capture length " +
                                   std::to_string(samples.size()));
        }
        const auto quiet = payload.first(head);
        const std::vector<std::complex<double>> widened(quiet.begin(), quiet.end());
        noise_power = estimate_noise_power(widened);
        payload = payload.subspan(head);
    } else {
        noise_power = *a.noise_power;
    }
    if (!(noise_power > 0.0)) {
        throw InvalidArgument("noise power is zero; cannot normalize the threshold");
    }
    const double threshold = normalize_threshold(*a.thr_norm, noise_power);
    const TimingSearchResult found = detect_with_timing_search(payload, meta, codes, threshold);

    std::ostringstream lines;
    for (const auto& r : found.reports) {
        lines << report_json(r, found.timing_offset).dump() << '\n';
    }
    out << lines.str();
    if (!a.out.empty()) {
        write_atomically(a.out, [&](std::ostream& f) { f << lines.str(); });
    }
    return kExitOk;
}

struct PlotArgs {
    std::string csv;
    std::string out_dir;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
    std::ifstream in(a.csv);
    if (!in) {
        throw IoError("cannot open " + a.csv);
    }
    const auto records = read_results_csv(in, a.csv);

    struct MetricInfo {
        const char* key;
        const char* label;
        std::optional<double> (*get)(const ResultRecord&);
    };
    const MetricInfo metrics[] = {
        {"p_miss", "miss detection probability", [](const ResultRecord& r) { return r.p_miss; }},
        {"p_false", "false detection probability", [](const ResultRecord& r) { return r.p_false; }},
        {"d_max_avg", "mean maximum detection value",
         [](const ResultRecord& r) { return std::optional<double>(r.d_max_avg); }},
    };

    std::vector<std::string> scenarios;
    for (const auto& r : records) {
        if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end()) {
            scenarios.push_back(r.scenario);
        }
    }
    if (std::none_of(records.begin(), records.end(), [](const ResultRecord& r) { return r.swept_value.has_value(); })) {
        throw FormatError(a.csv + ": no swept_value entries; produce the CSV with simulate --sweep");
    }

    const fs::path dir = a.out_dir.empty() ? fs::path(".") : fs::path(a.out_dir);
    fs::create_directories(dir);
    int written = 0;
    for (const auto& scenario : scenarios) {
        for (const auto& metric : metrics) {
            std::map<int, ChartSeries> by_ris;
            std::string axis;
            for (const auto& r : records) {
                if (r.scenario != scenario || !r.swept_value) {
                    continue;
                }
                const auto y = metric.get(r);
                if (!y) {
                    continue;
                }
                axis = r.swept_axis;
                auto& series = by_ris[r.ris_id];
                series.label = "RIS " + std::to_string(r.ris_id);
                series.points.emplace_back(*r.swept_value, *y);
            }
            if (by_ris.empty()) {
                continue;
            }
            ChartSpec chart;
            chart.title = scenario + ": " + metric.label;
            chart.x_label = axis;
            chart.y_label = metric.key;
            for (auto& [id, s] : by_ris) {
                chart.series.push_back(std::move(s));
            }
            const fs::path file = dir / (scenario + "_" + metric.key + ".svg");
            const std::string svg = render_line_chart(chart);
            write_atomically(file, [&](std::ostream& f) { f << svg; });
            out << file.string() << '\n';
            ++written;
        }
    }
    if (written == 0) {
        throw FormatError(a.csv + ": nothing to plot");
    }
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"RIS detection and identification: codebooks, simulation, capture detection, plots", "risid"};
    app.set_version_flag("--version", std::string("risid ") + RISID_VERSION);
    app.require_subcommand(1);

    CodebookArgs codebook_args;
    auto* codebook = app.add_subcommand("codebook", "assign Walsh-Hadamard reflection patterns to RIS ids");
    codebook->add_option("--length", codebook_args.length, "code length M (power of two >= 4)")->required();
    codebook->add_option("--count", codebook_args.count, "number of RISs L")->required();
    codebook->add_option("--report", codebook_args.report, "also write the JSON report to this path");

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo miss/false-detection estimates");
    simulate->add_option("--config", simulate_args.config, "scenario file")->required();
    simulate->add_option("--sweep", simulate_args.sweep_axis, "thr_norm | snr_db | code_length");
    simulate->add_option("--values", simulate_args.values, "start:step:stop or comma list");
    simulate->add_option("--trials", simulate_args.trials, "trials per point (default 300)")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", simulate_args.seed, "master seed");
    simulate->add_option("--workers", simulate_args.workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    simulate->add_option("--out", simulate_args.out, "CSV output path (default: stdout)");

    DetectArgs detect_args;
    auto* detect = app.add_subcommand("detect", "run the detector on an IQ capture");
    detect->add_option("--capture", detect_args.capture, "raw float32 IQ file")->required();
    detect->add_option("--meta", detect_args.meta, "JSON sidecar")->required();
    detect->add_option("--codebook", detect_args.codebook, "codebook JSON from the codebook command")->required();
    detect->add_option("--thr-norm", detect_args.thr_norm, "threshold in units of noise power");
    auto* noise_opt = detect->add_option("--noise-power", detect_args.noise_power, "known noise power per sample");
    auto* head_opt =
        detect->add_option("--noise-from-head", detect_args.noise_from_head, "estimate noise from the first N samples");
    noise_opt->excludes(head_opt);
    detect->add_option("--out", detect_args.out, "also write the reports to this path");

    PlotArgs plot_args;
    auto* plot = app.add_subcommand("plot", "render SVG line charts from a simulate CSV");
    plot->add_option("--csv", plot_args.csv, "CSV from simulate")->required();
    plot->add_option("--out", plot_args.out_dir, "output directory (default: .)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::string context;
    try {
        if (codebook->parsed()) {
            context = "codebook";
            return cmd_codebook(codebook_args, out);
        }
        if (simulate->parsed()) {
            context = "simulate " + simulate_args.config;
            return cmd_simulate(simulate_args, out);
        }
        if (detect->parsed()) {
            context = "detect";
            return cmd_detect(detect_args, out);
        }
        context = "plot";
        return cmd_plot(plot_args, out);
    } catch (const UsageError& e) {
        err << "risid " << context << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "risid " << context << ": error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace risid::cli
