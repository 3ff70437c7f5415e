#include "cli/commands.hpp"
#include "cli/csv_table.hpp"
#include "cli/scenario_config.hpp"
#include "risid/capture_io.hpp"
#include "risid/channel.hpp"
#include "risid/codebook.hpp"
#include "risid/errors.hpp"
#include "risid/montecarlo.hpp"
#include "risid/rng.hpp"

#include "doctest.h"
#include "json.hpp"

#include <array>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace risid;
using risid::cli::run_cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigDir = RISID_CONFIG_DIR;

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class ScratchDir {
public:
    ScratchDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("risid_cli_test_" + std::to_string(::getpid()) + "_" +
                                             std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    fs::path path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

    bool has_tmp_files() const {
        for (const auto& entry : fs::directory_iterator(path_)) {
            if (entry.path().extension() == ".tmp") {
                return true;
            }
        }
        return false;
    }

private:
    fs::path path_;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

} // namespace

TEST_CASE("value lists") {
    CHECK(cli::parse_value_list("0.6:0.2:1.8") == std::vector<double>{0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8});
    CHECK(cli::parse_value_list("8,16, 32") == std::vector<double>{8, 16, 32});
    CHECK(cli::parse_value_list("5") == std::vector<double>{5});
    CHECK_THROWS(cli::parse_value_list("1:0:2"));
    CHECK_THROWS(cli::parse_value_list("2:1:1"));
    CHECK_THROWS(cli::parse_value_list("a,b"));
    CHECK_THROWS(cli::parse_value_list(""));
}

TEST_CASE("version and help") {
    const Run v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("risid 0.1.0") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
}

TEST_CASE("codebook command") {
    SUBCASE("two codes of length 16") {
        const Run r = run({"codebook", "--length", "16", "--count", "2"});
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        CHECK(j["code_length"] == 16);
        REQUIRE(j["codes"].size() == 2);
        CHECK(j["codes"][0]["ris_id"] == 1);
        CHECK(j["codes"][1]["ris_id"] == 2);
        CHECK(j["codes"][0]["symbols"].size() == 16);
        CHECK(j["max_pairwise_cyclic_corr"].get<double>() < 16);
    }
    SUBCASE("more RISs than classes is a runtime error naming the capacity") {
        const Run r = run({"codebook", "--length", "4", "--count", "3"});
        CHECK(r.code == cli::kExitRuntime);
        CHECK(r.err.find("only 2 distinct cyclic-equivalence classes") != std::string::npos);
    }
    SUBCASE("length that is not a power of two is a usage error") {
        const Run r = run({"codebook", "--length", "6", "--count", "1"});
        CHECK(r.code == cli::kExitUsage);
        CHECK(r.err.find("risid codebook: ") == 0);
    }
    SUBCASE("report file") {
        ScratchDir dir;
        const Run r = run({"codebook", "--length", "8", "--count", "2", "--report", dir / "cb.json"});
        REQUIRE(r.code == 0);
        CHECK(json::parse(slurp(dir / "cb.json")) == json::parse(r.out));
        CHECK_FALSE(dir.has_tmp_files());
    }
}

TEST_CASE("bundled scenario configs run") {
    for (const char* name : {"ris1_reachable.ini", "both_reachable.ini", "none_reachable.ini"}) {
        CAPTURE(name);
        const Run r = run({"simulate", "--config", (kConfigDir / name).string(), "--trials", "20", "--workers", "1"});
        REQUIRE(r.code == 0);
        std::istringstream in(r.out);
        const auto rows = cli::read_results_csv(in, name);
        CHECK(rows.size() == 2);
    }
}

TEST_CASE("simulate argument errors") {
    const std::string config = (kConfigDir / "ris1_reachable.ini").string();
    SUBCASE("unknown sweep axis") {
        const Run r = run({"simulate", "--config", config, "--sweep", "phase", "--values", "1,2"});
        CHECK(r.code == cli::kExitUsage);
    }
    SUBCASE("sweep without values") {
        CHECK(run({"simulate", "--config", config, "--sweep", "thr_norm"}).code == cli::kExitUsage);
    }
    SUBCASE("code length sweep with a non power of two") {
        CHECK(run({"simulate", "--config", config, "--sweep", "code_length", "--values", "12", "--trials", "5"}).code ==
              cli::kExitUsage);
    }
    SUBCASE("missing config file") {
        const Run r = run({"simulate", "--config", "/nonexistent/x.ini"});
        CHECK(r.code == cli::kExitUsage);
        CHECK(r.err.find("/nonexistent/x.ini") != std::string::npos);
    }
    SUBCASE("failed run leaves no partial output") {
        ScratchDir dir;
        std::ofstream(dir / "bad.ini") << "[scenario]\nname = x\n[frame]\nsnr_db = 10\n[ris1]\nn_elements = 0\n";
        const Run r = run({"simulate", "--config", dir / "bad.ini", "--out", dir / "out.csv"});
        CHECK(r.code == cli::kExitUsage);
        CHECK_FALSE(fs::exists(dir / "out.csv"));
        CHECK_FALSE(dir.has_tmp_files());
    }
}

TEST_CASE("simulate sweep writes one block per value") {
    ScratchDir dir;
    const Run r = run({"simulate", "--config", (kConfigDir / "ris1_reachable.ini").string(), "--sweep", "thr_norm",
                       "--values", "0.6:0.6:1.8", "--trials", "30", "--out", dir / "sweep.csv"});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "sweep.csv");
    const auto rows = cli::read_results_csv(in, "sweep.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].swept_axis == "thr_norm");
    CHECK(rows[0].swept_value == doctest::Approx(0.6));
    CHECK(rows[5].swept_value == doctest::Approx(1.8));
    CHECK_FALSE(dir.has_tmp_files());
}

TEST_CASE("scenario config parsing") {
    SUBCASE("angles accept a pi suffix") {
        CHECK(cli::parse_angle("0.43pi") == doctest::Approx(0.43 * std::numbers::pi));
        CHECK(cli::parse_angle("-pi") == doctest::Approx(-std::numbers::pi));
        CHECK(cli::parse_angle("1.25") == 1.25);
    }
    SUBCASE("full example") {
        std::istringstream in(R"(
[scenario]
name = custom
code_length = 32
trials = 50
seed = 9
thr_norm = 1.4
offset_range = nonzero
workers = 2

[frame]
noise_power = 0.01
channel_mode = independent
leakage_re = 3
leakage_im = -1

[ris1]
n_elements = 64
delta = 0.5pi
code_row = 3
offset = 7

[ris2]
reachable = no
)");
        const auto config = cli::parse_scenario_config(in, "custom.ini");
        const auto& spec = config.spec;
        CHECK(spec.name == "custom");
        CHECK(spec.code_length == 32);
        CHECK(spec.trials == 50);
        CHECK(spec.seed == 9);
        CHECK(spec.offset_range == OffsetRange::nonzero);
        CHECK(spec.channel_mode == ChannelMode::independent);
        CHECK(spec.leakage == std::complex<double>(3, -1));
        CHECK(config.workers == 2);
        REQUIRE(spec.ris.size() == 2);
        CHECK(spec.ris[0].code_row == 3);
        CHECK(spec.ris[0].fixed_offset == 7);
        CHECK(spec.ris[0].amp_params.delta == doctest::Approx(std::numbers::pi / 2));
        CHECK_FALSE(spec.ris[1].reachable);
        CHECK_FALSE(spec.ris[1].fixed_offset.has_value());
    }
    auto rejects = [](const std::string& text, const std::string& fragment) {
        std::istringstream in(text);
        try {
            (void)cli::parse_scenario_config(in, "t.ini");
            FAIL("accepted: " << text);
        } catch (const cli::UsageError& e) {
            const std::string message = e.what();
            CAPTURE(message);
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
            CHECK(std::string(e.what()).find("t.ini") == 0);
        }
    };
    const std::string head = "[scenario]\n[frame]\nsnr_db = 10\n";
    rejects(head + "[ris1]\ncolour = red\n", "unknown key 'colour'");
    rejects(head + "[ris2]\n", "missing [ris1]");
    rejects(head + "[antenna]\n", "unknown section");
    rejects("[scenario]\n[frame]\n[ris1]\n", "one of noise_power or snr_db");
    rejects("[scenario]\n[frame]\nsnr_db = 1\nnoise_power = 1\n[ris1]\n", "mutually exclusive");
    rejects(head + "[ris1]\nphi_1 = 1\n", "together");
    rejects(head + "[ris1]\ncode_row = 1\n[ris2]\ncode_row = 1\n", "");
    rejects("[scenario]\ncode_length = 12\n[frame]\nsnr_db = 10\n[ris1]\n", "");
}

TEST_CASE("detect finds a planted RIS in a capture") {
    ScratchDir dir;
    REQUIRE(run({"codebook", "--length", "16", "--count", "2", "--report", dir / "cb.json"}).code == 0);
    const auto codes = build_codebook(16, 2).codes;

    constexpr int kSps = 4;
    constexpr int kTiming = 2;
    constexpr double kNoise = 1e-3;
    RisProfile profile;
    profile.code = codes[1];
    profile.ris_id = 2;
    profile.offset_c = 11;
    const std::array<RisProfile, 1> profiles{profile};
    const std::array<ChannelRealization, 1> channels{ChannelRealization{{0.0, 1.0}, ChannelMode::reciprocal}};
    FrameSynthesisConfig cfg;
    cfg.frame_length = 16;
    CounterRng rng(5);
    auto samples = oversample_periodic(synthesize_frame(profiles, channels, cfg, rng), kSps, kTiming);
    add_awgn(samples, kNoise, rng);

    // 200 noise-only samples ahead of the frame for the head estimator
    std::vector<std::complex<double>> with_head(200);
    add_awgn(with_head, kNoise, rng);
    with_head.insert(with_head.end(), samples.begin(), samples.end());

    CaptureMeta meta;
    meta.samples_per_symbol = kSps;
    meta.frame_length = 16;
    write_capture_meta(dir / "cap.json", meta);
    write_capture(dir / "cap.iq", to_iq(samples));
    write_capture(dir / "head.iq", to_iq(with_head));

    auto check_reports = [&](const Run& r) {
        REQUIRE(r.code == 0);
        std::istringstream lines(r.out);
        std::vector<json> reports;
        for (std::string line; std::getline(lines, line);) {
            reports.push_back(json::parse(line));
        }
        REQUIRE(reports.size() == 2);
        CHECK(reports[0]["ris_id"] == 1);
        CHECK(reports[0]["decided_reachable"] == false);
        CHECK(reports[1]["ris_id"] == 2);
        CHECK(reports[1]["decided_reachable"] == true);
        // shifts that equal the planted alignment up to sign give the same D
        const int best = reports[1]["best_shift"];
        const int expected = (16 - 11) % 16;
        const auto& q = codes[1].symbols;
        bool same_up_to_sign = true;
        for (int m = 0; m < 16; ++m) {
            same_up_to_sign &= q[(m + 32 - best) % 16] * q[(m + 32 - expected) % 16] ==
                               q[(32 - best) % 16] * q[(32 - expected) % 16];
        }
        CHECK(same_up_to_sign);
        CHECK(reports[1]["timing_offset"] == kTiming);
    };

    SUBCASE("known noise power") {
        check_reports(run({"detect", "--capture", dir / "cap.iq", "--meta", dir / "cap.json", "--codebook",
                           dir / "cb.json", "--thr-norm", "20", "--noise-power", std::to_string(kNoise)}));
    }
    SUBCASE("noise estimated from the capture head") {
        const Run r = run({"detect", "--capture", dir / "head.iq", "--meta", dir / "cap.json", "--codebook",
                           dir / "cb.json", "--thr-norm", "20", "--noise-from-head", "200", "--out", dir / "r.jsonl"});
        check_reports(r);
        CHECK(slurp(dir / "r.jsonl") == r.out);
        CHECK_FALSE(dir.has_tmp_files());
    }
    SUBCASE("head too short for an estimate") {
        const Run r = run({"detect", "--capture", dir / "head.iq", "--meta", dir / "cap.json", "--codebook",
                           dir / "cb.json", "--thr-norm", "1", "--noise-from-head", "50"});
        CHECK(r.code == cli::kExitRuntime);
    }
    SUBCASE("missing sidecar") {
        const Run r = run({"detect", "--capture", dir / "cap.iq", "--meta", dir / "none.json", "--codebook",
                           dir / "cb.json", "--thr-norm", "1", "--noise-power", "1"});
        CHECK(r.code == cli::kExitRuntime);
        CHECK(r.err.find("none.json") != std::string::npos);
    }
    SUBCASE("threshold without a noise source") {
        const Run r = run({"detect", "--capture", dir / "cap.iq", "--meta", dir / "cap.json", "--codebook",
                           dir / "cb.json", "--thr-norm", "1"});
        CHECK(r.code == cli::kExitUsage);
    }
    SUBCASE("both noise sources") {
        const Run r = run({"detect", "--capture", dir / "cap.iq", "--meta", dir / "cap.json", "--codebook",
                           dir / "cb.json", "--thr-norm", "1", "--noise-power", "1", "--noise-from-head", "100"});
        CHECK(r.code == cli::kExitUsage);
    }
    SUBCASE("truncated capture") {
        std::ofstream(dir / "bad.iq", std::ios::binary) << "12345";
        const Run r = run({"detect", "--capture", dir / "bad.iq", "--meta", dir / "cap.json", "--codebook",
                           dir / "cb.json", "--thr-norm", "1", "--noise-power", "1"});
        CHECK(r.code == cli::kExitRuntime);
        CHECK(r.err.find("truncated sample") != std::string::npos);
    }
}

TEST_CASE("plot renders one series per RIS") {
    ScratchDir dir;
    REQUIRE(run({"simulate", "--config", (kConfigDir / "both_reachable.ini").string(), "--sweep", "snr_db",
                 "--values", "0,5,10", "--trials", "20", "--out", dir / "s.csv"})
                .code == 0);
    const Run r = run({"plot", "--csv", dir / "s.csv", "--out", dir.path().string()});
    REQUIRE(r.code == 0);
    const std::string svg = slurp(dir / "both_reachable_p_miss.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(count_of(svg, "class=\"series\"") == 2);
    CHECK(fs::exists(dir / "both_reachable_d_max_avg.svg"));
    CHECK(r.out.find("both_reachable_p_miss.svg") != std::string::npos);
    CHECK_FALSE(dir.has_tmp_files());
}

TEST_CASE("plot input validation") {
    ScratchDir dir;
    SUBCASE("empty CSV") {
        std::ofstream(dir / "e.csv");
        const Run r = run({"plot", "--csv", dir / "e.csv", "--out", dir.path().string()});
        CHECK(r.code == cli::kExitRuntime);
        CHECK(r.err.find("empty CSV") != std::string::npos);
    }
    SUBCASE("columns out of order") {
        std::string header(kCsvHeader);
        const auto a = header.find("p_miss,");
        header.replace(a, 7, "");
        header += ",p_miss";
        std::ofstream(dir / "w.csv") << header << "\n";
        const Run r = run({"plot", "--csv", dir / "w.csv", "--out", dir.path().string()});
        CHECK(r.code == cli::kExitRuntime);
        CHECK(r.err.find("expected 'p_miss'") != std::string::npos);
    }
    SUBCASE("no swept values") {
        ScratchDir inner;
        REQUIRE(run({"simulate", "--config", (kConfigDir / "none_reachable.ini").string(), "--trials", "5", "--out",
                     inner / "n.csv"})
                    .code == 0);
        const Run r = run({"plot", "--csv", inner / "n.csv", "--out", dir.path().string()});
        CHECK(r.code == cli::kExitRuntime);
    }
}
