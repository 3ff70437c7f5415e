#include "reference_detector.hpp"
#include "risid/channel.hpp"
#include "risid/codebook.hpp"
#include "risid/detector.hpp"
#include "risid/errors.hpp"
#include "risid/rng.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

using namespace risid;

namespace {

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof a) == 0;
}

ArpCode code_of(Symbols s, int id = 1) {
    return ArpCode{id, 0, std::move(s)};
}

RisProfile profile_for(const ArpCode& code, int offset) {
    RisProfile p;
    p.code = code;
    p.offset_c = offset;
    return p; // default widest phases: levels 1 and 0.2
}

ComplexFrame noiseless(const RisProfile& p, std::complex<double> h) {
    FrameSynthesisConfig cfg;
    cfg.frame_length = static_cast<int>(p.code.length());
    CounterRng rng(0);
    const std::vector<RisProfile> ps{p};
    const std::vector<ChannelRealization> ch{{h}};
    return synthesize_frame(ps, ch, cfg, rng);
}

ComplexFrame random_frame(std::mt19937_64& gen, int m) {
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexFrame y(m);
    for (auto& v : y) {
        v = {n(gen), n(gen)};
    }
    return y;
}

} // namespace

TEST_CASE("extract_and_center examples") {
    const ComplexFrame unit{{1.0, 0.0}, {-1.0, 0.0}};
    const auto a = extract_and_center(unit);
    CHECK(a.samples()[0] == 0.0);
    CHECK(a.samples()[1] == 0.0);

    const ComplexFrame two{{2.0, 0.0}, {0.0, 0.0}};
    const auto b = extract_and_center(two);
    CHECK(b.samples()[0] == 1.0);
    CHECK(b.samples()[1] == -1.0);

    // levels 1 and 0.2 average to 0.6, deviations are +-0.4
    const auto c = extract_and_center(noiseless(profile_for(code_of({1, -1, 1, -1}), 0), {1.0, 0.0}));
    const double expect[] = {0.4, -0.4, 0.4, -0.4};
    for (int m = 0; m < 4; ++m) {
        CHECK(c.samples()[m] == doctest::Approx(expect[m]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(extract_and_center(ComplexFrame{}), InvalidArgument);
}

TEST_CASE("CenteredFrame rejects frames that are not zero-mean") {
    CHECK_NOTHROW(CenteredFrame({0.5, -0.5}));
    CHECK_THROWS_AS(CenteredFrame({1.0, 0.0}), InvalidArgument);
}

TEST_CASE("detection_statistic examples") {
    const auto code = build_codebook(16, 1).codes[0];
    std::vector<double> as_double(code.symbols.begin(), code.symbols.end());
    const auto perfect = detection_statistic(CenteredFrame(as_double), code, 0);
    CHECK(perfect.d == 4.0);
    CHECK(perfect.D == 16.0);

    const CenteredFrame zeros(std::vector<double>(16, 0.0));
    for (int s = 0; s < 16; ++s) {
        CHECK(detection_statistic(zeros, code, s).D == 0.0);
    }

    const CenteredFrame small({0.4, -0.4, 0.4, -0.4});
    const auto v = detection_statistic(small, code_of({1, -1, 1, -1}), 1);
    CHECK(v.d == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK(v.D == doctest::Approx(0.64).epsilon(1e-12));

    CHECK_THROWS_AS(detection_statistic(small, code, 0), InvalidArgument);
    CHECK_THROWS_AS(detection_statistic(small, code_of({1, -1, 1, -1}), 4), InvalidArgument);
}

TEST_CASE("detect examples") {
    SUBCASE("noiseless matching code hits the closed form") {
        const auto code = build_codebook(16, 1).codes[0];
        const auto frame = extract_and_center(noiseless(profile_for(code, 0), {1.0, 0.0}));
        const auto r = detect(frame, code, 1.0);
        // 16 * (1 - 0.2)^2 / 4
        CHECK(r.d_max == doctest::Approx(2.56).epsilon(1e-12));
        CHECK(r.decided_reachable);
        CHECK(r.threshold_used == 1.0);
    }
    SUBCASE("all-zero frame") {
        const auto code = build_codebook(8, 1).codes[0];
        const auto r = detect(CenteredFrame(std::vector<double>(8, 0.0)), code, 0.1);
        CHECK(r.d_max == 0.0);
        CHECK_FALSE(r.decided_reachable);
        CHECK(r.best_shift == 0);
    }
    SUBCASE("code from another cyclic class sees nothing") {
        const auto h = generate_hadamard(4);
        const ArpCode a{1, 1, h[1]};
        const ArpCode b{2, 2, h[2]};
        for (int c = 0; c < 4; ++c) {
            const auto frame = extract_and_center(noiseless(profile_for(a, c), {0.3, 0.7}));
            const auto r = detect(frame, b, 1e-12);
            CHECK(r.d_max < 1e-28);
            CHECK_FALSE(r.decided_reachable);
        }
    }
    SUBCASE("threshold equality decides unreachable") {
        const CenteredFrame frame({0.4, -0.4, 0.4, -0.4});
        const auto probe = detect(frame, code_of({1, -1, 1, -1}), 0.0);
        const auto at = detect(frame, code_of({1, -1, 1, -1}), probe.d_max);
        CHECK_FALSE(at.decided_reachable);
        CHECK(probe.decided_reachable);
    }
    SUBCASE("negative threshold") {
        CHECK_THROWS_AS(detect(CenteredFrame({0.1, -0.1}), code_of({1, -1}), -1.0), InvalidArgument);
    }
}

TEST_CASE("best shift undoes the RIS offset") {
    const auto code = build_codebook(16, 2).codes[1];
    for (int c = 0; c < 16; ++c) {
        const auto frame = extract_and_center(noiseless(profile_for(code, c), {1.0, 0.0}));
        const auto r = detect(frame, code, 0.0);
        const auto ref = testing::reference_detect({frame.samples().begin(), frame.samples().end()}, code.symbols);
        CHECK(r.best_shift == ref.best_shift);
        // the shifted code matching q[(m + c) mod M] is the one moved right by M - c
        CHECK(detection_statistic(frame, code, (16 - c) % 16).D == r.d_max);
    }
}

TEST_CASE("detect_all on a two-RIS codebook at high SNR") {
    const auto book = build_codebook(16, 2);
    std::vector<RisProfile> profiles(2);
    for (int l = 0; l < 2; ++l) {
        profiles[l].ris_id = l + 1;
        profiles[l].code = book.codes[l];
        profiles[l].offset_c = 3 + l;
    }
    profiles[1].reachable = false;
    FrameSynthesisConfig cfg;
    cfg.frame_length = 16;
    cfg.noise_power = 1e-3;
    const std::vector<ChannelRealization> ch{{{1.0, 0.0}}, {{1.0, 0.0}}};
    CounterRng rng(11);
    const auto y = synthesize_frame(profiles, ch, cfg, rng);
    // noiseless D_max is 2.56, i.e. 2560 noise powers; noise alone rarely reaches 20
    const auto reports = detect_all(y, book.codes, normalize_threshold(20.0, cfg.noise_power));
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].ris_id == 1);
    CHECK(reports[0].decided_reachable);
    CHECK_FALSE(reports[1].decided_reachable);
    CHECK_THROWS_AS(detect_all(y, std::vector<ArpCode>{}, 1.0), InvalidArgument);
}

TEST_CASE("closed form D_max = M |h|^2 (a1 - a2)^2 / 4") {
    std::mt19937_64 gen(2024);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int m : {4, 8, 16, 32}) {
        const auto book = build_codebook(m, 1);
        for (int c = 0; c < m; ++c) {
            for (int trial = 0; trial < 20; ++trial) {
                const std::complex<double> h{n(gen), n(gen)};
                const auto r = detect(extract_and_center(noiseless(profile_for(book.codes[0], c), h)), book.codes[0], 0.0);
                const double expect = m * std::norm(h) * 0.8 * 0.8 / 4.0;
                REQUIRE(r.d_max == doctest::Approx(expect).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("statistics match the straight-line reference bit for bit") {
    std::mt19937_64 gen(77);
    const auto book = build_codebook(16, codebook_capacity(16));
    for (int trial = 0; trial < 2000; ++trial) {
        const auto frame = extract_and_center(random_frame(gen, 16));
        const auto& code = book.codes[trial % book.codes.size()];
        const auto ref = testing::reference_detect({frame.samples().begin(), frame.samples().end()}, code.symbols);
        for (int s = 0; s < 16; ++s) {
            REQUIRE(same_bits(detection_statistic(frame, code, s).d, ref.d[s]));
        }
        const auto r = detect(frame, code, 1.0);
        REQUIRE(same_bits(r.d_max, ref.d_max));
        REQUIRE(r.best_shift == ref.best_shift);
    }
}

TEST_CASE("D_max is invariant to cyclic shifts of the received frame") {
    std::mt19937_64 gen(5);
    const auto book = build_codebook(16, 2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto y = random_frame(gen, 16);
        const auto base = detect(extract_and_center(y), book.codes[trial % 2], 0.0);
        for (int t = 1; t < 16; ++t) {
            ComplexFrame rotated(16);
            for (int m = 0; m < 16; ++m) {
                rotated[m] = y[(m + t) % 16];
            }
            REQUIRE(same_bits(detect(extract_and_center(rotated), book.codes[trial % 2], 0.0).d_max, base.d_max));
        }
    }
}

TEST_CASE("scaling the frame scales D_max by the square") {
    std::mt19937_64 gen(9);
    const auto code = build_codebook(16, 1).codes[0];
    for (int trial = 0; trial < 100; ++trial) {
        auto y = random_frame(gen, 16);
        const auto base = detect(extract_and_center(y), code, 1.0);
        const double alpha = 0.5 + trial * 0.05;
        for (auto& v : y) {
            v *= alpha;
        }
        const auto scaled = detect(extract_and_center(y), code, alpha * alpha);
        CHECK(scaled.d_max == doctest::Approx(alpha * alpha * base.d_max).epsilon(1e-9));
        CHECK(scaled.decided_reachable == base.decided_reachable);
    }
}

TEST_CASE("strong static leakage still yields a finite statistic") {
    const auto code = build_codebook(16, 1).codes[0];
    const auto clean = noiseless(profile_for(code, 2), {1.0, 0.0});
    for (double mag : {0.0, 0.5, 10.0, 1e3, 1e6, 1e12}) {
        auto y = clean;
        for (auto& v : y) {
            v += std::polar(mag, 0.3);
        }
        const auto r = detect(extract_and_center(y), code, 1.0);
        CHECK(std::isfinite(r.d_max));
        CHECK(r.d_max >= 0.0);
    }
}

TEST_CASE("normalize_threshold") {
    CHECK(normalize_threshold(1.0, 0.5) == 0.5);
    CHECK(normalize_threshold(0.8, 1.0) == 0.8);
    for (double thr : {0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8}) {
        CHECK(normalize_threshold(thr, 1.0) == thr);
    }
    CHECK_THROWS_AS(normalize_threshold(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(normalize_threshold(1.0, -2.0), InvalidArgument);
}

TEST_CASE("estimate_noise_power") {
    CHECK(estimate_noise_power(ComplexFrame(100, std::polar(2.0, 0.4))) == doctest::Approx(4.0));
    CHECK(estimate_noise_power(ComplexFrame(150, {0.0, 0.0})) == 0.0);
    CHECK_THROWS_AS(estimate_noise_power(ComplexFrame(99, {1.0, 0.0})), InsufficientData);

    CounterRng rng(31);
    ComplexFrame noise(40000);
    for (auto& v : noise) {
        v = complex_gaussian(rng);
    }
    // |z|^2 of a unit CN variable is Exp(1): standard deviation 1
    const double se = 1.0 / std::sqrt(static_cast<double>(noise.size()));
    CHECK(std::abs(estimate_noise_power(noise) - 1.0) < 3 * se);
}
