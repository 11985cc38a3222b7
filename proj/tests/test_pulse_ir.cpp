#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pulseforge/pulseforge.hpp"

using namespace pulseforge;

namespace {

// Independent closed-form Gaussian evaluation used as the sampling oracle.
double gaussian_oracle(std::int64_t j, std::int64_t duration, double sigma) {
    const double c = (static_cast<double>(duration) - 1.0) / 2.0;
    const double x = (static_cast<double>(j) - c) / sigma;
    return std::exp(-0.5 * x * x);
}

Schedule play_on(const ChannelId& ch, std::int64_t len, double amp = 0.5) {
    return Schedule().append(play(constant(len, amp), ch));
}

}  // namespace

TEST_CASE("channel aliases render and parse") {
    CHECK(drive_channel(0).str() == "d0");
    CHECK(measure_channel(3).str() == "m3");
    CHECK(control_channel(12).str() == "u12");
    CHECK(acquire_channel(1).str() == "a1");
    CHECK(ChannelId::parse("u12") == control_channel(12));
    CHECK_THROWS_AS(ChannelId::parse("q1"), ValidationError);
    CHECK_THROWS_AS(ChannelId::parse("d"), ValidationError);
}

TEST_CASE("sampled pulse enforces the unit-norm bound") {
    CHECK_NOTHROW(SampledPulse({{0.6, 0.8}}, "edge"));  // |d| = 1 exactly
    CHECK_THROWS_AS(SampledPulse({{0.8, 0.8}}, "hot"), ValidationError);
}

TEST_CASE("gaussian sampling matches the closed form") {
    const auto s = sample_parametric(gaussian(8, 0.5, 2.0));
    REQUIRE(s.duration() == 8);
    for (int j = 0; j < 8; ++j) {
        CHECK(s.samples[j].real() == Catch::Approx(0.5 * gaussian_oracle(j, 8, 2.0)).margin(1e-15));
        CHECK(s.samples[j].imag() == 0.0);
    }
}

TEST_CASE("gaussian peak sits at the center with the requested amplitude") {
    // Even durations place the continuous center between the two middle
    // samples, so the peak sample reaches amp only up to the half-cycle
    // falloff exp(-1/(8 sigma^2)).
    const auto s = sample_parametric(gaussian(128, 0.2, 16.0));
    std::size_t argmax = 0;
    double peak = 0.0;
    for (std::size_t j = 0; j < s.samples.size(); ++j)
        if (std::abs(s.samples[j]) > peak) { peak = std::abs(s.samples[j]); argmax = j; }
    CHECK(peak == Catch::Approx(0.2).margin(1e-3));
    CHECK((argmax == 63 || argmax == 64));
    CHECK(std::abs(s.samples[63]) == Catch::Approx(std::abs(s.samples[64])).margin(1e-15));
}

TEST_CASE("constant pulse with zero amplitude") {
    const auto s = sample_parametric(constant(4, 0.0));
    REQUIRE(s.samples.size() == 4);
    for (const auto& d : s.samples) CHECK(d == cxd(0.0, 0.0));
}

TEST_CASE("gaussian square has a flat top and symmetric edges") {
    const auto s = sample_parametric(gaussian_square(848, 0.3, 32.0, 720.0));
    REQUIRE(s.duration() == 848);
    for (int j = 64; j < 784; ++j) CHECK(std::abs(s.samples[j] - cxd(0.3, 0.0)) < 1e-12);
    for (int j = 0; j < 64; ++j) CHECK(std::abs(s.samples[j] - s.samples[847 - j]) < 1e-12);
    CHECK(std::abs(s.samples[0]) < 0.3);
}

TEST_CASE("drag quadrature follows the central-difference derivative") {
    const double beta = 0.4, sigma = 8.0;
    const auto s = sample_parametric(drag(64, 0.4, sigma, beta));
    for (int j = 1; j < 63; ++j) {
        const double g_prev = 0.4 * gaussian_oracle(j - 1, 64, sigma);
        const double g_next = 0.4 * gaussian_oracle(j + 1, 64, sigma);
        CHECK(s.samples[j].imag() == Catch::Approx(beta * (g_next - g_prev) / 2.0).margin(1e-14));
        CHECK(s.samples[j].real() == Catch::Approx(0.4 * gaussian_oracle(j, 64, sigma)).margin(1e-14));
    }
}

TEST_CASE("parametric validation") {
    CHECK_THROWS_AS(sample_parametric(gaussian(0, 0.1, 4.0)), ValidationError);
    CHECK_THROWS_AS(sample_parametric(gaussian(16, 0.1, -1.0)), ValidationError);
    CHECK_THROWS_AS(sample_parametric(gaussian_square(16, 0.1, 4.0, 17.0)), ValidationError);
    CHECK_THROWS_AS(sample_parametric(gaussian(16, 1.5, 4.0)), ValidationError);  // amp bound
    CHECK_THROWS_AS(sample_parametric(drag(16, 0.999, 0.5, 40.0)), ValidationError);
}

TEST_CASE("sample length equals declared duration for every shape") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dur(1, 300);
    std::uniform_real_distribution<double> amp(0.05, 0.9), sig(0.5, 60.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = dur(rng);
        const double a = amp(rng), s = sig(rng);
        CHECK(sample_parametric(gaussian(n, a, s)).duration() == n);
        CHECK(sample_parametric(constant(n, a)).duration() == n);
        const double w = std::uniform_real_distribution<double>(0.0, n)(rng);
        CHECK(sample_parametric(gaussian_square(n, a, s, w)).duration() == n);
        CHECK(sample_parametric(drag(n, a * 0.5, s, 0.3)).duration() == n);
    }
}

TEST_CASE("instruction channel-type rules") {
    CHECK_THROWS_AS(play(constant(4, 0.1), acquire_channel(0)), ValidationError);
    CHECK_THROWS_AS(shift_phase(0.1, acquire_channel(0)), ValidationError);
    CHECK_THROWS_AS(set_frequency(1e9, acquire_channel(0)), ValidationError);
    CHECK_THROWS_AS(acquire(16, drive_channel(0), 0), ValidationError);
    CHECK_NOTHROW(delay(16, acquire_channel(0)));  // delay is universal
}

TEST_CASE("append stacks FIFO on a shared channel") {
    const auto d0 = drive_channel(0);
    Schedule s = Schedule("tg").append(play(constant(128, 0.2), d0));
    CHECK(s.duration() == 128);
    s = s.append(play(constant(64, 0.2), d0));
    REQUIRE(s.entries().size() == 2);
    CHECK(s.entries()[1].t == 128);  // sum of durations on d0
    CHECK(s.duration() == 192);
}

TEST_CASE("append composes disjoint channels in parallel") {
    Schedule s = play_on(drive_channel(0), 100);
    s = s.append(play(constant(40, 0.1), drive_channel(1)));
    CHECK(s.entries()[1].t == 0);
    CHECK(s.duration() == 100);
}

TEST_CASE("the echoed CR build sequence lands pulses where expected") {
    // Two-pulse echo built exactly as in the calibration workflow: CR pulses
    // on u1, a delay plus pi pulses on d1. The second CR pulse must start
    // only after the first echo pulse has finished.
    const Time t_cr = 848, pi_dur = 160;
    const auto u1 = control_channel(1), d1 = drive_channel(1);
    Schedule s("cr2");
    s = s.append(play(gaussian_square(t_cr, 0.2, 32.0, 720.0), u1));
    s = s.append(delay(t_cr, d1));
    s = s.append(play(gaussian(pi_dur, 0.3, 40.0), d1));
    s = s.append(play(gaussian_square(t_cr, -0.2, 32.0, 720.0), u1));
    s = s.append(delay(t_cr, d1));
    s = s.append(play(gaussian(pi_dur, 0.3, 40.0), d1));

    std::vector<Time> u1_plays, d1_plays;
    for (const auto& e : s.entries()) {
        if (const auto* pl = std::get_if<Play>(&e.inst.op)) {
            if (pl->channel == u1) u1_plays.push_back(e.t);
            if (pl->channel == d1) d1_plays.push_back(e.t);
        }
    }
    REQUIRE(u1_plays == std::vector<Time>{0, t_cr + pi_dur});
    REQUIRE(d1_plays.size() == 2);
    CHECK(d1_plays[0] == t_cr);                   // first echo right after the first CR
    CHECK(d1_plays[1] >= u1_plays[1] + t_cr);     // second echo after the second CR
}

TEST_CASE("insert places at absolute time and rejects overlap") {
    Schedule s = Schedule().insert(5, delay(3, drive_channel(0)));
    CHECK(s.duration() == 8);

    Schedule busy = play_on(drive_channel(0), 128);
    CHECK_THROWS_AS(busy.insert(100, play(constant(8, 0.1), drive_channel(0))), ValidationError);
    // Zero-duration instructions may sit inside a busy interval.
    CHECK_NOTHROW(busy.insert(100, shift_phase(0.3, drive_channel(0))));
    CHECK_THROWS_AS(busy.insert(-1, delay(1, drive_channel(0))), ValidationError);
}

TEST_CASE("shift translates all start times") {
    Schedule s = play_on(drive_channel(0), 4);
    CHECK(s.shift(0) == s);
    const Schedule t = s.shift(10);
    CHECK(t.entries()[0].t == 10);
    CHECK(t.duration() == 14);
    CHECK_THROWS_AS(t.shift(-11), ValidationError);
}

TEST_CASE("shift composes additively") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const Time a = static_cast<Time>(rng() % 50), b = static_cast<Time>(rng() % 50);
        Schedule s = play_on(drive_channel(0), 16 + static_cast<Time>(rng() % 64));
        s = s.append(shift_phase(0.25, drive_channel(0)));
        CHECK(s.shift(a + b) == s.shift(a).shift(b));
    }
}

TEST_CASE("append is associative over disjoint channel sets") {
    const Schedule a = play_on(drive_channel(0), 32);
    const Schedule b = play_on(drive_channel(1), 64);
    const Schedule c = play_on(drive_channel(2), 16);
    CHECK(a.append(b).append(c) == a.append(b.append(c)));
}

TEST_CASE("duration is monotone under append and insert") {
    std::mt19937_64 rng(5);
    Schedule s;
    Time last = 0;
    for (int k = 0; k < 40; ++k) {
        const auto ch = drive_channel(static_cast<std::uint32_t>(rng() % 3));
        s = s.append(play(constant(1 + static_cast<Time>(rng() % 32), 0.3), ch));
        CHECK(s.duration() >= last);
        last = s.duration();
    }
}

TEST_CASE("validate flags misaligned acquire and accepts aligned ones") {
    CHECK(Schedule().validate().empty());

    Schedule s = Schedule().insert(0, acquire(100, acquire_channel(0), 0));
    auto diags = s.validate();
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "MisalignedAcquire");

    s = s.insert(20, play(constant(60, 0.1), measure_channel(0)));
    CHECK(s.validate().empty());
}

TEST_CASE("barrier acts as a floor for later appends") {
    const auto d0 = drive_channel(0), d1 = drive_channel(1);
    Schedule s = play_on(d0, 50);
    s = s.append(barrier({d0, d1}));
    CHECK(s.duration() == 50);  // zero duration
    s = s.append(play(constant(10, 0.1), d1));
    CHECK(s.entries().back().t == 50);
}

TEST_CASE("schedule JSON round-trip is byte-identical") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        Schedule s("roundtrip");
        s = s.append(play(gaussian(64, 0.25 * u(rng), 7.3), drive_channel(0)));
        s = s.append(shift_phase(u(rng) * 3.0, drive_channel(0)));
        s = s.append(play(gaussian_square(128, cxd(0.1, 0.05 * u(rng)), 16.0, 96.0), measure_channel(0)));
        s = s.insert(0, acquire(128, acquire_channel(0), 0));
        s = s.append(set_frequency(5.1e9 + 1e5 * u(rng), drive_channel(0)));
        s = s.append(play(SampledPulse({{0.1, 0.2}, {u(rng) * 0.5, -0.3}}, "raw"), drive_channel(0)));
        s = s.append(barrier({drive_channel(0), measure_channel(0)}));

        const std::string first = stable_dump(schedule_to_json(s));
        const Schedule parsed = schedule_from_json(parse_json(first));
        const std::string second = stable_dump(schedule_to_json(parsed));
        REQUIRE(first == second);
        CHECK(parsed == s);
    }
}

TEST_CASE("schedules are immutable values") {
    const Schedule s = play_on(drive_channel(0), 16);
    const Schedule t = s.append(play(constant(4, 0.1), drive_channel(0)));
    CHECK(s.entries().size() == 1);
    CHECK(t.entries().size() == 2);
    CHECK(s.duration() == 16);
}
