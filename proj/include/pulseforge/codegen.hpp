#pragma once

// Target code generation: resolve a validated Schedule into per-channel
// discrete sample streams with frame (phase/frequency) tracking.
//
// Each pulse channel carries a frame (f, phi). A Play at start cycle t0
// emits the modulated sample
//
//     m_j = exp(i (2 pi f (t0 + j) dt + phi)) d_j
//
// using the frame values in effect at t0; the real output is D_j = Re m_j.
// ShiftPhase adds to phi from its timestamp onward, SetFrequency replaces f.
// The carrier phase is referenced to absolute time, so SetFrequency does not
// rewind previously accumulated carrier phase. Zero-duration instructions at
// the same timestamp apply in schedule entry order.

#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "pulseforge/schedule.hpp"

namespace pulseforge {

struct FrameSegment {
    Time t = 0;
    double frequency = 0.0;  // Hz
    double phase = 0.0;      // radians, unwrapped
};

struct AcquireWindow {
    Time start = 0;
    Time duration = 0;
    std::uint32_t memory_slot = 0;
};

struct ChannelProgram {
    ChannelId channel;
    std::vector<cxd> samples;  // modulated envelope; zero outside Play intervals
    std::vector<AcquireWindow> acquire_windows;
};

// Piecewise-constant frame history of one channel: (time, f, phi) segments.
// Consecutive zero-duration frame instructions at one timestamp compose in
// entry order. `frequency_offset` is subtracted from the initial frequency
// and from every SetFrequency operand, yielding a frame relative to that
// carrier reference (used by the rotating-frame simulator).
inline std::vector<FrameSegment> frame_trace(const Schedule& sched, const ChannelId& ch,
                                             double initial_frequency, double frequency_offset = 0.0) {
    if (!ch.is_pulse_channel()) throw ValidationError("frame_trace requires a pulse channel");
    std::vector<FrameSegment> out{{0, initial_frequency - frequency_offset, 0.0}};
    for (const auto& e : sched.entries()) {
        double f = out.back().frequency, phi = out.back().phase;
        bool changed = false;
        if (const auto* sp = std::get_if<ShiftPhase>(&e.inst.op); sp && sp->channel == ch) {
            phi += sp->phase;
            changed = true;
        } else if (const auto* sf = std::get_if<SetFrequency>(&e.inst.op); sf && sf->channel == ch) {
            f = sf->frequency - frequency_offset;
            changed = true;
        }
        if (!changed) continue;
        if (out.back().t == e.t)
            out.back() = {e.t, f, phi};
        else
            out.push_back({e.t, f, phi});
    }
    return out;
}

namespace detail {
inline FrameSegment frame_at(const std::vector<FrameSegment>& trace, Time t) {
    FrameSegment cur = trace.front();
    for (const auto& seg : trace) {
        if (seg.t > t) break;
        cur = seg;
    }
    return cur;
}
}  // namespace detail

// Lower a schedule to per-channel sample streams. Every channel used by the
// schedule gets a program whose sample stream spans the full block duration.
// `frame_offsets` shifts the carrier reference per channel (both the initial
// frequency and any SetFrequency operand are taken relative to it); the
// default of zero reproduces the absolute-frequency output signal.
inline std::map<ChannelId, ChannelProgram> lower(
    const Schedule& sched, double dt, const std::map<ChannelId, double>& initial_frequencies,
    const std::map<ChannelId, double>& frame_offsets = {}) {
    for (const auto& d : sched.validate())
        if (d.severity == Severity::Error)
            throw ValidationError("cannot lower invalid schedule: " + d.code + ": " + d.message);

    const Time total = sched.duration();
    std::map<ChannelId, ChannelProgram> out;
    for (const auto& ch : sched.channels()) {
        ChannelProgram prog;
        prog.channel = ch;
        prog.samples.assign(static_cast<std::size_t>(total), cxd(0.0, 0.0));
        out.emplace(ch, std::move(prog));
    }

    // Frame traces for the pulse channels that appear.
    std::map<ChannelId, std::vector<FrameSegment>> traces;
    for (const auto& ch : sched.channels()) {
        if (!ch.is_pulse_channel()) continue;
        auto it = initial_frequencies.find(ch);
        if (it == initial_frequencies.end())
            throw ValidationError("no initial frequency for channel " + ch.str());
        double offset = 0.0;
        if (auto off = frame_offsets.find(ch); off != frame_offsets.end()) offset = off->second;
        traces.emplace(ch, frame_trace(sched, ch, it->second, offset));
    }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const auto& e : sched.entries()) {
        if (const auto* pl = std::get_if<Play>(&e.inst.op)) {
            const auto frame = detail::frame_at(traces.at(pl->channel), e.t);
            auto& dest = out.at(pl->channel).samples;
            const auto samples = pulse_samples(pl->pulse).samples;
            for (std::size_t j = 0; j < samples.size(); ++j) {
                const double t_abs = static_cast<double>(e.t + static_cast<Time>(j));
                const double angle = two_pi * frame.frequency * t_abs * dt + frame.phase;
                dest[static_cast<std::size_t>(e.t) + j] = std::polar(1.0, angle) * samples[j];
            }
        } else if (const auto* acq = std::get_if<Acquire>(&e.inst.op)) {
            out.at(acq->channel).acquire_windows.push_back({e.t, acq->duration, acq->memory_slot});
        }
    }
    return out;
}

inline double real_output(const cxd& modulated) { return modulated.real(); }

}  // namespace pulseforge
