#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "pulseforge/channels.hpp"
#include "pulseforge/pulses.hpp"

namespace pulseforge {

using Time = std::int64_t;  // nonnegative cycle count

struct Play {
    Pulse pulse;
    ChannelId channel;

    bool operator==(const Play&) const = default;
};

struct Delay {
    Time duration = 0;
    ChannelId channel;

    bool operator==(const Delay&) const = default;
};

struct ShiftPhase {
    double phase = 0.0;  // radians, added to the channel frame
    ChannelId channel;

    bool operator==(const ShiftPhase&) const = default;
};

struct SetFrequency {
    double frequency = 0.0;  // Hz
    ChannelId channel;

    bool operator==(const SetFrequency&) const = default;
};

struct Acquire {
    Time duration = 0;
    ChannelId channel;
    std::uint32_t memory_slot = 0;

    bool operator==(const Acquire&) const = default;
};

// Zero-duration alignment fence: later appends on the fenced channels start
// no earlier than the barrier time.
struct Barrier {
    std::vector<ChannelId> channels;

    bool operator==(const Barrier&) const = default;
};

struct Instruction {
    std::variant<Play, Delay, ShiftPhase, SetFrequency, Acquire, Barrier> op;

    Time duration() const {
        return std::visit(
            [](const auto& i) -> Time {
                using T = std::decay_t<decltype(i)>;
                if constexpr (std::is_same_v<T, Play>) return pulse_duration(i.pulse);
                else if constexpr (std::is_same_v<T, Delay>) return i.duration;
                else if constexpr (std::is_same_v<T, Acquire>) return i.duration;
                else return 0;
            },
            op);
    }

    bool operator==(const Instruction&) const = default;

    std::vector<ChannelId> channels() const {
        return std::visit(
            [](const auto& i) -> std::vector<ChannelId> {
                using T = std::decay_t<decltype(i)>;
                if constexpr (std::is_same_v<T, Barrier>) return i.channels;
                else return {i.channel};
            },
            op);
    }
};

// Factories. Channel-type rules: Play/ShiftPhase/SetFrequency require a
// transmit (pulse) channel; Acquire requires an acquire channel.
inline Instruction play(Pulse pulse, ChannelId ch) {
    if (!ch.is_pulse_channel()) throw ValidationError("Play requires a pulse channel, got " + ch.str());
    if (const auto* par = std::get_if<ParametricPulse>(&pulse)) sample_parametric(*par);  // validates
    return {Play{std::move(pulse), ch}};
}
inline Instruction delay(Time duration, ChannelId ch) {
    if (duration < 0) throw ValidationError("negative delay");
    return {Delay{duration, ch}};
}
inline Instruction shift_phase(double phase, ChannelId ch) {
    if (!ch.is_pulse_channel()) throw ValidationError("ShiftPhase requires a pulse channel, got " + ch.str());
    return {ShiftPhase{phase, ch}};
}
inline Instruction set_frequency(double freq, ChannelId ch) {
    if (!ch.is_pulse_channel()) throw ValidationError("SetFrequency requires a pulse channel, got " + ch.str());
    return {SetFrequency{freq, ch}};
}
inline Instruction acquire(Time duration, ChannelId ch, std::uint32_t memory_slot) {
    if (ch.kind != ChannelKind::Acquire) throw ValidationError("Acquire requires an acquire channel, got " + ch.str());
    if (duration < 0) throw ValidationError("negative acquire duration");
    return {Acquire{duration, ch, memory_slot}};
}
inline Instruction barrier(std::vector<ChannelId> channels) { return {Barrier{std::move(channels)}}; }

}  // namespace pulseforge
