#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "pulseforge/errors.hpp"

namespace pulseforge {

// Channel kinds. Drive, Measure and Control channels transmit stimulus
// pulses; Acquire channels only receive. Drive/Measure/Acquire indices
// address qubits, Control indices are free-standing.
enum class ChannelKind : std::uint8_t { Drive, Measure, Control, Acquire };

struct ChannelId {
    ChannelKind kind = ChannelKind::Drive;
    std::uint32_t index = 0;

    auto operator<=>(const ChannelId&) const = default;

    bool is_pulse_channel() const { return kind != ChannelKind::Acquire; }

    // Canonical alias: d<i>, m<i>, u<i>, a<i>.
    std::string str() const {
        static constexpr char prefix[] = {'d', 'm', 'u', 'a'};
        return prefix[static_cast<int>(kind)] + std::to_string(index);
    }

    static ChannelId parse(const std::string& alias) {
        if (alias.size() < 2) throw ValidationError("bad channel alias: " + alias);
        ChannelKind kind;
        switch (alias[0]) {
            case 'd': kind = ChannelKind::Drive; break;
            case 'm': kind = ChannelKind::Measure; break;
            case 'u': kind = ChannelKind::Control; break;
            case 'a': kind = ChannelKind::Acquire; break;
            default: throw ValidationError("bad channel alias: " + alias);
        }
        for (std::size_t i = 1; i < alias.size(); ++i)
            if (alias[i] < '0' || alias[i] > '9')
                throw ValidationError("bad channel alias: " + alias);
        return {kind, static_cast<std::uint32_t>(std::stoul(alias.substr(1)))};
    }
};

inline ChannelId drive_channel(std::uint32_t q) { return {ChannelKind::Drive, q}; }
inline ChannelId measure_channel(std::uint32_t q) { return {ChannelKind::Measure, q}; }
inline ChannelId control_channel(std::uint32_t i) { return {ChannelKind::Control, i}; }
inline ChannelId acquire_channel(std::uint32_t q) { return {ChannelKind::Acquire, q}; }

}  // namespace pulseforge

template <>
struct std::hash<pulseforge::ChannelId> {
    std::size_t operator()(const pulseforge::ChannelId& c) const noexcept {
        return (static_cast<std::size_t>(c.kind) << 32) ^ c.index;
    }
};
