#pragma once

// The pulse Schedule: a basic block of absolutely-timed instructions over
// channels. Schedules are immutable values; every operation returns a new
// schedule. Timing rules:
//
//  - duration = max over entries of (start + instruction duration), 0 if empty
//  - no two nonzero-duration instructions may overlap on the same channel
//  - append shifts the operand so it begins at the latest stop time on any
//    channel shared with the existing entries (zero-duration instructions,
//    barriers included, stop at their own start time and thus act as floors)
//  - zero-duration instructions at equal times apply in entry order

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pulseforge/instructions.hpp"

namespace pulseforge {

enum class Severity : std::uint8_t { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;     // e.g. "OverlapError", "MisalignedAcquire"
    std::string message;
    std::optional<ChannelId> channel;
    Time start = 0, stop = 0;  // offending interval when applicable
};

class Schedule {
  public:
    struct Entry {
        Time t = 0;
        Instruction inst;
        bool operator==(const Entry&) const = default;
    };

    Schedule() = default;
    explicit Schedule(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    bool operator==(const Schedule&) const = default;

    Time duration() const {
        Time d = 0;
        for (const auto& e : entries_) d = std::max(d, e.t + e.inst.duration());
        return d;
    }

    Time earliest_start() const {
        Time t = std::numeric_limits<Time>::max();
        for (const auto& e : entries_) t = std::min(t, e.t);
        return entries_.empty() ? 0 : t;
    }

    std::set<ChannelId> channels() const {
        std::set<ChannelId> out;
        for (const auto& e : entries_)
            for (const auto& c : e.inst.channels()) out.insert(c);
        return out;
    }

    // Latest stop time on the channel; zero-duration instructions stop at
    // their own start, so a trailing ShiftPhase does not extend the channel.
    Time channel_stop(const ChannelId& ch) const {
        Time d = 0;
        for (const auto& e : entries_)
            for (const auto& c : e.inst.channels())
                if (c == ch) d = std::max(d, e.t + e.inst.duration());
        return d;
    }

    // Append an instruction or schedule. An operand sharing no channel with
    // the existing entries composes in parallel at t=0; an operand touching
    // any existing channel is enqueued after the whole block, i.e. at the
    // current schedule duration (>= the latest stop on every shared channel,
    // so FIFO order per channel is always preserved).
    Schedule append(const Schedule& other) const {
        Time at = 0;
        const auto mine = channels();
        for (const auto& ch : other.channels())
            if (mine.count(ch)) { at = duration(); break; }
        Schedule out = *this;
        for (const auto& e : other.entries_) out.place(e.t + at, e.inst);
        return out;
    }
    Schedule append(const Instruction& inst) const { return append(wrap(inst)); }

    // Place an instruction at an absolute time; fails on channel overlap.
    Schedule insert(Time at, const Instruction& inst) const {
        if (at < 0) throw ValidationError("insert time must be nonnegative");
        if (auto d = find_overlap(at, inst)) {
            throw ValidationError("OverlapError: " + d->message);
        }
        Schedule out = *this;
        out.place(at, inst);
        return out;
    }

    // Shift every start time by delta (delta may be negative as long as no
    // start becomes negative).
    Schedule shift(Time delta) const {
        if (!entries_.empty() && earliest_start() + delta < 0)
            throw ValidationError("shift would produce a negative start time");
        Schedule out(name_);
        out.entries_.reserve(entries_.size());
        for (const auto& e : entries_) out.entries_.push_back({e.t + delta, e.inst});
        return out;
    }

    Schedule with_name(std::string n) const {
        Schedule out = *this;
        out.name_ = std::move(n);
        return out;
    }

    // All invariants as diagnostics: channel overlaps, negative starts, and
    // measurement alignment (every Acquire must overlap in time with a Play
    // on the same-indexed Measure channel).
    std::vector<Diagnostic> validate() const {
        std::vector<Diagnostic> out;
        for (const auto& e : entries_)
            if (e.t < 0)
                out.push_back({Severity::Error, "NegativeTime", "instruction scheduled before t=0", std::nullopt,
                               e.t, e.t + e.inst.duration()});

        // Per-channel interval overlap among nonzero-duration instructions.
        std::map<ChannelId, std::vector<std::pair<Time, Time>>> busy;
        for (const auto& e : entries_) {
            const Time dur = e.inst.duration();
            if (dur == 0) continue;
            for (const auto& ch : e.inst.channels()) busy[ch].push_back({e.t, e.t + dur});
        }
        for (auto& [ch, iv] : busy) {
            std::sort(iv.begin(), iv.end());
            for (std::size_t i = 1; i < iv.size(); ++i)
                if (iv[i].first < iv[i - 1].second)
                    out.push_back({Severity::Error, "OverlapError",
                                   "overlapping instructions on " + ch.str(), ch, iv[i].first,
                                   std::min(iv[i - 1].second, iv[i].second)});
        }

        // Acquire alignment with a measurement stimulus.
        for (const auto& e : entries_) {
            const auto* acq = std::get_if<Acquire>(&e.inst.op);
            if (!acq) continue;
            const ChannelId m = measure_channel(acq->channel.index);
            const Time a0 = e.t, a1 = e.t + acq->duration;
            bool aligned = false;
            for (const auto& f : entries_) {
                const auto* pl = std::get_if<Play>(&f.inst.op);
                if (!pl || pl->channel != m) continue;
                const Time p0 = f.t, p1 = f.t + f.inst.duration();
                if (p0 < a1 && a0 < p1) { aligned = true; break; }
            }
            if (!aligned)
                out.push_back({Severity::Error, "MisalignedAcquire",
                               "Acquire on " + acq->channel.str() + " has no overlapping Play on " + m.str(),
                               acq->channel, a0, a1});
        }
        return out;
    }

    static Schedule wrap(const Instruction& inst) {
        Schedule s;
        s.place(0, inst);
        return s;
    }

  private:
    // Keep entries sorted by time; ties preserve insertion order.
    void place(Time t, const Instruction& inst) {
        auto it = std::upper_bound(entries_.begin(), entries_.end(), t,
                                   [](Time v, const Entry& e) { return v < e.t; });
        entries_.insert(it, Entry{t, inst});
    }

    std::optional<Diagnostic> find_overlap(Time at, const Instruction& inst) const {
        const Time dur = inst.duration();
        if (dur == 0) return std::nullopt;
        for (const auto& ch : inst.channels()) {
            for (const auto& e : entries_) {
                const Time ed = e.inst.duration();
                if (ed == 0) continue;
                for (const auto& ec : e.inst.channels()) {
                    if (ec != ch) continue;
                    if (e.t < at + dur && at < e.t + ed)
                        return Diagnostic{Severity::Error, "OverlapError",
                                          ch.str() + " busy in [" + std::to_string(e.t) + ", " +
                                              std::to_string(e.t + ed) + ")",
                                          ch, std::max(at, e.t), std::min(at + dur, e.t + ed)};
                }
            }
        }
        return std::nullopt;
    }

    std::string name_;
    std::vector<Entry> entries_;
};

inline Schedule operator+(const Schedule& lhs, const Instruction& inst) { return lhs.append(inst); }
inline Schedule operator+(const Schedule& lhs, const Schedule& rhs) { return lhs.append(rhs); }

}  // namespace pulseforge
