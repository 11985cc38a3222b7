#pragma once

// Gate-level mini circuit IR and the gate-to-pulse scheduler.
//
// Scheduling lowers a circuit to a pulse Schedule using an
// InstructionScheduleMap of calibrated gate templates. Placement never
// alters the internal relative timing of a template. Policies:
//
//  - ASAP: every gate starts as early as its qubit and channel dependencies
//    allow; measurements start together at the earliest common time.
//  - ALAP: implemented as ASAP over the reversed op list followed by time
//    reflection, so gates sit as late as their dependencies allow and every
//    measured qubit meets its measurement with zero idle time. Gates that
//    feed no measurement are right-aligned to the block end.
//
// A zero-duration Barrier is inserted across the channels of all measured
// qubits at the common measurement start.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pulseforge/schedule.hpp"
#include "pulseforge/serialize.hpp"

namespace pulseforge {

struct CircuitOp {
    std::string gate;
    std::vector<std::uint32_t> qubits;
    std::vector<double> params;
};

struct MiniCircuit {
    std::uint32_t num_qubits = 0;
    std::vector<CircuitOp> ops;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> measurements;  // (qubit, memory slot)

    void check() const {
        for (const auto& op : ops)
            for (auto q : op.qubits)
                if (q >= num_qubits) throw ValidationError("qubit index out of range in gate " + op.gate);
        for (const auto& [q, slot] : measurements)
            if (q >= num_qubits) throw ValidationError("measured qubit index out of range");
    }
};

inline ojson circuit_to_json(const MiniCircuit& c) {
    ojson j;
    j["n"] = c.num_qubits;
    auto ops = ojson::array();
    for (const auto& op : c.ops) {
        ojson oj;
        oj["g"] = op.gate;
        oj["q"] = op.qubits;
        oj["p"] = op.params;
        ops.push_back(std::move(oj));
    }
    j["ops"] = std::move(ops);
    auto meas = ojson::array();
    for (const auto& [q, s] : c.measurements) meas.push_back(ojson::array({q, s}));
    j["meas"] = std::move(meas);
    return j;
}

inline MiniCircuit circuit_from_json(const ojson& j) {
    MiniCircuit c;
    c.num_qubits = j.at("n").get<std::uint32_t>();
    for (const auto& oj : j.at("ops")) {
        CircuitOp op;
        op.gate = oj.at("g").get<std::string>();
        op.qubits = oj.at("q").get<std::vector<std::uint32_t>>();
        if (oj.contains("p")) op.params = oj.at("p").get<std::vector<double>>();
        c.ops.push_back(std::move(op));
    }
    if (j.contains("meas"))
        for (const auto& mj : j.at("meas"))
            c.measurements.emplace_back(mj.at(0).get<std::uint32_t>(), mj.at(1).get<std::uint32_t>());
    c.check();
    return c;
}

enum class SchedulingPolicy { ALAP, ASAP };

// Lookup table of calibrated pulse schedules, keyed by gate name and the
// ordered qubit tuple (cx on (1,0) and (0,1) are distinct entries). Entries
// are either concrete schedules or factories over the gate's parameters.
class InstructionScheduleMap {
  public:
    using Factory = std::function<Schedule(const std::vector<double>&)>;
    using Key = std::pair<std::string, std::vector<std::uint32_t>>;

    bool has(const std::string& gate, const std::vector<std::uint32_t>& qubits) const {
        return entries_.count({gate, qubits}) > 0;
    }

    Schedule get(const std::string& gate, const std::vector<std::uint32_t>& qubits,
                 const std::vector<double>& params = {}) const {
        auto it = entries_.find({gate, qubits});
        if (it == entries_.end()) {
            std::string qs;
            for (auto q : qubits) qs += (qs.empty() ? "" : ",") + std::to_string(q);
            throw MissingDefinition("no schedule for gate '" + gate + "' on qubits (" + qs + ")");
        }
        if (const auto* sched = std::get_if<Schedule>(&it->second)) return *sched;
        return std::get<Factory>(it->second)(params);
    }

    void add(const std::string& gate, std::vector<std::uint32_t> qubits, Schedule sched) {
        for (const auto& d : sched.validate())
            if (d.severity == Severity::Error && !(gate != "measure" && d.code == "MisalignedAcquire"))
                throw ValidationError("invalid schedule for gate '" + gate + "': " + d.message);
        entries_[{gate, std::move(qubits)}] = std::move(sched);  // re-registration overwrites
    }

    void add(const std::string& gate, std::vector<std::uint32_t> qubits, Factory f) {
        entries_[{gate, std::move(qubits)}] = std::move(f);
    }

    // Concrete (non-factory) entries only.
    std::vector<std::pair<Key, Schedule>> concrete_entries() const {
        std::vector<std::pair<Key, Schedule>> out;
        for (const auto& [k, v] : entries_)
            if (const auto* sched = std::get_if<Schedule>(&v)) out.emplace_back(k, *sched);
        return out;
    }

  private:
    std::map<Key, std::variant<Schedule, Factory>> entries_;
};

inline InstructionScheduleMap register_gate(InstructionScheduleMap map, const std::string& gate,
                                            std::vector<std::uint32_t> qubits, Schedule sched) {
    map.add(gate, std::move(qubits), std::move(sched));
    return map;
}

inline ojson inst_map_to_json(const InstructionScheduleMap& map) {
    ojson j;
    auto entries = ojson::array();
    for (const auto& [key, sched] : map.concrete_entries()) {
        ojson ej;
        ej["gate"] = key.first;
        ej["qubits"] = key.second;
        ej["sched"] = schedule_to_json(sched);
        entries.push_back(std::move(ej));
    }
    j["entries"] = std::move(entries);
    return j;
}

inline InstructionScheduleMap inst_map_from_json(const ojson& j, InstructionScheduleMap base = {}) {
    for (const auto& ej : j.at("entries"))
        base.add(ej.at("gate").get<std::string>(), ej.at("qubits").get<std::vector<std::uint32_t>>(),
                 schedule_from_json(ej.at("sched")));
    return base;
}

namespace detail {

struct Placement {
    Schedule sub;   // template instance (parameters resolved)
    Time start = 0;
    bool is_measure = false;
    std::uint32_t measure_qubit = 0;
};

// Forward ASAP placement of resolved gate instances. Gates sharing a qubit
// are serialized in list order; shared channels never overlap. Measurements
// (if any) are placed last, all starting at the common earliest time.
inline std::vector<Placement> asap_place(const std::vector<std::pair<Schedule, std::vector<std::uint32_t>>>& gates,
                                         const std::vector<std::pair<Schedule, std::uint32_t>>& measures,
                                         bool measures_first) {
    std::vector<Placement> out;
    std::map<std::uint32_t, Time> qubit_ready;
    std::map<ChannelId, Time> channel_busy;

    auto place = [&](const Schedule& sub, const std::vector<std::uint32_t>& qubits, Time floor) {
        Time t0 = floor;
        for (auto q : qubits)
            if (auto it = qubit_ready.find(q); it != qubit_ready.end()) t0 = std::max(t0, it->second);
        for (const auto& ch : sub.channels()) {
            if (auto it = channel_busy.find(ch); it != channel_busy.end())
                t0 = std::max(t0, it->second);  // template channel use begins at offset >= 0
        }
        const Time end = t0 + sub.duration();
        for (auto q : qubits) qubit_ready[q] = end;
        for (const auto& ch : sub.channels()) channel_busy[ch] = std::max(channel_busy[ch], t0 + sub.channel_stop(ch));
        return t0;
    };

    auto place_measures = [&] {
        // Common aligned start across all measured qubits.
        Time t0 = 0;
        for (const auto& [sub, q] : measures) {
            if (auto it = qubit_ready.find(q); it != qubit_ready.end()) t0 = std::max(t0, it->second);
            for (const auto& ch : sub.channels())
                if (auto it = channel_busy.find(ch); it != channel_busy.end()) t0 = std::max(t0, it->second);
        }
        for (const auto& [sub, q] : measures) {
            const Time end = t0 + sub.duration();
            qubit_ready[q] = end;
            for (const auto& ch : sub.channels()) channel_busy[ch] = std::max(channel_busy[ch], t0 + sub.channel_stop(ch));
            out.push_back({sub, t0, true, q});
        }
    };

    if (measures_first && !measures.empty()) place_measures();
    for (const auto& [sub, qubits] : gates) out.push_back({sub, place(sub, qubits, 0), false, 0});
    if (!measures_first && !measures.empty()) place_measures();
    return out;
}

}  // namespace detail

// Lower a circuit to a pulse schedule. Every op must have a map entry under
// (gate, qubits); measurements need a parameterized 'measure' entry per
// qubit whose parameter is the memory slot.
inline Schedule schedule_circuit(const MiniCircuit& circuit, const InstructionScheduleMap& map,
                                 SchedulingPolicy policy) {
    circuit.check();

    std::vector<std::pair<Schedule, std::vector<std::uint32_t>>> gates;
    for (const auto& op : circuit.ops) gates.emplace_back(map.get(op.gate, op.qubits, op.params), op.qubits);

    std::vector<std::pair<Schedule, std::uint32_t>> measures;
    for (const auto& [q, slot] : circuit.measurements)
        measures.emplace_back(map.get("measure", {q}, {static_cast<double>(slot)}), q);

    std::vector<detail::Placement> placed;
    if (policy == SchedulingPolicy::ASAP) {
        placed = detail::asap_place(gates, measures, /*measures_first=*/false);
    } else {
        // ALAP: ASAP over the reversed list with measurements first, then
        // reflect start times about the makespan.
        std::vector<std::pair<Schedule, std::vector<std::uint32_t>>> rev(gates.rbegin(), gates.rend());
        placed = detail::asap_place(rev, measures, /*measures_first=*/true);
        Time makespan = 0;
        for (const auto& p : placed) makespan = std::max(makespan, p.start + p.sub.duration());
        for (auto& p : placed) p.start = makespan - p.start - p.sub.duration();
    }

    Schedule out(circuit.ops.empty() && circuit.measurements.empty() ? "empty" : "scheduled");
    for (const auto& p : placed)
        for (const auto& e : p.sub.entries()) out = out.insert(p.start + e.t, e.inst);

    // Fence across all measured qubits' channels at the common measure start.
    if (!measures.empty()) {
        Time meas_start = std::numeric_limits<Time>::max();
        std::vector<ChannelId> fenced;
        for (const auto& p : placed) {
            if (!p.is_measure) continue;
            meas_start = std::min(meas_start, p.start);
            fenced.push_back(drive_channel(p.measure_qubit));
            fenced.push_back(measure_channel(p.measure_qubit));
            fenced.push_back(acquire_channel(p.measure_qubit));
        }
        out = out.insert(meas_start, barrier(std::move(fenced)));
    }
    return out;
}

}  // namespace pulseforge
