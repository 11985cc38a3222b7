#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "pulseforge/pulseforge.hpp"

using namespace pulseforge;

namespace {

Schedule pulse_gate(std::uint32_t q, Time len, double amp = 0.3) {
    return Schedule("g").append(play(gaussian(len, amp, len / 4.0), drive_channel(q)));
}

// Two-qubit template with staggered pulses on both drives plus a control
// channel, so placement must respect several channels at once.
Schedule two_qubit_gate(std::uint32_t a, std::uint32_t b, std::uint32_t u, Time len) {
    Schedule s("cx_like");
    s = s.append(play(gaussian_square(len, 0.2, len / 8.0, len / 2.0), control_channel(u)));
    s = s.append(delay(len / 4, drive_channel(a)));
    s = s.append(play(gaussian(len / 4, 0.25, len / 16.0), drive_channel(a)));
    s = s.append(play(gaussian(len / 2, 0.25, len / 8.0), drive_channel(b)));
    return s;
}

Schedule measure_template(std::uint32_t q, std::uint32_t slot, Time len = 1200) {
    Schedule s("measure");
    s = s.append(play(gaussian_square(len, 0.1, 32.0, len * 0.75), measure_channel(q)));
    s = s.insert(0, acquire(len, acquire_channel(q), slot));
    return s;
}

InstructionScheduleMap test_map() {
    InstructionScheduleMap map;
    map.add("x", {0}, pulse_gate(0, 160));
    map.add("x", {1}, pulse_gate(1, 160));
    map.add("x", {2}, pulse_gate(2, 320));
    map.add("short", {0}, pulse_gate(0, 160));
    map.add("short", {1}, pulse_gate(1, 160));
    map.add("short", {2}, pulse_gate(2, 160));
    map.add("long", {0}, pulse_gate(0, 320));
    map.add("long", {1}, pulse_gate(1, 320));
    map.add("long", {2}, pulse_gate(2, 320));
    map.add("cx", {1, 0}, two_qubit_gate(1, 0, 1, 640));
    map.add("cx", {0, 1}, two_qubit_gate(0, 1, 2, 640));
    map.add("cx", {1, 2}, two_qubit_gate(1, 2, 3, 640));
    for (std::uint32_t q = 0; q < 3; ++q)
        map.add("measure", {q}, InstructionScheduleMap::Factory([q](const std::vector<double>& p) {
                    return measure_template(q, p.empty() ? q : static_cast<std::uint32_t>(p[0]));
                }));
    return map;
}

// Start time of each placed gate instance, recovered by matching the
// template's first entry channel/offset signature in order.
struct PlacedGate {
    Time start = 0, end = 0;
};

// Offsets of all instructions of `sub` relative to a candidate start must
// appear in `sched`; returns placements of each op in circuit order by
// simulating the same scheduling contract through public behavior: we
// re-derive starts from pulse entries on the ops' channels in order.
std::vector<PlacedGate> gate_placements(const Schedule& sched, const MiniCircuit& c,
                                        const InstructionScheduleMap& map) {
    // Multiset of remaining play entries per channel.
    std::map<ChannelId, std::vector<Time>> plays;
    for (const auto& e : sched.entries())
        if (std::holds_alternative<Play>(e.inst.op))
            plays[std::get<Play>(e.inst.op).channel].push_back(e.t);

    std::vector<PlacedGate> out;
    for (const auto& op : c.ops) {
        const Schedule sub = map.get(op.gate, op.qubits, op.params);
        // First play of the template fixes the placement.
        Time first_offset = -1;
        ChannelId first_ch;
        for (const auto& e : sub.entries())
            if (std::holds_alternative<Play>(e.inst.op)) {
                first_offset = e.t;
                first_ch = std::get<Play>(e.inst.op).channel;
                break;
            }
        REQUIRE(first_offset >= 0);
        auto& list = plays[first_ch];
        REQUIRE(!list.empty());
        const Time start = list.front() - first_offset;
        // Consume all template plays.
        for (const auto& e : sub.entries())
            if (std::holds_alternative<Play>(e.inst.op)) {
                auto& l = plays[std::get<Play>(e.inst.op).channel];
                const Time want = start + e.t;
                auto it = std::find(l.begin(), l.end(), want);
                REQUIRE(it != l.end());
                l.erase(it);
            }
        out.push_back({start, start + sub.duration()});
    }
    return out;
}

Time measure_start(const Schedule& sched) {
    Time t = std::numeric_limits<Time>::max();
    for (const auto& e : sched.entries())
        if (std::holds_alternative<Acquire>(e.inst.op)) t = std::min(t, e.t);
    return t;
}

}  // namespace

TEST_CASE("map lookup is exact on the ordered qubit tuple") {
    InstructionScheduleMap map;
    map.add("cr1", {1, 0}, pulse_gate(1, 128));
    CHECK(map.has("cr1", {1, 0}));
    CHECK_FALSE(map.has("cr1", {0, 1}));
    CHECK_NOTHROW(map.get("cr1", {1, 0}));
    CHECK_THROWS_AS(map.get("cr1", {0, 1}), MissingDefinition);
}

TEST_CASE("re-registration overwrites the previous schedule") {
    InstructionScheduleMap map;
    map.add("cx", {1, 0}, pulse_gate(1, 128));
    map.add("cx", {1, 0}, pulse_gate(1, 256));
    CHECK(map.get("cx", {1, 0}).duration() == 256);
}

TEST_CASE("registration validates the schedule") {
    InstructionScheduleMap map;
    // A lone acquire is invalid for 'measure' but tolerated for other gates
    // only if it has a stimulus; build an overlapping-play schedule instead.
    Schedule bad = Schedule().insert(0, acquire(100, acquire_channel(0), 0));
    CHECK_THROWS_AS(map.add("measure", {0}, bad), ValidationError);
    CHECK_NOTHROW(map.add("justacquire", {0}, bad));  // alignment exempt for non-measure gates
}

TEST_CASE("single gate plus measure under ALAP") {
    const auto map = test_map();
    MiniCircuit c;
    c.num_qubits = 1;
    c.ops.push_back({"x", {0}, {}});
    c.measurements = {{0, 0}};
    const Schedule sched = schedule_circuit(c, map, SchedulingPolicy::ALAP);
    CHECK(sched.duration() == 160 + 1200);
    const auto placed = gate_placements(sched, c, map);
    CHECK(placed[0].start == 0);
    CHECK(measure_start(sched) == 160);
    CHECK(sched.validate().empty());
}

TEST_CASE("ALAP right-aligns the shorter of two parallel gates") {
    const auto map = test_map();
    MiniCircuit c;
    c.num_qubits = 2;
    c.ops.push_back({"short", {0}, {}});  // 160
    c.ops.push_back({"long", {1}, {}});   // 320
    c.measurements = {{0, 0}, {1, 1}};
    const Schedule sched = schedule_circuit(c, map, SchedulingPolicy::ALAP);
    const auto placed = gate_placements(sched, c, map);
    CHECK(placed[0].start == 160);  // shorter gate starts late
    CHECK(placed[1].start == 0);
    CHECK(placed[0].end == 320);
    CHECK(placed[1].end == 320);
    CHECK(measure_start(sched) == 320);
}

TEST_CASE("ASAP left-aligns instead") {
    const auto map = test_map();
    MiniCircuit c;
    c.num_qubits = 2;
    c.ops.push_back({"short", {0}, {}});
    c.ops.push_back({"long", {1}, {}});
    c.measurements = {{0, 0}, {1, 1}};
    const Schedule sched = schedule_circuit(c, map, SchedulingPolicy::ASAP);
    const auto placed = gate_placements(sched, c, map);
    CHECK(placed[0].start == 0);
    CHECK(placed[1].start == 0);
    CHECK(measure_start(sched) == 320);  // aligned at the latest ready time
}

TEST_CASE("ALAP and ASAP agree on a linear chain's duration") {
    const auto map = test_map();
    MiniCircuit c;
    c.num_qubits = 1;
    for (int k = 0; k < 4; ++k) c.ops.push_back({"short", {0}, {}});
    c.measurements = {{0, 0}};
    const auto alap = schedule_circuit(c, map, SchedulingPolicy::ALAP);
    const auto asap = schedule_circuit(c, map, SchedulingPolicy::ASAP);
    CHECK(alap.duration() == asap.duration());
    CHECK(alap.duration() == 4 * 160 + 1200);
}

TEST_CASE("bell-style circuit keeps measurement stimuli aligned") {
    const auto map = test_map();
    MiniCircuit c;
    c.num_qubits = 2;
    c.ops.push_back({"short", {1}, {}});
    c.ops.push_back({"cx", {1, 0}, {}});
    c.measurements = {{0, 0}, {1, 1}};
    const Schedule sched = schedule_circuit(c, map, SchedulingPolicy::ALAP);

    // Both measure stimuli start at the same cycle and a barrier marks it.
    std::vector<Time> meas_plays;
    bool barrier_at_meas = false;
    for (const auto& e : sched.entries()) {
        if (const auto* pl = std::get_if<Play>(&e.inst.op))
            if (pl->channel.kind == ChannelKind::Measure) meas_plays.push_back(e.t);
        if (std::holds_alternative<Barrier>(e.inst.op) && e.t == measure_start(sched))
            barrier_at_meas = true;
    }
    REQUIRE(meas_plays.size() == 2);
    CHECK(meas_plays[0] == meas_plays[1]);
    CHECK(barrier_at_meas);

    const auto placed = gate_placements(sched, c, map);
    CHECK(placed[0].end <= placed[1].start);  // single-qubit gate precedes the entangler
    CHECK(placed[1].end == measure_start(sched));
    CHECK(sched.validate().empty());
}

TEST_CASE("missing definitions are reported with gate and qubits") {
    const auto map = test_map();
    MiniCircuit c;
    c.num_qubits = 2;
    c.ops.push_back({"nope", {0}, {}});
    CHECK_THROWS_AS(schedule_circuit(c, map, SchedulingPolicy::ALAP), MissingDefinition);
}

TEST_CASE("scheduling invariants hold on random circuits") {
    const auto map = test_map();
    std::mt19937_64 rng(2024);
    const std::vector<std::string> one_q{"short", "long", "x"};

    for (int trial = 0; trial < 500; ++trial) {
        MiniCircuit c;
        c.num_qubits = 3;
        const int n_ops = 1 + static_cast<int>(rng() % 12);
        for (int k = 0; k < n_ops; ++k) {
            if (rng() % 4 == 0) {
                const int pick = static_cast<int>(rng() % 3);
                if (pick == 0) c.ops.push_back({"cx", {1, 0}, {}});
                else if (pick == 1) c.ops.push_back({"cx", {0, 1}, {}});
                else c.ops.push_back({"cx", {1, 2}, {}});
            } else {
                c.ops.push_back({one_q[rng() % one_q.size()], {static_cast<std::uint32_t>(rng() % 3)}, {}});
            }
        }
        std::vector<std::uint32_t> measured;
        for (std::uint32_t q = 0; q < 3; ++q)
            if (rng() % 2 == 0) measured.push_back(q);
        if (measured.empty()) measured.push_back(static_cast<std::uint32_t>(rng() % 3));
        for (auto q : measured) c.measurements.emplace_back(q, q);

        const Schedule sched = schedule_circuit(c, map, SchedulingPolicy::ALAP);
        CHECK(sched.validate().empty());

        // Intra-gate relative timing preserved exactly (gate_placements
        // REQUIREs every template play at its exact offset) and per-qubit
        // gate order preserved.
        const auto placed = gate_placements(sched, c, map);
        for (std::uint32_t q = 0; q < 3; ++q) {
            Time prev_end = -1;
            for (std::size_t k = 0; k < c.ops.size(); ++k) {
                const auto& qs = c.ops[k].qubits;
                if (std::find(qs.begin(), qs.end(), q) == qs.end()) continue;
                CHECK(placed[k].start >= prev_end);
                prev_end = std::max(prev_end, placed[k].end);
            }
        }

        // Zero pre-measurement idle: each measured qubit's last gate ends at
        // the measurement start.
        const Time ms = measure_start(sched);
        for (auto q : measured) {
            Time last_end = -1;
            for (std::size_t k = 0; k < c.ops.size(); ++k) {
                const auto& qs = c.ops[k].qubits;
                if (std::find(qs.begin(), qs.end(), q) != qs.end()) last_end = placed[k].end;
            }
            if (last_end >= 0) CHECK(last_end == ms);
        }
    }
}

TEST_CASE("circuit JSON round-trip") {
    MiniCircuit c;
    c.num_qubits = 2;
    c.ops.push_back({"cx", {1, 0}, {}});
    c.ops.push_back({"u3", {0}, {0.1, 0.2, 0.3}});
    c.measurements = {{0, 0}, {1, 1}};
    const auto j = circuit_to_json(c);
    const auto c2 = circuit_from_json(j);
    CHECK(stable_dump(circuit_to_json(c2)) == stable_dump(j));
    CHECK(c2.ops[1].params == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("inst map JSON round-trip for concrete entries") {
    InstructionScheduleMap map;
    map.add("cr1", {1, 0}, pulse_gate(1, 128));
    const auto j = inst_map_to_json(map);
    const auto map2 = inst_map_from_json(j);
    CHECK(map2.has("cr1", {1, 0}));
    CHECK(stable_dump(inst_map_to_json(map2)) == stable_dump(j));
}
