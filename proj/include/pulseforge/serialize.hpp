#pragma once

// JSON serialization for the pulse IR.
//
// Byte-stable convention: objects keep a fixed field order (ordered_json)
// and floating point numbers are emitted with 17 significant digits, so
// serialize -> parse -> serialize is byte-identical.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pulseforge/schedule.hpp"

namespace pulseforge {

using ojson = nlohmann::ordered_json;

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void dump_stable(const ojson& j, std::string& out) {
    switch (j.type()) {
        case ojson::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += ojson(it.key()).dump();
                out += ':';
                dump_stable(it.value(), out);
            }
            out += '}';
            break;
        }
        case ojson::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ',';
                first = false;
                dump_stable(el, out);
            }
            out += ']';
            break;
        }
        case ojson::value_t::number_float:
            out += format_double(j.get<double>());
            break;
        default:
            out += j.dump();
            break;
    }
}

}  // namespace detail

// Compact dump with deterministic float formatting.
inline std::string stable_dump(const ojson& j) {
    std::string out;
    detail::dump_stable(j, out);
    out += '\n';
    return out;
}

inline ojson parse_json(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("JSON parse error: ") + e.what());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Atomic write: to a temp file in the same directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << data;
    }
    std::filesystem::rename(tmp, path);
}

inline ojson load_json(const std::filesystem::path& path) { return parse_json(read_file(path)); }

// ---- pulses ----

inline ojson complex_to_json(const cxd& c) { return ojson::array({c.real(), c.imag()}); }
inline cxd complex_from_json(const ojson& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline ojson pulse_to_json(const Pulse& p) {
    ojson j;
    if (const auto* par = std::get_if<ParametricPulse>(&p)) {
        switch (par->shape) {
            case PulseShape::Gaussian: j["shape"] = "gaussian"; break;
            case PulseShape::GaussianSquare: j["shape"] = "gaussian_square"; break;
            case PulseShape::Drag: j["shape"] = "drag"; break;
            case PulseShape::Constant: j["shape"] = "constant"; break;
        }
        j["duration"] = par->duration;
        j["amp"] = complex_to_json(par->amp);
        if (par->shape != PulseShape::Constant) j["sigma"] = par->sigma;
        if (par->shape == PulseShape::GaussianSquare) j["square_width"] = par->square_width;
        if (par->shape == PulseShape::Drag) j["beta"] = par->beta;
        if (!par->name.empty()) j["pulse_name"] = par->name;
    } else {
        const auto& s = std::get<SampledPulse>(p);
        auto arr = ojson::array();
        for (const auto& d : s.samples) arr.push_back(complex_to_json(d));
        j["samples"] = std::move(arr);
        if (!s.name.empty()) j["pulse_name"] = s.name;
    }
    return j;
}

inline Pulse pulse_from_json(const ojson& j) {
    std::string name = j.value("pulse_name", "");
    if (j.contains("samples")) {
        std::vector<cxd> samples;
        for (const auto& el : j.at("samples")) samples.push_back(complex_from_json(el));
        return SampledPulse(std::move(samples), std::move(name));
    }
    const std::string shape = j.at("shape").get<std::string>();
    const auto duration = j.at("duration").get<std::int64_t>();
    const cxd amp = complex_from_json(j.at("amp"));
    if (shape == "gaussian") return gaussian(duration, amp, j.at("sigma").get<double>(), std::move(name));
    if (shape == "gaussian_square")
        return gaussian_square(duration, amp, j.at("sigma").get<double>(), j.at("square_width").get<double>(),
                               std::move(name));
    if (shape == "drag")
        return drag(duration, amp, j.at("sigma").get<double>(), j.at("beta").get<double>(), std::move(name));
    if (shape == "constant") return constant(duration, amp, std::move(name));
    throw IoError("unknown pulse shape: " + shape);
}

// ---- instructions ----

inline ojson instruction_to_json(const Instruction& inst) {
    ojson j;
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Play>) {
                j["op"] = "play";
                j["ch"] = op.channel.str();
                j["pulse"] = pulse_to_json(op.pulse);
            } else if constexpr (std::is_same_v<T, Delay>) {
                j["op"] = "delay";
                j["ch"] = op.channel.str();
                j["dur"] = op.duration;
            } else if constexpr (std::is_same_v<T, ShiftPhase>) {
                j["op"] = "shift_phase";
                j["ch"] = op.channel.str();
                j["phase"] = op.phase;
            } else if constexpr (std::is_same_v<T, SetFrequency>) {
                j["op"] = "set_frequency";
                j["ch"] = op.channel.str();
                j["freq"] = op.frequency;
            } else if constexpr (std::is_same_v<T, Acquire>) {
                j["op"] = "acquire";
                j["ch"] = op.channel.str();
                j["dur"] = op.duration;
                j["slot"] = op.memory_slot;
            } else {
                j["op"] = "barrier";
                auto chs = ojson::array();
                for (const auto& c : op.channels) chs.push_back(c.str());
                j["chs"] = std::move(chs);
            }
        },
        inst.op);
    return j;
}

inline Instruction instruction_from_json(const ojson& j) {
    const std::string op = j.at("op").get<std::string>();
    if (op == "barrier") {
        std::vector<ChannelId> chs;
        for (const auto& el : j.at("chs")) chs.push_back(ChannelId::parse(el.get<std::string>()));
        return barrier(std::move(chs));
    }
    const ChannelId ch = ChannelId::parse(j.at("ch").get<std::string>());
    if (op == "play") return play(pulse_from_json(j.at("pulse")), ch);
    if (op == "delay") return delay(j.at("dur").get<Time>(), ch);
    if (op == "shift_phase") return shift_phase(j.at("phase").get<double>(), ch);
    if (op == "set_frequency") return set_frequency(j.at("freq").get<double>(), ch);
    if (op == "acquire") return acquire(j.at("dur").get<Time>(), ch, j.at("slot").get<std::uint32_t>());
    throw IoError("unknown instruction op: " + op);
}

// ---- schedules ----

inline ojson schedule_to_json(const Schedule& s) {
    ojson j;
    j["name"] = s.name();
    auto entries = ojson::array();
    for (const auto& e : s.entries()) {
        ojson ej;
        ej["t"] = e.t;
        ej["inst"] = instruction_to_json(e.inst);
        entries.push_back(std::move(ej));
    }
    j["entries"] = std::move(entries);
    return j;
}

inline Schedule schedule_from_json(const ojson& j) {
    Schedule s(j.value("name", ""));
    for (const auto& ej : j.at("entries"))
        s = s.insert(ej.at("t").get<Time>(), instruction_from_json(ej.at("inst")));
    return s;
}

}  // namespace pulseforge
