#pragma once

// BackendModel: everything the time-domain simulator needs to stand in for
// hardware. Channels bind to Hamiltonian terms of
//
//     H(t) = H_sys + sum_k alpha_k(t) H_k
//
// with all operators expressed in the rotating frame of the qubits (the
// anchor frequency of each channel). With the rotating-wave approximation
// enabled (default), a channel's complex frame-modulated envelope eps(t)
// drives Re[eps] H_I + Im[eps] H_Q, where H_Q is the quadrature partner of
// its in-phase term H_I (for a drive term along X the quadrature is Y). With
// RWA off only the real carrier output D_j = Re[eps] couples, through H_I.
//
// Readout is generated per qubit from two IQ Gaussians (one per basis
// state); the built-in discriminator is the shared-covariance linear
// classifier derived from those parameters.

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pulseforge/circuit.hpp"
#include "pulseforge/pauli_expr.hpp"
#include "pulseforge/quantum.hpp"
#include "pulseforge/serialize.hpp"

namespace pulseforge {

struct ReadoutIq {
    cxd mean0{1.0, 0.0};
    cxd mean1{-1.0, 0.0};
    Eigen::Matrix2d cov0 = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d cov1 = Eigen::Matrix2d::Identity();
};

struct ChannelConfig {
    double frequency = 0.0;  // initial carrier frequency, Hz
    double anchor = 0.0;     // rotating-frame reference frequency, Hz
    std::string h_expr;      // in-phase Hamiltonian term per unit amplitude (may be empty)
    std::string h_quad_expr; // quadrature term; derived from h_expr when empty
    std::optional<ChannelId> mirror;  // drive channel whose phase shifts this channel reflects
};

struct ControlCoupling {
    std::uint32_t u_index = 0;
    std::uint32_t control = 0;
    std::uint32_t target = 0;
};

struct PulseDefaults {
    Time x90_duration = 160;
    double x90_sigma = 40.0;
    Time measure_duration = 640;
    double measure_sigma = 32.0;
    double measure_width = 480.0;
    double measure_amp = 0.1;
};

namespace detail {

// Quadrature partner of an operator expression: in each term the single
// transverse letter rotates X -> Y, Y -> -X; terms without a transverse
// letter drop out. Terms with more than one transverse letter need an
// explicit quadrature expression.
inline Mat derived_quadrature(const std::string& expr, int n_qubits) {
    const Eigen::Index d = Eigen::Index(1) << n_qubits;
    Mat out = Mat::Zero(d, d);
    for (const auto& term : parse_operator_expr(expr)) {
        if (term.word.empty()) continue;
        int transverse = 0;
        for (char c : term.word) transverse += (c == 'X' || c == 'Y');
        if (transverse == 0) continue;
        if (transverse > 1)
            throw ValidationError("cannot derive quadrature for '" + term.word +
                                  "'; specify h_quad explicitly");
        std::string w = term.word;
        double sign = 1.0;
        for (char& c : w) {
            if (c == 'X') { c = 'Y'; break; }
            if (c == 'Y') { c = 'X'; sign = -1.0; break; }
        }
        out += sign * term.coefficient * operator_word_matrix(w, n_qubits);
    }
    return out;
}

inline void check_hermitian(const Mat& m, const std::string& what) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ValidationError(what + " is not Hermitian");
}

inline void check_psd2(const Eigen::Matrix2d& m, const std::string& what) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    if (es.eigenvalues().minCoeff() < -1e-12) throw ValidationError(what + " is not positive semidefinite");
}

}  // namespace detail

class BackendModel {
  public:
    double dt = 2.22e-10;  // seconds per cycle
    int n_qubits = 1;
    bool rwa = true;
    int substeps = 1;
    std::string h_sys_expr;  // static rotating-frame Hamiltonian, rad/s
    std::map<ChannelId, ChannelConfig> channels;
    std::vector<std::pair<std::string, double>> dissipator_specs;  // (operator word/expr, rate >= 0)
    std::vector<ReadoutIq> readout;  // per qubit
    std::vector<ControlCoupling> couplings;
    PulseDefaults defaults;

    Eigen::Index dim() const { return Eigen::Index(1) << n_qubits; }

    Mat h_sys() const {
        if (h_sys_expr.empty()) return Mat::Zero(dim(), dim());
        Mat h = operator_expr_matrix(h_sys_expr, n_qubits);
        detail::check_hermitian(h, "h_sys");
        return h;
    }

    bool has_channel(const ChannelId& ch) const { return channels.count(ch) > 0; }

    const ChannelConfig& channel(const ChannelId& ch) const {
        auto it = channels.find(ch);
        if (it == channels.end()) throw ValidationError("channel " + ch.str() + " is not bound in the backend");
        return it->second;
    }

    Mat control_term(const ChannelId& ch) const {
        const auto& cfg = channel(ch);
        if (cfg.h_expr.empty()) return Mat::Zero(dim(), dim());
        Mat h = operator_expr_matrix(cfg.h_expr, n_qubits);
        detail::check_hermitian(h, "control term on " + ch.str());
        return h;
    }

    Mat control_term_quadrature(const ChannelId& ch) const {
        const auto& cfg = channel(ch);
        if (cfg.h_expr.empty() && cfg.h_quad_expr.empty()) return Mat::Zero(dim(), dim());
        if (!cfg.h_quad_expr.empty()) {
            Mat h = operator_expr_matrix(cfg.h_quad_expr, n_qubits);
            detail::check_hermitian(h, "quadrature term on " + ch.str());
            return h;
        }
        return detail::derived_quadrature(cfg.h_expr, n_qubits);
    }

    std::vector<std::pair<Mat, double>> dissipators() const {
        std::vector<std::pair<Mat, double>> out;
        for (const auto& [expr, rate] : dissipator_specs) {
            if (rate < 0.0) throw ValidationError("dissipator rate must be nonnegative");
            out.emplace_back(operator_expr_matrix(expr, n_qubits), rate);
        }
        return out;
    }

    const ReadoutIq& readout_for(std::uint32_t q) const {
        if (q >= readout.size()) throw ValidationError("no readout model for qubit " + std::to_string(q));
        return readout[q];
    }

    std::map<ChannelId, double> initial_frequencies() const {
        std::map<ChannelId, double> out;
        for (const auto& [ch, cfg] : channels) out[ch] = cfg.frequency;
        return out;
    }

    std::map<ChannelId, double> frame_anchors() const {
        std::map<ChannelId, double> out;
        for (const auto& [ch, cfg] : channels) out[ch] = cfg.anchor;
        return out;
    }

    // Strength of a drive channel's in-phase term along the Pauli axis it
    // drives: g = Tr[H_I P] / d for the dominant single-qubit Pauli P.
    double drive_strength(std::uint32_t q) const {
        const Mat h = control_term(drive_channel(q));
        const Mat x = embed(pauli(1), static_cast<int>(q), n_qubits);
        return (h * x).trace().real() / static_cast<double>(dim());
    }

    ChannelId cr_control_channel(std::uint32_t control, std::uint32_t target) const {
        for (const auto& c : couplings)
            if (c.control == control && c.target == target) return control_channel(c.u_index);
        throw MissingDefinition("no control channel coupling for pair (" + std::to_string(control) + "," +
                                std::to_string(target) + ")");
    }

    // Control channels that mirror phase shifts applied to drive channel d_q.
    std::vector<ChannelId> mirrors_of(std::uint32_t q) const {
        std::vector<ChannelId> out;
        for (const auto& [ch, cfg] : channels)
            if (cfg.mirror && *cfg.mirror == drive_channel(q)) out.push_back(ch);
        return out;
    }

    void validate() const {
        if (n_qubits < 1 || n_qubits > 3) throw ValidationError("backend supports 1..3 qubits");
        if (dt <= 0.0) throw ValidationError("dt must be positive");
        if (substeps < 1) throw ValidationError("substeps must be >= 1");
        h_sys();
        for (const auto& [ch, cfg] : channels) {
            if (!cfg.h_expr.empty()) { control_term(ch); control_term_quadrature(ch); }
        }
        dissipators();
        for (std::size_t q = 0; q < readout.size(); ++q) {
            detail::check_psd2(readout[q].cov0, "readout cov0 of qubit " + std::to_string(q));
            detail::check_psd2(readout[q].cov1, "readout cov1 of qubit " + std::to_string(q));
        }
    }
};

// ---- JSON ----

inline ojson backend_to_json(const BackendModel& b) {
    ojson j;
    j["dt"] = b.dt;
    j["n_qubits"] = b.n_qubits;
    j["rwa"] = b.rwa;
    j["substeps"] = b.substeps;
    if (!b.h_sys_expr.empty()) j["h_sys"] = b.h_sys_expr;
    auto chans = ojson::array();
    for (const auto& [ch, cfg] : b.channels) {
        ojson cj;
        cj["ch"] = ch.str();
        cj["freq"] = cfg.frequency;
        cj["anchor"] = cfg.anchor;
        if (!cfg.h_expr.empty()) cj["h"] = cfg.h_expr;
        if (!cfg.h_quad_expr.empty()) cj["h_quad"] = cfg.h_quad_expr;
        if (cfg.mirror) cj["mirror"] = cfg.mirror->str();
        chans.push_back(std::move(cj));
    }
    j["channels"] = std::move(chans);
    auto diss = ojson::array();
    for (const auto& [expr, rate] : b.dissipator_specs) {
        ojson dj;
        dj["op"] = expr;
        dj["rate"] = rate;
        diss.push_back(std::move(dj));
    }
    j["dissipators"] = std::move(diss);
    auto ro = ojson::array();
    for (std::size_t q = 0; q < b.readout.size(); ++q) {
        const auto& r = b.readout[q];
        ojson rj;
        rj["qubit"] = q;
        rj["mean0"] = complex_to_json(r.mean0);
        rj["mean1"] = complex_to_json(r.mean1);
        rj["cov0"] = ojson::array({ojson::array({r.cov0(0, 0), r.cov0(0, 1)}),
                                   ojson::array({r.cov0(1, 0), r.cov0(1, 1)})});
        rj["cov1"] = ojson::array({ojson::array({r.cov1(0, 0), r.cov1(0, 1)}),
                                   ojson::array({r.cov1(1, 0), r.cov1(1, 1)})});
        ro.push_back(std::move(rj));
    }
    j["readout"] = std::move(ro);
    auto coup = ojson::array();
    for (const auto& c : b.couplings)
        coup.push_back(ojson{{"u", c.u_index}, {"control", c.control}, {"target", c.target}});
    j["couplings"] = std::move(coup);
    j["defaults"] = ojson{{"x90_duration", b.defaults.x90_duration},
                          {"x90_sigma", b.defaults.x90_sigma},
                          {"measure_duration", b.defaults.measure_duration},
                          {"measure_sigma", b.defaults.measure_sigma},
                          {"measure_width", b.defaults.measure_width},
                          {"measure_amp", b.defaults.measure_amp}};
    return j;
}

inline BackendModel backend_from_json(const ojson& j) {
    BackendModel b;
    b.dt = j.at("dt").get<double>();
    b.n_qubits = j.at("n_qubits").get<int>();
    b.rwa = j.value("rwa", true);
    b.substeps = j.value("substeps", 1);
    b.h_sys_expr = j.value("h_sys", "");
    for (const auto& cj : j.at("channels")) {
        ChannelConfig cfg;
        cfg.frequency = cj.at("freq").get<double>();
        cfg.anchor = cj.value("anchor", cfg.frequency);
        cfg.h_expr = cj.value("h", "");
        cfg.h_quad_expr = cj.value("h_quad", "");
        if (cj.contains("mirror")) cfg.mirror = ChannelId::parse(cj.at("mirror").get<std::string>());
        b.channels[ChannelId::parse(cj.at("ch").get<std::string>())] = std::move(cfg);
    }
    if (j.contains("dissipators"))
        for (const auto& dj : j.at("dissipators"))
            b.dissipator_specs.emplace_back(dj.at("op").get<std::string>(), dj.at("rate").get<double>());
    if (j.contains("readout")) {
        for (const auto& rj : j.at("readout")) {
            const auto q = rj.at("qubit").get<std::size_t>();
            if (b.readout.size() <= q) b.readout.resize(q + 1);
            ReadoutIq r;
            r.mean0 = complex_from_json(rj.at("mean0"));
            r.mean1 = complex_from_json(rj.at("mean1"));
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) {
                    r.cov0(a, c) = rj.at("cov0").at(a).at(c).get<double>();
                    r.cov1(a, c) = rj.at("cov1").at(a).at(c).get<double>();
                }
            b.readout[q] = r;
        }
    }
    if (j.contains("couplings"))
        for (const auto& cj : j.at("couplings"))
            b.couplings.push_back({cj.at("u").get<std::uint32_t>(), cj.at("control").get<std::uint32_t>(),
                                   cj.at("target").get<std::uint32_t>()});
    if (j.contains("defaults")) {
        const auto& dj = j.at("defaults");
        b.defaults.x90_duration = dj.value("x90_duration", b.defaults.x90_duration);
        b.defaults.x90_sigma = dj.value("x90_sigma", b.defaults.x90_sigma);
        b.defaults.measure_duration = dj.value("measure_duration", b.defaults.measure_duration);
        b.defaults.measure_sigma = dj.value("measure_sigma", b.defaults.measure_sigma);
        b.defaults.measure_width = dj.value("measure_width", b.defaults.measure_width);
        b.defaults.measure_amp = dj.value("measure_amp", b.defaults.measure_amp);
    }
    b.validate();
    return b;
}

// ---- default gate templates ----

// Amplitude for a Bloch rotation of `angle` with a Gaussian drive envelope:
// the rotation accumulated by envelope alpha(t) against term g X is
// 2 g dt sum_j alpha_j.
inline double gaussian_amp_for_angle(const BackendModel& b, std::uint32_t q, double angle) {
    const auto env = sample_parametric(gaussian(b.defaults.x90_duration, 1.0, b.defaults.x90_sigma));
    double s = 0.0;
    for (const auto& d : env.samples) s += d.real();
    const double g = b.drive_strength(q);
    if (g == 0.0) throw ValidationError("drive channel d" + std::to_string(q) + " has no X term");
    const double amp = angle / (2.0 * g * b.dt * s);
    if (std::abs(amp) > 1.0)
        throw ValidationError("calibrated amplitude exceeds unit bound on d" + std::to_string(q));
    return amp;
}

// Shift the frame of d_q and of every control channel mirroring it.
inline Schedule append_virtual_z(Schedule sched, const BackendModel& b, std::uint32_t q, double phase) {
    sched = sched.append(shift_phase(phase, drive_channel(q)));
    for (const auto& u : b.mirrors_of(q)) sched = sched.append(shift_phase(phase, u));
    return sched;
}

// u3(theta, phi, lambda) = Rz(phi) Ry(theta) Rz(lambda), realized as two
// X90 pulses with three frame shifts:
//   ShiftPhase(-lambda); X90; ShiftPhase(pi - theta); X90; ShiftPhase(-phi - pi)
inline Schedule u3_schedule(const BackendModel& b, std::uint32_t q, double theta, double phi, double lambda) {
    constexpr double pi = std::numbers::pi;
    const double a90 = gaussian_amp_for_angle(b, q, pi / 2.0);
    const auto x90 = gaussian(b.defaults.x90_duration, a90, b.defaults.x90_sigma, "x90");
    Schedule s("u3");
    s = append_virtual_z(s, b, q, -lambda);
    s = s.append(play(x90, drive_channel(q)));
    s = append_virtual_z(s, b, q, pi - theta);
    s = s.append(play(x90, drive_channel(q)));
    s = append_virtual_z(s, b, q, -phi - pi);
    return s;
}

inline Schedule measure_schedule(const BackendModel& b, std::uint32_t q, std::uint32_t slot) {
    Schedule s("measure");
    s = s.append(play(gaussian_square(b.defaults.measure_duration, b.defaults.measure_amp,
                                      b.defaults.measure_sigma, b.defaults.measure_width, "readout"),
                      measure_channel(q)));
    s = s.insert(0, acquire(b.defaults.measure_duration, acquire_channel(q), slot));
    return s;
}

// Default instruction-schedule map: x90/x180 pulses, the parameterized u3
// template, and measurement, for every qubit.
inline InstructionScheduleMap default_inst_map(const BackendModel& b) {
    constexpr double pi = std::numbers::pi;
    InstructionScheduleMap map;
    for (std::uint32_t q = 0; q < static_cast<std::uint32_t>(b.n_qubits); ++q) {
        if (!b.has_channel(drive_channel(q))) continue;
        const double a90 = gaussian_amp_for_angle(b, q, pi / 2.0);
        const double a180 = gaussian_amp_for_angle(b, q, pi);
        map.add("x90", {q},
                Schedule("x90").append(play(gaussian(b.defaults.x90_duration, a90, b.defaults.x90_sigma, "x90"),
                                            drive_channel(q))));
        map.add("x180", {q},
                Schedule("x180").append(play(gaussian(b.defaults.x90_duration, a180, b.defaults.x90_sigma, "x180"),
                                             drive_channel(q))));
        map.add("u3", {q}, InstructionScheduleMap::Factory([b, q](const std::vector<double>& p) {
                    if (p.size() != 3) throw ValidationError("u3 requires three parameters");
                    return u3_schedule(b, q, p[0], p[1], p[2]);
                }));
        map.add("measure", {q}, InstructionScheduleMap::Factory([b, q](const std::vector<double>& p) {
                    const auto slot = p.empty() ? q : static_cast<std::uint32_t>(p[0]);
                    return measure_schedule(b, q, slot);
                }));
    }
    return map;
}

// ---- cross-resonance pulse sequences ----

struct CrPulseParams {
    Time duration = 848;
    double sigma = 32.0;
    double square_width = 720.0;
    double amplitude = 0.2;
    double phase = 0.0;  // drive phase applied to the pulse amplitude
};

// Single CR pulse on the control channel of the pair.
inline Schedule cr1_schedule(const BackendModel& b, std::uint32_t control, std::uint32_t target,
                             const CrPulseParams& p) {
    const ChannelId u = b.cr_control_channel(control, target);
    const cxd amp = std::polar(p.amplitude, p.phase);
    Schedule s("cr1");
    s = s.append(play(gaussian_square(p.duration, amp, p.sigma, p.square_width, "cr"), u));
    return s;
}

// Echoed two-pulse CR: CR(+A) then a pi pulse on the control qubit, CR(-A),
// and a second pi pulse.
inline Schedule cr2_schedule(const BackendModel& b, std::uint32_t control, std::uint32_t target,
                             const CrPulseParams& p) {
    constexpr double pi = std::numbers::pi;
    const ChannelId u = b.cr_control_channel(control, target);
    const ChannelId dc = drive_channel(control);
    const cxd amp = std::polar(p.amplitude, p.phase);
    const auto cr_p = gaussian_square(p.duration, amp, p.sigma, p.square_width, "cr_p");
    const auto cr_m = gaussian_square(p.duration, -amp, p.sigma, p.square_width, "cr_m");
    const double a180 = gaussian_amp_for_angle(b, control, pi);
    const auto x180 = gaussian(b.defaults.x90_duration, a180, b.defaults.x90_sigma, "x180");

    // The delay lines the first echo pulse up with the end of the first CR
    // pulse; every later append lands at the block end, so the sequence is
    // CR(+A), X180, CR(-A), X180 with no dead time.
    Schedule s("cr2");
    s = s.append(play(cr_p, u));
    s = s.append(delay(p.duration, dc));
    s = s.append(play(x180, dc));
    s = s.append(play(cr_m, u));
    s = s.append(play(x180, dc));
    return s;
}

// ---- canned two-qubit CR backend ----

struct CrBackendParams {
    double dt = 0.222e-9;
    double f_target = 4.857e9;      // qubit 0
    double f_control = 4.972e9;     // qubit 1
    double cr_strength = 1.93e7;    // rad/s per unit amplitude on the ZX axis
    double phase_offset = 0.0;      // hidden rotation of the CR drive axis (rad)
    double crosstalk_ix = 0.0;      // rad/s per unit amplitude of direct IX feedthrough
    double static_zz = 0.0;         // rad/s coefficient of ZZ/2-style term (as omega_ZZ)
    double control_detuning = 0.0;  // rad/s coefficient of ZI (as omega_ZI)
    double drive_strength = 1.885e8;  // rad/s per unit amplitude on each qubit's X
    double readout_sigma = 0.5;
    double t1 = 0.0, t2 = 0.0;      // optional relaxation/dephasing times (s); 0 disables
};

inline BackendModel make_cr_backend(const CrBackendParams& p = {}) {
    BackendModel b;
    b.dt = p.dt;
    b.n_qubits = 2;
    b.rwa = true;

    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };

    // Static terms, written as omega coefficients of B_ij = P_i (x) P_j / 2.
    std::string hs;
    if (p.static_zz != 0.0) hs += fmt(p.static_zz / 2.0) + "*ZZ";
    if (p.control_detuning != 0.0) hs += (hs.empty() ? "" : " + ") + fmt(p.control_detuning / 2.0) + "*ZI";
    b.h_sys_expr = hs;

    ChannelConfig d0;
    d0.frequency = d0.anchor = p.f_target;
    d0.h_expr = fmt(p.drive_strength) + "*IX";
    b.channels[drive_channel(0)] = d0;

    ChannelConfig d1;
    d1.frequency = d1.anchor = p.f_control;
    d1.h_expr = fmt(p.drive_strength) + "*XI";
    b.channels[drive_channel(1)] = d1;

    // CR drive: ZX-type term on (control=1, target=0) with a hidden axis
    // rotation by phase_offset and optional direct IX feedthrough.
    const double c = std::cos(p.phase_offset), s = std::sin(p.phase_offset);
    ChannelConfig u1;
    u1.frequency = u1.anchor = p.f_target;  // CR drives at the target frequency
    u1.mirror = drive_channel(0);
    {
        std::string hi = fmt(p.cr_strength * c) + "*ZX";
        std::string hq = fmt(p.cr_strength * c) + "*ZY";
        if (s != 0.0) {
            hi += " + " + fmt(p.cr_strength * s) + "*ZY";
            hq += " - " + fmt(p.cr_strength * s) + "*ZX";
        }
        if (p.crosstalk_ix != 0.0) {
            hi += " + " + fmt(p.crosstalk_ix * c) + "*IX";
            hq += " + " + fmt(p.crosstalk_ix * c) + "*IY";
            if (s != 0.0) {
                hi += " + " + fmt(p.crosstalk_ix * s) + "*IY";
                hq += " - " + fmt(p.crosstalk_ix * s) + "*IX";
            }
        }
        u1.h_expr = hi;
        u1.h_quad_expr = hq;
    }
    b.channels[control_channel(1)] = u1;

    ChannelConfig m0, m1;
    m0.frequency = m0.anchor = 7.1e9;
    m1.frequency = m1.anchor = 7.15e9;
    b.channels[measure_channel(0)] = m0;
    b.channels[measure_channel(1)] = m1;

    b.couplings.push_back({1, 1, 0});

    if (p.t1 > 0.0) {
        const double g1 = 1.0 / p.t1;
        b.dissipator_specs.emplace_back("IM", g1);
        b.dissipator_specs.emplace_back("MI", g1);
    }
    if (p.t2 > 0.0) {
        const double gphi = 0.5 / p.t2;
        b.dissipator_specs.emplace_back("IZ", gphi);
        b.dissipator_specs.emplace_back("ZI", gphi);
    }

    ReadoutIq r;
    r.mean0 = {1.0, 0.0};
    r.mean1 = {-1.0, 0.0};
    r.cov0 = r.cov1 = Eigen::Matrix2d::Identity() * p.readout_sigma * p.readout_sigma;
    b.readout = {r, r};

    b.validate();
    return b;
}

}  // namespace pulseforge
