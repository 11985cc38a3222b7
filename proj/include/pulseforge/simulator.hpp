#pragma once

// Time-domain Lindblad simulator standing in for hardware.
//
// The density matrix evolves under drho/dt = G(rho) with G = L_H + D,
// L_H(rho) = -i[H(t), rho], and H(t) = H_sys + sum_k a_k(t) H_k piecewise
// constant over integration slices. Each slice is advanced by the exact
// matrix exponential of the Lindblad generator in superoperator form, so
// there is no ODE tolerance; runs of identical slices share one exponential.
//
// With the RWA flag (default) the drive on each channel is the complex
// frame-modulated envelope relative to the channel's anchor frequency,
// coupling through the in-phase and quadrature terms; with RWA off only the
// real carrier sample couples, through the in-phase term.
//
// Measurement: per acquire window, joint bit strings over all qubits whose
// windows end at the same cycle are sampled from the diagonal of the reduced
// density matrix at that time; each bit then produces an IQ point from the
// qubit's per-state Gaussian, and the built-in shared-covariance linear
// discriminator turns IQ points back into level-2 bits.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pulseforge/backend.hpp"
#include "pulseforge/codegen.hpp"
#include "pulseforge/random.hpp"

namespace pulseforge {

struct WindowGroup {
    Time end = 0;
    std::vector<std::uint32_t> qubits;  // ascending
    std::vector<std::uint32_t> slots;   // aligned with qubits
    Eigen::VectorXd probs;              // joint outcomes, bit i of the index = qubits[i]
};

struct SimResult {
    Mat rho;  // final density matrix
    int shots = 0;
    std::vector<std::uint32_t> acquired;                    // qubits, ascending
    std::vector<WindowGroup> window_probs;                  // exact outcome distributions
    std::map<std::uint32_t, std::vector<cxd>> iq;           // qubit -> per-shot level-1 point
    std::map<std::uint32_t, std::vector<int>> bits;         // qubit -> per-shot level-2 bit
    std::map<std::uint32_t, std::vector<int>> memory;       // slot -> per-shot bit
    std::map<int, long> counts;  // joint level-2 outcome (bit q of the key = qubit q) -> count

    std::string outcome_label(int outcome) const {
        std::string s;
        for (auto it = acquired.rbegin(); it != acquired.rend(); ++it)
            s += ((outcome >> *it) & 1) ? '1' : '0';
        return s;
    }
};

namespace detail {

struct DriveTerm {
    Mat in_phase;    // superoperator of -i[H_I, .]
    Mat quadrature;  // superoperator of -i[H_Q, .]
    bool has_quadrature = false;
};

// Per-slice complex drive coefficients for one channel, at `substeps`
// sub-slices per cycle. At one substep per cycle this reproduces the
// waveform lowering exactly (the carrier phase is evaluated at the sample
// instants); finer substeps refine the carrier rotation inside a cycle.
inline std::vector<cxd> drive_envelope(const Schedule& sched, const ChannelId& ch, const BackendModel& b,
                                       Time total, int substeps) {
    const auto& cfg = b.channel(ch);
    const double offset = b.rwa ? cfg.anchor : 0.0;
    const auto trace = frame_trace(sched, ch, cfg.frequency, offset);
    std::vector<cxd> env(static_cast<std::size_t>(total) * substeps, cxd(0, 0));
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const auto& e : sched.entries()) {
        const auto* pl = std::get_if<Play>(&e.inst.op);
        if (!pl || pl->channel != ch) continue;
        const auto frame = frame_at(trace, e.t);
        const auto samples = pulse_samples(pl->pulse).samples;
        for (std::size_t j = 0; j < samples.size(); ++j) {
            for (int s = 0; s < substeps; ++s) {
                const double t_abs = static_cast<double>(e.t + static_cast<Time>(j)) +
                                     static_cast<double>(s) / substeps;
                const double angle = two_pi * frame.frequency * t_abs * b.dt + frame.phase;
                env[(static_cast<std::size_t>(e.t) + j) * substeps + s] = std::polar(1.0, angle) * samples[j];
            }
        }
    }
    return env;
}

struct EvolutionPlan {
    Eigen::Index dim = 0;
    Time total = 0;
    int substeps = 1;
    Mat static_superop;                         // H_sys plus dissipators
    std::vector<ChannelId> driven;              // channels with a control term
    std::vector<DriveTerm> terms;               // aligned with `driven`
    std::vector<std::vector<cxd>> envelopes;    // aligned with `driven`
};

inline EvolutionPlan build_plan(const Schedule& sched, const BackendModel& b, int substeps_override = 0) {
    for (const auto& d : sched.validate())
        if (d.severity == Severity::Error)
            throw ValidationError("cannot simulate invalid schedule: " + d.code + ": " + d.message);
    for (const auto& ch : sched.channels())
        if (ch.is_pulse_channel() && !b.has_channel(ch))
            throw ValidationError("channel " + ch.str() + " is not bound in the backend");

    EvolutionPlan plan;
    plan.dim = b.dim();
    plan.total = sched.duration();
    plan.substeps = substeps_override > 0 ? substeps_override : b.substeps;
    plan.static_superop = hamiltonian_superop(b.h_sys());
    for (const auto& [a, gamma] : b.dissipators()) plan.static_superop += dissipator_superop(a, gamma);

    for (const auto& ch : sched.channels()) {
        if (!ch.is_pulse_channel()) continue;
        const Mat hi = b.control_term(ch);
        if (hi.cwiseAbs().maxCoeff() == 0.0) continue;  // stimulus with no Hamiltonian effect
        DriveTerm term;
        term.in_phase = hamiltonian_superop(hi);
        if (b.rwa) {
            const Mat hq = b.control_term_quadrature(ch);
            term.has_quadrature = hq.cwiseAbs().maxCoeff() != 0.0;
            if (term.has_quadrature) term.quadrature = hamiltonian_superop(hq);
        }
        plan.driven.push_back(ch);
        plan.terms.push_back(std::move(term));
        plan.envelopes.push_back(drive_envelope(sched, ch, b, plan.total, plan.substeps));
    }
    return plan;
}

// Walk the plan, calling `advance(exp(G dt_segment))` per run of identical
// drive coefficients and `snapshot(cycle)` after reaching each requested
// cycle (ascending, unique).
template <typename Advance, typename Snapshot>
void run_plan(const EvolutionPlan& plan, const BackendModel& b, const std::vector<Time>& snapshots_at,
              Advance&& advance, Snapshot&& snapshot) {
    const double slice_dt = b.dt / plan.substeps;
    const std::size_t n_slices = static_cast<std::size_t>(plan.total) * plan.substeps;

    std::size_t snap_idx = 0;
    while (snap_idx < snapshots_at.size() && snapshots_at[snap_idx] == 0) {
        snapshot(0);
        ++snap_idx;
    }

    std::size_t s = 0;
    while (s < n_slices) {
        const std::size_t limit =
            snap_idx < snapshots_at.size()
                ? static_cast<std::size_t>(snapshots_at[snap_idx]) * static_cast<std::size_t>(plan.substeps)
                : n_slices;
        std::size_t e = s + 1;
        while (e < limit) {
            bool same = true;
            for (std::size_t k = 0; k < plan.driven.size(); ++k)
                if (plan.envelopes[k][e] != plan.envelopes[k][s]) { same = false; break; }
            if (!same) break;
            ++e;
        }
        Mat g = plan.static_superop;
        for (std::size_t k = 0; k < plan.driven.size(); ++k) {
            const cxd eps = plan.envelopes[k][s];
            if (eps == cxd(0, 0)) continue;
            g += eps.real() * plan.terms[k].in_phase;
            if (b.rwa && plan.terms[k].has_quadrature) g += eps.imag() * plan.terms[k].quadrature;
        }
        advance(expm(g * (slice_dt * static_cast<double>(e - s))));
        s = e;
        while (snap_idx < snapshots_at.size() &&
               static_cast<std::size_t>(snapshots_at[snap_idx]) * static_cast<std::size_t>(plan.substeps) == s) {
            snapshot(snapshots_at[snap_idx]);
            ++snap_idx;
        }
    }
}

}  // namespace detail

// Exact process matrix of the (possibly noisy) evolution over the schedule,
// as a dim^2 x dim^2 superoperator.
inline Mat evolve_superoperator(const Schedule& sched, const BackendModel& b, int substeps_override = 0) {
    const auto plan = detail::build_plan(sched, b, substeps_override);
    Mat s = Mat::Identity(plan.dim * plan.dim, plan.dim * plan.dim);
    detail::run_plan(
        plan, b, {}, [&](const Mat& u) { s = u * s; }, [](Time) {});
    return s;
}

// Built-in discriminator derived from the backend's readout Gaussians:
// shared-covariance linear classifier.
struct BuiltinDiscriminator {
    Eigen::Vector2d w = Eigen::Vector2d::Zero();
    double bias = 0.0;
    int classify(const cxd& z) const { return (w(0) * z.real() + w(1) * z.imag() + bias > 0.0) ? 1 : 0; }
    static BuiltinDiscriminator from_readout(const ReadoutIq& r) {
        const Eigen::Matrix2d pooled = 0.5 * (r.cov0 + r.cov1) + 1e-12 * Eigen::Matrix2d::Identity();
        Eigen::Vector2d mu0(r.mean0.real(), r.mean0.imag()), mu1(r.mean1.real(), r.mean1.imag());
        BuiltinDiscriminator d;
        d.w = pooled.ldlt().solve(mu1 - mu0);
        d.bias = -d.w.dot(0.5 * (mu0 + mu1));
        return d;
    }
};

// Simulate a schedule: evolve from |0...0> and sample `shots` measurement
// records. Deterministic in (schedule, backend, shots, seed).
inline SimResult simulate(const Schedule& sched, const BackendModel& b, int shots, std::uint64_t seed,
                          int substeps_override = 0) {
    const auto plan = detail::build_plan(sched, b, substeps_override);

    struct Window {
        std::uint32_t qubit = 0, slot = 0;
        Time end = 0;
    };
    std::vector<Window> windows;
    for (const auto& e : sched.entries())
        if (const auto* acq = std::get_if<Acquire>(&e.inst.op))
            windows.push_back({acq->channel.index, acq->memory_slot, e.t + acq->duration});
    std::vector<Time> snapshot_times;
    for (const auto& w : windows) snapshot_times.push_back(w.end);
    std::sort(snapshot_times.begin(), snapshot_times.end());
    snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()), snapshot_times.end());

    Mat rho0 = Mat::Zero(plan.dim, plan.dim);
    rho0(0, 0) = 1.0;
    Vec v = vec(rho0);
    std::map<Time, Mat> rho_at;
    detail::run_plan(
        plan, b, snapshot_times, [&](const Mat& u) { v = u * v; },
        [&](Time t) { rho_at[t] = unvec(v, plan.dim); });

    SimResult result;
    result.rho = unvec(v, plan.dim);
    result.shots = shots;
    if (windows.empty()) return result;

    for (const Time t : snapshot_times) {
        WindowGroup g;
        g.end = t;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> qs;
        for (const auto& w : windows)
            if (w.end == t) qs.emplace_back(w.qubit, w.slot);
        std::sort(qs.begin(), qs.end());
        std::vector<int> keep;
        for (const auto& [q, sl] : qs) {
            g.qubits.push_back(q);
            g.slots.push_back(sl);
            keep.push_back(static_cast<int>(q));
        }
        const Mat reduced = partial_trace_keep(rho_at.at(t), keep, b.n_qubits);
        g.probs = reduced.diagonal().real().cwiseMax(0.0);
        result.window_probs.push_back(std::move(g));
    }

    std::set<std::uint32_t> acquired;
    for (const auto& w : windows) acquired.insert(w.qubit);
    result.acquired.assign(acquired.begin(), acquired.end());
    if (shots == 0) return result;

    std::map<std::uint32_t, BuiltinDiscriminator> discs;
    for (auto q : result.acquired) discs[q] = BuiltinDiscriminator::from_readout(b.readout_for(q));

    Rng rng(seed);
    for (int shot = 0; shot < shots; ++shot) {
        int joint = 0;
        for (const auto& g : result.window_probs) {
            const int outcome = rng.categorical(g.probs);
            for (std::size_t i = 0; i < g.qubits.size(); ++i) {
                const int bit = (outcome >> i) & 1;
                const auto q = g.qubits[i];
                const auto& r = b.readout_for(q);
                const cxd z = rng.gaussian_iq(bit ? r.mean1 : r.mean0, bit ? r.cov1 : r.cov0);
                const int level2 = discs.at(q).classify(z);
                result.iq[q].push_back(z);
                result.bits[q].push_back(level2);
                result.memory[g.slots[i]].push_back(level2);
                joint |= level2 << q;
            }
        }
        ++result.counts[joint];
    }
    return result;
}

// Exact joint outcome probabilities over all acquired qubits (ascending)
// when every acquire window ends at one common cycle.
inline Eigen::VectorXd ideal_probabilities(const Schedule& sched, const BackendModel& b) {
    const SimResult r = simulate(sched, b, 0, 0);
    if (r.window_probs.size() != 1)
        throw ValidationError("ideal_probabilities requires a single aligned acquire group");
    return r.window_probs.front().probs;
}

}  // namespace pulseforge
