#ifndef NLSPECT_CLASSICAL_HPP
#define NLSPECT_CLASSICAL_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "nlspect/model.hpp"

namespace nlspect {

/// (q, p) at parameter t: the wave value as position, its derivative as
/// momentum, the space coordinate playing time.
struct PhaseState {
    double q = 0.0;
    double p = 0.0;
    double t = 0.0;
};

enum class TrajectoryStatus { Completed, Blowup };

struct Trajectory {
    std::vector<PhaseState> samples;
    int node_count = 0;
    double H0_final = 0.0;  // p^2/2 + E q^2 - eps F(q^2) at the last sample
    TrajectoryStatus status = TrajectoryStatus::Completed;
};

/// Free Hamiltonian p^2/2 + E q^2 - eps F(q^2).
inline double free_hamiltonian(double q, double p, double E, const Nonlinearity& nl) {
    return 0.5 * p * p + E * q * q - nl.epsilon() * nl.F(q * q);
}

/// The invariant-curve momentum eta(q, E) = q * sqrt(2) * sqrt(-E + eps F(q^2)/q^2).
/// I+-(E) = {(q, p): p = +-eta(q, E)}. Returns nullopt where the radicand is
/// negative (no vanishing cue passes through this q at this E).
inline std::optional<double> eta(double q, double E, const Nonlinearity& nl) {
    const double eps = nl.epsilon();
    if (q == 0.0) {
        const FOverZeta r = nl.F_over_zeta(0.0);
        if (r.divergent) {
            // eta ~ q*sqrt(-2 eps ln q^2) -> 0 for eps < 0; undefined for eps > 0.
            if (eps < 0.0) return 0.0;
            if (eps == 0.0) return (-E >= 0.0) ? std::optional<double>(0.0) : std::nullopt;
            return std::nullopt;
        }
        const double rad = -E + eps * r.value;
        return rad >= 0.0 ? std::optional<double>(0.0) : std::nullopt;
    }
    const FOverZeta r = nl.F_over_zeta(q * q);
    const double rad = -E + eps * r.value;
    if (rad < 0.0) return std::nullopt;
    return q * std::sqrt(2.0 * rad);
}

/// M = q1 p2 - q2 p1 (conserved under the central force of the 2-D system).
inline double angular_momentum(double q1, double q2, double p1, double p2) {
    return q1 * p2 - q2 * p1;
}

namespace detail {

// Right-hand side of dq/dt = p, dp/dt = 2[V(t)-E]q + 2 eps f(q^2) q.
// The q == 0 guard keeps the logarithmic model finite (the force limit is 0).
inline double force(double q, double Vt, double E, const Nonlinearity& nl) {
    double nl_term = 0.0;
    if (q != 0.0) nl_term = 2.0 * nl.epsilon() * nl.f(q * q) * q;
    return 2.0 * (Vt - E) * q + nl_term;
}

constexpr double kBlowupThreshold = 1e12;

// One fixed-step RK4 update of (q, p) at time t with step h.
template <typename VFunc>
inline void rk4_step(double& q, double& p, double t, double h, double E,
                     const Nonlinearity& nl, VFunc&& V) {
    const double k1q = p;
    const double k1p = force(q, V(t), E, nl);
    const double k2q = p + 0.5 * h * k1p;
    const double k2p = force(q + 0.5 * h * k1q, V(t + 0.5 * h), E, nl);
    const double k3q = p + 0.5 * h * k2p;
    const double k3p = force(q + 0.5 * h * k2q, V(t + 0.5 * h), E, nl);
    const double k4q = p + h * k3p;
    const double k4p = force(q + h * k3q, V(t + h), E, nl);
    q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
}

}  // namespace detail

/// Sign changes of q over the samples. A sample with |q| < 1e-14 counts as one
/// node and resets the sign tracking so the flanking signs do not double-count.
inline int count_nodes(const std::vector<PhaseState>& samples) {
    int nodes = 0;
    int prev = 0;
    bool at_zero = false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double q = samples[i].q;
        if (std::abs(q) < 1e-14) {
            if (!at_zero && i > 0 && i + 1 < samples.size()) ++nodes;
            at_zero = true;
            prev = 0;
            continue;
        }
        at_zero = false;
        const int s = q > 0.0 ? 1 : -1;
        if (prev != 0 && s != prev) ++nodes;
        prev = s;
    }
    return nodes;
}

/// Fixed-step RK4 integration of the canonical equations from initial.t to
/// t_end. Blowup (|q| or |p| > 1e12) is a reported outcome, not an error.
inline Trajectory integrate(PhaseState initial, double E, const Nonlinearity& nl,
                            const PotentialSpec& V, double t_end, double dt) {
    if (dt <= 0.0) throw DomainError("integrate: dt must be > 0");
    if (V.is_delta()) throw DeltaNotSamplable{};

    const double span = t_end - initial.t;
    const long steps = std::max(1L, std::lround(span / dt));
    const double h = span / static_cast<double>(steps);

    Trajectory traj;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    traj.samples.push_back(initial);

    double q = initial.q, p = initial.p;
    for (long i = 0; i < steps; ++i) {
        const double t = initial.t + h * static_cast<double>(i);
        detail::rk4_step(q, p, t, h, E, nl, V);
        traj.samples.push_back({q, p, initial.t + h * static_cast<double>(i + 1)});
        if (std::abs(q) > detail::kBlowupThreshold ||
            std::abs(p) > detail::kBlowupThreshold) {
            traj.status = TrajectoryStatus::Blowup;
            break;
        }
    }

    traj.node_count = count_nodes(traj.samples);
    const PhaseState& last = traj.samples.back();
    traj.H0_final = free_hamiltonian(last.q, last.p, E, nl);
    return traj;
}

/// Same integration without storing samples; returns the final state and node
/// count. Used by the spectral scans where only the endpoint matters.
struct ShotResult {
    PhaseState final_state;
    int node_count = 0;
    TrajectoryStatus status = TrajectoryStatus::Completed;
};

inline ShotResult shoot(PhaseState initial, double E, const Nonlinearity& nl,
                        const PotentialSpec& V, double t_end, double dt) {
    if (dt <= 0.0) throw DomainError("shoot: dt must be > 0");
    if (V.is_delta()) throw DeltaNotSamplable{};

    const double span = t_end - initial.t;
    const long steps = std::max(1L, std::lround(span / dt));
    const double h = span / static_cast<double>(steps);

    ShotResult out;
    double q = initial.q, p = initial.p;
    int nodes = 0;
    int prev = 0;
    if (std::abs(q) >= 1e-14) prev = q > 0.0 ? 1 : -1;
    for (long i = 0; i < steps; ++i) {
        const double t = initial.t + h * static_cast<double>(i);
        detail::rk4_step(q, p, t, h, E, nl, V);
        if (std::abs(q) >= 1e-14) {
            const int s = q > 0.0 ? 1 : -1;
            if (prev != 0 && s != prev) ++nodes;
            prev = s;
        } else {
            if (prev != 0) ++nodes;
            prev = 0;
        }
        if (std::abs(q) > detail::kBlowupThreshold ||
            std::abs(p) > detail::kBlowupThreshold) {
            out.status = TrajectoryStatus::Blowup;
            out.final_state = {q, p, initial.t + h * static_cast<double>(i + 1)};
            out.node_count = nodes;
            return out;
        }
    }
    out.final_state = {q, p, t_end};
    out.node_count = nodes;
    return out;
}

}  // namespace nlspect

#endif
