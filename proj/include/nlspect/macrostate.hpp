#ifndef NLSPECT_MACROSTATE_HPP
#define NLSPECT_MACROSTATE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "nlspect/classical.hpp"
#include "nlspect/model.hpp"

namespace nlspect {

struct NoLoop : DomainError {
    using DomainError::DomainError;
};

struct PreconditionViolated : DomainError {
    using DomainError::DomainError;
};

enum class MacrostateKind { Soliton, Gausson };

/// Closed-form localized stationary state with V == 0.
struct MacrostateProfile {
    MacrostateKind kind;
    double E;
    double eps;

    double operator()(double x) const {
        if (kind == MacrostateKind::Soliton)
            return std::sqrt(2.0 * E / eps) / std::cosh(x * std::sqrt(-2.0 * E));
        return std::exp((E + eps) / (2.0 * eps) + eps * x * x);
    }
};

/// psi_S(x) = sqrt(2E/eps) / cosh(x sqrt(-2E)). Requires E < 0 and eps < 0.
inline MacrostateProfile soliton(double E, double eps) {
    if (!(E < 0.0 && eps < 0.0))
        throw DomainError("soliton: requires E < 0 and eps < 0");
    return {MacrostateKind::Soliton, E, eps};
}

/// psi_G(x) = exp((E + eps)/(2 eps) + eps x^2). Requires eps < 0, any E.
inline MacrostateProfile gausson(double E, double eps) {
    if (!(eps < 0.0)) throw DomainError("gausson: requires eps < 0");
    return {MacrostateKind::Gausson, E, eps};
}

// ---------------------------------------------------------------------------
// Macrostate reconstruction by shooting along the homoclinic loop

/// Half-orbit of the free canonical system from q_seed on I+(E) up to the
/// turning point, mirrored into a symmetric profile. Evaluation uses cubic
/// Hermite interpolation of the stored samples (q and q' = p are both known).
class ShotProfile {
  public:
    ShotProfile(std::vector<PhaseState> rising_half, double t_peak)
        : samples_(std::move(rising_half)), t_peak_(t_peak) {}

    double q_max() const {
        double m = 0.0;
        for (const auto& s : samples_) m = std::max(m, s.q);
        return m;
    }

    /// psi(x), with psi(0) = q_max (peak centred at x = 0).
    double operator()(double x) const {
        const double t = t_peak_ - std::abs(x);  // mirror symmetry
        if (samples_.empty() || t <= samples_.front().t) return 0.0;
        if (t >= samples_.back().t) return samples_.back().q;
        // Locate the step (uniform spacing).
        const double h = (samples_.back().t - samples_.front().t) /
                         static_cast<double>(samples_.size() - 1);
        std::size_t i = static_cast<std::size_t>((t - samples_.front().t) / h);
        i = std::min(i, samples_.size() - 2);
        const PhaseState& s0 = samples_[i];
        const PhaseState& s1 = samples_[i + 1];
        const double u = (t - s0.t) / (s1.t - s0.t);
        const double dt = s1.t - s0.t;
        // Cubic Hermite with q' = p.
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * s0.q + (u3 - 2 * u2 + u) * dt * s0.p +
               (-2 * u3 + 3 * u2) * s1.q + (u3 - u2) * dt * s1.p;
    }

  private:
    std::vector<PhaseState> samples_;  // rising half, strictly increasing t
    double t_peak_;
};

/// Checks the loop topology and integrates the free canonical system from
/// (q_seed, eta(q_seed, E)) until the turning point p = 0, returning the
/// mirrored profile. Throws NoLoop if I+ and I- never reconnect for q > 0.
inline ShotProfile macrostate_by_shooting(double E, const Nonlinearity& nl,
                                          double q_seed = 1e-6, double dt = 1e-4) {
    // The loop closes where the cue radicand re-zeroes at some zeta > 0.
    auto radicand = [&](double zeta) {
        const FOverZeta r = nl.F_over_zeta(zeta);
        if (r.divergent) return nl.epsilon() < 0.0
                                    ? std::numeric_limits<double>::infinity()
                                    : -std::numeric_limits<double>::infinity();
        return -E + nl.epsilon() * r.value;
    };
    bool reconnects = false;
    for (double zeta = 1e-8; zeta < 1e8; zeta *= 1.25) {
        if (radicand(zeta) < 0.0) {
            reconnects = true;
            break;
        }
    }
    if (!reconnects)
        throw NoLoop("I+(E) and I-(E) do not connect for q > 0 at this E");

    const auto eta0 = eta(q_seed, E, nl);
    if (!eta0) throw NoLoop("cue undefined at q_seed");

    std::vector<PhaseState> half;
    double q = q_seed, p = *eta0, t = 0.0;
    half.push_back({q, p, t});
    const double t_cap = 1e4;
    auto V0 = [](double) { return 0.0; };
    while (t < t_cap) {
        const double q_prev = q, p_prev = p;
        detail::rk4_step(q, p, t, dt, E, nl, V0);
        t += dt;
        if (p <= 0.0) {
            // Crossed the turning point inside this step; locate p = 0 by
            // bisection on the step size from the previous state.
            double lo = 0.0, hi = dt;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                double qm = q_prev, pm = p_prev;
                detail::rk4_step(qm, pm, t - dt, mid, E, nl, V0);
                (pm > 0.0 ? lo : hi) = mid;
            }
            double qm = q_prev, pm = p_prev;
            const double hstar = 0.5 * (lo + hi);
            detail::rk4_step(qm, pm, t - dt, hstar, E, nl, V0);
            const double t_peak = t - dt + hstar;
            half.push_back({qm, 0.0, t_peak});
            // Samples are uniform except the last; drop it for interpolation
            // and carry the peak time separately.
            half.pop_back();
            half.push_back({q, p, t});  // keeps spacing uniform through the peak
            return ShotProfile(std::move(half), t_peak);
        }
        half.push_back({q, p, t});
    }
    throw NoLoop("turning point not reached (orbit does not close)");
}

// ---------------------------------------------------------------------------
// Perturbation classification (pulse under a rising cue)

enum class PerturbationVerdict { ReturnsToOrigin, InnerCirculation, OuterCirculation };

struct PerturbationOutcome {
    PerturbationVerdict verdict;
    double H0_after;
};

/// Integrates a macrostate trajectory through the potential pulse and
/// classifies the asymptotic behaviour by the free-Hamiltonian value past the
/// pulse: zero (within tol) returns to the origin, negative circulates on an
/// inner loop, positive on an outer one.
inline PerturbationOutcome classify_perturbation(double E, const Nonlinearity& nl,
                                                 const PotentialSpec& pulse,
                                                 PhaseState start, double dt = 1e-4) {
    auto [alpha, beta] = pulse.support();
    const bool has_pulse = beta > alpha;
    if (start.t > alpha) throw PreconditionViolated("start must precede the pulse");

    // Peak q of the loop (first zero of the radicand for q > 0).
    double q_max = std::numeric_limits<double>::infinity();
    for (double zeta = 1e-8; zeta < 1e8; zeta *= 1.0009) {
        const FOverZeta r = nl.F_over_zeta(zeta);
        const double rad = r.divergent ? (nl.epsilon() < 0.0 ? 1.0 : -1.0)
                                       : -E + nl.epsilon() * r.value;
        if (rad < 0.0) {
            q_max = std::sqrt(zeta);
            break;
        }
    }

    const double t_end = has_pulse ? beta + 1.0 : start.t + 1.0;

    // Dry run: the unperturbed orbit must stay on the rising cue segment
    // across the pulse window.
    {
        const Trajectory dry =
            integrate(start, E, nl, PotentialSpec::zero(), t_end, dt);
        for (const auto& s : dry.samples) {
            if (s.t < alpha || s.t > beta) continue;
            if (!(s.q > 0.0 && s.q < q_max && s.p > 0.0))
                throw PreconditionViolated(
                    "pulse support is not under a rising cue segment");
        }
    }

    const Trajectory traj = integrate(start, E, nl, pulse, t_end, dt);
    const PhaseState& fin = traj.samples.back();
    const double H0 = free_hamiltonian(fin.q, fin.p, E, nl);

    double pulse_peak = 0.0;
    if (has_pulse)
        for (int i = 0; i <= 200; ++i)
            pulse_peak = std::max(pulse_peak,
                                  std::abs(pulse(alpha + (beta - alpha) * i / 200.0)));
    const double tol = 1e-10 * std::max(1.0, pulse_peak);

    PerturbationOutcome out{PerturbationVerdict::ReturnsToOrigin, H0};
    if (H0 < -tol)
        out.verdict = PerturbationVerdict::InnerCirculation;
    else if (H0 > tol)
        out.verdict = PerturbationVerdict::OuterCirculation;
    return out;
}

}  // namespace nlspect

#endif
