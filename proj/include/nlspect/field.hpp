#ifndef NLSPECT_FIELD_HPP
#define NLSPECT_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nlspect/model.hpp"

namespace nlspect {

struct FixedPointDiverged : std::runtime_error {
    FixedPointDiverged()
        : std::runtime_error("implicit midpoint fixed-point iteration diverged") {}
};

/// Real and imaginary parts of Psi = Q + iP on a uniform grid.
struct FieldState {
    std::vector<double> Q, P;
    double x0 = -16.0;
    double dx = 0.04;
    double t = 0.0;

    std::size_t size() const { return Q.size(); }
    double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }

    /// Appendix default: x in [-16, 16] with 801 points.
    static FieldState zero_grid(double x_min = -16.0, double x_max = 16.0,
                                std::size_t n = 801) {
        FieldState s;
        s.x0 = x_min;
        s.dx = (x_max - x_min) / static_cast<double>(n - 1);
        s.Q.assign(n, 0.0);
        s.P.assign(n, 0.0);
        return s;
    }

    template <typename Func>
    void fill(Func&& psi) {  // psi(x) -> (re, im)
        for (std::size_t i = 0; i < size(); ++i) {
            auto [re, im] = psi(x(i));
            Q[i] = re;
            P[i] = im;
        }
    }
};

struct Absorber {
    double width = 2.0;
    double strength = 1.0;
};

struct EvolutionConfig {
    double dt = 2e-4;
    double t_end = 1.0;
    double fixed_point_tol = 1e-12;
    int max_fp_iters = 50;
    std::optional<Absorber> absorber;
    int record_every = 100;
};

struct DiagnosticsSeries {
    std::vector<double> times;
    std::vector<double> norm;
    std::vector<double> H;
    std::vector<double> E_func;
    std::vector<std::pair<double, double>> partial_intervals;
    std::vector<std::vector<double>> partial;  // one series per interval
};

namespace fielddetail {

// Dirichlet second difference (fields assumed ~0 outside the grid).
inline double lap(const std::vector<double>& u, std::size_t i, double inv_dx2) {
    const double um = i > 0 ? u[i - 1] : 0.0;
    const double up = i + 1 < u.size() ? u[i + 1] : 0.0;
    return (um - 2.0 * u[i] + up) * inv_dx2;
}

inline double nl_f_safe(const Nonlinearity& nl, double zeta) {
    if (zeta <= 0.0) return 0.0;
    return nl.f(zeta);
}

}  // namespace fielddetail

inline double field_norm(const FieldState& s) {
    double N = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) N += s.Q[i] * s.Q[i] + s.P[i] * s.P[i];
    return N * s.dx;
}

/// Fraction of |Psi|^2 mass inside [lo, hi] (normalized by the total norm).
inline double partial_norm(const FieldState& s, double lo, double hi) {
    double part = 0.0, total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = s.Q[i] * s.Q[i] + s.P[i] * s.P[i];
        total += d;
        const double x = s.x(i);
        if (x >= lo && x <= hi) part += d;
    }
    return total > 0.0 ? part / total : 0.0;
}

inline double centroid(const FieldState& s) {
    double m = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = s.Q[i] * s.Q[i] + s.P[i] * s.P[i];
        m += d;
        mx += d * s.x(i);
    }
    return m > 0.0 ? mx / m : 0.0;
}

/// Discrete Hamiltonian functional
///   H[Q,P] = 1/2 int [ -(Q/2) Q'' - (P/2) P'' + (Q^2+P^2) V + eps F(Q^2+P^2) ] dx
/// with 3-point central second differences (ghost zeros at the edges) and
/// trapezoidal quadrature.
inline double discrete_hamiltonian(const FieldState& s, const Nonlinearity& nl,
                                   const PotentialSpec& V) {
    if (V.is_delta()) throw DeltaNotSamplable{};
    const double inv_dx2 = 1.0 / (s.dx * s.dx);
    const double eps = nl.epsilon();
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double zeta = s.Q[i] * s.Q[i] + s.P[i] * s.P[i];
        double h = -0.5 * s.Q[i] * fielddetail::lap(s.Q, i, inv_dx2) -
                   0.5 * s.P[i] * fielddetail::lap(s.P, i, inv_dx2) +
                   zeta * V(s.x(i)) + eps * nl.F(zeta);
        const double w = (i == 0 || i + 1 == s.size()) ? 0.5 : 1.0;
        sum += w * h;
    }
    return 0.5 * sum * s.dx;
}

/// E(t) = (1/N) int Psi* [ -1/2 d^2/dx^2 + V + eps f(|Psi|^2) ] Psi dx
/// (real part; generalizes the frequency eigenvalue to non-stationary states).
inline double energy_functional(const FieldState& s, const Nonlinearity& nl,
                                const PotentialSpec& V) {
    if (V.is_delta()) throw DeltaNotSamplable{};
    const double inv_dx2 = 1.0 / (s.dx * s.dx);
    const double eps = nl.epsilon();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double zeta = s.Q[i] * s.Q[i] + s.P[i] * s.P[i];
        const double hpsi_q = -0.5 * fielddetail::lap(s.Q, i, inv_dx2);
        const double hpsi_p = -0.5 * fielddetail::lap(s.P, i, inv_dx2);
        const double local = V(s.x(i)) + eps * fielddetail::nl_f_safe(nl, zeta);
        num += s.Q[i] * (hpsi_q + local * s.Q[i]) + s.P[i] * (hpsi_p + local * s.P[i]);
        den += zeta;
    }
    return den > 0.0 ? num / den : 0.0;
}

/// Workspace reused across steps (grid-sized scratch buffers and the sampled
/// potential / absorber mask).
class FieldStepper {
  public:
    FieldStepper(const FieldState& proto, const Nonlinearity& nl, const PotentialSpec& V,
                 const EvolutionConfig& cfg)
        : nl_(nl), cfg_(cfg), n_(proto.size()), dx_(proto.dx) {
        if (V.is_delta()) throw DeltaNotSamplable{};
        Vg_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) Vg_[i] = V(proto.x(i));
        mQ_.resize(n_);
        mP_.resize(n_);
        dQ_.resize(n_);
        dP_.resize(n_);
        if (cfg.absorber) build_mask(proto, *cfg.absorber);
    }

    /// One implicit-midpoint step z+ = z + dt J grad H((z + z+)/2), solved by
    /// fixed-point iteration on the midpoint to fixed_point_tol in max norm.
    void step(FieldState& s) const {
        const double half_dt = 0.5 * cfg_.dt;
        // Midpoint initial guess: explicit Euler half step.
        rhs(s.Q, s.P, dQ_, dP_);
        for (std::size_t i = 0; i < n_; ++i) {
            mQ_[i] = s.Q[i] + half_dt * dQ_[i];
            mP_[i] = s.P[i] + half_dt * dP_[i];
        }
        bool converged = false;
        for (int it = 0; it < cfg_.max_fp_iters; ++it) {
            rhs(mQ_, mP_, dQ_, dP_);
            double delta = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                const double nq = s.Q[i] + half_dt * dQ_[i];
                const double np = s.P[i] + half_dt * dP_[i];
                delta = std::max(delta, std::abs(nq - mQ_[i]));
                delta = std::max(delta, std::abs(np - mP_[i]));
                mQ_[i] = nq;
                mP_[i] = np;
            }
            if (delta < cfg_.fixed_point_tol) {
                converged = true;
                break;
            }
        }
        if (!converged) throw FixedPointDiverged{};
        for (std::size_t i = 0; i < n_; ++i) {
            s.Q[i] = 2.0 * mQ_[i] - s.Q[i];
            s.P[i] = 2.0 * mP_[i] - s.P[i];
        }
        s.t += cfg_.dt;
        if (!mask_.empty())
            for (std::size_t i = 0; i < n_; ++i) {
                s.Q[i] *= mask_[i];
                s.P[i] *= mask_[i];
            }
    }

  private:
    // Semi-discrete canonical equations:
    //   Qdot = -1/2 P'' + V P + eps f(Q^2+P^2) P
    //   Pdot = +1/2 Q'' - V Q - eps f(Q^2+P^2) Q
    void rhs(const std::vector<double>& Q, const std::vector<double>& P,
             std::vector<double>& dQ, std::vector<double>& dP) const {
        const double inv_dx2 = 1.0 / (dx_ * dx_);
        const double eps = nl_.epsilon();
        for (std::size_t i = 0; i < n_; ++i) {
            const double zeta = Q[i] * Q[i] + P[i] * P[i];
            const double local = Vg_[i] + eps * fielddetail::nl_f_safe(nl_, zeta);
            dQ[i] = -0.5 * fielddetail::lap(P, i, inv_dx2) + local * P[i];
            dP[i] = 0.5 * fielddetail::lap(Q, i, inv_dx2) - local * Q[i];
        }
    }

    // Post-step smooth mask m(x) = 1 - strength * ramp^4 over the outer width
    // of the grid, per-step damping confined to the edges.
    void build_mask(const FieldState& proto, const Absorber& ab) {
        mask_.assign(n_, 1.0);
        const double x_min = proto.x(0);
        const double x_max = proto.x(n_ - 1);
        // Damping per step, scaled so "strength" is an O(1) rate in time.
        const double amp = ab.strength * cfg_.dt;
        for (std::size_t i = 0; i < n_; ++i) {
            const double x = proto.x(i);
            double ramp = 0.0;
            if (x < x_min + ab.width) ramp = (x_min + ab.width - x) / ab.width;
            if (x > x_max - ab.width) ramp = (x - (x_max - ab.width)) / ab.width;
            ramp = std::clamp(ramp, 0.0, 1.0);
            mask_[i] = 1.0 - amp * ramp * ramp * ramp * ramp;
        }
    }

    const Nonlinearity nl_;
    EvolutionConfig cfg_;
    std::size_t n_;
    double dx_;
    std::vector<double> Vg_;
    std::vector<double> mask_;
    mutable std::vector<double> mQ_, mP_, dQ_, dP_;
};

/// Convenience single step.
inline FieldState step(FieldState s, const Nonlinearity& nl, const PotentialSpec& V,
                       const EvolutionConfig& cfg) {
    FieldStepper stepper(s, nl, V, cfg);
    stepper.step(s);
    return s;
}

/// Optional per-record callback, e.g. for snapshot output.
using SnapshotCallback = std::function<void(const FieldState&)>;

inline std::pair<FieldState, DiagnosticsSeries> evolve(
    FieldState psi, const Nonlinearity& nl, const PotentialSpec& V,
    const EvolutionConfig& cfg,
    std::vector<std::pair<double, double>> partial_intervals = {},
    const SnapshotCallback& on_record = nullptr) {
    FieldStepper stepper(psi, nl, V, cfg);
    DiagnosticsSeries diag;
    diag.partial_intervals = partial_intervals;
    diag.partial.resize(partial_intervals.size());

    auto record = [&](const FieldState& s) {
        diag.times.push_back(s.t);
        diag.norm.push_back(field_norm(s));
        diag.H.push_back(discrete_hamiltonian(s, nl, V));
        diag.E_func.push_back(energy_functional(s, nl, V));
        for (std::size_t k = 0; k < partial_intervals.size(); ++k)
            diag.partial[k].push_back(
                partial_norm(s, partial_intervals[k].first, partial_intervals[k].second));
        if (on_record) on_record(s);
    };

    record(psi);
    const long steps = std::max(0L, std::lround((cfg.t_end - psi.t) / cfg.dt));
    for (long i = 1; i <= steps; ++i) {
        stepper.step(psi);
        if (i % std::max(1, cfg.record_every) == 0 || i == steps) record(psi);
    }
    return {std::move(psi), std::move(diag)};
}

// ---------------------------------------------------------------------------
// Scattering bookkeeping

struct ScatteringReport {
    double reflected = 0.0;
    double trapped = 0.0;
    double transmitted = 0.0;
    double absorbed = 0.0;  // mass lost to the absorber (vs the initial norm)
    bool conclusive = true;
};

/// Final partial norms left of / inside / right of the barrier footprint.
/// Fractions are relative to initial_norm; the missing mass is reported as
/// absorbed. Inconclusive if the packet still overlaps the barrier.
inline ScatteringReport scattering_report(const FieldState& final_state,
                                          const Bump& barrier, double initial_norm) {
    ScatteringReport rep;
    const double lo = barrier.xv - barrier.sigma;
    const double hi = barrier.xv + barrier.sigma;
    double left = 0.0, mid = 0.0, right = 0.0;
    for (std::size_t i = 0; i < final_state.size(); ++i) {
        const double d =
            final_state.Q[i] * final_state.Q[i] + final_state.P[i] * final_state.P[i];
        const double x = final_state.x(i);
        if (x < lo)
            left += d;
        else if (x > hi)
            right += d;
        else
            mid += d;
    }
    const double dx = final_state.dx;
    rep.reflected = left * dx / initial_norm;
    rep.trapped = mid * dx / initial_norm;
    rep.transmitted = right * dx / initial_norm;
    rep.absorbed = 1.0 - (rep.reflected + rep.trapped + rep.transmitted);
    rep.conclusive = rep.trapped < 0.05;
    return rep;
}

}  // namespace nlspect

#endif
