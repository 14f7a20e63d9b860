#ifndef NLSPECT_SPECTRAL_HPP
#define NLSPECT_SPECTRAL_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "nlspect/classical.hpp"
#include "nlspect/model.hpp"
#include "nlspect/quadrature.hpp"

namespace nlspect {

/// One (q_a, E) eigenvalue record. n is the branch index (node count).
struct SpectralPoint {
    double q_a = 0.0;
    double E = 0.0;
    int n = 0;
    double pseudonorm = 0.0;
    bool norm_valid = true;
};

struct SpectralConfig {
    double dt = 1e-3;        // RK4 step for the shooting integration
    int scan_points = 2001;  // coarse E grid
    double bisect_tol = 1e-10;
    int refine_depth = 2;  // adaptive subdivision where the node count jumps
    std::optional<std::pair<double, double>> interval;  // override [a, b]
};

namespace detail {

inline std::pair<double, double> shooting_interval(const PotentialSpec& V,
                                                   const SpectralConfig& cfg) {
    if (cfg.interval) return *cfg.interval;
    auto [a, b] = V.support();
    if (!(b > a)) throw DomainError("shooting interval is degenerate; set one explicitly");
    return {a, b};
}

constexpr double kResidualSentinel = 1e300;

}  // namespace detail

/// Signed miss distance to I-(E): integrate from (q_a, +eta(q_a,E)) at t=a to
/// t=b and return r = p(b) + eta(q(b), E), zero iff the endpoint lies on the
/// shrinking line. If eta(q(b),E) is undefined, r is sign(p(b)) * 1e300.
struct ResidualResult {
    double r = 0.0;
    int n = 0;
    PhaseState final_state;
    bool final_cue_defined = true;
};

inline ResidualResult residual(double E, double q_a, const Nonlinearity& nl,
                               const PotentialSpec& V,
                               const SpectralConfig& cfg = {}) {
    auto [a, b] = detail::shooting_interval(V, cfg);
    const auto eta_a = eta(q_a, E, nl);
    if (!eta_a) throw CueUndefined("eta(q_a, E) undefined at the start of the shot");

    const ShotResult shot = shoot({q_a, *eta_a, a}, E, nl, V, b, cfg.dt);
    ResidualResult out;
    out.n = shot.node_count;
    out.final_state = shot.final_state;
    const double qb = shot.final_state.q, pb = shot.final_state.p;
    if (shot.status == TrajectoryStatus::Blowup) {
        out.r = (pb >= 0.0 ? 1.0 : -1.0) * detail::kResidualSentinel;
        out.final_cue_defined = false;
        return out;
    }
    const auto eta_b = eta(qb, E, nl);
    if (!eta_b) {
        out.r = (pb >= 0.0 ? 1.0 : -1.0) * detail::kResidualSentinel;
        out.final_cue_defined = false;
        return out;
    }
    out.r = pb + *eta_b;
    return out;
}

// ---------------------------------------------------------------------------
// Pseudonorm (finite continuous extension of the L2 norm)

struct PseudonormResult {
    double N = 0.0;
    bool valid = true;
};

/// Cue-tail integral (1/(2 sqrt 2)) * int_0^zeta_end dz / sqrt(-E + eps F(z)/z).
/// valid goes false if the radicand is negative anywhere on (0, zeta_end].
inline PseudonormResult cue_tail_norm(double zeta_end, double E, const Nonlinearity& nl) {
    if (zeta_end <= 0.0) return {0.0, true};
    const double eps = nl.epsilon();
    auto radicand = [&](double z) {
        const FOverZeta r = nl.F_over_zeta(z);
        if (r.divergent) return eps < 0.0 ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
        return -E + eps * r.value;
    };
    // Validity sweep over a geometric grid down to tiny zeta.
    bool valid = true;
    for (int k = 0; k <= 64; ++k) {
        const double z = zeta_end * std::pow(10.0, -9.0 * (1.0 - k / 64.0));
        if (radicand(z) < 0.0) {
            valid = false;
            break;
        }
    }
    if (!valid) return {0.0, false};
    const double value =
        adaptive_simpson(
            [&](double z) {
                const double rad = z > 0.0 ? radicand(z) : radicand(1e-300);
                return 1.0 / std::sqrt(std::max(rad, 1e-300));
            },
            0.0, zeta_end, 1e-13) /
        (2.0 * std::sqrt(2.0));
    return {value, true};
}

/// Three-term pseudonorm N+ + N0 + N- : interior integral of q^2 over the
/// trajectory samples (composite Simpson) plus the two cue-tail integrals
/// joined at t = a and t = b. Reduces to the true norm on bound states.
inline PseudonormResult pseudonorm(const Trajectory& traj, double E,
                                   const Nonlinearity& nl, double a, double b) {
    PseudonormResult out;
    if (traj.samples.empty()) return out;
    std::vector<double> q2(traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
        q2[i] = traj.samples[i].q * traj.samples[i].q;
    const double h = traj.samples.size() > 1
                         ? (b - a) / static_cast<double>(traj.samples.size() - 1)
                         : 0.0;
    const double N0 = simpson_uniform(q2, h);

    const PseudonormResult plus = cue_tail_norm(q2.front(), E, nl);
    const PseudonormResult minus = cue_tail_norm(q2.back(), E, nl);
    out.N = N0 + (plus.valid ? plus.N : 0.0) + (minus.valid ? minus.N : 0.0);
    out.valid = plus.valid && minus.valid;
    return out;
}

/// Closed-form Zakharov cue norm N+- = (2/(eps sqrt 2)) (gamma sqrt(|E| + eps
/// q_a^2/2) - sqrt(|E|)), gamma = -1 for the long cues (eps < 0 only).
inline double zakharov_cue_norm(double E, double q_a, double eps, bool long_cue) {
    if (E >= 0.0) throw DomainError("zakharov_cue_norm: requires E < 0");
    if (long_cue && eps >= 0.0)
        throw DomainError("zakharov_cue_norm: long cues require eps < 0");
    const double absE = -E;
    const double rad = absE + 0.5 * eps * q_a * q_a;
    if (rad < 0.0) throw DomainError("zakharov_cue_norm: negative radicand");
    if (eps == 0.0) return q_a * q_a / (2.0 * std::sqrt(2.0 * absE));
    const double gamma = long_cue ? -1.0 : 1.0;
    return 2.0 / (eps * std::sqrt(2.0)) * (gamma * std::sqrt(rad) - std::sqrt(absE));
}

// ---------------------------------------------------------------------------
// Delta-well closed forms

/// General delta-well eigenvalue E = -Omega^2/2 + eps F(q0^2)/q0^2.
inline double delta_well_E(double Omega, double eps, const Nonlinearity& nl, double q0) {
    if (q0 <= 0.0) throw DomainError("delta_well_E: q0 must be > 0");
    const FOverZeta r = nl.F_over_zeta(q0 * q0);
    if (r.divergent) throw DomainError("delta_well_E: F(q0^2)/q0^2 not finite");
    return -0.5 * Omega * Omega + eps * r.value;
}

/// Norm-1 Zakharov delta-well eigenvalue E = -(1/2)(Omega - eps/2)^2. Exists
/// for eps <= 2 Omega (short cues, Omega > 0) or eps <= 4 Omega (long cues,
/// Omega < 0); nullopt means the nonlinearity is too strong to localize.
inline std::optional<double> delta_well_norm1(double Omega, double eps) {
    const bool exists =
        (Omega > 0.0 && eps <= 2.0 * Omega) || (Omega < 0.0 && eps <= 4.0 * Omega);
    if (!exists) return std::nullopt;
    const double s = Omega - 0.5 * eps;
    return -0.5 * s * s;
}

// ---------------------------------------------------------------------------
// Eigenvalue scan

namespace detail {

struct GridSample {
    double E;
    double r;
    int n;
    bool ok;       // finite residual with the end cue defined
    bool defined;  // start cue defined (the sample carries sign information)
};

inline GridSample sample_residual(double E, double q_a, const Nonlinearity& nl,
                                  const PotentialSpec& V, const SpectralConfig& cfg) {
    GridSample g{E, 0.0, 0, false, false};
    try {
        const ResidualResult rr = residual(E, q_a, nl, V, cfg);
        g.r = rr.r;
        g.n = rr.n;
        g.defined = true;
        g.ok = rr.final_cue_defined && std::abs(rr.r) < kResidualSentinel;
    } catch (const CueUndefined&) {
    }
    return g;
}

inline double bisect_root(double Elo, double Ehi, double rlo, double q_a,
                          const Nonlinearity& nl, const PotentialSpec& V,
                          const SpectralConfig& cfg) {
    const bool lo_neg = rlo < 0.0;
    while (Ehi - Elo > cfg.bisect_tol) {
        const double Em = 0.5 * (Elo + Ehi);
        const GridSample g = sample_residual(Em, q_a, nl, V, cfg);
        if ((g.r < 0.0) == lo_neg)
            Elo = Em;
        else
            Ehi = Em;
    }
    return 0.5 * (Elo + Ehi);
}

inline void scan_segment(const GridSample& g1, const GridSample& g2, double q_a,
                         const Nonlinearity& nl, const PotentialSpec& V,
                         const SpectralConfig& cfg, int depth,
                         std::vector<double>& roots) {
    if (!g1.defined || !g2.defined) return;
    const bool sign_change = (g1.r < 0.0) != (g2.r < 0.0);
    const bool node_jump = g1.ok && g2.ok && g1.n != g2.n;
    if (!sign_change && !node_jump) return;
    const bool plain = g1.ok && g2.ok && g1.n == g2.n;
    if (!plain && depth < cfg.refine_depth) {
        const int sub = 16;
        GridSample prev = g1;
        for (int k = 1; k <= sub; ++k) {
            const double E = g1.E + (g2.E - g1.E) * k / static_cast<double>(sub);
            GridSample cur = (k == sub) ? g2 : sample_residual(E, q_a, nl, V, cfg);
            scan_segment(prev, cur, q_a, nl, V, cfg, depth + 1, roots);
            prev = cur;
        }
        return;
    }
    if (!sign_change) return;
    // A sign change brackets a root: r passes through zero between finite
    // samples, and diverging shots flip the blowup direction exactly at an
    // eigenvalue. Bisect, then reject bisections that landed on a residual
    // discontinuity rather than a connection.
    const double E = bisect_root(g1.E, g2.E, g1.r, q_a, nl, V, cfg);
    const GridSample chk = sample_residual(E, q_a, nl, V, cfg);
    if (chk.ok) roots.push_back(E);
}

}  // namespace detail

/// Builds the full SpectralPoint (trajectory, node count, pseudonorm) at a
/// solved eigenvalue.
inline SpectralPoint make_spectral_point(double E, double q_a, const Nonlinearity& nl,
                                         const PotentialSpec& V,
                                         const SpectralConfig& cfg = {}) {
    auto [a, b] = detail::shooting_interval(V, cfg);
    const auto eta_a = eta(q_a, E, nl);
    if (!eta_a) throw CueUndefined("eta(q_a, E) undefined");
    const Trajectory traj = integrate({q_a, *eta_a, a}, E, nl, V, b, cfg.dt);
    const PseudonormResult pn = pseudonorm(traj, E, nl, a, b);
    return {q_a, E, traj.node_count, pn.N, pn.valid};
}

/// Scans E over [Elo, Ehi], brackets sign changes of the residual inside
/// maximal constant-node segments, refines by bisection to |dE| < bisect_tol.
/// Returns points sorted by E ascending, node counts <= n_max. An empty list
/// is a valid outcome.
inline std::vector<SpectralPoint> find_eigenvalues(double q_a, const Nonlinearity& nl,
                                                   const PotentialSpec& V, double Elo,
                                                   double Ehi, int n_max,
                                                   const SpectralConfig& cfg = {}) {
    if (Ehi >= 0.0) Ehi = std::min(Ehi, -1e-12);
    if (Elo >= Ehi) throw DomainError("find_eigenvalues: empty E range");

    std::vector<double> roots;
    detail::GridSample prev =
        detail::sample_residual(Elo, q_a, nl, V, cfg);
    for (int i = 1; i < cfg.scan_points; ++i) {
        const double E = Elo + (Ehi - Elo) * i / static_cast<double>(cfg.scan_points - 1);
        detail::GridSample cur = detail::sample_residual(E, q_a, nl, V, cfg);
        detail::scan_segment(prev, cur, q_a, nl, V, cfg, 0, roots);
        prev = cur;
    }

    std::sort(roots.begin(), roots.end());
    std::vector<SpectralPoint> out;
    for (double E : roots) {
        if (!out.empty() && E - out.back().E < 10.0 * cfg.bisect_tol) continue;
        SpectralPoint pt = make_spectral_point(E, q_a, nl, V, cfg);
        if (pt.n <= n_max) out.push_back(pt);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Branch maps and isonorm intersections

struct BranchMap {
    std::vector<double> q_a_grid;
    std::vector<std::vector<SpectralPoint>> per_q_a;  // sorted by E, parallel to grid

    /// Points regrouped by node count, sorted by q_a.
    std::map<int, std::vector<SpectralPoint>> branches() const {
        std::map<int, std::vector<SpectralPoint>> by_n;
        for (const auto& pts : per_q_a)
            for (const auto& p : pts) by_n[p.n].push_back(p);
        for (auto& [n, v] : by_n)
            std::sort(v.begin(), v.end(),
                      [](const SpectralPoint& x, const SpectralPoint& y) {
                          return x.q_a < y.q_a;
                      });
        return by_n;
    }
};

template <typename Func>
void parallel_for(std::size_t count, Func&& body, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                body(i);
        });
    for (auto& th : pool) th.join();
}

inline BranchMap build_branch_map(const std::vector<double>& q_a_grid,
                                  const Nonlinearity& nl, const PotentialSpec& V,
                                  double Elo, double Ehi, int n_max,
                                  const SpectralConfig& cfg = {}, unsigned threads = 0) {
    BranchMap map;
    map.q_a_grid = q_a_grid;
    map.per_q_a.resize(q_a_grid.size());
    parallel_for(
        q_a_grid.size(),
        [&](std::size_t i) {
            map.per_q_a[i] = find_eigenvalues(q_a_grid[i], nl, V, Elo, Ehi, n_max, cfg);
        },
        threads);
    return map;
}

namespace detail {

/// Eigenvalue of branch n at q_a, searched near E_hint first, then over the
/// full range.
inline std::optional<SpectralPoint> solve_branch_at(double q_a, int n, double E_hint,
                                                    const Nonlinearity& nl,
                                                    const PotentialSpec& V, double Elo,
                                                    double Ehi,
                                                    const SpectralConfig& cfg) {
    SpectralConfig local = cfg;
    local.scan_points = 201;
    for (double window : {0.5, 2.0}) {
        const double lo = std::max(Elo, E_hint - window);
        const double hi = std::min(Ehi, E_hint + window);
        if (!(hi > lo)) continue;
        auto pts = find_eigenvalues(q_a, nl, V, lo, hi, n + 1, local);
        for (const auto& p : pts)
            if (p.n == n) return p;
    }
    auto pts = find_eigenvalues(q_a, nl, V, Elo, Ehi, n + 1, cfg);
    for (const auto& p : pts)
        if (p.n == n) return p;
    return std::nullopt;
}

}  // namespace detail

/// Isonorm intersections: for each branch crossing N_target, root-finds the
/// q_a at which the pseudonorm equals N_target (tolerance 1e-8 in N) and
/// returns the branch point there. Branches that never reach N_target are
/// skipped. Points with indetermined pseudonorm are excluded.
inline std::vector<SpectralPoint> isonorm_eigenvalues(
    double N_target, const Nonlinearity& nl, const PotentialSpec& V,
    const std::vector<double>& q_a_grid, double Elo, double Ehi, int n_max,
    const SpectralConfig& cfg = {}, unsigned threads = 0) {
    if (N_target <= 0.0) throw DomainError("isonorm_eigenvalues: N_target must be > 0");
    const BranchMap map = build_branch_map(q_a_grid, nl, V, Elo, Ehi, n_max, cfg, threads);

    std::vector<SpectralPoint> out;
    for (const auto& [n, pts] : map.branches()) {
        std::vector<SpectralPoint> valid;
        for (const auto& p : pts)
            if (p.norm_valid) valid.push_back(p);
        // Find a grid bracket where N crosses the target.
        std::optional<std::pair<SpectralPoint, SpectralPoint>> bracket;
        for (std::size_t i = 0; i + 1 < valid.size(); ++i) {
            const double a = valid[i].pseudonorm - N_target;
            const double b = valid[i + 1].pseudonorm - N_target;
            if ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0)) {
                bracket = {valid[i], valid[i + 1]};
                break;
            }
        }
        if (!bracket) continue;  // target outside this branch's range

        auto [lo, hi] = *bracket;
        SpectralPoint best = std::abs(lo.pseudonorm - N_target) <
                                     std::abs(hi.pseudonorm - N_target)
                                 ? lo
                                 : hi;
        // Bisection on q_a (robust against non-monotone stretches).
        double flo = lo.pseudonorm - N_target;
        for (int iter = 0; iter < 60; ++iter) {
            if (std::abs(best.pseudonorm - N_target) < 1e-8) break;
            const double qm = 0.5 * (lo.q_a + hi.q_a);
            const double Em = 0.5 * (lo.E + hi.E);
            auto mid = detail::solve_branch_at(qm, n, Em, nl, V, Elo, Ehi, cfg);
            if (!mid || !mid->norm_valid) break;
            const double fm = mid->pseudonorm - N_target;
            if (std::abs(fm) < std::abs(best.pseudonorm - N_target)) best = *mid;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = *mid;
                flo = fm;
            } else {
                hi = *mid;
            }
            if (std::abs(hi.q_a - lo.q_a) < 1e-12) break;
        }
        if (std::abs(best.pseudonorm - N_target) < 1e-6) out.push_back(best);
    }
    std::sort(out.begin(), out.end(),
              [](const SpectralPoint& a, const SpectralPoint& b) { return a.E < b.E; });
    return out;
}

}  // namespace nlspect

#endif
