#ifndef NLSPECT_MODEL_HPP
#define NLSPECT_MODEL_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace nlspect {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DeltaNotSamplable : DomainError {
    DeltaNotSamplable() : DomainError("delta wells cannot be sampled pointwise") {}
};

struct CueUndefined : DomainError {
    using DomainError::DomainError;
};

enum class NonlinKind { Linear, Zakharov, Logarithmic, Custom };

/// Result of F(zeta)/zeta. At zeta = 0 the logarithmic model diverges to
/// -infinity; that case is flagged instead of thrown because cue construction
/// branches on it.
struct FOverZeta {
    double value = 0.0;
    bool divergent = false;
};

/// The pair (f, F) with coupling epsilon. F is the antiderivative of f with
/// F(0) = 0. Built-in models: f = 0 (linear), f(z) = z (Zakharov),
/// f(z) = ln z (logarithmic).
class Nonlinearity {
  public:
    static Nonlinearity linear() { return Nonlinearity(NonlinKind::Linear, 0.0); }

    static Nonlinearity zakharov(double epsilon) {
        return Nonlinearity(NonlinKind::Zakharov, epsilon);
    }

    static Nonlinearity logarithmic(double epsilon) {
        return Nonlinearity(NonlinKind::Logarithmic, epsilon);
    }

    /// Custom models supply both f and F; no numerical antidifferentiation.
    static Nonlinearity custom(double epsilon, std::function<double(double)> f,
                               std::function<double(double)> F) {
        Nonlinearity nl(NonlinKind::Custom, epsilon);
        nl.custom_f_ = std::move(f);
        nl.custom_F_ = std::move(F);
        return nl;
    }

    NonlinKind kind() const { return kind_; }
    double epsilon() const { return epsilon_; }

    double f(double zeta) const {
        switch (kind_) {
            case NonlinKind::Linear: return 0.0;
            case NonlinKind::Zakharov: return zeta;
            case NonlinKind::Logarithmic: return std::log(zeta);
            case NonlinKind::Custom: return custom_f_(zeta);
        }
        return 0.0;
    }

    double F(double zeta) const {
        switch (kind_) {
            case NonlinKind::Linear: return 0.0;
            case NonlinKind::Zakharov: return 0.5 * zeta * zeta;
            case NonlinKind::Logarithmic:
                return zeta > 0.0 ? zeta * std::log(zeta) - zeta : 0.0;
            case NonlinKind::Custom: return custom_F_(zeta);
        }
        return 0.0;
    }

    /// F(zeta)/zeta with its zeta -> 0 limit.
    FOverZeta F_over_zeta(double zeta) const {
        if (zeta < 0.0) throw DomainError("F_over_zeta: zeta < 0");
        if (zeta == 0.0) {
            switch (kind_) {
                case NonlinKind::Linear: return {0.0, false};
                case NonlinKind::Zakharov: return {0.0, false};
                case NonlinKind::Logarithmic:
                    return {-std::numeric_limits<double>::infinity(), true};
                case NonlinKind::Custom: {
                    // Probe the one-sided limit numerically.
                    const double probe = custom_F_(1e-12) / 1e-12;
                    if (!std::isfinite(probe) || probe < -1e6)
                        return {-std::numeric_limits<double>::infinity(), true};
                    return {probe, false};
                }
            }
        }
        return {F(zeta) / zeta, false};
    }

  private:
    Nonlinearity(NonlinKind kind, double epsilon) : kind_(kind), epsilon_(epsilon) {}

    NonlinKind kind_;
    double epsilon_;
    std::function<double(double)> custom_f_, custom_F_;
};

// ---------------------------------------------------------------------------
// Potentials

struct ZeroPotential {};

/// V(t) = V0 for t in [-b, b], 0 outside (symmetric about 0). V0 < 0.
struct RectWell {
    double V0;
    double b;
};

/// V(t) = -Omega * delta(t). Handled only by closed-form operations.
struct DeltaWell {
    double Omega;
};

/// V(x) = V0 * [1 - (x - xv)^2/sigma^2]^2 for |x - xv| <= sigma, 0 outside.
/// C1 at the edges.
struct Bump {
    double V0;
    double xv;
    double sigma;

    double operator()(double x) const {
        const double u = (x - xv) / sigma;
        if (std::abs(u) > 1.0) return 0.0;
        const double w = 1.0 - u * u;
        return V0 * w * w;
    }

    /// Integral of V over the real line: V0 * 16 sigma / 15.
    double integral() const { return V0 * 16.0 * sigma / 15.0; }
};

struct BumpSum {
    std::vector<Bump> bumps;
};

class PotentialSpec {
  public:
    using Rep = std::variant<ZeroPotential, RectWell, DeltaWell, Bump, BumpSum>;

    static PotentialSpec zero() { return PotentialSpec(ZeroPotential{}); }

    static PotentialSpec rect_well(double V0, double b) {
        if (b <= 0.0) throw DomainError("rect_well: b must be > 0");
        return PotentialSpec(RectWell{V0, b});
    }

    static PotentialSpec delta_well(double Omega) {
        return PotentialSpec(DeltaWell{Omega});
    }

    static PotentialSpec bump(double V0, double xv, double sigma) {
        if (sigma <= 0.0) throw DomainError("bump: sigma must be > 0");
        return PotentialSpec(Bump{V0, xv, sigma});
    }

    static PotentialSpec sum(std::vector<Bump> bumps) {
        for (const auto& b : bumps)
            if (b.sigma <= 0.0) throw DomainError("sum: sigma must be > 0");
        return PotentialSpec(BumpSum{std::move(bumps)});
    }

    /// Narrow bump carrying the same integral as -Omega*delta(t), used to
    /// cross-check the delta-well closed forms. integral(Bump) = V0*16*sigma/15.
    static PotentialSpec regularized_delta(double Omega, double sigma) {
        return bump(-Omega * 15.0 / (16.0 * sigma), 0.0, sigma);
    }

    const Rep& rep() const { return rep_; }
    bool is_delta() const { return std::holds_alternative<DeltaWell>(rep_); }
    bool is_zero() const { return std::holds_alternative<ZeroPotential>(rep_); }

    /// Smallest interval containing all non-zero pieces.
    std::pair<double, double> support() const { return {support_a_, support_b_}; }

    /// V(x) per the piecewise formulas; exactly 0 outside support.
    double operator()(double x) const {
        if (is_delta()) throw DeltaNotSamplable{};
        if (x < support_a_ || x > support_b_) return 0.0;
        return std::visit(
            [x](const auto& v) -> double {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, ZeroPotential>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<T, RectWell>) {
                    return (x >= -v.b && x <= v.b) ? v.V0 : 0.0;
                } else if constexpr (std::is_same_v<T, DeltaWell>) {
                    throw DeltaNotSamplable{};
                } else if constexpr (std::is_same_v<T, Bump>) {
                    return v(x);
                } else {
                    double s = 0.0;
                    for (const auto& b : v.bumps) s += b(x);
                    return s;
                }
            },
            rep_);
    }

  private:
    explicit PotentialSpec(Rep rep) : rep_(std::move(rep)) {
        std::visit(
            [this](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, RectWell>) {
                    support_a_ = -v.b;
                    support_b_ = v.b;
                } else if constexpr (std::is_same_v<T, Bump>) {
                    support_a_ = v.xv - v.sigma;
                    support_b_ = v.xv + v.sigma;
                } else if constexpr (std::is_same_v<T, BumpSum>) {
                    for (const auto& b : v.bumps) {
                        support_a_ = std::min(support_a_, b.xv - b.sigma);
                        support_b_ = std::max(support_b_, b.xv + b.sigma);
                    }
                    if (v.bumps.empty()) support_a_ = support_b_ = 0.0;
                } else {
                    support_a_ = support_b_ = 0.0;
                }
            },
            rep_);
    }

    Rep rep_;
    double support_a_ = std::numeric_limits<double>::infinity();
    double support_b_ = -std::numeric_limits<double>::infinity();
};

// ---------------------------------------------------------------------------
// JSON representations (keys: kind, epsilon, V0, b, Omega, xv, sigma)

inline void to_json(nlohmann::json& j, const Nonlinearity& nl) {
    switch (nl.kind()) {
        case NonlinKind::Linear: j = {{"kind", "linear"}}; break;
        case NonlinKind::Zakharov:
            j = {{"kind", "zakharov"}, {"epsilon", nl.epsilon()}};
            break;
        case NonlinKind::Logarithmic:
            j = {{"kind", "logarithmic"}, {"epsilon", nl.epsilon()}};
            break;
        case NonlinKind::Custom:
            j = {{"kind", "custom"}, {"epsilon", nl.epsilon()}};
            break;
    }
}

inline Nonlinearity nonlinearity_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") return Nonlinearity::linear();
    const double eps = j.at("epsilon").get<double>();
    if (kind == "zakharov") return Nonlinearity::zakharov(eps);
    if (kind == "logarithmic") return Nonlinearity::logarithmic(eps);
    throw DomainError("unknown nonlinearity kind: " + kind);
}

inline void to_json(nlohmann::json& j, const PotentialSpec& spec) {
    std::visit(
        [&j](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ZeroPotential>) {
                j = {{"kind", "zero"}};
            } else if constexpr (std::is_same_v<T, RectWell>) {
                j = {{"kind", "rect_well"}, {"V0", v.V0}, {"b", v.b}};
            } else if constexpr (std::is_same_v<T, DeltaWell>) {
                j = {{"kind", "delta_well"}, {"Omega", v.Omega}};
            } else if constexpr (std::is_same_v<T, Bump>) {
                j = {{"kind", "bump"}, {"V0", v.V0}, {"xv", v.xv}, {"sigma", v.sigma}};
            } else {
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& b : v.bumps)
                    arr.push_back({{"V0", b.V0}, {"xv", b.xv}, {"sigma", b.sigma}});
                j = {{"kind", "bump_sum"}, {"bumps", arr}};
            }
        },
        spec.rep());
}

inline PotentialSpec potential_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return PotentialSpec::zero();
    if (kind == "rect_well")
        return PotentialSpec::rect_well(j.at("V0").get<double>(), j.at("b").get<double>());
    if (kind == "delta_well") return PotentialSpec::delta_well(j.at("Omega").get<double>());
    if (kind == "bump")
        return PotentialSpec::bump(j.at("V0").get<double>(), j.at("xv").get<double>(),
                                   j.at("sigma").get<double>());
    if (kind == "bump_sum") {
        std::vector<Bump> bumps;
        for (const auto& b : j.at("bumps"))
            bumps.push_back(Bump{b.at("V0").get<double>(), b.at("xv").get<double>(),
                                 b.at("sigma").get<double>()});
        return PotentialSpec::sum(std::move(bumps));
    }
    throw DomainError("unknown potential kind: " + kind);
}

}  // namespace nlspect

#endif
