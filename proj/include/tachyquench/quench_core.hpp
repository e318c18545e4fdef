#pragma once
//
// Single-mode quench kernels.
//
// A mode starts in the ground state of H0 = p^2/2 + omega0^2 q^2/2 and is
// evolved with H1 = p^2/2 + omega_sq q^2/2, where omega_sq may be negative.
// Heisenberg evolution gives q(t) = C q + S p and p(t) = -omega_sq S q + C p
// with C = cos(omega t), S = sin(omega t)/omega. Both are entire functions of
// omega_sq, so every kernel below is written in terms of C and S and no
// complex arithmetic is needed for tachyonic modes (C -> cosh, S -> sinh/xi).
//

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tachyquench/errors.hpp"

namespace tachyquench {

enum class Stability { Stable, Marginal, Unstable };

inline const char* to_string(Stability s) {
    switch (s) {
    case Stability::Stable:
        return "stable";
    case Stability::Marginal:
        return "marginal";
    case Stability::Unstable:
        return "unstable";
    }
    return "unknown";
}

/// |omega_sq| below this (times max(1, scale_sq)) counts as marginal.
inline constexpr double marginal_tolerance = 1e-14;

/// Below this value of |omega_sq| t^2 the kernels use their Taylor series.
inline constexpr double series_threshold = 1e-8;

/// Largest growth exponent xi*t accepted by the kernels.
inline constexpr double max_growth_exponent = 350.0;

inline Stability classify(double omega_sq, double scale_sq = 1.0) {
    const double tol = marginal_tolerance * std::max(1.0, scale_sq);
    if (std::abs(omega_sq) < tol)
        return Stability::Marginal;
    return omega_sq > 0 ? Stability::Stable : Stability::Unstable;
}

/// One momentum mode: initial frequency and signed post-quench frequency squared.
class ModeQuench {
public:
    ModeQuench(double omega0, double omega_sq) : omega0_(omega0), omega_sq_(omega_sq) {
        if (!std::isfinite(omega0) || !(omega0 > 0))
            throw std::invalid_argument("ModeQuench: omega0 must be finite and positive");
        if (!std::isfinite(omega_sq))
            throw std::invalid_argument("ModeQuench: omega_sq must be finite");
        xi_ = omega_sq < 0 ? std::sqrt(-omega_sq) : 0.0;
    }

    double omega0() const noexcept { return omega0_; }
    double omega_sq() const noexcept { return omega_sq_; }
    /// Growth rate sqrt(-omega_sq) for tachyonic modes, 0 otherwise.
    double xi() const noexcept { return xi_; }
    Stability stability(double scale_sq = 1.0) const { return classify(omega_sq_, scale_sq); }

private:
    double omega0_;
    double omega_sq_;
    double xi_;
};

/// Evolution coefficients C = cos(omega t) and S = sin(omega t)/omega.
struct Propagation {
    double C;
    double S;
};

inline Propagation propagation(double omega_sq, double t) {
    if (!std::isfinite(omega_sq) || !std::isfinite(t))
        throw std::invalid_argument("non-finite kernel argument");
    if (t < 0)
        throw std::invalid_argument("kernel time must be nonnegative");
    const double x = omega_sq * t * t;
    if (std::abs(x) < series_threshold)
        return {1.0 - 0.5 * x, t * (1.0 - x / 6.0)};
    if (omega_sq > 0) {
        const double w = std::sqrt(omega_sq);
        return {std::cos(w * t), std::sin(w * t) / w};
    }
    const double xi = std::sqrt(-omega_sq);
    if (xi * t > max_growth_exponent)
        throw NumericRangeError("growth exponent xi*t = " + std::to_string(xi * t) +
                                    " exceeds " + std::to_string(max_growth_exponent),
                                t);
    return {std::cosh(xi * t), std::sinh(xi * t) / xi};
}

/// <q^2>(t)
inline double c_qq_mode(const ModeQuench& m, double t) {
    const auto [C, S] = propagation(m.omega_sq(), t);
    const double w0 = m.omega0();
    return C * C / (2 * w0) + 0.5 * w0 * S * S;
}

/// <p^2>(t)
inline double c_pp_mode(const ModeQuench& m, double t) {
    const auto [C, S] = propagation(m.omega_sq(), t);
    const double w0 = m.omega0();
    const double wS = m.omega_sq() * S;
    return 0.5 * w0 * C * C + wS * wS / (2 * w0);
}

/// Re<q p>(t); the constant imaginary part i/2 is not included.
inline double c_qp_mode(const ModeQuench& m, double t) {
    const auto [C, S] = propagation(m.omega_sq(), t);
    const double w0 = m.omega0();
    return (w0 * w0 - m.omega_sq()) / (2 * w0) * S * C;
}

/// <b^dagger b>(t) with b the ladder operator of H0.
inline double occupation(const ModeQuench& m, double t) {
    const auto [C, S] = propagation(m.omega_sq(), t);
    (void)C;
    const double w0 = m.omega0();
    const double d = (w0 * w0 - m.omega_sq()) * S / (2 * w0);
    return d * d;
}

struct ModeKernels {
    double qq;
    double pp;
    double qp;
};

/// All three equal-time kernels at once (one propagation evaluation).
inline ModeKernels mode_kernels(const ModeQuench& m, double t) {
    const auto [C, S] = propagation(m.omega_sq(), t);
    const double w0 = m.omega0();
    const double wS = m.omega_sq() * S;
    return {C * C / (2 * w0) + 0.5 * w0 * S * S, 0.5 * w0 * C * C + wS * wS / (2 * w0),
            (w0 * w0 - m.omega_sq()) / (2 * w0) * S * C};
}

/// Leading order of the kernels for omega0 -> infinity, divided by omega0:
/// qq -> (1 - cos 2wt)/(4w^2), pp -> (1 + cos 2wt)/4, qp -> sin(2wt)/(4w).
inline ModeKernels deep_quench_kernels(double omega_sq, double t) {
    const auto [C, S] = propagation(omega_sq, t);
    return {0.5 * S * S, 0.5 * C * C, 0.5 * S * C};
}

/// Effective inverse temperature of a stable mode quenched from omega0 to omega.
inline double beta_eff(double omega0, double omega) {
    if (!std::isfinite(omega0) || !(omega0 > 0))
        throw std::invalid_argument("beta_eff: omega0 must be finite and positive");
    if (!std::isfinite(omega) || !(omega > 0))
        throw std::domain_error("beta_eff: defined only for stable modes (omega > 0)");
    if (omega == omega0)
        return std::numeric_limits<double>::infinity();
    // log|(omega0 + omega)/(omega0 - omega)| written as log1p of a positive argument
    const double lg = omega < omega0 ? std::log1p(2.0 * omega / (omega0 - omega))
                                     : std::log1p(2.0 * omega0 / (omega - omega0));
    return 2.0 * lg / omega;
}

/// (4/omega0)(1 + omega^2/(3 omega0^2)), valid for omega0 >> omega.
inline double beta_eff_deep(double omega0, double omega) {
    return 4.0 / omega0 * (1.0 + omega * omega / (3.0 * omega0 * omega0));
}

} // namespace tachyquench
