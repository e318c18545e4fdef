#pragma once
//
// Lieb-Robinson velocity and commutator envelopes for nearest-neighbour
// harmonic lattices, and a harness comparing them with exact commutators.
//

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "tachyquench/experiment_result.hpp"
#include "tachyquench/lattice_model.hpp"
#include "tachyquench/symplectic_oracle.hpp"

namespace tachyquench {

struct LRParams {
    double norm_x;  ///< operator norm of X
    double tau;     ///< sqrt(norm_x) t
    int d_graph;    ///< lattice graph distance
};

/// Band top 4 d Omega^2 + m^2 of the final X, or |m^2| if that is larger.
inline double norm_x(const QuenchSpec& spec) {
    const double top = 4.0 * spec.dims * spec.omega * spec.omega + spec.m_sq_final;
    return std::max(top, std::abs(spec.m_sq_final));
}

inline LRParams lr_params(const QuenchSpec& spec, double t, int d_graph) {
    const double nx = norm_x(spec);
    return {nx, std::sqrt(nx) * t, d_graph};
}

/// e a sqrt(4 d Omega^2 + m^2), with the signed final mass squared.
inline double v_lr(const QuenchSpec& spec) {
    const double band = 4.0 * spec.dims * spec.omega * spec.omega;
    if (!(band > std::abs(spec.m_sq_final)))
        throw std::domain_error("v_lr: requires 4 d Omega^2 > |m^2|");
    return std::numbers::e * spec.spacing * std::sqrt(band + spec.m_sq_final);
}

/// v_lr / (2 e c sqrt(d)); tends to 1 as m^2 -> 0.
inline double v_lr_ratio(const QuenchSpec& spec) {
    return v_lr(spec) / (2 * std::numbers::e * spec.light_speed() * std::sqrt(static_cast<double>(spec.dims)));
}

enum class CommutatorKind { qq, pp };

/// Out-of-cone envelope
///   (e tau / 2d)^{2d} / (sqrt(d) (1 - e tau / 2d)),
/// scaled by 1/sqrt(|X|) for [q,q] and sqrt(|X|) for [p,p]. Only defined for
/// e tau < 2 d.
inline double commutator_bound(const LRParams& p, CommutatorKind kind) {
    if (p.d_graph < 1 || !(p.norm_x > 0) || p.tau < 0)
        throw std::invalid_argument("commutator_bound: invalid parameters");
    const double x = std::numbers::e * p.tau / (2.0 * p.d_graph);
    if (!(x < 1))
        throw std::domain_error("commutator_bound: inside the light cone (e tau >= 2 d)");
    const double d = p.d_graph;
    const double env = std::exp(2 * d * std::log(x)) / (std::sqrt(d) * (1 - x));
    return kind == CommutatorKind::qq ? env / std::sqrt(p.norm_x) : env * std::sqrt(p.norm_x);
}

/// sum_{s >= c} tau^{2s} / (2s)!, summed until the terms underflow.
inline double even_tail_sum(double tau, int c) {
    double log_term = 2 * c * std::log(tau) - std::lgamma(2.0 * c + 1);
    double acc = 0;
    for (int s = c; s < c + 10000; ++s) {
        const double term = std::exp(log_term);
        acc += term;
        if (term <= acc * 1e-17)
            break;
        log_term += 2 * std::log(tau) - std::log(2.0 * s + 1) - std::log(2.0 * s + 2);
    }
    return acc;
}

/// (e tau / 2c)^{2c} / (sqrt(2c) (1 - (e tau / 2c)^2)) for e tau < 2c.
inline double even_tail_bound(double tau, int c) {
    const double x = std::numbers::e * tau / (2.0 * c);
    if (!(x < 1))
        throw std::domain_error("even_tail_bound: requires e tau < 2c");
    return std::pow(x, 2 * c) / (std::sqrt(2.0 * c) * (1 - x * x));
}

/// Exhaustive comparison of |i[q_n(t), q_m]| against the qq envelope for
/// every pair and time with e tau < 2 d(n, m). The exact kernel is the power
/// series (full relative precision far outside the cone), cross-checked
/// against the eigendecomposition route.
inline ExperimentResult lr_comparison(const QuenchSpec& spec, const std::vector<double>& t_grid) {
    const auto h = oracle::QuadraticHamiltonian::lattice(spec, Branch::Final);
    const std::int64_t n = spec.total_sites();
    ExperimentResult out({"n", "m", "t", "exact", "bound", "margin"});
    std::int64_t violations = 0, tested = 0;
    double route_gap = 0;
    for (double t : t_grid) {
        const Eigen::MatrixXd series = oracle::commutator_series(h, t, 400);
        const Eigen::MatrixXd eig = oracle::exact_commutator_kernel(h, t);
        route_gap = std::max(route_gap, (series - eig).cwiseAbs().maxCoeff());
        for (std::int64_t a = 0; a < n; ++a)
            for (std::int64_t b = 0; b < n; ++b) {
                const int d = graph_distance(spec, a, b);
                if (d < 1)
                    continue;
                const LRParams p = lr_params(spec, t, d);
                if (!(std::numbers::e * p.tau < 2.0 * d))
                    continue;
                const double exact = std::abs(series(a, b));
                const double bound = commutator_bound(p, CommutatorKind::qq);
                ++tested;
                if (exact > bound)
                    ++violations;
                out.add_row({a, b, t, exact, bound, bound - exact});
            }
    }
    out.note("pairs_tested", tested);
    out.note("violations", violations);
    out.note("series_vs_eigen_max_gap", route_gap);
    out.check("lieb-robinson domination", violations == 0,
              std::to_string(violations) + " violations in " + std::to_string(tested) + " out-of-cone samples");
    return out;
}

} // namespace tachyquench
