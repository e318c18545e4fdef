#pragma once
//
// Brute-force Gaussian evolution under H = (q^T X q + p^T p)/2 with an
// arbitrary symmetric X (not necessarily positive). The phase-space flow is
//
//   S(t) = [[ cos(sqrt(X) t),           X^{-1/2} sin(sqrt(X) t) ],
//           [ -X^{1/2} sin(sqrt(X) t),  cos(sqrt(X) t)          ]]
//
// and every block is an entire function of X, evaluated on the eigenvalues of
// a dense symmetric eigendecomposition. Nothing here reuses the mode kernels;
// this is the reference the analytic path is checked against.
//

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "tachyquench/errors.hpp"
#include "tachyquench/gaussian_info.hpp"
#include "tachyquench/lattice_model.hpp"

namespace tachyquench::oracle {

namespace scalar {

inline constexpr double series_cutoff = 1e-4;
inline constexpr double max_exponent = 350.0;

inline void guard(double lambda, double t) {
    if (lambda < 0 && std::sqrt(-lambda) * t > max_exponent)
        throw NumericRangeError("oracle: exponent sqrt(-lambda) t too large", t);
}

/// cos(sqrt(lambda) t)
inline double cos_root(double lambda, double t) {
    guard(lambda, t);
    const double x = lambda * t * t;
    if (std::abs(x) < series_cutoff) {
        // sum_j (-x)^j / (2j)!
        double term = 1, acc = 1;
        for (int j = 1; j <= 6; ++j) {
            term *= -x / ((2.0 * j - 1) * (2.0 * j));
            acc += term;
        }
        return acc;
    }
    return lambda > 0 ? std::cos(std::sqrt(lambda) * t) : std::cosh(std::sqrt(-lambda) * t);
}

/// sin(sqrt(lambda) t) / sqrt(lambda)
inline double sinc_root(double lambda, double t) {
    guard(lambda, t);
    const double x = lambda * t * t;
    if (std::abs(x) < series_cutoff) {
        double term = t, acc = t;
        for (int j = 1; j <= 6; ++j) {
            term *= -x / ((2.0 * j) * (2.0 * j + 1));
            acc += term;
        }
        return acc;
    }
    if (lambda > 0) {
        const double w = std::sqrt(lambda);
        return std::sin(w * t) / w;
    }
    const double w = std::sqrt(-lambda);
    return std::sinh(w * t) / w;
}

} // namespace scalar

class QuadraticHamiltonian {
public:
    explicit QuadraticHamiltonian(Eigen::MatrixXd x) : x_(std::move(x)) {
        if (x_.rows() != x_.cols() || x_.rows() == 0)
            throw std::invalid_argument("QuadraticHamiltonian: X must be square and nonempty");
        if ((x_ - x_.transpose()).cwiseAbs().maxCoeff() != 0.0)
            throw std::invalid_argument("QuadraticHamiltonian: X must be symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x_);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("QuadraticHamiltonian: eigendecomposition failed");
        eigenvalues_ = es.eigenvalues();
        eigenvectors_ = es.eigenvectors();
    }

    /// X = m^2 + Omega^2 sum over bonds (e_i - e_j)(e_i - e_j)^T on the periodic lattice.
    static QuadraticHamiltonian lattice(const QuenchSpec& spec, Branch which) {
        spec.validate();
        const std::int64_t n = spec.total_sites();
        const double mass_sq = which == Branch::Initial ? spec.m0 * spec.m0 : spec.m_sq_final;
        const double w2 = spec.omega * spec.omega;
        Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n) * mass_sq;
        for (std::int64_t i = 0; i < n; ++i) {
            for (int d = 0; d < spec.dims; ++d) {
                auto c = site_coords(spec, i);
                c[static_cast<std::size_t>(d)] += 1;
                const std::int64_t j = site_index(spec, c);
                if (j == i)
                    continue;
                x(i, i) += w2;
                x(j, j) += w2;
                x(i, j) -= w2;
                x(j, i) -= w2;
            }
        }
        return QuadraticHamiltonian(std::move(x));
    }

    Eigen::Index size() const noexcept { return x_.rows(); }
    const Eigen::MatrixXd& x() const noexcept { return x_; }
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

    /// f(X) = V diag(f(lambda)) V^T
    template <class F>
    Eigen::MatrixXd apply(F&& f) const {
        Eigen::VectorXd fv(eigenvalues_.size());
        for (Eigen::Index i = 0; i < fv.size(); ++i)
            fv[i] = f(eigenvalues_[i]);
        return eigenvectors_ * fv.asDiagonal() * eigenvectors_.transpose();
    }

    double norm() const { return eigenvalues_.cwiseAbs().maxCoeff(); }

private:
    Eigen::MatrixXd x_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
};

/// Phase-space flow matrix S(t), acting on (q, p).
inline Eigen::MatrixXd propagator(const QuadraticHamiltonian& h, double t) {
    if (t < 0 || !std::isfinite(t))
        throw std::invalid_argument("propagator: t must be finite and nonnegative");
    const Eigen::Index m = h.size();
    Eigen::MatrixXd s(2 * m, 2 * m);
    const Eigen::MatrixXd c = h.apply([t](double l) { return scalar::cos_root(l, t); });
    s.topLeftCorner(m, m) = c;
    s.bottomRightCorner(m, m) = c;
    s.topRightCorner(m, m) = h.apply([t](double l) { return scalar::sinc_root(l, t); });
    s.bottomLeftCorner(m, m) = h.apply([t](double l) { return -l * scalar::sinc_root(l, t); });
    return s;
}

inline Eigen::MatrixXd symplectic_form(Eigen::Index m) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    j.topRightCorner(m, m).setIdentity();
    j.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
    return j;
}

/// S J S^T == J within tol (max norm).
inline bool symplectic_check(const Eigen::MatrixXd& s, double tol = 1e-9) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0)
        return false;
    const Eigen::MatrixXd j = symplectic_form(s.rows() / 2);
    return (s * j * s.transpose() - j).cwiseAbs().maxCoeff() <= tol;
}

inline CovarianceMatrix evolve_covariance(const QuadraticHamiltonian& h, const CovarianceMatrix& g0, double t) {
    if (g0.modes() != h.size())
        throw std::invalid_argument("evolve_covariance: size mismatch");
    const Eigen::MatrixXd s = propagator(h, t);
    return CovarianceMatrix(s * g0.data() * s.transpose());
}

/// Ground state of a positive-definite H0: Gamma_qq = X^{-1/2}/2, Gamma_pp = X^{1/2}/2.
inline CovarianceMatrix ground_state(const QuadraticHamiltonian& h0) {
    if (h0.eigenvalues().minCoeff() <= 0)
        throw std::domain_error("ground_state: initial Hamiltonian is not positive definite");
    const Eigen::Index m = h0.size();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    g.topLeftCorner(m, m) = h0.apply([](double l) { return 0.5 / std::sqrt(l); });
    g.bottomRightCorner(m, m) = h0.apply([](double l) { return 0.5 * std::sqrt(l); });
    return CovarianceMatrix(g);
}

/// i[q_n(t), q_m] = [X^{-1/2} sin(sqrt(X) t)]_nm
inline Eigen::MatrixXd exact_commutator_kernel(const QuadraticHamiltonian& h, double t) {
    if (t < 0)
        throw std::invalid_argument("exact_commutator_kernel: t must be nonnegative");
    return h.apply([t](double l) { return scalar::sinc_root(l, t); });
}

/// Same kernel for a periodic lattice, by direct Fourier diagonalisation of
/// the circulant X.
inline Eigen::MatrixXd exact_commutator_kernel_fourier(const QuenchSpec& spec, double t) {
    const MomentumGrid grid(spec);
    const std::int64_t n = spec.total_sites();
    std::vector<double> sinc(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> k(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        k[static_cast<std::size_t>(i)] = grid.momentum(i);
        sinc[static_cast<std::size_t>(i)] = scalar::sinc_root(dispersion(spec, grid.momentum(i), Branch::Final), t);
    }
    Eigen::MatrixXd out(n, n);
    for (std::int64_t a = 0; a < n; ++a) {
        const auto xa = site_coords(spec, a);
        for (std::int64_t b = 0; b < n; ++b) {
            const auto xb = site_coords(spec, b);
            double acc = 0;
            for (std::int64_t i = 0; i < n; ++i) {
                double phase = 0;
                for (int d = 0; d < spec.dims; ++d)
                    phase += k[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] * spec.spacing *
                             (xa[static_cast<std::size_t>(d)] - xb[static_cast<std::size_t>(d)]);
                acc += sinc[static_cast<std::size_t>(i)] * std::cos(phase);
            }
            out(a, b) = acc / static_cast<double>(n);
        }
    }
    return out;
}

/// sum_{s=0}^{s_max} (-1)^s t^{2s+1}/(2s+1)! X^s, accumulated with X scaled to
/// unit norm so that far-off-diagonal entries keep full relative precision.
inline Eigen::MatrixXd commutator_series(const QuadraticHamiltonian& h, double t, int s_max) {
    const double nx = h.norm();
    const Eigen::Index m = h.size();
    if (nx == 0.0)
        return Eigen::MatrixXd::Identity(m, m) * t;
    const Eigen::MatrixXd y = h.x() / nx;
    const double tau = std::sqrt(nx) * t;
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    // coefficient tau^{2s+1}/(2s+1)! kept in log form to avoid overflow
    double log_coef = std::log(tau);
    for (int s = 0; s <= s_max; ++s) {
        if (s > 0) {
            power = power * y;
            log_coef += 2 * std::log(tau) - std::log(2.0 * s) - std::log(2.0 * s + 1);
        }
        if (log_coef < -745.0 && s > 0)
            break;
        const double coef = (s % 2 ? -1.0 : 1.0) * std::exp(log_coef);
        acc += coef * power;
    }
    return acc / std::sqrt(nx);
}

} // namespace tachyquench::oracle
