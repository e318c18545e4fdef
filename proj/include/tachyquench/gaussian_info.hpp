#pragma once
//
// Gaussian-state information measures: covariance matrices in (q..., p...)
// ordering, symplectic spectra, von Neumann entropies (nats) and mutual
// information of lattice regions.
//

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <iterator>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "tachyquench/correlators.hpp"
#include "tachyquench/experiment_result.hpp"
#include "tachyquench/lattice_model.hpp"

namespace tachyquench {

/// Gamma_nm = Re <r_n r_m> with r = (q_1..q_M, p_1..p_M).
class CovarianceMatrix {
public:
    CovarianceMatrix() = default;

    /// Accepts matrices symmetric up to round-off and stores the exact symmetric part.
    explicit CovarianceMatrix(const Eigen::MatrixXd& data) {
        if (data.rows() != data.cols() || data.rows() % 2 != 0 || data.rows() == 0)
            throw std::invalid_argument("CovarianceMatrix: expected a nonempty 2M x 2M matrix");
        if (!data.allFinite())
            throw std::invalid_argument("CovarianceMatrix: non-finite entries");
        const double scale = data.cwiseAbs().maxCoeff();
        if ((data - data.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1e-300))
            throw std::invalid_argument("CovarianceMatrix: matrix is not symmetric");
        data_ = 0.5 * (data + data.transpose());
    }

    Eigen::Index modes() const noexcept { return data_.rows() / 2; }
    const Eigen::MatrixXd& data() const noexcept { return data_; }

    double qq(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }
    double pp(Eigen::Index i, Eigen::Index j) const { return data_(modes() + i, modes() + j); }
    /// Re <q_i p_j>
    double qp(Eigen::Index i, Eigen::Index j) const { return data_(i, modes() + j); }

private:
    Eigen::MatrixXd data_;
};

/// Strictly increasing list of flattened site indices.
class Region {
public:
    explicit Region(std::vector<std::int64_t> sites) : sites_(std::move(sites)) {
        if (sites_.empty())
            throw std::invalid_argument("Region: empty");
        if (sites_.front() < 0)
            throw std::out_of_range("Region: negative site index");
        for (std::size_t i = 1; i < sites_.size(); ++i)
            if (sites_[i] <= sites_[i - 1])
                throw std::invalid_argument("Region: sites must be strictly increasing");
    }

    static Region block(std::int64_t start, std::int64_t length) {
        std::vector<std::int64_t> s;
        for (std::int64_t i = 0; i < length; ++i)
            s.push_back(start + i);
        return Region(std::move(s));
    }

    const std::vector<std::int64_t>& sites() const noexcept { return sites_; }
    std::size_t size() const noexcept { return sites_.size(); }

    bool disjoint(const Region& o) const {
        std::size_t i = 0, j = 0;
        while (i < sites_.size() && j < o.sites_.size()) {
            if (sites_[i] == o.sites_[j])
                return false;
            (sites_[i] < o.sites_[j] ? i : j)++;
        }
        return true;
    }

    Region united(const Region& o) const {
        std::vector<std::int64_t> s;
        std::set_union(sites_.begin(), sites_.end(), o.sites_.begin(), o.sites_.end(), std::back_inserter(s));
        return Region(std::move(s));
    }

    void check_within(std::int64_t total) const {
        if (sites_.back() >= total)
            throw std::out_of_range("Region: site index " + std::to_string(sites_.back()) + " outside lattice of " +
                                    std::to_string(total) + " sites");
    }

private:
    std::vector<std::int64_t> sites_;
};

namespace diagnostics {

/// Smallest raw symplectic eigenvalue seen by any spectrum computation since
/// the last reset (process-wide).
inline std::atomic<double>& min_symplectic_eigenvalue_slot() {
    static std::atomic<double> slot{std::numeric_limits<double>::infinity()};
    return slot;
}

inline double min_symplectic_eigenvalue() { return min_symplectic_eigenvalue_slot().load(); }

inline void reset_min_symplectic_eigenvalue() {
    min_symplectic_eigenvalue_slot().store(std::numeric_limits<double>::infinity());
}

inline void record_symplectic_eigenvalue(double sigma) {
    auto& slot = min_symplectic_eigenvalue_slot();
    double cur = slot.load();
    while (sigma < cur && !slot.compare_exchange_weak(cur, sigma)) {
    }
}

} // namespace diagnostics

/// Raised for covariance matrices violating the uncertainty principle.
class NonPhysicalState : public std::domain_error {
public:
    NonPhysicalState(const std::string& what, double sigma) : std::domain_error(what), sigma_(sigma) {}
    double sigma() const noexcept { return sigma_; }

private:
    double sigma_;
};

/// The eigenvalues of Omega Gamma lost their +-i sigma structure, which
/// happens once the covariance entries outgrow double precision.
class SpectrumPrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SymplecticSpectrum {
    std::vector<double> sigma; ///< ascending, clamped to >= 1/2 within round-off
    double min_raw = std::numeric_limits<double>::infinity();
};

inline constexpr double sigma_clamp_tolerance = 1e-9;
inline constexpr double sigma_error_tolerance = 1e-6;

/// Positive imaginary parts of the eigenvalues of Omega Gamma, which come in
/// +-i sigma pairs.
inline SymplecticSpectrum symplectic_spectrum(const CovarianceMatrix& g) {
    const Eigen::Index m = g.modes();
    const auto& d = g.data();
    Eigen::MatrixXd a(2 * m, 2 * m);
    a.topRows(m) = d.bottomRows(m);
    a.bottomRows(m) = -d.topRows(m);
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symplectic_spectrum: eigenvalue solver failed");
    std::vector<double> plus, minus;
    for (Eigen::Index i = 0; i < 2 * m; ++i) {
        const double im = es.eigenvalues()[i].imag();
        (im >= 0 ? plus : minus).push_back(std::abs(im));
    }
    if (plus.size() != minus.size())
        throw SpectrumPrecisionError("symplectic_spectrum: eigenvalues are not paired as +-i sigma");
    std::sort(plus.begin(), plus.end());
    std::sort(minus.begin(), minus.end());
    SymplecticSpectrum out;
    for (std::size_t i = 0; i < plus.size(); ++i) {
        const double s = 0.5 * (plus[i] + minus[i]);
        if (std::abs(plus[i] - minus[i]) > 1e-8 * std::max(s, 0.5))
            throw SpectrumPrecisionError("symplectic_spectrum: +-i sigma pairing mismatch at sigma = " + format_number(s));
        out.min_raw = std::min(out.min_raw, s);
        if (s < 0.5 - sigma_error_tolerance)
            throw NonPhysicalState("non-physical covariance: symplectic eigenvalue " + format_number(s) + " < 1/2", s);
        out.sigma.push_back(s < 0.5 && s >= 0.5 - sigma_clamp_tolerance ? 0.5 : s);
    }
    diagnostics::record_symplectic_eigenvalue(out.min_raw);
    return out;
}

/// Asymptotic entropy contribution log(sigma) + 1 for sigma >> 1.
inline double mode_entropy_asymptotic(double sigma) { return std::log(sigma) + 1.0; }

/// f(sigma + 1/2) - f(sigma - 1/2) with f(x) = x log x, evaluated without
/// cancellation for large sigma.
inline double mode_entropy_exact(double sigma) {
    if (sigma <= 0.5)
        return 0.0;
    if (sigma < 10.0) {
        const double a = sigma + 0.5, b = sigma - 0.5;
        return a * std::log(a) - b * std::log(b);
    }
    return 2 * sigma * std::atanh(0.5 / sigma) + 0.5 * std::log((sigma - 0.5) * (sigma + 0.5));
}

inline constexpr double entropy_asymptote_switch = 1e8;

inline double mode_entropy(double sigma) {
    return sigma > entropy_asymptote_switch ? mode_entropy_asymptotic(sigma) : mode_entropy_exact(sigma);
}

inline double entropy(const SymplecticSpectrum& s) {
    double acc = 0;
    for (double x : s.sigma)
        acc += mode_entropy(x);
    return acc;
}

/// Pi_n (2 sigma_n) = sqrt(det(2 Gamma)); equals 1 exactly for pure states.
inline double symplectic_product(const CovarianceMatrix& g) {
    Eigen::LLT<Eigen::MatrixXd> llt(2.0 * g.data());
    if (llt.info() != Eigen::Success)
        throw NonPhysicalState("covariance matrix is not positive definite", 0.0);
    double log_det = 0;
    for (Eigen::Index i = 0; i < g.data().rows(); ++i)
        log_det += 2 * std::log(llt.matrixL()(i, i));
    return std::exp(0.5 * log_det);
}

inline CovarianceMatrix restrict(const CovarianceMatrix& g, const Region& a) {
    a.check_within(g.modes());
    const Eigen::Index m = g.modes();
    const auto l = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd sub(2 * l, 2 * l);
    const auto& s = a.sites();
    for (Eigen::Index i = 0; i < 2 * l; ++i) {
        const Eigen::Index gi = i < l ? s[i] : m + s[i - l];
        for (Eigen::Index j = 0; j < 2 * l; ++j) {
            const Eigen::Index gj = j < l ? s[j] : m + s[j - l];
            sub(i, j) = g.data()(gi, gj);
        }
    }
    return CovarianceMatrix(sub);
}

inline double entropy(const CovarianceMatrix& g, const Region& a) { return entropy(symplectic_spectrum(restrict(g, a))); }

inline constexpr double mutual_information_clamp = 1e-8;

/// S_A + S_B - S_{A u B}; round-off negatives down to -1e-8 are reported as 0.
inline double mutual_information_from(double sa, double sb, double sab) {
    const double i = sa + sb - sab;
    return (i < 0 && i >= -mutual_information_clamp) ? 0.0 : i;
}

inline double mutual_information(const CovarianceMatrix& g, const Region& a, const Region& b) {
    if (!a.disjoint(b))
        throw std::invalid_argument("mutual_information: regions overlap");
    return mutual_information_from(entropy(g, a), entropy(g, b), entropy(g, a.united(b)));
}

/// Post-quench state of the full lattice at one time, with region covariances
/// assembled directly from the mode sums (no full 2N x 2N matrix).
class LatticeState {
public:
    LatticeState(const ModeTable& table, double t) : table_(&table), slice_(table.kernels(t)) {}

    double time() const noexcept { return slice_.t; }
    const ModeTable& table() const noexcept { return *table_; }

    struct Entry {
        double qq, pp, qp;
    };

    /// Real-space correlators at displacement d (memoised).
    const Entry& entry(const Displacement& d) const {
        auto it = cache_.find(d);
        if (it != cache_.end())
            return it->second;
        Entry e{table_->fourier_sum(slice_.qq, d), table_->fourier_sum(slice_.pp, d),
                table_->fourier_sum(slice_.qp, d)};
        return cache_.emplace(d, e).first->second;
    }

    Displacement displacement(std::int64_t a, std::int64_t b) const {
        const auto& spec = table_->spec();
        const auto xa = site_coords(spec, a);
        const auto xb = site_coords(spec, b);
        Displacement d(xa.size());
        for (std::size_t s = 0; s < xa.size(); ++s) {
            const int n = spec.sites_per_dim[s];
            int v = xa[s] - xb[s];
            // canonical representative in [0, n) to share cache entries
            d[s] = ((v % n) + n) % n;
        }
        return d;
    }

    CovarianceMatrix covariance(const Region& a) const {
        a.check_within(table_->size());
        const auto l = static_cast<Eigen::Index>(a.size());
        const auto& s = a.sites();
        Eigen::MatrixXd g(2 * l, 2 * l);
        for (Eigen::Index i = 0; i < l; ++i)
            for (Eigen::Index j = 0; j < l; ++j) {
                const Entry& e = entry(displacement(s[i], s[j]));
                g(i, j) = e.qq;
                g(l + i, l + j) = e.pp;
                g(i, l + j) = e.qp;
                g(l + i, j) = e.qp;
            }
        return CovarianceMatrix(g);
    }

    CovarianceMatrix full_covariance() const {
        std::vector<std::int64_t> all(static_cast<std::size_t>(table_->size()));
        for (std::size_t i = 0; i < all.size(); ++i)
            all[i] = static_cast<std::int64_t>(i);
        return covariance(Region(std::move(all)));
    }

    double entropy(const Region& a) const {
        try {
            return tachyquench::entropy(symplectic_spectrum(covariance(a)));
        } catch (const SpectrumPrecisionError& e) {
            throw NumericRangeError(e.what(), slice_.t);
        } catch (const NonPhysicalState& e) {
            // the analytic state is pure, so sigma < 1/2 here is lost precision
            throw NumericRangeError(std::string(e.what()) + " (precision loss)", slice_.t);
        }
    }

    double mutual_information(const Region& a, const Region& b) const {
        if (!a.disjoint(b))
            throw std::invalid_argument("mutual_information: regions overlap");
        return mutual_information_from(entropy(a), entropy(b), entropy(a.united(b)));
    }

private:
    const ModeTable* table_;
    KernelSlice slice_;
    mutable std::map<Displacement, Entry> cache_;
};

inline CovarianceMatrix covariance(const QuenchSpec& spec, double t) {
    const ModeTable table(spec);
    return LatticeState(table, t).full_covariance();
}

/// Least-squares slope of (t, y) samples with t in [t_lo, t_hi].
inline double fitted_slope(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi)
            continue;
        sx += t[i];
        sy += y[i];
        sxx += t[i] * t[i];
        sxy += t[i] * y[i];
        ++n;
    }
    if (n < 2)
        throw std::invalid_argument("fitted_slope: fewer than two samples in window");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct FitWindow {
    double t_lo;
    double t_hi;
};

/// S_A(t) over a time grid; with a fit window also the late-time slope and
/// its ratio to 2|m|L.
inline ExperimentResult entropy_growth(const ModeTable& table, const Region& a, const std::vector<double>& t_grid,
                                       std::optional<FitWindow> fit = std::nullopt) {
    if (t_grid.empty())
        throw std::invalid_argument("entropy_growth: empty time grid");
    a.check_within(table.size());
    std::vector<double> s(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) { s[i] = LatticeState(table, t_grid[i]).entropy(a); });
    ExperimentResult out({"t", "S"});
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        out.add_row({t_grid[i], s[i]});
    if (fit) {
        const double slope = fitted_slope(t_grid, s, fit->t_lo, fit->t_hi);
        out.note("slope", slope);
        const double m = std::sqrt(std::abs(table.spec().m_sq_final));
        if (table.spec().m_sq_final < 0)
            out.note("slope_ratio", slope / (2 * m * static_cast<double>(a.size())));
    }
    return out;
}

inline ExperimentResult entropy_growth(const QuenchSpec& spec, const Region& a, const std::vector<double>& t_grid,
                                       std::optional<FitWindow> fit = std::nullopt) {
    return entropy_growth(ModeTable(spec), a, t_grid, fit);
}

} // namespace tachyquench
