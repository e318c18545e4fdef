#pragma once
//
// Real-space equal-time two-point functions after the quench.
//
//   <A_r B_s>(t) = (1/N) sum_k cos(k.(r - s)) C_k^{AB}(t)
//
// The kernels are even in k, so the sine parts of exp(ik.(r-s)) cancel between
// k and -k and only the cosine sum is evaluated. Phases are reduced exactly in
// integer arithmetic: k.(r-s) = 2 pi J / P with P the number of sites, so the
// sum is a lookup into a single cosine table and its order is fixed (ascending
// mode index).
//

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tachyquench/experiment_result.hpp"
#include "tachyquench/lattice_model.hpp"
#include "tachyquench/parallel.hpp"
#include "tachyquench/quench_core.hpp"

namespace tachyquench {

enum class CorrelatorKind { qq, pp, qp };
enum class Normalization { bare, per_m0 };

inline const char* to_string(CorrelatorKind k) {
    switch (k) {
    case CorrelatorKind::qq:
        return "qq";
    case CorrelatorKind::pp:
        return "pp";
    case CorrelatorKind::qp:
        return "qp";
    }
    return "?";
}

inline CorrelatorKind parse_correlator_kind(const std::string& s) {
    if (s == "qq")
        return CorrelatorKind::qq;
    if (s == "pp")
        return CorrelatorKind::pp;
    if (s == "qp")
        return CorrelatorKind::qp;
    throw ConfigError("kind", "expected qq, pp or qp (got '" + s + "')");
}

/// Lattice displacement r - s in units of the spacing, one entry per dimension.
using Displacement = std::vector<int>;

/// Per-mode kernels of one time slice, stored column-wise.
struct KernelSlice {
    double t = 0;
    std::vector<double> qq, pp, qp;

    std::span<const double> of(CorrelatorKind k) const {
        switch (k) {
        case CorrelatorKind::qq:
            return qq;
        case CorrelatorKind::pp:
            return pp;
        case CorrelatorKind::qp:
            return qp;
        }
        return qq;
    }
};

/// Mode frequencies and phase tables of a lattice, built once per spec.
class ModeTable {
public:
    explicit ModeTable(const QuenchSpec& spec) : spec_(spec), grid_(spec) {
        spec_.validate();
        sites_ = spec_.total_sites();
        modes_.reserve(static_cast<std::size_t>(sites_));
        for (std::int64_t i = 0; i < grid_.size(); ++i)
            modes_.push_back(mode_quench(spec_, grid_.momentum(i)));
        cos_table_.resize(static_cast<std::size_t>(sites_));
        for (std::int64_t j = 0; j < sites_; ++j)
            cos_table_[static_cast<std::size_t>(j)] =
                std::cos(2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(sites_));
#ifndef NDEBUG
        sin_table_.resize(static_cast<std::size_t>(sites_));
        for (std::int64_t j = 0; j < sites_; ++j)
            sin_table_[static_cast<std::size_t>(j)] =
                std::sin(2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(sites_));
#endif
        for (int d = 0; d < spec_.dims; ++d)
            stride_.push_back(sites_ / spec_.sites_per_dim[static_cast<std::size_t>(d)]);
    }

    const QuenchSpec& spec() const noexcept { return spec_; }
    const MomentumGrid& grid() const noexcept { return grid_; }
    const std::vector<ModeQuench>& modes() const noexcept { return modes_; }
    std::int64_t size() const noexcept { return sites_; }

    /// Largest tachyonic growth rate on the grid (0 if none).
    double max_growth_rate() const {
        double xi = 0;
        for (const auto& m : modes_)
            xi = std::max(xi, m.xi());
        return xi;
    }

    /// Exact kernels for the lattice ground state of the initial Hamiltonian.
    KernelSlice kernels(double t) const {
        KernelSlice s;
        s.t = t;
        s.qq.resize(modes_.size());
        s.pp.resize(modes_.size());
        s.qp.resize(modes_.size());
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            const auto k = mode_kernels(modes_[i], t);
            s.qq[i] = k.qq;
            s.pp[i] = k.pp;
            s.qp[i] = k.qp;
        }
        return s;
    }

    /// Leading deep-quench kernels, divided by m0.
    KernelSlice deep_kernels(double t) const {
        KernelSlice s;
        s.t = t;
        s.qq.resize(modes_.size());
        s.pp.resize(modes_.size());
        s.qp.resize(modes_.size());
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            const auto k = deep_quench_kernels(modes_[i].omega_sq(), t);
            s.qq[i] = k.qq;
            s.pp[i] = k.pp;
            s.qp[i] = k.qp;
        }
        return s;
    }

    void check_displacement(const Displacement& d) const {
        if (static_cast<int>(d.size()) != spec_.dims)
            throw std::invalid_argument("displacement has wrong dimension");
        for (int s = 0; s < spec_.dims; ++s)
            if (std::abs(d[static_cast<std::size_t>(s)]) >= spec_.sites_per_dim[static_cast<std::size_t>(s)])
                throw std::out_of_range("displacement outside the lattice");
    }

    /// (1/N) sum_k values[k] cos(k.d)
    double fourier_sum(std::span<const double> values, const Displacement& d) const {
        assert(values.size() == modes_.size());
        const int dims = spec_.dims;
        double acc = 0.0;
#ifndef NDEBUG
        double im = 0.0, scale = 0.0;
#endif
        for (std::int64_t mode = 0; mode < sites_; ++mode) {
            std::int64_t j = 0;
            for (int s = 0; s < dims; ++s) {
                const std::int64_t n = spec_.sites_per_dim[static_cast<std::size_t>(s)];
                std::int64_t p = (static_cast<std::int64_t>(grid_.index(mode, s)) * d[static_cast<std::size_t>(s)]) % n;
                if (p < 0)
                    p += n;
                j += p * stride_[static_cast<std::size_t>(s)];
            }
            j %= sites_;
            const double v = values[static_cast<std::size_t>(mode)];
            acc += v * cos_table_[static_cast<std::size_t>(j)];
#ifndef NDEBUG
            im += v * sin_table_[static_cast<std::size_t>(j)];
            scale = std::max(scale, std::abs(v));
#endif
        }
        assert(std::abs(im) <= 1e-12 * scale * static_cast<double>(sites_) + 1e-300);
        return acc / static_cast<double>(sites_);
    }

private:
    QuenchSpec spec_;
    MomentumGrid grid_;
    std::int64_t sites_ = 0;
    std::vector<ModeQuench> modes_;
    std::vector<double> cos_table_;
#ifndef NDEBUG
    std::vector<double> sin_table_;
#endif
    std::vector<std::int64_t> stride_;
};

inline Displacement axis_displacement(const QuenchSpec& spec, int r) {
    Displacement d(static_cast<std::size_t>(spec.dims), 0);
    d[0] = r;
    return d;
}

struct CorrelatorField {
    CorrelatorKind kind = CorrelatorKind::qq;
    double t = 0;
    Normalization normalization = Normalization::bare;
    std::vector<Displacement> displacements;
    std::vector<double> values;
    std::vector<std::string> warnings;

    double at(const Displacement& d) const {
        for (std::size_t i = 0; i < displacements.size(); ++i)
            if (displacements[i] == d)
                return values[i];
        throw std::out_of_range("displacement not in correlator field");
    }
};

/// Correlator values at the given displacements. For deep-quench specs the
/// leading-order forms divided by m0 are returned; otherwise the exact bare
/// correlators of the lattice ground state.
inline CorrelatorField correlator_slice(const ModeTable& table, CorrelatorKind kind, double t,
                                        const std::vector<Displacement>& displacements) {
    const auto& spec = table.spec();
    CorrelatorField f;
    f.kind = kind;
    f.t = t;
    f.normalization = spec.deep_quench ? Normalization::per_m0 : Normalization::bare;
    const KernelSlice slice = spec.deep_quench ? table.deep_kernels(t) : table.kernels(t);
    for (const auto& d : displacements) {
        table.check_displacement(d);
        f.displacements.push_back(d);
        f.values.push_back(table.fourier_sum(slice.of(kind), d));
    }
    if (spec.deep_quench) {
        bool short_distance = false;
        for (const auto& d : displacements) {
            double r2 = 0;
            for (int x : d)
                r2 += static_cast<double>(x) * x;
            if (std::sqrt(r2) * spec.spacing < 1.0 / spec.m0)
                short_distance = true;
        }
        if (t < 1.0 / spec.m0 || short_distance)
            f.warnings.push_back("deep-quench correlators are only valid for |r-s|, t >> 1/m0");
    }
    return f;
}

inline CorrelatorField correlator_slice(const QuenchSpec& spec, CorrelatorKind kind, double t,
                                        const std::vector<Displacement>& displacements) {
    return correlator_slice(ModeTable(spec), kind, t, displacements);
}

/// Correlator <A_r B_0>(t) over a (r, t) grid along the first axis.
inline ExperimentResult lightcone_map(const ModeTable& table, CorrelatorKind kind, const std::vector<double>& t_grid,
                                      const std::vector<int>& r_grid) {
    if (t_grid.empty() || r_grid.empty())
        throw std::invalid_argument("lightcone_map: empty grid");
    const auto& spec = table.spec();
    std::vector<Displacement> disp;
    for (int r : r_grid) {
        disp.push_back(axis_displacement(spec, r));
        table.check_displacement(disp.back());
    }
    std::vector<std::vector<double>> values(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t i) {
        const KernelSlice slice = spec.deep_quench ? table.deep_kernels(t_grid[i]) : table.kernels(t_grid[i]);
        const auto v = slice.of(kind);
        values[i].reserve(disp.size());
        for (const auto& d : disp)
            values[i].push_back(table.fourier_sum(v, d));
    });
    ExperimentResult out({"r", "t", "value"});
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        for (std::size_t j = 0; j < r_grid.size(); ++j)
            out.add_row({static_cast<std::int64_t>(r_grid[j]), t_grid[i], values[i][j]});
    out.note("normalization", std::string(spec.deep_quench ? "per_m0" : "bare"));
    return out;
}

inline ExperimentResult lightcone_map(const QuenchSpec& spec, CorrelatorKind kind, const std::vector<double>& t_grid,
                                      const std::vector<int>& r_grid) {
    return lightcone_map(ModeTable(spec), kind, t_grid, r_grid);
}

/// Least-squares slope of log <q_r q_0>(t) over [t_lo, t_hi].
inline double asymptotic_qq_slope(const ModeTable& table, const Displacement& r, double t_lo, double t_hi,
                                  int samples = 33) {
    const auto& spec = table.spec();
    if (!(spec.m_sq_final < 0))
        throw std::domain_error("asymptotic_qq_slope: requires a tachyonic quench (m_sq_final < 0)");
    if (!(t_hi > t_lo) || t_lo < 0 || samples < 2)
        throw std::invalid_argument("asymptotic_qq_slope: invalid window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (samples - 1);
        const double v = correlator_slice(table, CorrelatorKind::qq, t, {r}).values[0];
        if (!(v > 0))
            throw std::domain_error("asymptotic_qq_slope: correlator not positive at t = " + std::to_string(t));
        const double y = std::log(v);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    const double n = samples;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double asymptotic_qq_slope(const QuenchSpec& spec, const Displacement& r, double t_lo, double t_hi,
                                  int samples = 33) {
    return asymptotic_qq_slope(ModeTable(spec), r, t_lo, t_hi, samples);
}

/// (1/N) sum_k C_k^{qq}(t), the equal-point fluctuation <q_r^2>(t).
inline double equal_point_fluctuation(const ModeTable& table, double t) {
    double acc = 0;
    for (const auto& m : table.modes())
        acc += c_qq_mode(m, t);
    return acc / static_cast<double>(table.size());
}

/// Time at which the fluctuation sum reaches the Hartree-Fock saturation
/// level 2|m^2|/lambda; +infinity if not reached inside the overflow range.
inline double stability_time_estimate(const QuenchSpec& spec, double lambda) {
    if (!(spec.m_sq_final < 0))
        throw std::domain_error("stability_time_estimate: requires m_sq_final < 0");
    if (!(lambda > 0) || !std::isfinite(lambda))
        throw std::invalid_argument("stability_time_estimate: lambda must be positive");
    const ModeTable table(spec);
    const double threshold = 2 * std::abs(spec.m_sq_final) / lambda;
    if (!std::isfinite(threshold))
        return std::numeric_limits<double>::infinity();
    auto value = [&](double t) { return equal_point_fluctuation(table, t); };
    if (value(0.0) >= threshold)
        return 0.0;
    const double xi = table.max_growth_rate();
    const double t_max = max_growth_exponent / xi;
    const double dt = 0.05 / xi;
    double lo = 0.0;
    double hi = -1.0;
    for (int i = 1;; ++i) {
        const double t = std::min(t_max, i * dt);
        if (value(t) >= threshold) {
            hi = t;
            break;
        }
        lo = t;
        if (t >= t_max)
            return std::numeric_limits<double>::infinity();
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) >= threshold ? hi : lo) = mid;
    }
    return hi;
}

} // namespace tachyquench
