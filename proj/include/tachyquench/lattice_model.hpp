#pragma once
//
// Periodic hypercubic lattice: quench parameters, momentum grid and the
// nearest-neighbour dispersion omega_k^2 = m^2 + 4 Omega^2 sum_s sin^2(k_s a/2).
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tachyquench/errors.hpp"
#include "tachyquench/quench_core.hpp"

namespace tachyquench {

struct CoupledFieldParams {
    double m_sq = 0.0;
    double g = 0.0;
};

struct MassPair {
    double m_plus_sq;
    double m_minus_sq;
};

/// Masses of the decoupled fields (Phi1 +- Phi2)/sqrt(2).
inline MassPair mass_map(const CoupledFieldParams& p) {
    if (!std::isfinite(p.m_sq) || !std::isfinite(p.g))
        throw std::invalid_argument("mass_map: non-finite parameters");
    return {p.m_sq + p.g, p.m_sq - p.g};
}

struct QuenchSpec {
    int dims = 1;
    std::vector<int> sites_per_dim{1};
    double spacing = 1.0;
    double omega = 1.0;
    double m0 = 1.0;
    double m_sq_final = 0.0;
    bool deep_quench = false;

    /// Lattice with the defaults a = 1 and Omega = sqrt(total sites).
    static QuenchSpec chain(int n, double m0, double m_sq_final, bool deep = false) {
        return hypercube(1, n, m0, m_sq_final, deep);
    }

    static QuenchSpec hypercube(int dims, int n, double m0, double m_sq_final, bool deep = false) {
        QuenchSpec s;
        s.dims = dims;
        s.sites_per_dim.assign(static_cast<std::size_t>(dims), n);
        s.m0 = m0;
        s.m_sq_final = m_sq_final;
        s.deep_quench = deep;
        s.omega = std::sqrt(static_cast<double>(s.total_sites()));
        return s;
    }

    std::int64_t total_sites() const {
        std::int64_t n = 1;
        for (int s : sites_per_dim)
            n *= s;
        return n;
    }

    /// c = a Omega
    double light_speed() const { return spacing * omega; }

    double box_length(int dim) const { return sites_per_dim.at(static_cast<std::size_t>(dim)) * spacing; }

    /// Throws ConfigError on invalid fields; returns non-fatal warnings.
    std::vector<std::string> validate() const {
        std::vector<std::string> warnings;
        if (dims < 1)
            throw ConfigError("dims", "must be a positive integer");
        if (static_cast<int>(sites_per_dim.size()) != dims)
            throw ConfigError("sites_per_dim", "expected " + std::to_string(dims) + " entries");
        for (int n : sites_per_dim) {
            if (n < 1)
                throw ConfigError("sites_per_dim", "entries must be positive");
            if (n % 2 == 0)
                throw ConfigError("sites_per_dim", "entries must be odd (got " + std::to_string(n) + ")");
        }
        if (!std::isfinite(spacing) || !(spacing > 0))
            throw ConfigError("spacing", "must be finite and positive");
        if (!std::isfinite(omega) || !(omega > 0))
            throw ConfigError("omega", "must be finite and positive");
        if (!std::isfinite(m0) || !(m0 > 0))
            throw ConfigError("m0", "must be finite and positive");
        if (!std::isfinite(m_sq_final))
            throw ConfigError("m_sq_final", "must be finite");
        if (deep_quench) {
            double scale = std::sqrt(std::abs(m_sq_final));
            for (int d = 0; d < dims; ++d)
                scale = std::max(scale, omega * spacing * 2 * std::numbers::pi / box_length(d));
            if (m0 < 100 * scale)
                throw ConfigError("m0", "deep quench requires m0 >= 100 x max(|m|, c k_min); got m0 = " +
                                            std::to_string(m0) + ", scale = " + std::to_string(scale));
            if (m0 < 1000 * scale)
                warnings.push_back("deep quench: m0 is less than 1000 x the largest final scale (" +
                                   std::to_string(scale) + ")");
        }
        return warnings;
    }
};

inline void to_json(nlohmann::json& j, const QuenchSpec& s) {
    j = nlohmann::json{{"dims", s.dims},       {"sites_per_dim", s.sites_per_dim},
                       {"spacing", s.spacing}, {"omega", s.omega},
                       {"m0", s.m0},           {"m_sq_final", s.m_sq_final},
                       {"deep_quench", s.deep_quench}};
}

namespace detail {

inline const std::vector<std::string>& spec_keys() {
    static const std::vector<std::string> keys{"dims",   "sites_per_dim", "spacing",    "omega",
                                               "m0",     "m_sq_final",    "deep_quench"};
    return keys;
}

template <class T>
T get_field(const nlohmann::json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(key, e.what());
    }
}

} // namespace detail

/// Reads spec fields from `j`. Keys that are not spec fields are ignored here;
/// quench_spec_from_json() is the strict variant.
inline QuenchSpec quench_spec_from_fields(const nlohmann::json& j) {
    if (!j.is_object())
        throw ConfigError("spec", "expected a JSON object");
    QuenchSpec s;
    for (const char* key : {"dims", "sites_per_dim", "m0", "m_sq_final"})
        if (!j.contains(key))
            throw ConfigError(key, "required field missing");
    s.dims = detail::get_field<int>(j, "dims");
    const auto& sites = j.at("sites_per_dim");
    if (sites.is_number_integer()) {
        if (s.dims < 1)
            throw ConfigError("dims", "must be a positive integer");
        s.sites_per_dim.assign(static_cast<std::size_t>(s.dims), sites.get<int>());
    } else {
        s.sites_per_dim = detail::get_field<std::vector<int>>(j, "sites_per_dim");
    }
    s.m0 = detail::get_field<double>(j, "m0");
    s.m_sq_final = detail::get_field<double>(j, "m_sq_final");
    s.spacing = j.contains("spacing") ? detail::get_field<double>(j, "spacing") : 1.0;
    s.deep_quench = j.contains("deep_quench") ? detail::get_field<bool>(j, "deep_quench") : false;
    if (j.contains("omega") && !j.at("omega").is_null())
        s.omega = detail::get_field<double>(j, "omega");
    else
        s.omega = std::sqrt(static_cast<double>(s.total_sites()));
    return s;
}

inline QuenchSpec quench_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw ConfigError("spec", "expected a JSON object");
    const auto& keys = detail::spec_keys();
    for (const auto& item : j.items())
        if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
            throw ConfigError(item.key(), "unknown key");
    return quench_spec_from_fields(j);
}

/// Momentum grid: Cartesian product of k_s = 2 pi n / L_s, n = -(N_s-1)/2 .. (N_s-1)/2,
/// flattened row-major with the first dimension slowest.
class MomentumGrid {
public:
    explicit MomentumGrid(const QuenchSpec& spec) : dims_(spec.dims), sizes_(spec.sites_per_dim) {
        for (int n : sizes_)
            if (n < 1 || n % 2 == 0)
                throw ConfigError("sites_per_dim", "momentum grid requires odd sizes");
        count_ = spec.total_sites();
        index_.resize(static_cast<std::size_t>(count_ * dims_));
        k_.resize(index_.size());
        for (std::int64_t mode = 0; mode < count_; ++mode) {
            std::int64_t rest = mode;
            for (int d = dims_ - 1; d >= 0; --d) {
                const int n = sizes_[static_cast<std::size_t>(d)];
                const int idx = static_cast<int>(rest % n) - (n - 1) / 2;
                rest /= n;
                const auto pos = static_cast<std::size_t>(mode * dims_ + d);
                index_[pos] = idx;
                k_[pos] = 2 * std::numbers::pi * idx / spec.box_length(d);
            }
        }
    }

    std::int64_t size() const noexcept { return count_; }
    int dims() const noexcept { return dims_; }
    const std::vector<int>& sizes() const noexcept { return sizes_; }

    /// Integer label n_s of `mode` along `dim`.
    int index(std::int64_t mode, int dim) const { return index_[static_cast<std::size_t>(mode * dims_ + dim)]; }
    double k(std::int64_t mode, int dim) const { return k_[static_cast<std::size_t>(mode * dims_ + dim)]; }

    std::vector<double> momentum(std::int64_t mode) const {
        auto first = k_.begin() + mode * dims_;
        return {first, first + dims_};
    }

private:
    int dims_;
    std::vector<int> sizes_;
    std::int64_t count_ = 0;
    std::vector<int> index_;
    std::vector<double> k_;
};

inline std::vector<std::vector<double>> momentum_grid(const QuenchSpec& spec) {
    MomentumGrid grid(spec);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(grid.size()));
    for (std::int64_t i = 0; i < grid.size(); ++i)
        out.push_back(grid.momentum(i));
    return out;
}

enum class Branch { Initial, Final };

/// sum_s sin^2(k_s a / 2), evaluated on |k_s| so that k and -k agree bitwise.
inline double sin_sq_sum(const QuenchSpec& spec, const std::vector<double>& k) {
    double acc = 0.0;
    for (double ks : k) {
        const double s = std::sin(std::abs(ks) * spec.spacing / 2);
        acc += s * s;
    }
    return acc;
}

/// omega_k^2 on the requested branch: m0^2 for the initial Hamiltonian,
/// m_sq_final (signed) for the final one.
inline double dispersion(const QuenchSpec& spec, const std::vector<double>& k, Branch which) {
    const double mass_sq = which == Branch::Initial ? spec.m0 * spec.m0 : spec.m_sq_final;
    return mass_sq + 4 * spec.omega * spec.omega * sin_sq_sum(spec, k);
}

inline ModeQuench mode_quench(const QuenchSpec& spec, const std::vector<double>& k) {
    return ModeQuench(std::sqrt(dispersion(spec, k, Branch::Initial)), dispersion(spec, k, Branch::Final));
}

inline Stability mode_stability(const QuenchSpec& spec, const std::vector<double>& k) {
    return classify(dispersion(spec, k, Branch::Final), spec.omega * spec.omega);
}

inline std::int64_t unstable_mode_count(const QuenchSpec& spec) {
    if (spec.m_sq_final >= 0)
        return 0;
    MomentumGrid grid(spec);
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < grid.size(); ++i)
        if (mode_stability(spec, grid.momentum(i)) == Stability::Unstable)
            ++count;
    return count;
}

/// Row-major site coordinates.
inline std::vector<int> site_coords(const QuenchSpec& spec, std::int64_t site) {
    std::vector<int> x(static_cast<std::size_t>(spec.dims));
    for (int d = spec.dims - 1; d >= 0; --d) {
        const int n = spec.sites_per_dim[static_cast<std::size_t>(d)];
        x[static_cast<std::size_t>(d)] = static_cast<int>(site % n);
        site /= n;
    }
    return x;
}

inline std::int64_t site_index(const QuenchSpec& spec, const std::vector<int>& x) {
    std::int64_t idx = 0;
    for (int d = 0; d < spec.dims; ++d) {
        const int n = spec.sites_per_dim[static_cast<std::size_t>(d)];
        idx = idx * n + ((x[static_cast<std::size_t>(d)] % n) + n) % n;
    }
    return idx;
}

/// Graph distance on the periodic lattice.
inline int graph_distance(const QuenchSpec& spec, std::int64_t a, std::int64_t b) {
    const auto xa = site_coords(spec, a);
    const auto xb = site_coords(spec, b);
    int dist = 0;
    for (int d = 0; d < spec.dims; ++d) {
        const int n = spec.sites_per_dim[static_cast<std::size_t>(d)];
        const int dx = std::abs(xa[static_cast<std::size_t>(d)] - xb[static_cast<std::size_t>(d)]);
        dist += std::min(dx, n - dx);
    }
    return dist;
}

} // namespace tachyquench
