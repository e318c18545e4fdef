#pragma once
//
// Named experiments driven by a flat JSON config: spec fields plus
// experiment fields. Times in configs and outputs are in units of a/c unless
// "time_unit" is "physical".
//

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tachyquench/correlators.hpp"
#include "tachyquench/errors.hpp"
#include "tachyquench/experiment_result.hpp"
#include "tachyquench/gaussian_info.hpp"
#include "tachyquench/lattice_model.hpp"
#include "tachyquench/lr_bounds.hpp"

namespace tachyquench {

enum class Experiment { lightcone, ee_growth, mi_contour, mi_cuts, lr_check, mode_report };

inline Experiment parse_experiment(const std::string& s) {
    if (s == "lightcone")
        return Experiment::lightcone;
    if (s == "ee-growth")
        return Experiment::ee_growth;
    if (s == "mi-contour")
        return Experiment::mi_contour;
    if (s == "mi-cuts")
        return Experiment::mi_cuts;
    if (s == "lr-check")
        return Experiment::lr_check;
    if (s == "mode-report")
        return Experiment::mode_report;
    throw ConfigError("experiment", "unknown experiment '" + s + "'");
}

inline const char* to_string(Experiment e) {
    switch (e) {
    case Experiment::lightcone:
        return "lightcone";
    case Experiment::ee_growth:
        return "ee-growth";
    case Experiment::mi_contour:
        return "mi-contour";
    case Experiment::mi_cuts:
        return "mi-cuts";
    case Experiment::lr_check:
        return "lr-check";
    case Experiment::mode_report:
        return "mode-report";
    }
    return "?";
}

enum class OutputFormat { csv, json };

struct ExperimentConfig {
    Experiment experiment = Experiment::mode_report;
    QuenchSpec spec;
    enum class TimeUnit { light, physical, mass };
    TimeUnit time_unit = TimeUnit::light;

    std::vector<double> t_grid;  ///< as given in the config (light units or physical)
    std::vector<int> r_grid;
    CorrelatorKind kind = CorrelatorKind::qq;
    int cone_margin = 10;
    double causality_tol = 1e-6;

    std::vector<int> block_sizes{1};
    std::vector<double> m_sq_values;
    std::optional<std::pair<double, double>> fit_window_mt;
    double slope_tol = 0.15;

    int block_size = 3;
    std::vector<int> separations;
    double onset_threshold = 1e-4;
    std::pair<double, double> onset_window{-3.0, 5.0}; ///< in units of a/c around r/2c

    std::string output;
    OutputFormat format = OutputFormat::csv;

    /// Physical time of a config time value; "mass" units are 1/|m| of the
    /// quench being run.
    double physical_time(double t, double m_sq) const {
        switch (time_unit) {
        case TimeUnit::light:
            return t * spec.spacing / spec.light_speed();
        case TimeUnit::physical:
            return t;
        case TimeUnit::mass:
            return t / std::sqrt(std::abs(m_sq));
        }
        return t;
    }
    double physical_time(double t) const { return physical_time(t, spec.m_sq_final); }

    /// Output time axis: units of a/c unless the config asked for physical time.
    double display_time(double t) const {
        return time_unit == TimeUnit::physical ? t : t * spec.light_speed() / spec.spacing;
    }
};

namespace detail {

inline std::vector<double> parse_time_grid(const nlohmann::json& j, const std::string& key) {
    std::vector<double> out;
    try {
        if (j.is_array()) {
            out = j.get<std::vector<double>>();
        } else if (j.is_object()) {
            const double start = j.at("start").get<double>();
            const double stop = j.at("stop").get<double>();
            const int count = j.at("count").get<int>();
            if (count < 1)
                throw ConfigError(key, "count must be positive");
            for (int i = 0; i < count; ++i)
                out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
        } else {
            throw ConfigError(key, "expected an array or {start, stop, count}");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(key, e.what());
    }
    if (out.empty())
        throw ConfigError(key, "grid is empty");
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i]) || out[i] < 0)
            throw ConfigError(key, "times must be finite and nonnegative");
        if (i && !(out[i] > out[i - 1]))
            throw ConfigError(key, "grid must be strictly increasing");
    }
    return out;
}

inline std::vector<int> parse_int_grid(const nlohmann::json& j, const std::string& key) {
    std::vector<int> out;
    try {
        if (j.is_array()) {
            out = j.get<std::vector<int>>();
        } else if (j.is_object()) {
            const int start = j.at("start").get<int>();
            const int stop = j.at("stop").get<int>();
            const int step = j.contains("step") ? j.at("step").get<int>() : 1;
            if (step < 1)
                throw ConfigError(key, "step must be positive");
            for (int r = start; r <= stop; r += step)
                out.push_back(r);
        } else {
            throw ConfigError(key, "expected an array or {start, stop, step}");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(key, e.what());
    }
    if (out.empty())
        throw ConfigError(key, "grid is empty");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1])
            throw ConfigError(key, "grid must be strictly increasing");
    return out;
}

/// Desk-scale defaults: a 2001-site deep-quench chain.
inline nlohmann::json default_fields(Experiment e) {
    nlohmann::json j{{"dims", 1}, {"sites_per_dim", 2001}, {"m0", 1000.0}, {"deep_quench", true}};
    switch (e) {
    case Experiment::lightcone:
        j["m_sq_final"] = -1.0;
        j["t_grid"] = {{"start", 0.0}, {"stop", 200.0}, {"count", 101}};
        j["r_grid"] = {{"start", 0}, {"stop", 1000}, {"step", 1}};
        break;
    case Experiment::ee_growth:
        j["m_sq_final"] = -0.25;
        j["m_sq_values"] = {-0.1, -0.2, -0.3, -0.4, -0.5};
        j["block_sizes"] = {1, 3};
        j["time_unit"] = "mass";
        j["t_grid"] = {{"start", 0.0}, {"stop", 12.0}, {"count", 241}};
        j["fit_window_mt"] = {6.0, 10.0};
        break;
    case Experiment::mi_contour:
        j["m_sq_final"] = -4.0;
        j["m_sq_values"] = {0.0, -4.0};
        j["separations"] = {{"start", 6}, {"stop", 120}, {"step", 6}};
        j["t_grid"] = {{"start", 0.0}, {"stop", 100.0}, {"count", 101}};
        break;
    case Experiment::mi_cuts:
        j["m_sq_final"] = -4.0;
        j["separations"] = {30, 60, 90, 120};
        j["t_grid"] = {{"start", 0.0}, {"stop", 80.0}, {"count", 801}};
        break;
    case Experiment::lr_check:
        j = {{"dims", 1}, {"sites_per_dim", 41}, {"m0", 1.0}, {"m_sq_final", 1.0}, {"omega", 5.0},
             {"deep_quench", false}};
        break;
    case Experiment::mode_report:
        j["m_sq_final"] = -1.0;
        break;
    }
    return j;
}

/// Figure-caption parameters (N rounded up to the nearest odd size).
inline nlohmann::json paper_scale_fields(Experiment e) {
    nlohmann::json j{{"dims", 1}, {"sites_per_dim", 40001}, {"m0", 1000.0}, {"deep_quench", true}};
    switch (e) {
    case Experiment::lightcone:
        j["m_sq_final"] = -1.0;
        break;
    case Experiment::ee_growth:
        j["m_sq_values"] = {-0.1, -0.2, -0.3, -0.4, -0.5};
        j["block_sizes"] = {1, 10};
        j["time_unit"] = "mass";
        j["t_grid"] = {{"start", 0.0}, {"stop", 10.0}, {"count", 201}};
        break;
    case Experiment::mi_contour:
        j["m_sq_values"] = {0.0, -4.0};
        j["block_size"] = 3;
        break;
    case Experiment::mi_cuts:
        j["m_sq_final"] = -4.0;
        j["separations"] = {30, 60, 90, 120};
        j["block_size"] = 3;
        break;
    case Experiment::mode_report:
        j["m_sq_final"] = -1.0;
        break;
    case Experiment::lr_check:
        break;
    }
    return j;
}

inline const std::set<std::string>& experiment_keys() {
    static const std::set<std::string> keys{
        "experiment",  "time_unit",     "t_grid",        "r_grid",      "kind",        "cone_margin",
        "causality_tol", "block_sizes", "m_sq_values",   "fit_window_mt", "slope_tol", "block_size",
        "separations", "onset_threshold", "onset_window", "output",     "format"};
    return keys;
}

} // namespace detail

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv")
        return OutputFormat::csv;
    if (s == "json")
        return OutputFormat::json;
    throw ConfigError("format", "expected csv or json (got '" + s + "')");
}

/// Builds a config from defaults, the user's JSON and (optionally) the
/// --paper-scale overrides, in that order of precedence (last wins).
inline ExperimentConfig parse_config(Experiment e, const nlohmann::json& user, bool paper_scale = false) {
    if (!user.is_object())
        throw ConfigError("config", "expected a JSON object");
    const auto& spec_keys = detail::spec_keys();
    for (const auto& item : user.items()) {
        const bool known = detail::experiment_keys().count(item.key()) ||
                           std::find(spec_keys.begin(), spec_keys.end(), item.key()) != spec_keys.end();
        if (!known)
            throw ConfigError(item.key(), "unknown key");
    }
    if (user.contains("experiment") && parse_experiment(user.at("experiment").get<std::string>()) != e)
        throw ConfigError("experiment", "config is for a different experiment");

    nlohmann::json j = detail::default_fields(e);
    if (user.contains("sites_per_dim") || user.contains("dims"))
        j.erase("omega");
    for (const auto& item : user.items())
        j[item.key()] = item.value();
    if (paper_scale) {
        if (e == Experiment::lr_check)
            throw ConfigError("paper-scale", "lr-check has no figure-scale parameters");
        j.erase("omega");
        const nlohmann::json overrides = detail::paper_scale_fields(e);
        for (const auto& item : overrides.items())
            j[item.key()] = item.value();
    }

    ExperimentConfig c;
    c.experiment = e;
    c.spec = quench_spec_from_fields(j);
    if (j.contains("time_unit")) {
        const auto u = detail::get_field<std::string>(j, "time_unit");
        if (u == "light")
            c.time_unit = ExperimentConfig::TimeUnit::light;
        else if (u == "physical")
            c.time_unit = ExperimentConfig::TimeUnit::physical;
        else if (u == "mass")
            c.time_unit = ExperimentConfig::TimeUnit::mass;
        else
            throw ConfigError("time_unit", "expected 'light', 'physical' or 'mass'");
    }
    if (j.contains("t_grid"))
        c.t_grid = detail::parse_time_grid(j.at("t_grid"), "t_grid");
    if (j.contains("r_grid"))
        c.r_grid = detail::parse_int_grid(j.at("r_grid"), "r_grid");
    if (j.contains("kind"))
        c.kind = parse_correlator_kind(detail::get_field<std::string>(j, "kind"));
    if (j.contains("cone_margin"))
        c.cone_margin = detail::get_field<int>(j, "cone_margin");
    if (j.contains("causality_tol"))
        c.causality_tol = detail::get_field<double>(j, "causality_tol");
    if (j.contains("block_sizes"))
        c.block_sizes = detail::get_field<std::vector<int>>(j, "block_sizes");
    if (j.contains("m_sq_values"))
        c.m_sq_values = detail::get_field<std::vector<double>>(j, "m_sq_values");
    if (j.contains("fit_window_mt")) {
        const auto w = detail::get_field<std::vector<double>>(j, "fit_window_mt");
        if (w.size() != 2 || !(w[1] > w[0]) || w[0] < 0)
            throw ConfigError("fit_window_mt", "expected [lo, hi] with 0 <= lo < hi");
        c.fit_window_mt = std::make_pair(w[0], w[1]);
    }
    if (j.contains("slope_tol"))
        c.slope_tol = detail::get_field<double>(j, "slope_tol");
    if (j.contains("block_size"))
        c.block_size = detail::get_field<int>(j, "block_size");
    if (j.contains("separations"))
        c.separations = detail::parse_int_grid(j.at("separations"), "separations");
    if (j.contains("onset_threshold"))
        c.onset_threshold = detail::get_field<double>(j, "onset_threshold");
    if (j.contains("onset_window")) {
        const auto w = detail::get_field<std::vector<double>>(j, "onset_window");
        if (w.size() != 2 || !(w[1] > w[0]))
            throw ConfigError("onset_window", "expected [lo, hi] with lo < hi");
        c.onset_window = {w[0], w[1]};
    }
    if (j.contains("output"))
        c.output = detail::get_field<std::string>(j, "output");
    if (j.contains("format"))
        c.format = parse_format(detail::get_field<std::string>(j, "format"));

    c.spec.validate();
    for (int l : c.block_sizes)
        if (l < 1)
            throw ConfigError("block_sizes", "block sizes must be positive");
    if (c.block_size < 1)
        throw ConfigError("block_size", "must be positive");
    if (c.cone_margin < 0)
        throw ConfigError("cone_margin", "must be nonnegative");
    if (c.fit_window_mt) {
        if (c.t_grid.empty())
            throw ConfigError("fit_window_mt", "requires a time grid");
        // the window must lie inside the grid for every mass it is applied to
        std::vector<double> masses = c.m_sq_values.empty() ? std::vector<double>{c.spec.m_sq_final} : c.m_sq_values;
        for (double msq : masses) {
            const double m = std::sqrt(std::abs(msq));
            if (m == 0)
                throw ConfigError("fit_window_mt", "undefined for a massless quench");
            const double lo = c.fit_window_mt->first / m;
            const double hi = c.fit_window_mt->second / m;
            const double front = c.physical_time(c.t_grid.front(), msq);
            const double back = c.physical_time(c.t_grid.back(), msq);
            if (lo < front * (1 - 1e-12) || hi > back * (1 + 1e-12))
                throw ConfigError("fit_window_mt", "window [" + format_number(c.display_time(lo)) + ", " +
                                                       format_number(c.display_time(hi)) +
                                                       "] lies outside the time grid");
        }
    }
    return c;
}

inline ExperimentResult mode_report(const QuenchSpec& spec) {
    spec.validate();
    const MomentumGrid grid(spec);
    std::vector<std::string> cols{"mode"};
    for (int d = 0; d < spec.dims; ++d)
        cols.push_back(spec.dims == 1 ? "k" : "k" + std::to_string(d));
    for (const char* c : {"omega0", "omega_sq", "classification", "beta_eff", "xi"})
        cols.push_back(c);
    ExperimentResult out(cols);
    std::int64_t unstable = 0;
    for (std::int64_t i = 0; i < grid.size(); ++i) {
        const auto k = grid.momentum(i);
        const ModeQuench mq = mode_quench(spec, k);
        const Stability st = mode_stability(spec, k);
        std::vector<Cell> row{i};
        for (double ks : k)
            row.emplace_back(ks);
        row.emplace_back(mq.omega0());
        row.emplace_back(mq.omega_sq());
        row.emplace_back(std::string(to_string(st)));
        row.emplace_back(st == Stability::Stable ? beta_eff(mq.omega0(), std::sqrt(mq.omega_sq()))
                                                 : std::numeric_limits<double>::quiet_NaN());
        row.emplace_back(st == Stability::Unstable ? mq.xi() : std::numeric_limits<double>::quiet_NaN());
        if (st == Stability::Unstable)
            ++unstable;
        out.add_row(std::move(row));
    }
    out.note("modes", grid.size());
    out.note("unstable_modes", unstable);
    out.note("unstable_fraction", static_cast<double>(unstable) / static_cast<double>(grid.size()));
    return out;
}

/// Largest out-of-cone |value| relative to the in-cone maximum, per time.
inline double causality_ratio(const ExperimentResult& map, double t, double cone_radius, double margin) {
    double in = 0, out = 0;
    for (std::size_t i = 0; i < map.rows.size(); ++i) {
        if (map.number(i, "t") != t)
            continue;
        const double r = map.number(i, "r");
        const double v = std::abs(map.number(i, "value"));
        if (r <= cone_radius)
            in = std::max(in, v);
        else if (r > cone_radius + margin)
            out = std::max(out, v);
    }
    return in > 0 ? out / in : 0.0;
}

namespace detail {

inline std::vector<double> physical_grid(const ExperimentConfig& c, std::optional<double> m_sq = std::nullopt) {
    if (c.t_grid.empty())
        throw ConfigError("t_grid", "required for " + std::string(to_string(c.experiment)));
    const double msq = m_sq.value_or(c.spec.m_sq_final);
    if (c.time_unit == ExperimentConfig::TimeUnit::mass && msq == 0)
        throw ConfigError("time_unit", "mass units are undefined for a massless quench");
    std::vector<double> t;
    for (double x : c.t_grid)
        t.push_back(c.physical_time(x, msq));
    return t;
}

inline ExperimentResult run_lightcone(const ExperimentConfig& c) {
    if (c.r_grid.empty())
        throw ConfigError("r_grid", "required for lightcone");
    const ModeTable table(c.spec);
    const auto t = physical_grid(c);
    ExperimentResult raw = lightcone_map(table, c.kind, t, c.r_grid);
    ExperimentResult out({"r", "t", "value"});
    for (std::size_t i = 0; i < raw.rows.size(); ++i)
        out.add_row({raw.rows[i][0], c.display_time(raw.number(i, "t")), raw.rows[i][2]});
    out.summary = raw.summary;
    const double cspeed = c.spec.light_speed();
    double worst = 0, worst_t = 0;
    for (double ti : t) {
        const double ratio = causality_ratio(raw, ti, 2 * cspeed * ti / c.spec.spacing, c.cone_margin);
        if (ratio > worst) {
            worst = ratio;
            worst_t = ti;
        }
    }
    out.note("max_out_of_cone_ratio", worst);
    out.note("worst_t", c.display_time(worst_t));
    out.check("causality", worst <= c.causality_tol,
              "max |C(r > 2ct + " + std::to_string(c.cone_margin) + "a)| / max |C(r <= 2ct)| = " + format_number(worst) +
                  " (tolerance " + format_number(c.causality_tol) + ")");
    return out;
}

inline std::vector<double> masses_of(const ExperimentConfig& c) {
    return c.m_sq_values.empty() ? std::vector<double>{c.spec.m_sq_final} : c.m_sq_values;
}

inline ExperimentResult run_ee_growth(const ExperimentConfig& c) {
    ExperimentResult out({"m_sq", "L", "t", "S"});
    for (double msq : masses_of(c)) {
        const auto t = physical_grid(c, msq);
        QuenchSpec spec = c.spec;
        spec.m_sq_final = msq;
        const ModeTable table(spec);
        for (int l : c.block_sizes) {
            const Region a = Region::block(0, l);
            std::optional<FitWindow> fit;
            const double m = std::sqrt(std::abs(msq));
            if (c.fit_window_mt && m > 0)
                fit = FitWindow{c.fit_window_mt->first / m, c.fit_window_mt->second / m};
            const ExperimentResult series = entropy_growth(table, a, t, fit);
            for (std::size_t i = 0; i < series.rows.size(); ++i)
                out.add_row({msq, static_cast<std::int64_t>(l), c.display_time(t[i]), series.rows[i][1]});
            const std::string tag = "m_sq=" + format_number(msq) + ",L=" + std::to_string(l);
            for (const auto& [key, value] : series.summary) {
                out.note(key + "[" + tag + "]", value);
                if (key == "slope_ratio") {
                    const double r = std::get<double>(value);
                    out.check("linear growth " + tag, std::abs(r - 1) <= c.slope_tol,
                              "slope / (2 m L) = " + format_number(r) + " (tolerance " + format_number(c.slope_tol) +
                                  ")");
                }
            }
        }
    }
    return out;
}

inline ExperimentResult run_mutual_information(const ExperimentConfig& c, bool cuts) {
    if (c.separations.empty())
        throw ConfigError("separations", "required for " + std::string(to_string(c.experiment)));
    ExperimentResult out({"m_sq", "r", "t", "I"});
    for (double msq : (cuts ? std::vector<double>{c.spec.m_sq_final} : masses_of(c))) {
        const auto t = physical_grid(c, msq);
        QuenchSpec spec = c.spec;
        spec.m_sq_final = msq;
        const ModeTable table(spec);
        const Region a = Region::block(0, c.block_size);
        std::vector<Region> bs;
        for (int r : c.separations) {
            if (r < c.block_size)
                throw ConfigError("separations", "blocks overlap for r = " + std::to_string(r));
            bs.push_back(Region::block(r, c.block_size));
            bs.back().check_within(table.size());
        }
        std::vector<std::vector<double>> mi(t.size());
        parallel_for(t.size(), [&](std::size_t i) {
            const LatticeState state(table, t[i]);
            const double sa = state.entropy(a);
            for (const auto& b : bs)
                mi[i].push_back(mutual_information_from(sa, state.entropy(b), state.entropy(a.united(b))));
        });
        for (std::size_t j = 0; j < bs.size(); ++j)
            for (std::size_t i = 0; i < t.size(); ++i)
                out.add_row({msq, static_cast<std::int64_t>(c.separations[j]), c.display_time(t[i]), mi[i][j]});
        if (!cuts)
            continue;
        const double cs = spec.light_speed();
        for (std::size_t j = 0; j < bs.size(); ++j) {
            const int r = c.separations[j];
            std::optional<double> onset;
            for (std::size_t i = 0; i < t.size() && !onset; ++i)
                if (mi[i][j] > c.onset_threshold)
                    onset = t[i];
            const double centre = r * spec.spacing / (2 * cs);
            const double lo = centre + c.onset_window.first * spec.spacing / cs;
            const double hi = centre + c.onset_window.second * spec.spacing / cs;
            const std::string tag = "r=" + std::to_string(r);
            out.note("onset[" + tag + "]", onset ? c.display_time(*onset) : std::numeric_limits<double>::infinity());
            out.check("mi onset " + tag, onset && *onset >= lo && *onset <= hi,
                      "first t with I > " + format_number(c.onset_threshold) + ": " +
                          (onset ? format_number(c.display_time(*onset)) : std::string("none")) + ", window [" +
                          format_number(c.display_time(lo)) + ", " + format_number(c.display_time(hi)) + "]");
        }
    }
    return out;
}

inline ExperimentResult run_lr_check(const ExperimentConfig& c) {
    std::vector<double> t;
    if (!c.t_grid.empty()) {
        t = physical_grid(c);
    } else {
        int dmax = 0;
        for (std::int64_t b = 0; b < c.spec.total_sites(); ++b)
            dmax = std::max(dmax, graph_distance(c.spec, 0, b));
        const double t_max = 2.0 * dmax / (std::numbers::e * std::sqrt(norm_x(c.spec)));
        for (int i = 1; i <= 40; ++i)
            t.push_back(t_max * i / 40.0);
    }
    ExperimentResult raw = lr_comparison(c.spec, t);
    ExperimentResult out(raw.columns);
    const auto ti = raw.column_index("t");
    for (auto row : raw.rows) {
        row[ti] = c.display_time(std::get<double>(row[ti]));
        out.add_row(std::move(row));
    }
    out.summary = raw.summary;
    out.checks = raw.checks;
    return out;
}

} // namespace detail

inline ExperimentResult run(const ExperimentConfig& c) {
    ExperimentResult out;
    switch (c.experiment) {
    case Experiment::lightcone:
        out = detail::run_lightcone(c);
        break;
    case Experiment::ee_growth:
        out = detail::run_ee_growth(c);
        break;
    case Experiment::mi_contour:
        out = detail::run_mutual_information(c, false);
        break;
    case Experiment::mi_cuts:
        out = detail::run_mutual_information(c, true);
        break;
    case Experiment::lr_check:
        out = detail::run_lr_check(c);
        break;
    case Experiment::mode_report:
        out = mode_report(c.spec);
        break;
    }
    for (auto& w : c.spec.validate())
        out.warnings.push_back(std::move(w));
    out.note("unstable_mode_count", unstable_mode_count(c.spec));
    out.note("light_speed", c.spec.light_speed());
    return out;
}

} // namespace tachyquench
