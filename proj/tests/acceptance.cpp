// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance          run every criterion
//   acceptance 3 7      run the listed criteria

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "tachyquench.hpp"

using namespace tachyquench;

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

std::string num(double x) { return format_number(x); }

double tol_gap(double got, double want, double rel, double abs_floor) {
    return std::abs(got - want) / std::max(rel * std::abs(want), abs_floor);
}

CovarianceMatrix oracle_state(const QuenchSpec& spec, double t) {
    const auto h0 = oracle::QuadraticHamiltonian::lattice(spec, Branch::Initial);
    const auto h = oracle::QuadraticHamiltonian::lattice(spec, Branch::Final);
    return oracle::evolve_covariance(h, oracle::ground_state(h0), t);
}

std::vector<double> grid(double lo, double hi, int count) {
    std::vector<double> t;
    for (int i = 0; i < count; ++i)
        t.push_back(lo + (hi - lo) * i / (count - 1));
    return t;
}

// 1. Single-mode kernels against the single-mode oracle.
Outcome mode_kernel_equivalence() {
    double worst = 0;
    std::string where;
    for (double w0 : {0.1, 1.0, 10.0, 1000.0})
        for (double w2 : {-4.0, -1.0, -0.01, 0.0, 0.01, 1.0, 4.0})
            for (double t : {0.0, 0.1, 1.0, 5.0, 10.0}) {
                const oracle::QuadraticHamiltonian h0(Eigen::MatrixXd::Constant(1, 1, w0 * w0));
                const oracle::QuadraticHamiltonian h(Eigen::MatrixXd::Constant(1, 1, w2));
                const auto g = oracle::evolve_covariance(h, oracle::ground_state(h0), t).data();
                const double occ = 0.5 * (w0 * g(0, 0) + g(1, 1) / w0) - 0.5;
                const ModeQuench m(w0, w2);
                // the oracle's occupation is a difference of O(w0 qq) terms
                const double occ_floor = std::max(1e-12, 1e-15 * (w0 * g(0, 0) + g(1, 1) / w0));
                for (double gap : {tol_gap(c_qq_mode(m, t), g(0, 0), 1e-10, 1e-12),
                                   tol_gap(c_pp_mode(m, t), g(1, 1), 1e-10, 1e-12),
                                   tol_gap(c_qp_mode(m, t), g(0, 1), 1e-10, 1e-12),
                                   tol_gap(occupation(m, t), occ, 1e-10, occ_floor)})
                    if (gap > worst) {
                        worst = gap;
                        where = "w0=" + num(w0) + " w2=" + num(w2) + " t=" + num(t);
                    }
            }
    return {worst <= 1.0, "worst error / tolerance = " + num(worst) + (where.empty() ? "" : " at " + where)};
}

// 2. Lattice covariance, entropy and MI against full oracle evolution.
Outcome lattice_equivalence() {
    double worst_cov = 0, worst_s = 0, worst_i = 0;
    for (double msq : {1.0, -1.0}) {
        std::vector<std::pair<QuenchSpec, std::pair<Region, Region>>> cases{
            {QuenchSpec::chain(21, 1.0, msq), {Region::block(0, 3), Region::block(8, 3)}},
            {QuenchSpec::chain(63, 1.0, msq), {Region::block(0, 3), Region::block(20, 3)}},
            {QuenchSpec::hypercube(2, 7, 1.0, msq), {Region({0, 1, 7}), Region({24, 25, 31})}}};
        for (const auto& [spec, regions] : cases) {
            const ModeTable table(spec);
            for (double t : {0.0, 1.0, 2.5, 5.0}) {
                const CovarianceMatrix o = oracle_state(spec, t);
                const LatticeState st(table, t);
                worst_cov = std::max(worst_cov, (st.full_covariance().data() - o.data()).cwiseAbs().maxCoeff());
                const auto& [a, b] = regions;
                worst_s = std::max(worst_s, std::abs(st.entropy(a) - entropy(o, a)));
                worst_s = std::max(worst_s, std::abs(st.entropy(a.united(b)) - entropy(o, a.united(b))));
                worst_i = std::max(worst_i, std::abs(st.mutual_information(a, b) - mutual_information(o, a, b)));
            }
        }
    }
    const bool ok = worst_cov <= 1e-8 && worst_s <= 1e-8 && worst_i <= 1e-8;
    return {ok, "max |dGamma| = " + num(worst_cov) + ", max |dS| = " + num(worst_s) + ", max |dI| = " + num(worst_i) +
                    " (tolerance 1e-8)"};
}

// 3. Correlators outside 2ct + 10a are negligible.
Outcome causality() {
    const auto spec = QuenchSpec::chain(2001, 1000, -1.0, true);
    const double c = spec.light_speed();
    std::vector<double> t;
    for (int i = 1; i <= 100; ++i)
        t.push_back(2.0 * i / c); // up to 200 / c
    std::vector<int> r;
    for (int x = 0; x <= 1000; ++x)
        r.push_back(x);
    const auto map = lightcone_map(spec, CorrelatorKind::qq, t, r);
    double worst = 0, worst_t = 0;
    for (double ti : t) {
        const double ratio = causality_ratio(map, ti, 2 * c * ti, 10.0);
        if (ratio > worst) {
            worst = ratio;
            worst_t = ti;
        }
    }
    return {worst <= 1e-6,
            "max out-of-cone / in-cone = " + num(worst) + " at ct = " + num(c * worst_t) + " (tolerance 1e-6)"};
}

// 4. S_A grows like 2 m L t.
Outcome linear_growth() {
    const double m = 0.5;
    const auto spec = QuenchSpec::chain(2001, 1000, -m * m, true);
    const ModeTable table(spec);
    const auto t = grid(6.0 / m, 10.0 / m, 81);
    bool ok = true;
    std::string detail;
    for (int l : {1, 3}) {
        const auto r = entropy_growth(table, Region::block(0, l), t, FitWindow{6.0 / m, 10.0 / m});
        double ratio = 0;
        for (const auto& [k, v] : r.summary)
            if (k == "slope_ratio")
                ratio = std::get<double>(v);
        ok &= std::abs(ratio - 1) <= 0.15;
        detail += (detail.empty() ? "" : ", ") + std::string("L=") + std::to_string(l) + ": slope/(2mL) = " + num(ratio);
    }
    return {ok, detail + " (window mt in [6, 10], tolerance 15%)"};
}

// 5. Early-time entropy is independent of m.
Outcome short_time_universality() {
    bool ok = true;
    std::string detail;
    for (int l : {1, 10}) {
        const double c = std::sqrt(2001.0);
        const auto t = grid(0.0, l / (2 * c), 21);
        std::vector<std::vector<double>> curves;
        for (double msq : {0.1, 0.3, 0.5}) {
            const ModeTable table(QuenchSpec::chain(2001, 1000, -msq, true));
            std::vector<double> s;
            for (double ti : t)
                s.push_back(LatticeState(table, ti).entropy(Region::block(0, l)));
            curves.push_back(s);
        }
        double worst = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0;
            for (const auto& s : curves) {
                lo = std::min(lo, s[i]);
                hi = std::max(hi, s[i]);
            }
            if (hi > 0)
                worst = std::max(worst, (hi - lo) / hi);
        }
        ok &= worst <= 0.05;
        detail += (detail.empty() ? "" : ", ") + std::string("L=") + std::to_string(l) + ": max spread " + num(worst);
    }
    return {ok, detail + " for t < L/(2c) (tolerance 5%)"};
}

// 6. MI between separated blocks switches on at t = r/2c.
Outcome mi_onset() {
    nlohmann::json cfg{{"sites_per_dim", 2001}, {"m_sq_final", -4.0}, {"separations", {30, 60}},
                       {"block_size", 3},       {"onset_threshold", 1e-4}, {"onset_window", {-3.0, 5.0}},
                       {"t_grid", {{"start", 0.0}, {"stop", 45.0}, {"count", 451}}}};
    const auto r = run(parse_config(Experiment::mi_cuts, cfg));
    std::string detail;
    for (const auto& c : r.checks)
        detail += (detail.empty() ? "" : "; ") + c.detail;
    return {r.all_passed() && r.checks.size() == 2, detail};
}

// 7. Exact commutators never exceed the envelope outside the cone.
Outcome lr_domination() {
    std::int64_t tested = 0, violations = 0;
    for (double msq : {1.0, -1.0}) {
        auto chain = QuenchSpec::chain(41, 1.0, msq);
        chain.omega = 5;
        for (const auto& spec : {chain, QuenchSpec::hypercube(2, 7, 1.0, msq)}) {
            int dmax = 0;
            for (std::int64_t b = 0; b < spec.total_sites(); ++b)
                dmax = std::max(dmax, graph_distance(spec, 0, b));
            const double tmax = 2.0 * dmax / (std::numbers::e * std::sqrt(norm_x(spec)));
            const auto r = lr_comparison(spec, grid(tmax / 40, tmax, 40));
            for (const auto& [k, v] : r.summary) {
                if (k == "pairs_tested")
                    tested += std::get<std::int64_t>(v);
                if (k == "violations")
                    violations += std::get<std::int64_t>(v);
            }
        }
    }
    return {violations == 0 && tested > 0,
            std::to_string(violations) + " violations in " + std::to_string(tested) + " out-of-cone samples"};
}

// 8. Occupation of a nearly free mode against t^2 / 2.
Outcome free_particle_occupation() {
    bool ok = true;
    std::string detail;
    for (double t : {1.0, 5.0, 10.0}) {
        const double ratio = occupation(ModeQuench(1.0, 1e-12), t) / (t * t / 2);
        ok &= std::abs(ratio - 1) <= 1e-4;
        detail += (detail.empty() ? "" : ", ") + std::string("t=") + num(t) + ": " + num(ratio);
    }
    return {ok, "occupation / (t^2/2): " + detail + " (tolerance 1e-4)"};
}

// 9. Exact and asymptotic per-mode entropy at the switchover.
Outcome entropy_asymptote() {
    const double s = 1e8;
    const double exact = mode_entropy_exact(s), asym = mode_entropy_asymptotic(s);
    const double rel = std::abs(exact - asym) / exact;
    const double jump = std::abs(mode_entropy(std::nextafter(s, 2 * s)) - mode_entropy(s)) / exact;
    return {rel <= 1e-6 && jump <= 1e-6,
            "relative gap " + num(rel) + ", jump across switch " + num(jump) + " (tolerance 1e-6)"};
}

// 10. Physical spectra everywhere and a pure full-lattice state.
Outcome physicality() {
    diagnostics::reset_min_symplectic_eigenvalue();
    // representative runs of each entropy-producing path
    for (double msq : {1.0, -1.0})
        for (const auto& spec : {QuenchSpec::chain(21, 1.0, msq), QuenchSpec::chain(63, 1.0, msq),
                                 QuenchSpec::hypercube(2, 7, 1.0, msq)})
            for (double t : {0.0, 1.0, 2.5, 5.0}) {
                const ModeTable table(spec);
                LatticeState(table, t).entropy(Region::block(0, 5));
                symplectic_spectrum(oracle_state(spec, t));
            }
    const ModeTable desk(QuenchSpec::chain(2001, 1000, -0.25, true));
    for (double t : grid(0.0, 20.0, 41)) {
        LatticeState st(desk, t);
        st.entropy(Region::block(0, 1));
        st.entropy(Region::block(0, 3));
    }
    nlohmann::json cfg{{"sites_per_dim", 2001}, {"m_sq_final", -4.0}, {"separations", {30, 60}},
                       {"t_grid", {{"start", 0.0}, {"stop", 45.0}, {"count", 91}}}};
    run(parse_config(Experiment::mi_cuts, cfg));
    const double min_sigma = diagnostics::min_symplectic_eigenvalue();

    double worst_purity = 0;
    for (double msq : {1.0, -1.0})
        for (int n : {9, 21, 63}) {
            const auto spec = QuenchSpec::chain(n, 1.0, msq);
            const ModeTable table(spec);
            for (double t : {0.0, 1.0, 2.5, 5.0})
                worst_purity =
                    std::max(worst_purity, std::abs(symplectic_product(LatticeState(table, t).full_covariance()) - 1));
        }
    return {min_sigma >= 0.5 - 1e-8 && worst_purity <= 1e-6,
            "min raw sigma = " + num(min_sigma) + " (>= 1/2 - 1e-8), max |prod(2 sigma) - 1| = " + num(worst_purity) +
                " (<= 1e-6, mt <= 5, N <= 63)"};
}

struct Criterion {
    const char* title;
    std::function<Outcome()> run;
    double runtime_limit_s; ///< 0 = none
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {"mode-kernel oracle equivalence", mode_kernel_equivalence, 1},
        {"lattice oracle equivalence", lattice_equivalence, 60},
        {"causality outside 2ct + 10a", causality, 120},
        {"linear entanglement growth", linear_growth, 120},
        {"short-time universality", short_time_universality, 0},
        {"mutual-information onset", mi_onset, 0},
        {"Lieb-Robinson domination", lr_domination, 60},
        {"free-particle occupation limit", free_particle_occupation, 0},
        {"entropy asymptote continuity", entropy_asymptote, 0},
        {"uncertainty and purity", physicality, 0},
    };
    return list;
}

bool run_one(int n) {
    const Criterion& c = criteria().at(static_cast<std::size_t>(n - 1));
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = "runtime " + num(std::round(secs * 1000) / 1000) + " s";
    if (c.runtime_limit_s > 0) {
        timing += " (limit " + num(c.runtime_limit_s) + " s)";
        if (secs > c.runtime_limit_s)
            o.passed = false;
    }
    std::printf("%s criterion %d: %s -- %s; %s\n", o.passed ? "PASS" : "FAIL", n, c.title, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
    return o.passed;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        const int n = std::atoi(argv[i]);
        if (n < 1 || n > static_cast<int>(criteria().size())) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
            return 2;
        }
        which.push_back(n);
    }
    if (which.empty())
        for (int n = 1; n <= static_cast<int>(criteria().size()); ++n)
            which.push_back(n);
    bool ok = true;
    for (int n : which)
        ok &= run_one(n);
    return ok ? 0 : 1;
}
