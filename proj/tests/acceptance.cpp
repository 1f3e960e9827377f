// End-to-end checks of the headline rates, bounds, and structural
// identities, one verdict line each. Exit status is the number of
// failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "dynspec/chebyshev_transfer.hpp"
#include "dynspec/correlation.hpp"
#include "dynspec/linearize.hpp"
#include "dynspec/map_model.hpp"
#include "dynspec/spectral.hpp"
#include "dynspec/transfer_matrix.hpp"

using namespace dynspec;

namespace {

int g_failures = 0;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(int idx, const char* name, bool ok, const std::string& detail, double secs) {
    std::printf("[%s] %2d %-34s %s (%.1fs)\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// 1: the two textbook maps, exact spectra.
void check_textbook_rates() {
    Timer t;
    auto tent = mixing_rate(tent_map(), 2);
    auto doubling = mixing_rate(doubling_map(), 2);
    double lam_tent = lyapunov_exact(tent_map());
    double lam_doub = lyapunov_exact(doubling_map());
    bool ok = std::abs(std::abs(tent.subleading.value) - 0.25) <= 1e-12 &&
              std::abs(tent.mixing_rate - 2.0 * std::log(2.0)) <= 1e-12 &&
              std::abs(tent.mixing_rate - 2.0 * lam_tent) <= 1e-12 &&
              std::abs(std::abs(doubling.subleading.value) - 0.5) <= 1e-12 &&
              std::abs(doubling.mixing_rate - std::log(2.0)) <= 1e-12 &&
              std::abs(doubling.mixing_rate - lam_doub) <= 1e-12;
    report(1, "tent and doubling rates exact", ok,
           fmt("tent alpha=%.15f doubling alpha=%.15f", tent.mixing_rate, doubling.mixing_rate),
           t.seconds());
}

// 2: subleading eigenvalue of the Moebius family at c = -0.11.
void check_family_subleading() {
    Timer t;
    auto f = moebius(-0.11);
    auto op = build_chebyshev_operator(f, 1.0, 25);
    auto spec = chebyshev_spectrum(op);
    double l1 = std::abs(spec[1]);
    double alpha = -std::log(l1);
    bool ok = std::abs(l1 - 0.10415) <= 5e-4 && std::abs(alpha - 2.2619) <= 5e-3;
    report(2, "smooth family subleading value", ok, fmt("|lambda1|=%.6f alpha=%.5f", l1, alpha),
           t.seconds());
}

// 3: Lyapunov exponent by quadrature, cross-checked by orbit averages.
void check_lyapunov_two_ways() {
    Timer t;
    auto f = moebius(-0.11);
    double lam = lyapunov_smooth(f, 25);

    const int orbits = 8;
    const long long steps = 200000;
    std::vector<double> est(orbits);
    double mean = 0.0;
    for (int j = 0; j < orbits; ++j) {
        double x0 = -0.93 + 1.86 * (j + 0.5) / orbits;
        est[j] = lyapunov_orbit(f, x0, steps);
        mean += est[j] / orbits;
    }
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean) / (orbits - 1);
    double se = std::sqrt(var / orbits);

    bool quad_ok = std::abs(lam - 0.685) <= 5e-3;
    bool orbit_ok = std::abs(mean - lam) <= 3.0 * se;
    report(3, "Lyapunov exponent two ways", quad_ok && orbit_ok,
           fmt("quad=%.5f orbit=%.5f se=%.1e", lam, mean, se), t.seconds());
}

// 4: the decay rate genuinely exceeds twice the Lyapunov exponent for the
// smooth family, and the bound machinery classifies that as expected.
void check_expected_violation() {
    Timer t;
    auto f = moebius(-0.11);
    auto op = build_chebyshev_operator(f, 1.0, 25);
    auto spec = chebyshev_spectrum(op);
    double alpha = -std::log(std::abs(spec[1]));
    double lam = lyapunov_smooth(f, 25);
    auto ess = essential_radius_bound(f, 10);
    bool violated = alpha > 2.0 * lam;
    bool leading_ok = std::abs(std::abs(spec[0]) - 1.0) <= 1e-6;
    bool bv_ok = true;
    for (double s : ess.s) bv_ok = bv_ok && s <= lam + 1e-6;
    report(4, "analytic observables beat 2*Lyapunov", violated && leading_ok && bv_ok,
           fmt("alpha=%.4f 2*lam=%.4f bv bound holds", alpha, 2.0 * lam), t.seconds());
}

// 5: the sweep locates the subleading minimum at c = -0.11.
void check_sweep_minimum() {
    Timer t;
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double c = -0.24 + 0.01 * i;
        if (c > 0.49 + 1e-12) break;
        grid.push_back(c);
    }
    auto rows = spectrum_vs_parameter(grid, 1.0, 25, 2);
    double best_c = 0.0, best = 1e300;
    for (const auto& r : rows) {
        if (r.rank != 1) continue;
        double m = std::abs(r.value);
        if (m < best) {
            best = m;
            best_c = r.c;
        }
    }
    bool ok = std::abs(best_c - (-0.11)) <= 0.01 + 1e-12;
    report(5, "sweep minimum at c=-0.11", ok, fmt("argmin c=%.2f |lambda1|=%.5f", best_c, best),
           t.seconds());
}

// 6: every linearization level obeys the piecewise-linear bounds, and the
// level-6 Lyapunov exponent lands on the smooth value.
void check_linearization_ladder() {
    Timer t;
    auto f = moebius(-0.11);
    bool ok = true;
    std::string note;
    double lam6 = 0.0;
    for (int level = 1; level <= 6; ++level) {
        auto fn = linearize(f, level);
        auto verdict = verify_bounds(fn, 4);
        std::vector<double> beta_grid;
        for (int i = 0; i <= 16; ++i) beta_grid.push_back(0.25 * i);
        auto props = verify_pressure_properties(fn, beta_grid);
        double lam = lyapunov_exact(fn);
        double nu2 = std::exp(-verdict.minus_log_nu2);
        bool level_ok = verdict.ok() && props.ok() && nu2 >= std::exp(-2.0 * lam) - 1e-12;
        ok = ok && level_ok;
        if (!level_ok && note.empty()) note = fmt("level %.0f fails", level);
        if (level == 6) lam6 = lam;
    }
    ok = ok && std::abs(lam6 - 0.685) <= 0.02;
    if (note.empty()) note = fmt("levels 1..6 ok, Lyapunov(f6)=%.4f", lam6);
    report(6, "linearization ladder verified", ok, note, t.seconds());
}

// 7: the desk-scale correlation experiment reproduces both published rates.
void check_correlation_decay() {
    Timer t;
    auto f = moebius(-0.11);
    SimulationConfig cfg;
    cfg.n_max = 20;
    cfg.ensemble = 1000000;
    cfg.length = 2000;
    cfg.transient = 100;
    cfg.seed = 1;

    auto smooth_series = simulate(f, Observable::identity(), Observable::identity(), cfg);
    auto early = fit_decay(smooth_series, early_window());
    bool smooth_ok = std::abs(early.rate - 2.2619) <= 0.10 * 2.2619;

    auto step_series = simulate(f, Observable::step(0.5), Observable::step(0.5), cfg);
    auto tail = fit_decay(step_series, tail_window(step_series));
    bool tail_ok = std::abs(tail.rate - 0.685) <= 0.15 * 0.685;

    report(7, "correlation decay two regimes", smooth_ok && tail_ok,
           fmt("smooth rate=%.4f (want 2.2619), step tail rate=%.4f (want 0.685)", early.rate,
               tail.rate),
           t.seconds());
}

// 8: the full property suite on 100 random mixing maps.
void check_property_suite() {
    Timer t;
    int bad = 0;
    std::string first;
    for (int i = 0; i < 100; ++i) {
        RandomMapOptions opt;
        opt.signs = static_cast<SlopeSigns>(i % 3);
        auto map = random_markov_map(5000 + i, opt);

        auto verdict = verify_bounds(map, 4);
        std::vector<double> beta_grid;
        for (int j = 0; j <= 16; ++j) beta_grid.push_back(0.25 * j);
        auto props = verify_pressure_properties(map, beta_grid);

        bool map_ok = verdict.ok() && props.ok() && verdict.nu_identity_deviation == 0.0;
        if (!map_ok) {
            ++bad;
            if (first.empty()) first = fmt("first failure seed=%.0f", 5000.0 + i);
        }
    }
    report(8, "property suite, 100 random maps", bad == 0,
           bad == 0 ? "all identities and chains hold" : first + fmt(" (%.0f bad)", (double)bad),
           t.seconds());
}

// 9: derivative growth floors never exceed the Lyapunov exponent across the
// parameter range.
void check_bv_floors() {
    Timer t;
    bool ok = true;
    double worst = -1e300;
    for (int i = 0; i < 10; ++i) {
        double c = -0.24 + (0.49 - (-0.24)) * i / 9.0;
        auto f = moebius(c);
        double lam = lyapunov_smooth(f, 25);
        auto ess = essential_radius_bound(f, 10);
        for (double s : ess.s) {
            worst = std::max(worst, s - lam);
            ok = ok && s <= lam + 1e-6;
        }
    }
    report(9, "BV growth floors under Lyapunov", ok, fmt("max(s_k - Lyapunov)=%.2e", worst),
           t.seconds());
}

// 10: block-triangular spectra are unions of diagonal-block spectra and are
// stable when the degree grows.
void check_block_nesting() {
    Timer t;
    const int degree = 3;
    bool ok = true;
    std::string note;
    for (int i = 0; i < 50 && ok; ++i) {
        RandomMapOptions opt;
        opt.signs = static_cast<SlopeSigns>(i % 3);
        opt.require_invertible_transition = true;
        opt.max_branches = 4;
        auto map = random_markov_map(9000 + i, opt);

        auto full = eigenvalues(assemble(map, 1.0, degree).matrix);
        std::vector<std::complex<double>> blocks;
        for (int m = 0; m <= degree; ++m) {
            auto ev = eigenvalues(transfer_block(map, 1.0, m, m));
            blocks.insert(blocks.end(), ev.begin(), ev.end());
        }
        auto key = [](const std::complex<double>& z) {
            return std::make_pair(-std::abs(z), std::make_pair(-z.real(), -z.imag()));
        };
        std::sort(blocks.begin(), blocks.end(),
                  [&](const auto& a, const auto& b) { return key(a) < key(b); });
        if (full.size() != blocks.size()) {
            ok = false;
            note = "size mismatch";
            break;
        }
        for (size_t j = 0; j < full.size(); ++j) {
            if (std::abs(full[j] - blocks[j]) > 1e-8) {
                ok = false;
                note = fmt("union mismatch %.2e", std::abs(full[j] - blocks[j]));
            }
        }

        auto bigger = eigenvalues(assemble(map, 1.0, degree + 1).matrix);
        std::vector<bool> used(bigger.size(), false);
        for (const auto& z : full) {
            bool found = false;
            for (size_t j = 0; j < bigger.size() && !found; ++j) {
                if (!used[j] && std::abs(bigger[j] - z) <= 1e-8) {
                    used[j] = true;
                    found = true;
                }
            }
            if (!found) {
                ok = false;
                note = "eigenvalue lost under degree growth";
            }
        }
    }
    if (note.empty()) note = "50 maps, spectra nest to 1e-8";
    report(10, "block spectra union and nesting", ok, note, t.seconds());
}

}  // namespace

int main() {
    Timer total;
    check_textbook_rates();
    check_family_subleading();
    check_lyapunov_two_ways();
    check_expected_violation();
    check_sweep_minimum();
    check_linearization_ladder();
    check_correlation_decay();
    check_property_suite();
    check_bv_floors();
    check_block_nesting();
    std::printf("%d of 10 passed (%.1fs total)\n", 10 - g_failures, total.seconds());
    return g_failures;
}
