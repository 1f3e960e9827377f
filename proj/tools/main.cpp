#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dynspec/chebyshev_transfer.hpp"
#include "dynspec/correlation.hpp"
#include "dynspec/io.hpp"
#include "dynspec/linearize.hpp"
#include "dynspec/map_model.hpp"
#include "dynspec/spectral.hpp"

namespace {

using namespace dynspec;
using ojson = nlohmann::ordered_json;

int exit_code_for(Errc c) {
    switch (c) {
        case Errc::InvalidArgument:
        case Errc::NotAPartition:
        case Errc::NotExpanding:
        case Errc::NotMarkov:
        case Errc::NotMixing:
        case Errc::OutOfDomain:
        case Errc::NoSuchBranch:
        case Errc::ParameterOutOfRange:
        case Errc::DegreeOrder:
        case Errc::DegreeTooLarge:
        case Errc::DimensionMismatch:
        case Errc::LevelTooDeep:
            return 2;
        default:
            return 3;
    }
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file(out_path, content);
}

const PiecewiseLinearMarkovMap& require_piecewise(const LoadedMap& m, const char* what) {
    if (!m.piecewise)
        raise(Errc::InvalidArgument, std::string(what) + " needs a piecewise linear map");
    return *m.piecewise;
}

const SmoothFullBranchMap& require_smooth(const LoadedMap& m, const char* what) {
    if (!m.smooth)
        raise(Errc::InvalidArgument, std::string(what) + " needs a smooth full-branch map");
    return *m.smooth;
}

Observable parse_observable(const std::string& s) {
    if (s == "identity") return Observable::identity();
    if (s.rfind("step:", 0) == 0) {
        try {
            return Observable::step(std::stod(s.substr(5)));
        } catch (const std::exception&) {
            raise(Errc::InvalidArgument, "bad step size in observable: " + s);
        }
    }
    raise(Errc::InvalidArgument, "unknown observable (use identity or step:<h>): " + s);
}

std::vector<double> parse_grid(const std::string& s) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0 || hi < lo)
        raise(Errc::InvalidArgument, "grid must be lo:hi:step with step > 0, got: " + s);
    std::vector<double> out;
    int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(lo + step * i);
    return out;
}

ojson complex_entry(const std::complex<double>& z) {
    return ojson{{"re", z.real()}, {"im", z.imag()}, {"modulus", std::abs(z)}};
}

int run_validate(const std::string& map_path, double tol, const std::string& out) {
    LoadedMap m = load_map(map_path);
    if (m.smooth) {
        ojson j;
        j["ok"] = true;
        j["map_kind"] = "smooth";
        j["family"] = m.smooth->family();
        j["branches"] = m.smooth->size();
        emit(out, j.dump(2) + "\n");
        return 0;
    }
    ValidationReport rep = validate(*m.piecewise, tol);
    emit(out, validation_json(rep));
    return rep.ok() ? 0 : 1;
}

int run_spectrum(const std::string& map_path, int degree, const std::string& format,
                 const std::string& out) {
    LoadedMap loaded = load_map(map_path);
    const auto& map = require_piecewise(loaded, "spectrum");
    SpectralReport rep = mixing_rate(map, degree);
    emit(out, format == "csv" ? spectrum_csv(rep) : spectral_report_json(rep));
    return 0;
}

int run_pressure(const std::string& map_path, double beta, const std::string& grid,
                 const std::string& out) {
    LoadedMap loaded = load_map(map_path);
    const auto& map = require_piecewise(loaded, "pressure");
    if (!grid.empty()) {
        std::vector<double> betas = parse_grid(grid);
        std::vector<double> values;
        values.reserve(betas.size());
        for (double b : betas) values.push_back(pressure(map, b));
        emit(out, pressure_csv(betas, values));
        return 0;
    }
    double p = pressure(map, beta);
    ojson j;
    j["beta"] = beta;
    j["pressure"] = p;
    j["nu0"] = std::exp(p);
    emit(out, j.dump(2) + "\n");
    return 0;
}

int run_lyapunov(const LoadedMap& m, int order, bool have_x0, double x0, long long steps,
                 const std::string& out) {
    ojson j;
    if (m.is_piecewise()) {
        j["exact"] = lyapunov_exact(*m.piecewise);
    } else {
        j["collocation"] = lyapunov_smooth(*m.smooth, order);
        j["order"] = order;
    }
    if (have_x0) {
        j["orbit"] = m.is_piecewise() ? lyapunov_orbit(*m.piecewise, x0, steps)
                                      : lyapunov_orbit(*m.smooth, x0, steps);
        j["x0"] = x0;
        j["orbit_steps"] = steps;
    }
    emit(out, j.dump(2) + "\n");
    return 0;
}

int run_linearize(const std::string& map_path, int level, const std::string& out) {
    LoadedMap loaded = load_map(map_path);
    const auto& f = require_smooth(loaded, "linearize");
    PiecewiseLinearMarkovMap m = linearize(f, level);
    emit(out, map_json(m));
    return 0;
}

int run_cheb(const std::string& map_path, double beta, int order, int count, int essential_kmax,
             int density_samples, const std::string& format, const std::string& out) {
    LoadedMap loaded = load_map(map_path);
    const auto& f = require_smooth(loaded, "cheb");
    if (density_samples > 0) {
        emit(out, smooth_density_csv(invariant_density_smooth(f, order), density_samples));
        return 0;
    }
    ChebyshevOperator op = build_chebyshev_operator(f, beta, order);
    std::vector<std::complex<double>> eigs = chebyshev_spectrum(op);
    if (format == "csv") {
        emit(out, smooth_spectrum_csv(eigs));
        return 0;
    }
    ojson j;
    j["order"] = order;
    j["beta"] = beta;
    j["lambda0"] = complex_entry(eigs[0]);
    j["lambda1"] = complex_entry(eigs[1]);
    j["lambda1_modulus"] = std::abs(eigs[1]);
    j["mixing_rate"] = -std::log(std::abs(eigs[1]));
    j["lyapunov"] = lyapunov_smooth(f, order);
    ojson list = ojson::array();
    int shown = std::min<int>(count, static_cast<int>(eigs.size()));
    for (int i = 0; i < shown; ++i) list.push_back(complex_entry(eigs[static_cast<std::size_t>(i)]));
    j["eigenvalues"] = std::move(list);
    if (essential_kmax > 0)
        j["essential"] = ojson::parse(essential_radius_json(essential_radius_bound(f, essential_kmax)));
    emit(out, j.dump(2) + "\n");
    return 0;
}

int run_sweep(double from, double to, double step, double beta, int order, int count,
              const std::string& out) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g:%.17g:%.17g", from, to, step);
    std::vector<double> grid = parse_grid(buf);
    emit(out, sweep_csv(spectrum_vs_parameter(grid, beta, order, count)));
    return 0;
}

int run_correlate(const LoadedMap& m, const std::string& phi_s, const std::string& psi_s,
                  const SimulationConfig& cfg, const std::string& fit,
                  const std::string& series_out, const std::string& out) {
    Observable phi = parse_observable(phi_s);
    Observable psi = psi_s.empty() ? phi : parse_observable(psi_s);
    CorrelationSeries series = m.is_piecewise() ? simulate(*m.piecewise, phi, psi, cfg)
                                                : simulate(*m.smooth, phi, psi, cfg);
    if (!series_out.empty()) write_file(series_out, series_csv(series));
    if (fit == "none") {
        emit(out, series_csv(series));
        return 0;
    }
    LagWindow window = fit == "early" ? early_window() : tail_window(series);
    emit(out, decay_fit_json(fit_decay(series, window)));
    return 0;
}

int run_verify(const LoadedMap& m, int degree, int order, int kmax, const std::string& out) {
    if (m.is_piecewise()) {
        const auto& map = *m.piecewise;
        BoundsVerdict verdict = verify_bounds(map, degree);
        std::vector<double> grid;
        for (int i = 0; i <= 16; ++i) grid.push_back(0.25 * i);
        PressureProperties props = verify_pressure_properties(map, grid);
        bool ok = verdict.ok() && props.ok();
        ojson j;
        j["map_kind"] = "piecewise_linear";
        j["ok"] = ok;
        j["bounds"] = ojson::parse(bounds_verdict_json(verdict));
        j["pressure"] = ojson::parse(pressure_properties_json(props));
        emit(out, j.dump(2) + "\n");
        return ok ? 0 : 1;
    }

    const auto& f = *m.smooth;
    ChebyshevOperator op = build_chebyshev_operator(f, 1.0, order);
    std::vector<std::complex<double>> eigs = chebyshev_spectrum(op);
    double leading = std::abs(eigs[0]);
    double alpha = -std::log(std::abs(eigs[1]));
    double lam = lyapunov_smooth(f, order);
    EssentialRadiusReport ess = essential_radius_bound(f, kmax);
    bool leading_ok = std::abs(leading - 1.0) <= 1e-6;
    bool bv_ok = true;
    for (double s : ess.s) bv_ok = bv_ok && s <= lam + 1e-6;
    bool ok = leading_ok && bv_ok;

    ojson j;
    j["map_kind"] = "smooth";
    j["ok"] = ok;
    j["leading_modulus"] = leading;
    j["leading_ok"] = leading_ok;
    j["mixing_rate"] = alpha;
    j["lyapunov"] = lam;
    j["two_lambda_violated"] = alpha > 2.0 * lam;
    if (alpha > 2.0 * lam)
        j["note"] = "mixing rate exceeds twice the Lyapunov exponent; expected for analytic "
                    "observables, the bounded-variation bound below still holds";
    j["bv_chain_ok"] = bv_ok;
    j["bv"] = ojson::parse(essential_radius_json(ess));
    emit(out, j.dump(2) + "\n");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transfer-operator spectra, pressure, and correlation decay for expanding "
                 "interval maps"};
    app.require_subcommand(1);

    std::string map_path, out_path, format = "json", grid_s, phi_s = "identity", psi_s;
    std::string fit = "none", series_out;
    double beta = 1.0, tol = 1e-9, x0 = 0.0;
    double from = -0.24, to = 0.49, step = 0.01;
    int degree = 4, order = 25, level = 1, count = 6, kmax = 10, density_samples = 0;
    int essential_kmax = 0;
    long long orbit_steps = 1'000'000;
    SimulationConfig cfg;
    cfg.threads = 0;

    auto add_map = [&](CLI::App* sub) {
        sub->add_option("map", map_path, "map description (JSON file)")->required();
    };
    auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", out_path, "output file (default stdout)");
    };

    CLI::App* validate_cmd = app.add_subcommand("validate", "check a map definition");
    add_map(validate_cmd);
    add_out(validate_cmd);
    validate_cmd->add_option("--tol", tol, "breakpoint matching tolerance");

    CLI::App* spectrum_cmd =
        app.add_subcommand("spectrum", "operator spectrum on piecewise polynomials");
    add_map(spectrum_cmd);
    add_out(spectrum_cmd);
    spectrum_cmd->add_option("--degree", degree, "polynomial degree (>= 2)");
    spectrum_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

    CLI::App* pressure_cmd = app.add_subcommand("pressure", "topological pressure");
    add_map(pressure_cmd);
    add_out(pressure_cmd);
    pressure_cmd->add_option("--beta", beta, "weight exponent");
    pressure_cmd->add_option("--grid", grid_s, "beta grid lo:hi:step (emits CSV)");

    CLI::App* lyap_cmd = app.add_subcommand("lyapunov", "Lyapunov exponent");
    add_map(lyap_cmd);
    add_out(lyap_cmd);
    lyap_cmd->add_option("--order", order, "collocation order for smooth maps");
    CLI::Option* x0_opt = lyap_cmd->add_option("--x0", x0, "also run one orbit from this point");
    lyap_cmd->add_option("--steps", orbit_steps, "orbit length");

    CLI::App* lin_cmd =
        app.add_subcommand("linearize", "piecewise linear model on cylinder sets");
    add_map(lin_cmd);
    lin_cmd->add_option("--level", level, "cylinder level (>= 1)")->required();
    lin_cmd->add_option("--out,--emit", out_path, "output file (default stdout)");

    CLI::App* cheb_cmd = app.add_subcommand("cheb", "collocation spectrum of a smooth map");
    add_map(cheb_cmd);
    add_out(cheb_cmd);
    cheb_cmd->add_option("--beta", beta, "weight exponent");
    cheb_cmd->add_option("--order", order, "collocation order");
    cheb_cmd->add_option("--count", count, "eigenvalues to list");
    cheb_cmd->add_option("--essential", essential_kmax, "include k-step derivative floors up to k");
    cheb_cmd->add_option("--density", density_samples, "emit the invariant density at this many points");
    cheb_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "subleading eigenvalues across the family");
    add_out(sweep_cmd);
    sweep_cmd->add_option("--from", from, "first parameter value");
    sweep_cmd->add_option("--to", to, "last parameter value");
    sweep_cmd->add_option("--step", step, "parameter step");
    sweep_cmd->add_option("--beta", beta, "weight exponent");
    sweep_cmd->add_option("--order", order, "collocation order");
    sweep_cmd->add_option("--count", count, "eigenvalues per parameter");

    CLI::App* corr_cmd = app.add_subcommand("correlate", "seeded ensemble correlation series");
    add_map(corr_cmd);
    add_out(corr_cmd);
    corr_cmd->add_option("--phi", phi_s, "observable: identity or step:<h>");
    corr_cmd->add_option("--psi", psi_s, "second observable (default: same as --phi)");
    corr_cmd->add_option("--nmax", cfg.n_max, "largest lag");
    corr_cmd->add_option("--ensemble", cfg.ensemble, "number of initial conditions");
    corr_cmd->add_option("--length", cfg.length, "averaging window length");
    corr_cmd->add_option("--transient", cfg.transient, "steps discarded before averaging");
    corr_cmd->add_option("--seed", cfg.seed, "ensemble seed");
    corr_cmd->add_option("--shards", cfg.shards, "batching unit for errors and parallelism");
    corr_cmd->add_option("--threads", cfg.threads, "worker cap (0 = all cores)")
        ->envname("DYN_SPEC_THREADS");
    corr_cmd->add_option("--fit", fit, "decay fit instead of the series")
        ->check(CLI::IsMember({"none", "early", "tail"}));
    corr_cmd->add_option("--series-out", series_out, "also write the series CSV here");

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "check the decay-rate bounds and pressure properties");
    add_map(verify_cmd);
    add_out(verify_cmd);
    verify_cmd->add_option("--degree", degree, "polynomial degree for piecewise linear maps");
    verify_cmd->add_option("--order", order, "collocation order for smooth maps");
    verify_cmd->add_option("--kmax", kmax, "derivative-floor depth for smooth maps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*validate_cmd) return run_validate(map_path, tol, out_path);
        if (*spectrum_cmd) return run_spectrum(map_path, degree, format, out_path);
        if (*pressure_cmd) return run_pressure(map_path, beta, grid_s, out_path);
        if (*lyap_cmd)
            return run_lyapunov(load_map(map_path), order, x0_opt->count() > 0, x0, orbit_steps,
                                out_path);
        if (*lin_cmd) return run_linearize(map_path, level, out_path);
        if (*cheb_cmd)
            return run_cheb(map_path, beta, order, count, essential_kmax, density_samples, format,
                            out_path);
        if (*sweep_cmd) return run_sweep(from, to, step, beta, order, count, out_path);
        if (*corr_cmd)
            return run_correlate(load_map(map_path), phi_s, psi_s, cfg, fit, series_out, out_path);
        if (*verify_cmd) return run_verify(load_map(map_path), degree, order, kmax, out_path);
    } catch (const Error& e) {
        std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
