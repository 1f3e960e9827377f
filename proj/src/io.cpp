#include "dynspec/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dynspec {

using ojson = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::InvalidArgument, "cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::InvalidArgument, "cannot write file: " + path);
    out << content;
    if (!out) raise(Errc::InvalidArgument, "write failed: " + path);
}

namespace {

ojson parse_json(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const std::exception& e) {
        raise(Errc::InvalidArgument, std::string("invalid JSON: ") + e.what());
    }
}

std::vector<double> number_array(const ojson& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        raise(Errc::InvalidArgument, std::string("expected array field: ") + key);
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) raise(Errc::InvalidArgument, std::string("non-numeric entry in ") + key);
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

LoadedMap parse_map(const std::string& json_text) {
    ojson j = parse_json(json_text);
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        raise(Errc::InvalidArgument, "map description needs a string \"type\" field");
    const std::string type = j["type"].get<std::string>();

    LoadedMap out;
    if (type == "tent") {
        out.piecewise = tent_map();
    } else if (type == "doubling") {
        out.piecewise = doubling_map();
    } else if (type == "golden_mean") {
        out.piecewise = golden_mean_map();
    } else if (type == "moebius") {
        if (!j.contains("c") || !j["c"].is_number())
            raise(Errc::InvalidArgument, "moebius map needs a numeric \"c\" field");
        out.smooth = moebius(j["c"].get<double>());
    } else if (type == "piecewise_linear") {
        std::vector<double> bp = number_array(j, "breakpoints");
        if (!j.contains("branches") || !j["branches"].is_array())
            raise(Errc::InvalidArgument, "expected array field: branches");
        std::vector<double> slopes, icpts;
        for (const auto& b : j["branches"]) {
            if (!b.is_object() || !b.contains("slope") || !b.contains("intercept") ||
                !b["slope"].is_number() || !b["intercept"].is_number())
                raise(Errc::InvalidArgument, "each branch needs numeric slope and intercept");
            slopes.push_back(b["slope"].get<double>());
            icpts.push_back(b["intercept"].get<double>());
        }
        out.piecewise = PiecewiseLinearMarkovMap(bp, slopes, icpts);
    } else {
        raise(Errc::InvalidArgument, "unknown map type: " + type);
    }
    return out;
}

LoadedMap load_map(const std::string& path) { return parse_map(read_file(path)); }

std::string map_json(const PiecewiseLinearMarkovMap& map) {
    ojson j;
    j["type"] = "piecewise_linear";
    j["breakpoints"] = map.breakpoints();
    ojson branches = ojson::array();
    for (int k = 0; k < map.size(); ++k) {
        ojson b;
        b["slope"] = map.slope(k);
        b["intercept"] = map.intercept(k);
        branches.push_back(std::move(b));
    }
    j["branches"] = std::move(branches);
    return j.dump(2) + "\n";
}

std::string map_json(const SmoothFullBranchMap& map) {
    if (map.family() != "moebius")
        raise(Errc::InvalidArgument, "only the moebius family serializes to JSON");
    ojson j;
    j["type"] = "moebius";
    j["c"] = map.parameter();
    return j.dump(2) + "\n";
}

namespace {

ojson eigen_entry(const BlockEigenvalue& e) {
    ojson j;
    j["re"] = e.value.real();
    j["im"] = e.value.imag();
    j["modulus"] = std::abs(e.value);
    j["block"] = e.block;
    return j;
}

std::vector<double> constant_values(const PiecewisePolynomial& p) {
    if (!p.map || p.degree() != 0)
        raise(Errc::InvalidArgument, "density export expects a piecewise constant function");
    std::vector<double> out;
    out.reserve(p.coeff.size());
    for (const auto& c : p.coeff) out.push_back(c[0]);
    return out;
}

}  // namespace

std::string spectral_report_json(const SpectralReport& rep) {
    ojson j;
    j["beta"] = rep.beta;
    j["degree"] = rep.degree;
    j["pressure"] = rep.pressure;
    j["lyapunov"] = rep.lyapunov;
    j["mixing_rate"] = rep.mixing_rate;
    j["leading"] = eigen_entry(rep.leading);
    j["subleading"] = eigen_entry(rep.subleading);
    j["subleading_count"] = rep.subleading_count;
    ojson eigs = ojson::array();
    for (const auto& e : rep.spectrum) eigs.push_back(eigen_entry(e));
    j["eigenvalues"] = std::move(eigs);
    j["density"] = constant_values(rep.density);
    return j.dump(2) + "\n";
}

std::string spectrum_csv(const SpectralReport& rep) {
    std::string out = "block,re,im,modulus\n";
    for (const auto& e : rep.spectrum) {
        out += std::to_string(e.block);
        out += ',';
        out += format_double(e.value.real());
        out += ',';
        out += format_double(e.value.imag());
        out += ',';
        out += format_double(std::abs(e.value));
        out += '\n';
    }
    return out;
}

std::string density_csv(const PiecewisePolynomial& density) {
    std::vector<double> values = constant_values(density);
    const PiecewiseLinearMarkovMap& map = *density.map;
    std::string out = "element,lo,hi,value\n";
    for (int k = 0; k < map.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_double(map.element(k).lo);
        out += ',';
        out += format_double(map.element(k).hi);
        out += ',';
        out += format_double(values[static_cast<std::size_t>(k)]);
        out += '\n';
    }
    return out;
}

std::string pressure_csv(const std::vector<double>& betas, const std::vector<double>& pressures) {
    if (betas.size() != pressures.size())
        raise(Errc::DimensionMismatch, "beta and pressure arrays differ in length");
    std::string out = "beta,pressure\n";
    for (std::size_t i = 0; i < betas.size(); ++i) {
        out += format_double(betas[i]);
        out += ',';
        out += format_double(pressures[i]);
        out += '\n';
    }
    return out;
}

std::string smooth_spectrum_csv(const std::vector<std::complex<double>>& eigs) {
    std::string out = "rank,re,im,modulus\n";
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(eigs[i].real());
        out += ',';
        out += format_double(eigs[i].imag());
        out += ',';
        out += format_double(std::abs(eigs[i]));
        out += '\n';
    }
    return out;
}

std::string smooth_density_csv(const DensityInterpolant& density, int samples) {
    if (samples < 2) raise(Errc::InvalidArgument, "need at least 2 samples");
    std::string out = "x,value\n";
    const double lo = density.domain.lo;
    const double step = density.domain.length() / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        double x = i + 1 == samples ? density.domain.hi : lo + step * i;
        out += format_double(x);
        out += ',';
        out += format_double(density.eval(x));
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "c,rank,re,im,modulus\n";
    for (const auto& r : rows) {
        out += format_double(r.c);
        out += ',';
        out += std::to_string(r.rank);
        out += ',';
        out += format_double(r.value.real());
        out += ',';
        out += format_double(r.value.imag());
        out += ',';
        out += format_double(std::abs(r.value));
        out += '\n';
    }
    return out;
}

std::string series_csv(const CorrelationSeries& series) {
    std::string out = "n,corr,normalized,std_error\n";
    const double c0 = series.lagged.empty() ? 0.0 : series.lagged[0];
    for (std::size_t n = 0; n < series.lagged.size(); ++n) {
        out += std::to_string(n);
        out += ',';
        out += format_double(series.lagged[n]);
        out += ',';
        out += format_double(c0 != 0.0 ? series.lagged[n] / c0 : 0.0);
        out += ',';
        out += format_double(series.std_error[n]);
        out += '\n';
    }
    return out;
}

std::string decay_fit_json(const DecayFit& fit) {
    ojson j;
    j["rate"] = fit.rate;
    j["window"] = ojson{{"first", fit.window.first}, {"last", fit.window.last}};
    j["lags_used"] = fit.lags_used;
    j["residual_rms"] = fit.residual_rms;
    return j.dump(2) + "\n";
}

std::string bounds_verdict_json(const BoundsVerdict& v) {
    ojson j;
    j["ok"] = v.ok();
    j["alpha"] = v.alpha;
    j["lyapunov"] = v.lyapunov;
    j["minus_log_nu2"] = v.minus_log_nu2;
    j["minus_p3"] = v.minus_p3;
    j["two_lambda_ok"] = v.two_lambda_ok;
    j["chain_ok"] = v.chain_ok;
    j["same_sign_applicable"] = v.same_sign_applicable;
    j["minus_p2"] = v.minus_p2;
    j["one_lambda_ok"] = v.one_lambda_ok;
    j["nu_identity_deviation"] = v.nu_identity_deviation;
    j["nu_identity_ok"] = v.nu_identity_ok;
    j["block_bound_max_residual"] = v.block_bound_max_residual;
    j["block_bound_ok"] = v.block_bound_ok;
    return j.dump(2) + "\n";
}

std::string pressure_properties_json(const PressureProperties& p) {
    ojson j;
    j["ok"] = p.ok();
    j["p_at_one"] = p.p_at_one;
    j["p1_ok"] = p.p1_ok;
    j["convexity_worst"] = p.convexity_worst;
    j["convex_ok"] = p.convex_ok;
    j["decreasing_ok"] = p.decreasing_ok;
    j["derivative_at_one"] = p.derivative_at_one;
    j["derivative_residual"] = p.derivative_residual;
    j["derivative_ok"] = p.derivative_ok;
    return j.dump(2) + "\n";
}

std::string essential_radius_json(const EssentialRadiusReport& rep) {
    ojson j;
    j["s"] = rep.s;
    j["sigma"] = rep.sigma;
    j["bv_rate_bound"] = rep.bv_rate_bound;
    return j.dump(2) + "\n";
}

std::string validation_json(const ValidationReport& rep) {
    ojson j;
    j["ok"] = rep.ok();
    j["partition_ok"] = rep.partition_ok;
    j["expanding_ok"] = rep.expanding_ok;
    j["markov_ok"] = rep.markov_ok;
    ojson issues = ojson::array();
    for (const auto& issue : rep.issues) {
        ojson it;
        it["code"] = errc_name(issue.code);
        it["detail"] = issue.detail;
        it["branch"] = issue.branch;
        it["element"] = issue.element;
        issues.push_back(std::move(it));
    }
    j["issues"] = std::move(issues);
    if (rep.transition) {
        const auto& a = *rep.transition;
        ojson rows = ojson::array();
        for (int k = 0; k < a.size(); ++k) {
            ojson row = ojson::array();
            for (int l = 0; l < a.size(); ++l) row.push_back(a.at(k, l) ? 1 : 0);
            rows.push_back(std::move(row));
        }
        j["transition"] = std::move(rows);
    }
    return j.dump(2) + "\n";
}

}  // namespace dynspec
