#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynspec/chebyshev_transfer.hpp"
#include "dynspec/correlation.hpp"
#include "dynspec/map_model.hpp"
#include "dynspec/spectral.hpp"

namespace dynspec {

// "%.17g": shortest fixed-width form that round-trips a double exactly.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// A map description holds exactly one of the two representations.
struct LoadedMap {
    std::optional<PiecewiseLinearMarkovMap> piecewise;
    std::optional<SmoothFullBranchMap> smooth;

    bool is_piecewise() const { return piecewise.has_value(); }
};

// Accepts {"type": "piecewise_linear", "breakpoints": [...],
// "branches": [{"slope": s, "intercept": d}, ...]},
// {"type": "moebius", "c": ...}, or one of the named fixtures
// {"type": "tent" | "doubling" | "golden_mean"}.
LoadedMap parse_map(const std::string& json_text);
LoadedMap load_map(const std::string& path);

std::string map_json(const PiecewiseLinearMarkovMap& map);
std::string map_json(const SmoothFullBranchMap& map);

std::string spectral_report_json(const SpectralReport& rep);
std::string spectrum_csv(const SpectralReport& rep);               // block,re,im,modulus
// Piecewise constant density, one row per element: element,lo,hi,value.
std::string density_csv(const PiecewisePolynomial& density);
std::string pressure_csv(const std::vector<double>& betas,
                         const std::vector<double>& pressures);    // beta,pressure
std::string smooth_spectrum_csv(const std::vector<std::complex<double>>& eigs);  // rank,re,im,modulus
std::string smooth_density_csv(const DensityInterpolant& density, int samples);  // x,value
std::string sweep_csv(const std::vector<SweepRow>& rows);          // c,rank,re,im,modulus
std::string series_csv(const CorrelationSeries& series);           // n,corr,normalized,std_error
std::string decay_fit_json(const DecayFit& fit);
std::string bounds_verdict_json(const BoundsVerdict& verdict);
std::string pressure_properties_json(const PressureProperties& props);
std::string essential_radius_json(const EssentialRadiusReport& rep);
std::string validation_json(const ValidationReport& rep);

}  // namespace dynspec
