#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "dynspec/map_model.hpp"

namespace dynspec {

// Collocation of the weighted transfer operator on polynomials: values on
// first-kind Chebyshev points, entry (i, j) = sum over branches b of
// |phi_b'(x_i)|^beta * l_j(phi_b(x_i)), with phi_b the branch inverse and
// l_j the Lagrange cardinal polynomial evaluated barycentrically.
struct ChebyshevOperator {
    int order = 0;
    double beta = 1.0;
    Interval domain;
    std::vector<double> nodes;  // ascending
    std::vector<double> bary;   // barycentric weights (common scale dropped)
    std::vector<double> quad;   // interpolatory quadrature weights
    Eigen::MatrixXd matrix;
};

ChebyshevOperator build_chebyshev_operator(const SmoothFullBranchMap& f, double beta, int order);

// Eigenvalues of the collocation matrix, sorted by descending modulus.
std::vector<std::complex<double>> chebyshev_spectrum(const ChebyshevOperator& op);

// Polynomial interpolant through node values, evaluated barycentrically.
struct DensityInterpolant {
    Interval domain;
    std::vector<double> nodes;
    std::vector<double> bary;
    std::vector<double> quad;
    std::vector<double> values;

    double eval(double x) const;
    double integral() const;  // exact integral of the interpolant
};

// Fixed density of the unweighted operator: leading eigenvector at beta = 1,
// normalized so the interpolant has unit integral.
DensityInterpolant invariant_density_smooth(const SmoothFullBranchMap& f, int order);

// Lyapunov exponent: integral of log|f'| against the fixed density, by
// 64-point Gauss-Legendre quadrature on each branch domain.
double lyapunov_smooth(const SmoothFullBranchMap& f, int order);

struct SweepRow {
    double c = 0.0;
    int rank = 0;
    std::complex<double> value;
};

// Leading `count` eigenvalues of the two-branch family operator for each
// parameter in the grid.
std::vector<SweepRow> spectrum_vs_parameter(const std::vector<double>& c_grid, double beta,
                                            int order, int count = 6);

// Growth floor of k-step derivatives: s_k = (1/k) log inf |(f^k)'|, minimized
// over a fine grid with golden-section refinement around each local minimum.
// sigma[k-1] = exp(-s_k) estimates the essential spectral radius; the decay
// rate of bounded-variation observables is bounded by max_k s_k.
struct EssentialRadiusReport {
    std::vector<double> s;      // s[k-1] = s_k
    std::vector<double> sigma;  // exp(-s_k)
    double bv_rate_bound = 0.0;
};

EssentialRadiusReport essential_radius_bound(const SmoothFullBranchMap& f, int k_max);

}  // namespace dynspec
