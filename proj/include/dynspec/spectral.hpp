#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "dynspec/map_model.hpp"
#include "dynspec/transfer_matrix.hpp"

namespace dynspec {

// All eigenvalues of a dense real matrix, sorted by descending modulus with
// ties broken by descending real part, then descending imaginary part.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a);

struct PerronResult {
    double value = 0.0;
    Eigen::VectorXd vector;  // entrywise positive, normalized to unit sum
    int iterations = 0;
};

// Leading eigenvalue and eigenvector of an entrywise nonnegative matrix by
// two-sided power iteration; the returned value is the bilinear Rayleigh
// quotient u'Av / u'v, accurate well beyond the iterate tolerance.
PerronResult perron(const Eigen::MatrixXd& a, double tol = 1e-13, int max_iter = 500000);

// Topological pressure P(beta) = log of the leading eigenvalue of the
// degree-0 block. P(1) = 0, P is convex, strictly decreasing, and
// P'(1) = -lyapunov_exact(map).
double pressure(const PiecewiseLinearMarkovMap& map, double beta);
double pressure_derivative(const PiecewiseLinearMarkovMap& map, double beta, double step = 1e-4);

// Piecewise constant fixed density of the unweighted operator, normalized to
// unit integral.
PiecewisePolynomial invariant_density(const PiecewiseLinearMarkovMap& map);

// Lyapunov exponent sum_k mu_k log|g_k| with mu_k the invariant mass of
// element k.
double lyapunov_exact(const PiecewiseLinearMarkovMap& map);

struct BlockEigenvalue {
    std::complex<double> value;
    int block = 0;  // diagonal block (polynomial degree) of origin
};

struct SpectralReport {
    double beta = 1.0;
    int degree = 0;
    std::vector<BlockEigenvalue> spectrum;  // sorted by descending modulus
    BlockEigenvalue leading;                // the unit eigenvalue
    BlockEigenvalue subleading;             // largest of the rest
    int subleading_count = 0;               // multiplicity at |subleading|
    double pressure = 0.0;
    double lyapunov = 0.0;
    double mixing_rate = 0.0;  // -log|subleading|
    PiecewisePolynomial density;
};

// Spectrum of the degree-M operator at beta = 1 from its diagonal blocks,
// with the decay rate read off the subleading eigenvalue. Requires a
// topologically mixing map and M >= 2.
SpectralReport mixing_rate(const PiecewiseLinearMarkovMap& map, int degree);

struct BoundsVerdict {
    double alpha = 0.0;       // -log|subleading|
    double lyapunov = 0.0;    // exact exponent
    double minus_log_nu2 = 0.0;
    double minus_p3 = 0.0;
    bool two_lambda_ok = false;   // alpha <= 2*lyapunov
    bool chain_ok = false;        // alpha <= -log nu_2(1) = -P(3) <= 2*lyapunov
    bool same_sign_applicable = false;
    bool one_lambda_ok = false;   // alpha <= -P(2) <= lyapunov (same-sign maps)
    double minus_p2 = 0.0;
    double nu_identity_deviation = 0.0;  // max entrywise |T22(1) - T00(3)|
    bool nu_identity_ok = false;
    double block_bound_max_residual = 0.0;  // max_m r(Tmm) - nu0/min|g|
    bool block_bound_ok = false;

    bool ok() const {
        return two_lambda_ok && chain_ok && (!same_sign_applicable || one_lambda_ok) &&
               nu_identity_ok && block_bound_ok;
    }
};

// Decay-rate inequalities against the exact Lyapunov exponent, plus the
// structural identities between blocks at shifted weights.
BoundsVerdict verify_bounds(const PiecewiseLinearMarkovMap& map, int degree);

struct PressureProperties {
    double p_at_one = 0.0;
    bool p1_ok = false;  // |P(1)| <= 1e-10
    double convexity_worst = 0.0;
    bool convex_ok = false;  // midpoint convexity over all grid pairs, 1e-9
    bool decreasing_ok = false;
    double derivative_at_one = 0.0;
    double derivative_residual = 0.0;  // |P'(1) + lyapunov|
    bool derivative_ok = false;        // residual <= 1e-6

    bool ok() const { return p1_ok && convex_ok && decreasing_ok && derivative_ok; }
};

// Pressure sanity checks over a grid of weights in [0, 4].
PressureProperties verify_pressure_properties(const PiecewiseLinearMarkovMap& map,
                                              const std::vector<double>& beta_grid);

}  // namespace dynspec
