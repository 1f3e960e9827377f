#include "dynspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynspec {

namespace {

bool modulus_order(const std::complex<double>& a, const std::complex<double>& b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) raise(Errc::DimensionMismatch, "matrix must be square");
    if (a.rows() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        raise(Errc::NoConvergence, "eigenvalue iteration did not converge");
    std::vector<std::complex<double>> ev(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) ev[i] = solver.eigenvalues()(i);
    std::sort(ev.begin(), ev.end(), modulus_order);
    return ev;
}

PerronResult perron(const Eigen::MatrixXd& a, double tol, int max_iter) {
    if (a.rows() != a.cols() || a.rows() == 0)
        raise(Errc::DimensionMismatch, "matrix must be square and nonempty");
    if (a.minCoeff() < 0.0)
        raise(Errc::InvalidArgument, "power iteration needs an entrywise nonnegative matrix");
    const Eigen::Index n = a.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd u = v;
    double lam = 0.0;
    int stable = 0;
    int it = 0;
    for (; it < max_iter; ++it) {
        Eigen::VectorXd av = a * v;
        Eigen::VectorXd atu = a.transpose() * u;
        double s = av.sum(), su = atu.sum();
        if (!(s > 0.0) || !(su > 0.0))
            raise(Errc::NonPositiveVector, "iterate left the positive cone");
        v = av / s;
        u = atu / su;
        double change = std::abs(s - lam);
        lam = s;
        if (change <= tol * std::max(1.0, std::abs(lam))) {
            if (++stable >= 2) break;
        } else {
            stable = 0;
        }
    }
    if (stable < 2) raise(Errc::NotConverged, "power iteration hit the iteration cap");
    if (v.minCoeff() <= 0.0)
        raise(Errc::NonPositiveVector, "converged vector is not entrywise positive");
    double uv = u.dot(v);
    PerronResult r;
    r.value = u.dot(a * v) / uv;
    r.vector = v;
    r.iterations = it + 1;
    return r;
}

double pressure(const PiecewiseLinearMarkovMap& map, double beta) {
    return std::log(perron(transfer_block(map, beta, 0, 0)).value);
}

double pressure_derivative(const PiecewiseLinearMarkovMap& map, double beta, double step) {
    if (!(step > 0.0)) raise(Errc::InvalidArgument, "step must be positive");
    return (pressure(map, beta + step) - pressure(map, beta - step)) / (2.0 * step);
}

PiecewisePolynomial invariant_density(const PiecewiseLinearMarkovMap& map) {
    PerronResult pr = perron(transfer_block(map, 1.0, 0, 0));
    double mass = 0.0;
    for (int k = 0; k < map.size(); ++k) mass += pr.vector(k) * map.element(k).length();
    PiecewisePolynomial h{&map, std::vector<std::vector<double>>(map.size())};
    for (int k = 0; k < map.size(); ++k) h.coeff[k] = {pr.vector(k) / mass};
    return h;
}

double lyapunov_exact(const PiecewiseLinearMarkovMap& map) {
    PiecewisePolynomial h = invariant_density(map);
    double lam = 0.0;
    for (int k = 0; k < map.size(); ++k)
        lam += h.coeff[k][0] * map.element(k).length() * std::log(std::abs(map.slope(k)));
    return lam;
}

SpectralReport mixing_rate(const PiecewiseLinearMarkovMap& map, int degree) {
    if (degree < 2)
        raise(Errc::InvalidArgument, "degree must be >= 2 so the distortion block is present");
    map.transition();
    if (!map.mixing_power()) raise(Errc::NotMixing, "map is not topologically mixing");

    SpectralReport rep;
    rep.beta = 1.0;
    rep.degree = degree;
    for (int m = 0; m <= degree; ++m) {
        auto ev = eigenvalues(transfer_block(map, 1.0, m, m));
        for (const auto& z : ev) rep.spectrum.push_back({z, m});
    }
    std::sort(rep.spectrum.begin(), rep.spectrum.end(),
              [](const BlockEigenvalue& a, const BlockEigenvalue& b) {
                  return modulus_order(a.value, b.value);
              });
    rep.leading = rep.spectrum.front();
    rep.subleading = rep.spectrum.at(1);
    const double sub = std::abs(rep.subleading.value);
    rep.subleading_count = 0;
    for (std::size_t i = 1; i < rep.spectrum.size(); ++i)
        if (std::abs(std::abs(rep.spectrum[i].value) - sub) <= 1e-12 * std::max(1.0, sub))
            ++rep.subleading_count;
    rep.pressure = std::log(std::abs(rep.leading.value));
    rep.density = invariant_density(map);
    rep.lyapunov = lyapunov_exact(map);
    rep.mixing_rate = -std::log(sub);
    return rep;
}

BoundsVerdict verify_bounds(const PiecewiseLinearMarkovMap& map, int degree) {
    SpectralReport rep = mixing_rate(map, degree);
    BoundsVerdict v;
    v.alpha = rep.mixing_rate;
    v.lyapunov = rep.lyapunov;
    const double slack = 1e-9;

    v.minus_log_nu2 = -std::log(perron(transfer_block(map, 1.0, 2, 2)).value);
    v.minus_p3 = -pressure(map, 3.0);
    v.two_lambda_ok = v.alpha <= 2.0 * v.lyapunov + slack;
    v.chain_ok = v.alpha <= v.minus_log_nu2 + slack &&
                 v.minus_log_nu2 <= 2.0 * v.lyapunov + slack &&
                 std::abs(v.minus_log_nu2 - v.minus_p3) <= slack;

    bool all_pos = true, all_neg = true;
    for (int k = 0; k < map.size(); ++k) {
        if (map.slope(k) > 0)
            all_neg = false;
        else
            all_pos = false;
    }
    v.same_sign_applicable = all_pos || all_neg;
    if (v.same_sign_applicable) {
        v.minus_p2 = -pressure(map, 2.0);
        v.one_lambda_ok = v.alpha <= v.minus_p2 + slack && v.minus_p2 <= v.lyapunov + slack;
    }

    v.nu_identity_deviation =
        (transfer_block(map, 1.0, 2, 2) - transfer_block(map, 3.0, 0, 0)).cwiseAbs().maxCoeff();
    v.nu_identity_ok = v.nu_identity_deviation <= 1e-14;

    const double inv_min_slope = 1.0 / map.min_abs_slope();
    double worst = -std::numeric_limits<double>::infinity();
    for (double beta : {0.5, 1.0, 2.0}) {
        const double nu0 = perron(transfer_block(map, beta, 0, 0)).value;
        for (int m = 1; m <= degree; ++m) {
            auto ev = eigenvalues(transfer_block(map, beta, m, m));
            double r = ev.empty() ? 0.0 : std::abs(ev.front());
            worst = std::max(worst, r - nu0 * inv_min_slope);
        }
    }
    v.block_bound_max_residual = worst;
    v.block_bound_ok = worst <= 1e-10;
    return v;
}

PressureProperties verify_pressure_properties(const PiecewiseLinearMarkovMap& map,
                                              const std::vector<double>& beta_grid) {
    if (beta_grid.size() < 2) raise(Errc::InvalidArgument, "need at least two grid points");
    for (double b : beta_grid)
        if (!(b >= 0.0 && b <= 4.0)) raise(Errc::InvalidArgument, "grid must lie within [0, 4]");

    std::vector<double> grid = beta_grid;
    std::sort(grid.begin(), grid.end());

    PressureProperties out;
    out.p_at_one = pressure(map, 1.0);
    out.p1_ok = std::abs(out.p_at_one) <= 1e-10;

    std::vector<double> pg(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) pg[i] = pressure(map, grid[i]);

    out.convexity_worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            double mid = pressure(map, 0.5 * (grid[i] + grid[j]));
            out.convexity_worst = std::max(out.convexity_worst, mid - 0.5 * (pg[i] + pg[j]));
        }
    out.convex_ok = out.convexity_worst <= 1e-9;

    out.decreasing_ok = true;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (grid[i + 1] > grid[i] && !(pg[i + 1] < pg[i])) out.decreasing_ok = false;

    out.derivative_at_one = pressure_derivative(map, 1.0);
    out.derivative_residual = std::abs(out.derivative_at_one + lyapunov_exact(map));
    out.derivative_ok = out.derivative_residual <= 1e-6;
    return out;
}

}  // namespace dynspec
