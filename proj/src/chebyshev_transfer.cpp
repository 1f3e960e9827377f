#include "dynspec/chebyshev_transfer.hpp"

#include <algorithm>
#include <cmath>

#include "dynspec/spectral.hpp"

namespace dynspec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Ascending first-kind Chebyshev points on the domain with their barycentric
// weights and the interpolatory (Fejer first rule) quadrature weights.
void chebyshev_grid(int n, const Interval& dom, std::vector<double>& nodes,
                    std::vector<double>& bary, std::vector<double>& quad) {
    nodes.resize(n);
    bary.resize(n);
    quad.resize(n);
    const double half = 0.5 * dom.length();
    for (int i = 0; i < n; ++i) {
        const double theta = (2.0 * i + 1.0) * kPi / (2.0 * n);
        nodes[i] = dom.lo + half * (1.0 - std::cos(theta));
        bary[i] = (i % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
        double s = 0.0;
        for (int j = 1; j <= n / 2; ++j)
            s += std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
        quad[i] = (2.0 / n) * (1.0 - 2.0 * s) * half;
    }
}

// Cardinal polynomial values l_j(y) for all j at once.
void cardinal_row(const std::vector<double>& nodes, const std::vector<double>& bary, double y,
                  std::vector<double>& out) {
    const int n = static_cast<int>(nodes.size());
    out.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (y == nodes[j]) {
            out[j] = 1.0;
            return;
        }
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
        out[j] = bary[j] / (y - nodes[j]);
        denom += out[j];
    }
    for (int j = 0; j < n; ++j) out[j] /= denom;
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

}  // namespace

ChebyshevOperator build_chebyshev_operator(const SmoothFullBranchMap& f, double beta, int order) {
    if (order < 4) raise(Errc::InvalidArgument, "collocation order must be >= 4");
    ChebyshevOperator op;
    op.order = order;
    op.beta = beta;
    op.domain = f.domain();
    chebyshev_grid(order, op.domain, op.nodes, op.bary, op.quad);
    op.matrix = Eigen::MatrixXd::Zero(order, order);
    std::vector<double> card;
    for (int i = 0; i < order; ++i) {
        for (int b = 0; b < f.size(); ++b) {
            const double y = f.inverse_branch(b, op.nodes[i]);
            const double w = std::pow(std::abs(f.derivative(y)), -beta);
            cardinal_row(op.nodes, op.bary, y, card);
            for (int j = 0; j < order; ++j) op.matrix(i, j) += w * card[j];
        }
    }
    return op;
}

std::vector<std::complex<double>> chebyshev_spectrum(const ChebyshevOperator& op) {
    return eigenvalues(op.matrix);
}

double DensityInterpolant::eval(double x) const {
    const int n = static_cast<int>(nodes.size());
    for (int j = 0; j < n; ++j)
        if (x == nodes[j]) return values[j];
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
        double c = bary[j] / (x - nodes[j]);
        num += c * values[j];
        den += c;
    }
    return num / den;
}

double DensityInterpolant::integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += quad[i] * values[i];
    return s;
}

DensityInterpolant invariant_density_smooth(const SmoothFullBranchMap& f, int order) {
    ChebyshevOperator op = build_chebyshev_operator(f, 1.0, order);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(op.matrix);
    if (solver.info() != Eigen::Success)
        raise(Errc::NoConvergence, "eigenvalue iteration did not converge");
    Eigen::Index lead = 0;
    for (Eigen::Index i = 1; i < solver.eigenvalues().size(); ++i)
        if (std::abs(solver.eigenvalues()(i)) > std::abs(solver.eigenvalues()(lead))) lead = i;
    Eigen::VectorXd v = solver.eigenvectors().col(lead).real();
    if (v.sum() < 0.0) v = -v;
    if (v.minCoeff() < -1e-8 * v.cwiseAbs().maxCoeff())
        raise(Errc::NonPositiveVector, "leading eigenvector is not a density");

    DensityInterpolant d{op.domain, op.nodes, op.bary, op.quad, {}};
    d.values.assign(v.data(), v.data() + v.size());
    double mass = 0.0;
    for (int i = 0; i < order; ++i) mass += d.quad[i] * d.values[i];
    if (!(mass > 0.0)) raise(Errc::NonPositiveVector, "density has nonpositive mass");
    for (double& val : d.values) val /= mass;
    return d;
}

double lyapunov_smooth(const SmoothFullBranchMap& f, int order) {
    const DensityInterpolant d = invariant_density_smooth(f, order);
    std::vector<double> gx, gw;
    gauss_legendre(64, gx, gw);
    double lam = 0.0;
    for (int b = 0; b < f.size(); ++b) {
        const Interval dom = f.branch(b).domain;
        const double mid = dom.midpoint(), half = 0.5 * dom.length();
        for (std::size_t q = 0; q < gx.size(); ++q) {
            const double x = mid + half * gx[q];
            lam += half * gw[q] * std::log(std::abs(f.derivative(x))) * d.eval(x);
        }
    }
    return lam;
}

std::vector<SweepRow> spectrum_vs_parameter(const std::vector<double>& c_grid, double beta,
                                            int order, int count) {
    std::vector<SweepRow> rows;
    rows.reserve(c_grid.size() * count);
    for (double c : c_grid) {
        auto ev = chebyshev_spectrum(build_chebyshev_operator(moebius(c), beta, order));
        for (int r = 0; r < count && r < static_cast<int>(ev.size()); ++r)
            rows.push_back({c, r, ev[r]});
    }
    return rows;
}

namespace {

// log of |(f^k)'| at x, by the chain rule along the orbit.
double log_orbit_derivative(const SmoothFullBranchMap& f, double x, int k) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) {
        s += std::log(std::abs(f.derivative(x)));
        x = f.eval(x).first;
    }
    return s;
}

double golden_refine(const SmoothFullBranchMap& f, int k, double a, double b) {
    constexpr double inv_gold = 0.6180339887498949;
    double x1 = b - inv_gold * (b - a);
    double x2 = a + inv_gold * (b - a);
    double f1 = log_orbit_derivative(f, x1, k);
    double f2 = log_orbit_derivative(f, x2, k);
    const double tol = 1e-12 * f.domain().length();
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_gold * (b - a);
            f1 = log_orbit_derivative(f, x1, k);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_gold * (b - a);
            f2 = log_orbit_derivative(f, x2, k);
        }
    }
    return std::min(f1, f2);
}

}  // namespace

EssentialRadiusReport essential_radius_bound(const SmoothFullBranchMap& f, int k_max) {
    if (k_max < 1) raise(Errc::InvalidArgument, "k_max must be >= 1");
    constexpr int kGrid = 1 << 14;
    const Interval dom = f.domain();
    EssentialRadiusReport rep;
    for (int k = 1; k <= k_max; ++k) {
        std::vector<double> g(kGrid + 1);
        for (int i = 0; i <= kGrid; ++i) {
            double x = dom.lo + dom.length() * static_cast<double>(i) / kGrid;
            g[i] = log_orbit_derivative(f, x, k);
        }
        double best = *std::min_element(g.begin(), g.end());
        for (int i = 1; i < kGrid; ++i) {
            if (g[i] <= g[i - 1] && g[i] <= g[i + 1]) {
                double a = dom.lo + dom.length() * static_cast<double>(i - 1) / kGrid;
                double b = dom.lo + dom.length() * static_cast<double>(i + 1) / kGrid;
                best = std::min(best, golden_refine(f, k, a, b));
            }
        }
        rep.s.push_back(best / k);
        rep.sigma.push_back(std::exp(-best / k));
    }
    rep.bv_rate_bound = *std::max_element(rep.s.begin(), rep.s.end());
    return rep;
}

}  // namespace dynspec
