#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dynspec/chebyshev_transfer.hpp"
#include "dynspec/linearize.hpp"
#include "dynspec/spectral.hpp"

using namespace dynspec;

TEST_CASE("collocation grid: symmetric nodes, positive exact quadrature") {
    ChebyshevOperator op = build_chebyshev_operator(moebius(-0.11), 1.0, 16);
    REQUIRE(op.nodes.size() == 16);
    double wsum = 0.0;
    for (std::size_t i = 0; i < op.nodes.size(); ++i) {
        CHECK(op.nodes[i] > -1.0);
        CHECK(op.nodes[i] < 1.0);
        if (i > 0) CHECK(op.nodes[i] > op.nodes[i - 1]);
        CHECK(op.nodes[i] == doctest::Approx(-op.nodes[op.nodes.size() - 1 - i]).epsilon(1e-14));
        CHECK(op.quad[i] > 0.0);
        wsum += op.quad[i];
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));

    // The interpolatory rule integrates monomials up to the grid size.
    for (int k = 0; k <= 15; ++k) {
        double q = 0.0;
        for (std::size_t i = 0; i < op.nodes.size(); ++i)
            q += op.quad[i] * std::pow(op.nodes[i], k);
        double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
        CHECK(q == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("unit leading eigenvalue across the family") {
    for (double c : {-0.2, -0.11, 0.1, 0.35}) {
        auto eigs = chebyshev_spectrum(build_chebyshev_operator(moebius(c), 1.0, 24));
        CHECK(std::abs(eigs[0]) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(eigs[0].imag()) < 1e-10);
        CHECK(std::abs(eigs[1]) < 1.0);
    }
}

TEST_CASE("subleading eigenvalue is converged at moderate order") {
    auto e25 = chebyshev_spectrum(build_chebyshev_operator(moebius(-0.11), 1.0, 25));
    auto e32 = chebyshev_spectrum(build_chebyshev_operator(moebius(-0.11), 1.0, 32));
    CHECK(std::abs(e25[1]) == doctest::Approx(std::abs(e32[1])).epsilon(1e-7));
    CHECK(std::abs(e25[1]) == doctest::Approx(0.10415).epsilon(5e-3));
}

TEST_CASE("invariant density: unit mass, positivity, fixed point of the operator") {
    SmoothFullBranchMap f = moebius(-0.11);
    DensityInterpolant d = invariant_density_smooth(f, 28);
    CHECK(d.integral() == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : d.values) CHECK(v > 0.0);
    for (std::size_t i = 0; i < d.nodes.size(); ++i)
        CHECK(d.eval(d.nodes[i]) == doctest::Approx(d.values[i]).epsilon(1e-13));

    // Pull the density through the operator definition at off-node points.
    for (double x : {-0.83, -0.41, -0.07, 0.02, 0.39, 0.91}) {
        double pushed = 0.0;
        for (int b = 0; b < f.size(); ++b) {
            double y = f.inverse_branch(b, x);
            pushed += d.eval(y) / std::abs(f.derivative(y));
        }
        CHECK(pushed == doctest::Approx(d.eval(x)).epsilon(1e-8));
    }
}

TEST_CASE("Lyapunov exponent from collocation matches the fine linearization") {
    SmoothFullBranchMap f = moebius(-0.11);
    double smooth = lyapunov_smooth(f, 25);
    CHECK(smooth == doctest::Approx(0.685).epsilon(8e-3));
    double linearized = lyapunov_exact(linearize(f, 6));
    CHECK(std::abs(smooth - linearized) < 0.02);
    CHECK(lyapunov_smooth(f, 32) == doctest::Approx(smooth).epsilon(1e-8));
}

TEST_CASE("parameter sweep rows are complete and ranked") {
    std::vector<double> grid = {-0.15, -0.11, -0.05};
    auto rows = spectrum_vs_parameter(grid, 1.0, 20, 4);
    REQUIRE(rows.size() == 12);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].c == grid[i / 4]);
        CHECK(rows[i].rank == static_cast<int>(i % 4));
        if (i % 4 != 0)
            CHECK(std::abs(rows[i].value) <= std::abs(rows[i - 1].value) + 1e-12);
    }
    CHECK(std::abs(rows[0].value) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("derivative growth floors: exact one-step value, Lyapunov ceiling") {
    SmoothFullBranchMap f = moebius(-0.11);
    EssentialRadiusReport rep = essential_radius_bound(f, 10);
    REQUIRE(rep.s.size() == 10);
    // |F'| is minimal at the kink: 4c + 2.
    CHECK(rep.s[0] == doctest::Approx(std::log(1.56)).epsilon(1e-9));
    double lam = lyapunov_smooth(f, 25);
    for (double s : rep.s) CHECK(s <= lam + 1e-6);
    for (std::size_t k = 0; k < rep.s.size(); ++k)
        CHECK(rep.sigma[k] == doctest::Approx(std::exp(-rep.s[k])).epsilon(1e-13));
    CHECK(rep.bv_rate_bound == *std::max_element(rep.s.begin(), rep.s.end()));
}

TEST_CASE("order floor is enforced") {
    CHECK_THROWS_AS((void)build_chebyshev_operator(moebius(-0.11), 1.0, 3), Error);
}
