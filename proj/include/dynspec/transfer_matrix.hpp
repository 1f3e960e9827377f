#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "dynspec/map_model.hpp"

namespace dynspec {

// Exact binomial coefficient, tabulated for n <= 60.
double binomial(int n, int k);

// One (m, n) block of the weighted transfer operator on piecewise
// polynomials: entry (k, l) is the coefficient with which the x^n piece on
// element l feeds the x^m piece on element k under one application of the
// operator with weight |f'|^{-beta},
//   A[l][k] * sign(g_l)^n * |g_l|^{-(beta+n)} * (-d_l)^{n-m} * C(n, n-m).
// Blocks with m > n vanish identically and are rejected (DegreeOrder).
Eigen::MatrixXd transfer_block(const PiecewiseLinearMarkovMap& map, double beta, int m, int n);

// Full operator on piecewise polynomials of degree <= M, stored dense with
// degree-major layout: coefficient index (m, k) -> m*N + k. Block (m, n)
// sits at rows [mN, mN+N), cols [nN, nN+N); blocks below the diagonal are
// zero, so the spectrum is the union of the diagonal-block spectra.
struct BlockTransferMatrix {
    double beta = 1.0;
    int degree = 0;
    int elements = 0;
    Eigen::MatrixXd matrix;

    int dim() const { return (degree + 1) * elements; }
    Eigen::Block<const Eigen::MatrixXd> block(int m, int n) const {
        return matrix.block(m * elements, n * elements, elements, elements);
    }
};

BlockTransferMatrix assemble(const PiecewiseLinearMarkovMap& map, double beta, int degree);

// Function that is polynomial of one fixed degree on each partition element.
struct PiecewisePolynomial {
    const PiecewiseLinearMarkovMap* map = nullptr;  // non-owning
    std::vector<std::vector<double>> coeff;         // [element][power of x]

    int degree() const { return coeff.empty() ? -1 : static_cast<int>(coeff[0].size()) - 1; }
    double eval(double x) const;
};

// Degree-major flattening used by the matrix representation.
Eigen::VectorXd coefficient_vector(const PiecewisePolynomial& p);
PiecewisePolynomial from_coefficient_vector(const PiecewiseLinearMarkovMap& map, int degree,
                                            const Eigen::VectorXd& v);

// One application of the operator through its matrix; agrees pointwise with
// the direct preimage sum over branches.
PiecewisePolynomial apply(const BlockTransferMatrix& t, const PiecewisePolynomial& p);

// Entry dump, one line per entry: "row,col,value".
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);
// Blockwise dump, one line per entry: "m,n,k,l,value".
void write_blocks_csv(std::ostream& os, const BlockTransferMatrix& t);

}  // namespace dynspec
