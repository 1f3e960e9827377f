#include "dynspec/transfer_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace dynspec {

namespace {

constexpr int kMaxBinomial = 60;

// Pascal triangle in 64-bit integers; C(60, 30) ~ 1.18e17 still fits.
const double* binomial_row(int n) {
    static const std::vector<std::vector<double>> table = [] {
        std::vector<std::vector<unsigned long long>> t(kMaxBinomial + 1);
        t[0] = {1ull};
        for (int i = 1; i <= kMaxBinomial; ++i) {
            t[i].assign(i + 1, 1ull);
            for (int j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
        }
        std::vector<std::vector<double>> d(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) d[i].assign(t[i].begin(), t[i].end());
        return d;
    }();
    return table[n].data();
}

double int_pow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

}  // namespace

double binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0.0;
    if (n > kMaxBinomial) raise(Errc::DegreeTooLarge, "binomial table covers n <= 60");
    return binomial_row(n)[k];
}

Eigen::MatrixXd transfer_block(const PiecewiseLinearMarkovMap& map, double beta, int m, int n) {
    if (m < 0 || n < 0) raise(Errc::InvalidArgument, "block indices must be nonnegative");
    if (m > n) raise(Errc::DegreeOrder, "block (m, n) with m > n is identically zero");
    if (n > kMaxBinomial) raise(Errc::DegreeTooLarge, "degree exceeds the binomial table");
    const TransitionMatrix& a = map.transition();
    const int nn = map.size();
    const double cmn = binomial(n, n - m);
    Eigen::MatrixXd t(nn, nn);
    for (int l = 0; l < nn; ++l) {
        const double g = map.slope(l);
        const double sgn = (g < 0 && (n % 2) != 0) ? -1.0 : 1.0;
        const double w = sgn * std::pow(std::abs(g), -(beta + n));
        const double shift = int_pow(-map.intercept(l), n - m) * cmn;
        for (int k = 0; k < nn; ++k) t(k, l) = a.at(l, k) ? w * shift : 0.0;
    }
    return t;
}

BlockTransferMatrix assemble(const PiecewiseLinearMarkovMap& map, double beta, int degree) {
    if (degree < 0) raise(Errc::InvalidArgument, "degree must be nonnegative");
    if (degree > kMaxBinomial) raise(Errc::DegreeTooLarge, "degree exceeds the binomial table");
    const int nn = map.size();
    BlockTransferMatrix t{beta, degree, nn, Eigen::MatrixXd::Zero((degree + 1) * nn, (degree + 1) * nn)};
    for (int m = 0; m <= degree; ++m)
        for (int n = m; n <= degree; ++n)
            t.matrix.block(m * nn, n * nn, nn, nn) = transfer_block(map, beta, m, n);
    return t;
}

double PiecewisePolynomial::eval(double x) const {
    if (!map) raise(Errc::InvalidArgument, "piecewise polynomial has no map attached");
    const int k = map->branch_of(x);
    const auto& c = coeff[k];
    double r = 0.0;
    for (int m = static_cast<int>(c.size()) - 1; m >= 0; --m) r = r * x + c[m];
    return r;
}

Eigen::VectorXd coefficient_vector(const PiecewisePolynomial& p) {
    const int nn = static_cast<int>(p.coeff.size());
    const int deg = p.degree();
    Eigen::VectorXd v((deg + 1) * nn);
    for (int m = 0; m <= deg; ++m)
        for (int k = 0; k < nn; ++k) v(m * nn + k) = p.coeff[k][m];
    return v;
}

PiecewisePolynomial from_coefficient_vector(const PiecewiseLinearMarkovMap& map, int degree,
                                            const Eigen::VectorXd& v) {
    const int nn = map.size();
    if (v.size() != (degree + 1) * nn)
        raise(Errc::DimensionMismatch, "coefficient vector length does not match N(M+1)");
    PiecewisePolynomial p{&map, std::vector<std::vector<double>>(
                                    nn, std::vector<double>(degree + 1, 0.0))};
    for (int m = 0; m <= degree; ++m)
        for (int k = 0; k < nn; ++k) p.coeff[k][m] = v(m * nn + k);
    return p;
}

PiecewisePolynomial apply(const BlockTransferMatrix& t, const PiecewisePolynomial& p) {
    if (!p.map) raise(Errc::InvalidArgument, "piecewise polynomial has no map attached");
    if (static_cast<int>(p.coeff.size()) != t.elements || p.degree() != t.degree)
        raise(Errc::DimensionMismatch, "operator and polynomial shapes differ");
    Eigen::VectorXd v = t.matrix * coefficient_vector(p);
    return from_coefficient_vector(*p.map, t.degree, v);
}

namespace {

void put_value(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
    os << "row,col,value\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            os << i << ',' << j << ',';
            put_value(os, m(i, j));
            os << '\n';
        }
}

void write_blocks_csv(std::ostream& os, const BlockTransferMatrix& t) {
    os << "m,n,k,l,value\n";
    for (int m = 0; m <= t.degree; ++m)
        for (int n = m; n <= t.degree; ++n) {
            auto b = t.block(m, n);
            for (int k = 0; k < t.elements; ++k)
                for (int l = 0; l < t.elements; ++l) {
                    os << m << ',' << n << ',' << k << ',' << l << ',';
                    put_value(os, b(k, l));
                    os << '\n';
                }
        }
}

}  // namespace dynspec
