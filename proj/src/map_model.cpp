#include "dynspec/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "dynspec/rng.hpp"

namespace dynspec {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::NotAPartition: return "NotAPartition";
        case Errc::NotMarkov: return "NotMarkov";
        case Errc::NotExpanding: return "NotExpanding";
        case Errc::NotMixing: return "NotMixing";
        case Errc::OutOfDomain: return "OutOfDomain";
        case Errc::NoSuchBranch: return "NoSuchBranch";
        case Errc::ParameterOutOfRange: return "ParameterOutOfRange";
        case Errc::DegreeOrder: return "DegreeOrder";
        case Errc::DegreeTooLarge: return "DegreeTooLarge";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::NotConverged: return "NotConverged";
        case Errc::NonPositiveVector: return "NonPositiveVector";
        case Errc::InverseBranchFailure: return "InverseBranchFailure";
        case Errc::LevelTooDeep: return "LevelTooDeep";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::WindowTooNoisy: return "WindowTooNoisy";
    }
    return "UnknownError";
}

Interval AffineBranch::image() const {
    double a = eval(domain.lo);
    double b = eval(domain.hi);
    return {std::min(a, b), std::max(a, b)};
}

std::optional<int> is_topologically_mixing(const TransitionMatrix& a, int p_max) {
    if (p_max < 1) raise(Errc::InvalidArgument, "p_max must be >= 1");
    const int n = a.size();
    if (n == 0) return std::nullopt;
    // Boolean powers: positivity of (A^p)_{kl} only needs the 0/1 pattern.
    std::vector<std::uint8_t> pw(static_cast<std::size_t>(n) * n), nx(pw.size());
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) pw[k * n + l] = a.at(k, l) ? 1 : 0;
    for (int p = 1; p <= p_max; ++p) {
        bool all = true;
        for (std::size_t i = 0; i < pw.size() && all; ++i) all = pw[i] != 0;
        if (all) return p;
        if (p == p_max) break;
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                std::uint8_t v = 0;
                for (int j = 0; j < n && !v; ++j) v = pw[k * n + j] & (a.at(j, l) ? 1 : 0);
                nx[k * n + l] = v;
            }
        pw.swap(nx);
    }
    return std::nullopt;
}

namespace {

// Index of the breakpoint within tol of x, or -1.
int match_breakpoint(const std::vector<double>& bp, double x, double tol) {
    auto it = std::lower_bound(bp.begin(), bp.end(), x);
    int best = -1;
    double dist = tol;
    for (auto cand : {it, it == bp.begin() ? it : std::prev(it)}) {
        if (cand == bp.end()) continue;
        double d = std::abs(*cand - x);
        if (d <= dist) {
            dist = d;
            best = static_cast<int>(cand - bp.begin());
        }
    }
    return best;
}

ValidationReport run_validation(const std::vector<double>& bp, const std::vector<double>& slopes,
                                const std::vector<double>& intercepts, double tol) {
    ValidationReport rep;
    const int n = static_cast<int>(slopes.size());

    rep.partition_ok = true;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        if (!(std::isfinite(bp[i]) && std::isfinite(bp[i + 1]) && bp[i] < bp[i + 1])) {
            rep.partition_ok = false;
            rep.issues.push_back({Errc::NotAPartition,
                                  "breakpoints not strictly increasing at index " + std::to_string(i),
                                  -1, static_cast<int>(i)});
        }
    }
    if (!rep.partition_ok) return rep;

    rep.expanding_ok = true;
    for (int k = 0; k < n; ++k) {
        if (!(std::isfinite(slopes[k]) && std::abs(slopes[k]) > 1.0)) {
            rep.expanding_ok = false;
            rep.issues.push_back({Errc::NotExpanding,
                                  "branch " + std::to_string(k) + " has slope " + std::to_string(slopes[k]),
                                  k, -1});
        }
    }

    rep.markov_ok = true;
    TransitionMatrix a(n);
    for (int k = 0; k < n; ++k) {
        double e0 = slopes[k] * bp[k] + intercepts[k];
        double e1 = slopes[k] * bp[k + 1] + intercepts[k];
        double lo = std::min(e0, e1), hi = std::max(e0, e1);
        int ia = match_breakpoint(bp, lo, tol);
        int ib = match_breakpoint(bp, hi, tol);
        if (ia < 0 || ib < 0 || ia >= ib) {
            rep.markov_ok = false;
            rep.issues.push_back({Errc::NotMarkov,
                                  "branch " + std::to_string(k) + " image [" + std::to_string(lo) +
                                      ", " + std::to_string(hi) + "] does not align with the partition",
                                  k, ia < 0 ? -1 : ia});
            continue;
        }
        for (int l = ia; l < ib; ++l) a.set(k, l, true);
    }
    if (rep.expanding_ok && rep.markov_ok) rep.transition = a;
    return rep;
}

}  // namespace

PiecewiseLinearMarkovMap::PiecewiseLinearMarkovMap(std::vector<double> breakpoints,
                                                   std::vector<double> slopes,
                                                   std::vector<double> intercepts, double tol)
    : breakpoints_(std::move(breakpoints)),
      slopes_(std::move(slopes)),
      intercepts_(std::move(intercepts)) {
    if (breakpoints_.size() < 2 || slopes_.size() != breakpoints_.size() - 1 ||
        intercepts_.size() != slopes_.size()) {
        raise(Errc::InvalidArgument, "need n+1 breakpoints, n slopes, n intercepts with n >= 1");
    }
    report_ = run_validation(breakpoints_, slopes_, intercepts_, tol);
    if (report_.transition) mixing_power_ = is_topologically_mixing(*report_.transition, 128);
}

double PiecewiseLinearMarkovMap::min_abs_slope() const {
    double m = std::abs(slopes_[0]);
    for (double s : slopes_) m = std::min(m, std::abs(s));
    return m;
}

const TransitionMatrix& PiecewiseLinearMarkovMap::transition() const {
    if (!report_.transition) {
        const auto& is = report_.issues;
        if (!is.empty()) raise(is.front().code, is.front().detail);
        raise(Errc::InvalidArgument, "map is not valid");
    }
    return *report_.transition;
}

int PiecewiseLinearMarkovMap::branch_of(double x) const {
    if (!(x >= breakpoints_.front() && x <= breakpoints_.back()))
        raise(Errc::OutOfDomain, "x = " + std::to_string(x) + " outside the map domain");
    auto it = std::upper_bound(breakpoints_.begin() + 1, breakpoints_.end(), x);
    int k = static_cast<int>(it - (breakpoints_.begin() + 1));
    return std::min(k, size() - 1);
}

std::pair<double, int> PiecewiseLinearMarkovMap::eval(double x) const {
    int k = branch_of(x);
    double y = slopes_[k] * x + intercepts_[k];
    y = std::clamp(y, breakpoints_.front(), breakpoints_.back());
    return {y, k};
}

double PiecewiseLinearMarkovMap::derivative(double x) const { return slopes_[branch_of(x)]; }

double PiecewiseLinearMarkovMap::inverse_branch(int element_k, int branch_l, double x) const {
    if (element_k < 0 || element_k >= size() || branch_l < 0 || branch_l >= size())
        raise(Errc::InvalidArgument, "branch or element index out of range");
    if (!(x >= breakpoints_[element_k] && x <= breakpoints_[element_k + 1]))
        raise(Errc::OutOfDomain, "x not inside the requested element");
    if (!transition().at(branch_l, element_k))
        raise(Errc::NoSuchBranch, "branch " + std::to_string(branch_l) +
                                      " has no preimage over element " + std::to_string(element_k));
    return (x - intercepts_[branch_l]) / slopes_[branch_l];
}

ValidationReport validate(const PiecewiseLinearMarkovMap& map, double tol) {
    std::vector<double> slopes(map.size()), intercepts(map.size());
    for (int k = 0; k < map.size(); ++k) {
        slopes[k] = map.slope(k);
        intercepts[k] = map.intercept(k);
    }
    return run_validation(map.breakpoints(), slopes, intercepts, tol);
}

SmoothFullBranchMap::SmoothFullBranchMap(Interval domain, std::vector<SmoothBranch> branches,
                                         std::string family, double parameter)
    : domain_(domain), branches_(std::move(branches)), family_(std::move(family)),
      parameter_(parameter) {
    if (branches_.empty()) raise(Errc::InvalidArgument, "need at least one branch");
    double edge = domain_.lo;
    for (const auto& b : branches_) {
        if (std::abs(b.domain.lo - edge) > 1e-12 * domain_.length())
            raise(Errc::InvalidArgument, "branch domains must tile the interval");
        edge = b.domain.hi;
    }
    if (std::abs(edge - domain_.hi) > 1e-12 * domain_.length())
        raise(Errc::InvalidArgument, "branch domains must tile the interval");
}

int SmoothFullBranchMap::branch_of(double x) const {
    if (!domain_.contains(x))
        raise(Errc::OutOfDomain, "x = " + std::to_string(x) + " outside the map domain");
    for (int b = 0; b + 1 < size(); ++b)
        if (x < branches_[b].domain.hi) return b;
    return size() - 1;
}

std::pair<double, int> SmoothFullBranchMap::eval(double x) const {
    int b = branch_of(x);
    double y = std::clamp(branches_[b].value(x), domain_.lo, domain_.hi);
    return {y, b};
}

double SmoothFullBranchMap::derivative(double x) const {
    return branches_[branch_of(x)].derivative(x);
}

double SmoothFullBranchMap::inverse_branch(int b, double y) const {
    if (b < 0 || b >= size()) raise(Errc::InvalidArgument, "branch index out of range");
    if (!domain_.contains(y)) raise(Errc::OutOfDomain, "y outside the map domain");
    const SmoothBranch& br = branches_[b];
    if (br.inverse) return std::clamp(br.inverse(y), br.domain.lo, br.domain.hi);

    double lo = br.domain.lo, hi = br.domain.hi;
    double flo = br.value(lo) - y, fhi = br.value(hi) - y;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) {
        // Full branches cover the domain; only roundoff spill lands here.
        if (std::abs(flo) <= std::abs(fhi) && std::abs(flo) < 1e-9 * domain_.length()) return lo;
        if (std::abs(fhi) < 1e-9 * domain_.length()) return hi;
        raise(Errc::InverseBranchFailure, "preimage cannot be bracketed on branch " + std::to_string(b));
    }
    const double tol = 1e-14 * domain_.length();
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = br.value(mid) - y;
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SmoothFullBranchMap moebius(double c) {
    if (!(c > -0.25 && c < 0.5))
        raise(Errc::ParameterOutOfRange,
              "c = " + std::to_string(c) + " outside (-1/4, 1/2); the map would not be expanding");
    SmoothBranch left{
        {-1.0, 0.0},
        true,
        [c](double x) { return (1.0 + 2.0 * (c + 1.0) * x) / (1.0 - 2.0 * c * x); },
        [c](double x) {
            double d = 1.0 - 2.0 * c * x;
            return (4.0 * c + 2.0) / (d * d);
        },
        [c](double y) { return -(1.0 - y) / (2.0 * (c * y + c + 1.0)); },
    };
    SmoothBranch right{
        {0.0, 1.0},
        false,
        [c](double x) { return (1.0 - 2.0 * (c + 1.0) * x) / (1.0 + 2.0 * c * x); },
        [c](double x) {
            double d = 1.0 + 2.0 * c * x;
            return -(4.0 * c + 2.0) / (d * d);
        },
        [c](double y) { return (1.0 - y) / (2.0 * (c * y + c + 1.0)); },
    };
    return SmoothFullBranchMap({-1.0, 1.0}, {left, right}, "moebius", c);
}

PiecewiseLinearMarkovMap tent_map() { return {{0.0, 0.5, 1.0}, {2.0, -2.0}, {0.0, 2.0}}; }

PiecewiseLinearMarkovMap doubling_map() { return {{0.0, 0.5, 1.0}, {2.0, 2.0}, {0.0, -1.0}}; }

PiecewiseLinearMarkovMap golden_mean_map() {
    return {{0.0, 2.0 / 3.0, 1.0}, {1.5, 2.0}, {0.0, -4.0 / 3.0}};
}

namespace {

// Exact determinant of a small 0/1 matrix (fraction-free elimination).
long long int01_determinant(const TransitionMatrix& a) {
    const int n = a.size();
    std::vector<long long> m(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i * n + j] = a.at(i, j) ? 1 : 0;
    long long prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m[k * n + k] == 0) {
            int p = -1;
            for (int i = k + 1; i < n && p < 0; ++i)
                if (m[i * n + k] != 0) p = i;
            if (p < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
        prev = m[k * n + k];
    }
    return sign * m[(n - 1) * n + (n - 1)];
}

}  // namespace

PiecewiseLinearMarkovMap random_markov_map(std::uint64_t seed, const RandomMapOptions& opt) {
    if (opt.min_branches < 2 || opt.max_branches < opt.min_branches)
        raise(Errc::InvalidArgument, "branch count range must satisfy 2 <= min <= max");
    SplitMix64 rng(mix64(seed ^ 0xd1b54a32d192ed03ull));

    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
        const int n = opt.min_branches +
                      static_cast<int>(rng.next() % static_cast<std::uint64_t>(
                                                        opt.max_branches - opt.min_branches + 1));
        // Gap profile 0.25 + u keeps every element within a factor ~5 of 1/n,
        // so runs of elements in the slope window always exist.
        std::vector<double> bp(n + 1);
        double total = 0.0;
        std::vector<double> gaps(n);
        for (int i = 0; i < n; ++i) {
            gaps[i] = 0.25 + rng.uniform01();
            total += gaps[i];
        }
        bp[0] = 0.0;
        double acc = 0.0;
        for (int i = 0; i < n - 1; ++i) {
            acc += gaps[i];
            bp[i + 1] = acc / total;
        }
        bp[n] = 1.0;

        std::vector<double> slopes(n), intercepts(n);
        bool feasible = true;
        for (int k = 0; k < n && feasible; ++k) {
            const double len = bp[k + 1] - bp[k];
            std::vector<std::pair<int, int>> runs;
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b <= n; ++b) {
                    double ratio = (bp[b] - bp[a]) / len;
                    if (ratio >= opt.min_abs_slope && ratio <= opt.max_abs_slope)
                        runs.emplace_back(a, b);
                }
            if (runs.empty()) {
                feasible = false;
                break;
            }
            auto [a, b] = runs[rng.next() % runs.size()];
            double ratio = (bp[b] - bp[a]) / len;
            bool positive = opt.signs == SlopeSigns::positive ||
                            (opt.signs == SlopeSigns::mixed && (rng.next() & 1) != 0);
            if (positive) {
                slopes[k] = ratio;
                intercepts[k] = bp[a] - ratio * bp[k];
            } else {
                slopes[k] = -ratio;
                intercepts[k] = bp[a] + ratio * bp[k + 1];
            }
        }
        if (!feasible) continue;

        PiecewiseLinearMarkovMap map(bp, slopes, intercepts);
        if (!map.valid()) continue;
        if (!is_topologically_mixing(map.transition(), opt.mixing_p_max)) continue;
        if (opt.require_invertible_transition && int01_determinant(map.transition()) == 0) continue;
        return map;
    }
    raise(Errc::InvalidArgument, "random map generation did not converge; widen the options");
}

}  // namespace dynspec
