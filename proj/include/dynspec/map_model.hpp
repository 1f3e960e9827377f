#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynspec/types.hpp"

namespace dynspec {

// One affine piece f(x) = slope*x + intercept on its domain.
struct AffineBranch {
    double slope = 0.0;
    double intercept = 0.0;
    Interval domain;

    double eval(double x) const { return slope * x + intercept; }
    Interval image() const;
};

// 0/1 matrix: at(k, l) == true iff the interior of element l is contained in
// the image of branch k. Row index = branch, column index = element.
class TransitionMatrix {
  public:
    TransitionMatrix() = default;
    explicit TransitionMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0) {}

    int size() const { return n_; }
    bool at(int branch_k, int element_l) const {
        return a_[static_cast<std::size_t>(branch_k) * n_ + element_l] != 0;
    }
    void set(int branch_k, int element_l, bool v) {
        a_[static_cast<std::size_t>(branch_k) * n_ + element_l] = v ? 1 : 0;
    }

  private:
    int n_ = 0;
    std::vector<std::uint8_t> a_;
};

// Smallest p <= p_max with A^p entrywise positive, or nullopt.
std::optional<int> is_topologically_mixing(const TransitionMatrix& a, int p_max);

struct ValidationIssue {
    Errc code = Errc::InvalidArgument;
    std::string detail;
    int branch = -1;
    int element = -1;
};

struct ValidationReport {
    bool partition_ok = false;
    bool expanding_ok = false;
    bool markov_ok = false;
    std::vector<ValidationIssue> issues;
    std::optional<TransitionMatrix> transition;

    bool ok() const { return partition_ok && expanding_ok && markov_ok; }
};

// Piecewise linear expanding map whose branch domains partition [lo, hi] and
// whose branch images are unions of partition elements. Immutable once built;
// construction runs the full validation and caches the transition structure.
class PiecewiseLinearMarkovMap {
  public:
    PiecewiseLinearMarkovMap(std::vector<double> breakpoints,
                             std::vector<double> slopes,
                             std::vector<double> intercepts,
                             double tol = 1e-9);

    int size() const { return static_cast<int>(slopes_.size()); }
    Interval domain() const { return {breakpoints_.front(), breakpoints_.back()}; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    Interval element(int k) const { return {breakpoints_[k], breakpoints_[k + 1]}; }
    double slope(int k) const { return slopes_[k]; }
    double intercept(int k) const { return intercepts_[k]; }
    AffineBranch branch(int k) const { return {slopes_[k], intercepts_[k], element(k)}; }
    double min_abs_slope() const;

    bool valid() const { return report_.ok(); }
    const ValidationReport& validation() const { return report_; }
    // Throws the first recorded issue if the map failed validation.
    const TransitionMatrix& transition() const;
    // Smallest power making the transition matrix positive (computed at
    // construction with p_max = 128), if the map is topologically mixing.
    std::optional<int> mixing_power() const { return mixing_power_; }

    // Index of the branch owning x: breakpoints belong to the branch on their
    // right, the last branch also owns the right endpoint.
    int branch_of(double x) const;
    // (f(x), owning branch); the image is clamped into the domain.
    std::pair<double, int> eval(double x) const;
    double derivative(double x) const;
    // Preimage of x in element k under branch l: (x - d_l) / g_l.
    double inverse_branch(int element_k, int branch_l, double x) const;

  private:
    std::vector<double> breakpoints_;
    std::vector<double> slopes_;
    std::vector<double> intercepts_;
    ValidationReport report_;
    std::optional<int> mixing_power_;
};

// Re-runs the construction-time checks with a caller-chosen tolerance.
ValidationReport validate(const PiecewiseLinearMarkovMap& map, double tol);

// One monotone smooth branch mapping its domain onto the full interval.
struct SmoothBranch {
    Interval domain;
    bool increasing = true;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double)> inverse;  // empty -> monotone bisection
};

// Expanding map with finitely many full smooth branches.
class SmoothFullBranchMap {
  public:
    SmoothFullBranchMap(Interval domain, std::vector<SmoothBranch> branches,
                        std::string family = "", double parameter = 0.0);

    const Interval& domain() const { return domain_; }
    int size() const { return static_cast<int>(branches_.size()); }
    const SmoothBranch& branch(int b) const { return branches_[b]; }
    const std::string& family() const { return family_; }
    double parameter() const { return parameter_; }

    int branch_of(double x) const;
    std::pair<double, int> eval(double x) const;
    double derivative(double x) const;
    // Preimage of y under branch b; closed form when provided, otherwise
    // monotone bisection to 1e-14 of the domain length.
    double inverse_branch(int b, double y) const;

  private:
    Interval domain_;
    std::vector<SmoothBranch> branches_;
    std::string family_;
    double parameter_;
};

// Two-branch family on [-1, 1]: x -> (1 - 2(c+1)|x|) / (1 + 2c|x|).
// Expanding for c in (-1/4, 1/2); c = 0 gives the tent map 1 - 2|x|.
SmoothFullBranchMap moebius(double c);

// Canonical fixtures.
PiecewiseLinearMarkovMap tent_map();      // 2x on [0,1/2], 2-2x on [1/2,1]
PiecewiseLinearMarkovMap doubling_map();  // 2x mod 1 with breakpoint at 1/2
PiecewiseLinearMarkovMap golden_mean_map();  // transition [[1,1],[1,0]]

enum class SlopeSigns { positive, negative, mixed };

struct RandomMapOptions {
    int min_branches = 2;
    int max_branches = 6;
    SlopeSigns signs = SlopeSigns::mixed;
    double min_abs_slope = 1.1;
    double max_abs_slope = 10.0;
    bool require_invertible_transition = false;
    int mixing_p_max = 64;
    int max_attempts = 20000;
};

// Random valid topologically mixing map on [0, 1]: uniform-ish breakpoints,
// branch images drawn from contiguous element runs, intercepts solved so the
// images align with the partition exactly.
PiecewiseLinearMarkovMap random_markov_map(std::uint64_t seed,
                                           const RandomMapOptions& opt = {});

}  // namespace dynspec
