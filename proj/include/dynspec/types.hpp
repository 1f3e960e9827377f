#pragma once

#include <stdexcept>
#include <string>

namespace dynspec {

// Closed interval [lo, hi] with lo < hi.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class Errc {
    InvalidArgument,
    NotAPartition,
    NotMarkov,
    NotExpanding,
    NotMixing,
    OutOfDomain,
    NoSuchBranch,
    ParameterOutOfRange,
    DegreeOrder,
    DegreeTooLarge,
    DimensionMismatch,
    NoConvergence,
    NotConverged,
    NonPositiveVector,
    InverseBranchFailure,
    LevelTooDeep,
    BudgetExceeded,
    WindowTooNoisy,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace dynspec
