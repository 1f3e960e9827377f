#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dynspec/map_model.hpp"
#include "dynspec/transfer_matrix.hpp"

namespace dynspec {

// Observable on the map domain. The step family is x for |x| < 1/2 and
// x - sign(x) h beyond, the discontinuous test function used for the decay
// experiments; h = 0 recovers the identity.
class Observable {
  public:
    enum class Kind { identity, step, piecewise_polynomial, sampled };

    static Observable identity();
    static Observable step(double h);
    static Observable piecewise(PiecewisePolynomial p);
    static Observable sampled(std::function<double(double)> f);

    Kind kind() const { return kind_; }
    double step_size() const { return h_; }

    double operator()(double x) const {
        switch (kind_) {
            case Kind::identity: return x;
            case Kind::step: return eval_step(x);
            case Kind::piecewise_polynomial: return poly_.eval(x);
            case Kind::sampled: return fn_(x);
        }
        return x;
    }

  private:
    double eval_step(double x) const {
        if (x > 0.5) return x - h_;
        if (x < -0.5) return x + h_;
        return x;
    }

    Kind kind_ = Kind::identity;
    double h_ = 0.0;
    PiecewisePolynomial poly_;
    std::function<double(double)> fn_;
};

struct SimulationConfig {
    int n_max = 20;
    long long ensemble = 1'000'000;
    long long length = 2000;
    long long transient = 100;
    std::uint64_t seed = 1;
    int shards = 50;   // batching unit for standard errors and parallelism
    int threads = 0;   // 0 = hardware concurrency
    // Per-step uniform jitter of this relative amplitude keeps float orbits
    // of maps with dyadic slopes from collapsing onto exact binary fractions;
    // far below any statistical resolution. 0 disables.
    double jitter = 0x1.0p-49;
    double budget_cap = 1e12;  // limit on ensemble * length * n_max
};

// Centered time-lagged products over a seeded ensemble. Results are a pure
// function of (seed, ensemble, length, transient, shards): shards are merged
// in index order whatever the thread count.
struct CorrelationSeries {
    SimulationConfig config;  // with the shard/thread counts actually used
    double phi_mean = 0.0;
    double psi_mean = 0.0;
    std::vector<double> lagged;     // C(n), n = 0..n_max
    std::vector<double> std_error;  // batch-means error per lag
};

CorrelationSeries simulate(const PiecewiseLinearMarkovMap& map, const Observable& phi,
                           const Observable& psi, const SimulationConfig& cfg);
CorrelationSeries simulate(const SmoothFullBranchMap& map, const Observable& phi,
                           const Observable& psi, const SimulationConfig& cfg);

struct LagWindow {
    int first = 1;
    int last = 5;
};

inline LagWindow early_window() { return {1, 5}; }
// Window spanning the last 8 lags whose signal clears 3 standard errors.
LagWindow tail_window(const CorrelationSeries& series);

struct DecayFit {
    double rate = 0.0;  // decay exponent: C(n) ~ exp(-rate * n)
    LagWindow window;
    int lags_used = 0;
    double residual_rms = 0.0;
};

// Least-squares slope of log|C(n)| over the lags in the window that exceed
// 3 standard errors; needs at least 4 usable lags (WindowTooNoisy).
DecayFit fit_decay(const CorrelationSeries& series, const LagWindow& window);

// Time average of log|f'| along one orbit; exact-breakpoint hits are nudged
// and the same ulp-level jitter as the ensemble runs keeps dyadic-slope
// orbits generic. Deterministic in (map, x0, n).
double lyapunov_orbit(const PiecewiseLinearMarkovMap& map, double x0, long long n);
double lyapunov_orbit(const SmoothFullBranchMap& map, double x0, long long n);

}  // namespace dynspec
