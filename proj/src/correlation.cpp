#include "dynspec/correlation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>
#include <utility>

#include "dynspec/rng.hpp"

namespace dynspec {

Observable Observable::identity() { return Observable{}; }

Observable Observable::step(double h) {
    Observable o;
    o.kind_ = Kind::step;
    o.h_ = h;
    return o;
}

Observable Observable::piecewise(PiecewisePolynomial p) {
    Observable o;
    o.kind_ = Kind::piecewise_polynomial;
    o.poly_ = std::move(p);
    return o;
}

Observable Observable::sampled(std::function<double(double)> f) {
    if (!f) raise(Errc::InvalidArgument, "sampled observable requires a callable");
    Observable o;
    o.kind_ = Kind::sampled;
    o.fn_ = std::move(f);
    return o;
}

namespace {

struct Jitter {
    double lo = 0.0;
    double hi = 1.0;
    double amp = 0.0;

    double apply(double y, SplitMix64& rng) const {
        if (amp > 0.0) y += (rng.uniform01() - 0.5) * amp;
        if (y < lo) y = lo + (lo - y);
        if (y > hi) y = hi - (y - hi);
        if (y < lo) y = lo;
        if (y > hi) y = hi;
        return y;
    }
};

struct PiecewiseLinearStep {
    const double* bp = nullptr;
    const double* slope = nullptr;
    const double* icpt = nullptr;
    int branches = 0;
    double nudge = 0.0;
    Jitter jit;

    int branch(double& x) const {
        int k = static_cast<int>(std::upper_bound(bp + 1, bp + branches, x) - (bp + 1));
        if (x == bp[k]) x += nudge;
        return k;
    }

    double operator()(double x, SplitMix64& rng) const {
        int k = branch(x);
        return jit.apply(slope[k] * x + icpt[k], rng);
    }
};

// F(x) = (1 - (2c+2)|x|) / (1 + 2c|x|) on [-1, 1]; even, so one formula.
struct MoebiusStep {
    double c2 = 0.0;
    double c2p2 = 2.0;
    double nudge = 0.0;
    Jitter jit;

    double operator()(double x, SplitMix64& rng) const {
        if (x == 0.0) x = nudge;
        double ax = x < 0.0 ? -x : x;
        double y = (1.0 - c2p2 * ax) / (1.0 + c2 * ax);
        return jit.apply(y, rng);
    }
};

struct SmoothStep {
    const SmoothFullBranchMap* map = nullptr;
    Jitter jit;

    double operator()(double x, SplitMix64& rng) const {
        return jit.apply(map->eval(x).first, rng);
    }
};

struct ShardSums {
    std::vector<double> prod;
    double sum_phi = 0.0;
    double sum_psi = 0.0;
    long long members = 0;
};

// Fixed summation order (four strided partial sums), so results do not
// depend on the optimizer's reassociation choices.
double dot4(const double* a, const double* b, long long n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    long long i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

template <class StepFn>
ShardSums run_shard(const StepFn& step, const Observable& phi, const Observable& psi,
                    const SimulationConfig& cfg, std::uint64_t shard, long long members,
                    Interval dom, std::vector<double>& phibuf, std::vector<double>& psibuf) {
    const int nm = cfg.n_max;
    const long long len = cfg.length;
    const long long total = len + nm;
    ShardSums acc;
    acc.prod.assign(nm + 1, 0.0);
    acc.members = members;
    SplitMix64 rng = shard_stream(cfg.seed, shard);
    const double span = dom.length();
    for (long long m = 0; m < members; ++m) {
        double x = dom.lo + rng.uniform01() * span;
        for (long long t = 0; t < cfg.transient; ++t) x = step(x, rng);
        for (long long t = 0; t < total; ++t) {
            phibuf[static_cast<std::size_t>(t)] = phi(x);
            psibuf[static_cast<std::size_t>(t)] = psi(x);
            x = step(x, rng);
        }
        double sp = 0.0, sq = 0.0;
        for (long long t = 0; t < len; ++t) {
            sp += phibuf[static_cast<std::size_t>(t)];
            sq += psibuf[static_cast<std::size_t>(t)];
        }
        acc.sum_phi += sp;
        acc.sum_psi += sq;
        for (int n = 0; n <= nm; ++n) acc.prod[n] += dot4(phibuf.data() + n, psibuf.data(), len);
    }
    return acc;
}

void check_config(const SimulationConfig& cfg) {
    if (cfg.n_max < 1) raise(Errc::InvalidArgument, "n_max must be at least 1");
    if (cfg.length < 1) raise(Errc::InvalidArgument, "window length must be at least 1");
    if (cfg.ensemble < 1) raise(Errc::InvalidArgument, "ensemble must be at least 1");
    if (cfg.transient < 0) raise(Errc::InvalidArgument, "transient must be nonnegative");
    if (cfg.shards < 1) raise(Errc::InvalidArgument, "shards must be at least 1");
    if (cfg.jitter < 0.0) raise(Errc::InvalidArgument, "jitter must be nonnegative");
    double work = static_cast<double>(cfg.ensemble) * static_cast<double>(cfg.length);
    if (work < 1e4)
        raise(Errc::InvalidArgument, "ensemble * length below 1e4 gives unusable estimates");
    if (work * cfg.n_max > cfg.budget_cap)
        raise(Errc::BudgetExceeded, "ensemble * length * n_max exceeds the configured cap");
}

template <class StepFn>
CorrelationSeries simulate_impl(const StepFn& step, Interval dom, const Observable& phi,
                                const Observable& psi, const SimulationConfig& cfg) {
    check_config(cfg);
    const int shards = static_cast<int>(std::min<long long>(cfg.shards, cfg.ensemble));
    int threads = cfg.threads;
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, shards);

    const long long base = cfg.ensemble / shards;
    const long long extra = cfg.ensemble % shards;
    auto shard_members = [&](int s) { return base + (s < extra ? 1 : 0); };

    std::vector<ShardSums> sums(shards);
    auto work = [&](int first) {
        std::vector<double> phibuf(static_cast<std::size_t>(cfg.length + cfg.n_max));
        std::vector<double> psibuf(phibuf.size());
        for (int s = first; s < shards; s += threads)
            sums[s] = run_shard(step, phi, psi, cfg, static_cast<std::uint64_t>(s),
                                shard_members(s), dom, phibuf, psibuf);
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }

    CorrelationSeries out;
    out.config = cfg;
    out.config.shards = shards;
    out.config.threads = threads;

    const double samples = static_cast<double>(cfg.ensemble) * static_cast<double>(cfg.length);
    double sphi = 0.0, spsi = 0.0;
    for (const auto& s : sums) {
        sphi += s.sum_phi;
        spsi += s.sum_psi;
    }
    out.phi_mean = sphi / samples;
    out.psi_mean = spsi / samples;

    out.lagged.assign(cfg.n_max + 1, 0.0);
    out.std_error.assign(cfg.n_max + 1, 0.0);
    for (int n = 0; n <= cfg.n_max; ++n) {
        double p = 0.0;
        for (const auto& s : sums) p += s.prod[n];
        out.lagged[n] = p / samples - out.phi_mean * out.psi_mean;
    }
    if (shards >= 2) {
        for (int n = 0; n <= cfg.n_max; ++n) {
            double var = 0.0;
            for (int s = 0; s < shards; ++s) {
                double w = static_cast<double>(sums[s].members) / cfg.ensemble;
                double cs = sums[s].prod[n] /
                                (static_cast<double>(sums[s].members) * cfg.length) -
                            out.phi_mean * out.psi_mean;
                double d = cs - out.lagged[n];
                var += w * w * d * d;
            }
            out.std_error[n] = std::sqrt(var * shards / (shards - 1.0));
        }
    }
    return out;
}

Jitter make_jitter(Interval dom, double scale) {
    return Jitter{dom.lo, dom.hi, scale * dom.length()};
}

PiecewiseLinearStep make_step(const PiecewiseLinearMarkovMap& map, const std::vector<double>& slopes,
                              const std::vector<double>& icpts, double jitter_scale) {
    PiecewiseLinearStep st;
    st.bp = map.breakpoints().data();
    st.slope = slopes.data();
    st.icpt = icpts.data();
    st.branches = map.size();
    st.nudge = 1e-15 * map.domain().length();
    st.jit = make_jitter(map.domain(), jitter_scale);
    return st;
}

}  // namespace

CorrelationSeries simulate(const PiecewiseLinearMarkovMap& map, const Observable& phi,
                           const Observable& psi, const SimulationConfig& cfg) {
    std::vector<double> slopes(map.size()), icpts(map.size());
    for (int k = 0; k < map.size(); ++k) {
        slopes[k] = map.slope(k);
        icpts[k] = map.intercept(k);
    }
    return simulate_impl(make_step(map, slopes, icpts, cfg.jitter), map.domain(), phi, psi, cfg);
}

CorrelationSeries simulate(const SmoothFullBranchMap& map, const Observable& phi,
                           const Observable& psi, const SimulationConfig& cfg) {
    if (map.family() == "moebius") {
        MoebiusStep st;
        st.c2 = 2.0 * map.parameter();
        st.c2p2 = st.c2 + 2.0;
        st.nudge = 1e-15 * map.domain().length();
        st.jit = make_jitter(map.domain(), cfg.jitter);
        return simulate_impl(st, map.domain(), phi, psi, cfg);
    }
    SmoothStep st;
    st.map = &map;
    st.jit = make_jitter(map.domain(), cfg.jitter);
    return simulate_impl(st, map.domain(), phi, psi, cfg);
}

namespace {

std::vector<int> usable_lags(const CorrelationSeries& series, int first, int last) {
    std::vector<int> lags;
    first = std::max(first, 1);
    last = std::min<int>(last, series.config.n_max);
    for (int n = first; n <= last; ++n) {
        double c = series.lagged[n];
        if (c != 0.0 && std::abs(c) > 3.0 * series.std_error[n]) lags.push_back(n);
    }
    return lags;
}

}  // namespace

LagWindow tail_window(const CorrelationSeries& series) {
    std::vector<int> lags = usable_lags(series, 1, series.config.n_max);
    if (lags.size() < 4)
        raise(Errc::WindowTooNoisy, "fewer than 4 lags clear 3 standard errors");
    std::size_t first = lags.size() > 8 ? lags.size() - 8 : 0;
    return {lags[first], lags.back()};
}

DecayFit fit_decay(const CorrelationSeries& series, const LagWindow& window) {
    if (window.first > window.last)
        raise(Errc::InvalidArgument, "lag window is empty");
    std::vector<int> lags = usable_lags(series, window.first, window.last);
    if (lags.size() < 4)
        raise(Errc::WindowTooNoisy, "fewer than 4 usable lags in the fit window");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int n : lags) {
        double y = std::log(std::abs(series.lagged[n]));
        sx += n;
        sy += y;
        sxx += static_cast<double>(n) * n;
        sxy += n * y;
    }
    const double m = static_cast<double>(lags.size());
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double icpt = (sy - slope * sx) / m;

    double rss = 0.0;
    for (int n : lags) {
        double y = std::log(std::abs(series.lagged[n]));
        double r = y - (icpt + slope * n);
        rss += r * r;
    }

    DecayFit fit;
    fit.rate = -slope;
    fit.window = {lags.front(), lags.back()};
    fit.lags_used = static_cast<int>(lags.size());
    fit.residual_rms = std::sqrt(rss / m);
    return fit;
}

namespace {

SplitMix64 orbit_stream(double x0, std::uint64_t salt) {
    return SplitMix64(mix64(std::bit_cast<std::uint64_t>(x0) ^ salt));
}

}  // namespace

double lyapunov_orbit(const PiecewiseLinearMarkovMap& map, double x0, long long n) {
    if (n < 1) raise(Errc::InvalidArgument, "orbit length must be at least 1");
    if (!map.domain().contains(x0)) raise(Errc::OutOfDomain, "orbit start outside the domain");
    std::vector<double> slopes(map.size()), icpts(map.size()), lslope(map.size());
    for (int k = 0; k < map.size(); ++k) {
        slopes[k] = map.slope(k);
        icpts[k] = map.intercept(k);
        lslope[k] = std::log(std::abs(map.slope(k)));
    }
    PiecewiseLinearStep st = make_step(map, slopes, icpts, 0x1.0p-49);
    SplitMix64 rng = orbit_stream(x0, 0x7f4a7c15ULL);
    double x = x0;
    double sum = 0.0;
    for (long long t = 0; t < n; ++t) {
        int k = st.branch(x);
        sum += lslope[k];
        x = st.jit.apply(st.slope[k] * x + st.icpt[k], rng);
    }
    return sum / static_cast<double>(n);
}

double lyapunov_orbit(const SmoothFullBranchMap& map, double x0, long long n) {
    if (n < 1) raise(Errc::InvalidArgument, "orbit length must be at least 1");
    if (!map.domain().contains(x0)) raise(Errc::OutOfDomain, "orbit start outside the domain");
    Jitter jit = make_jitter(map.domain(), 0x1.0p-49);
    SplitMix64 rng = orbit_stream(x0, 0x7f4a7c15ULL);
    double x = x0;
    double sum = 0.0;
    for (long long t = 0; t < n; ++t) {
        sum += std::log(std::abs(map.derivative(x)));
        x = jit.apply(map.eval(x).first, rng);
    }
    return sum / static_cast<double>(n);
}

}  // namespace dynspec
