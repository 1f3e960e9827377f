#include "dynspec/linearize.hpp"

#include <algorithm>
#include <cmath>

namespace dynspec {

namespace {

long long power_count(int base, int level) {
    long long c = 1;
    for (int i = 0; i < level; ++i) {
        c *= base;
        if (c > (1ll << 40)) return c;  // already far beyond any sane cap
    }
    return c;
}

}  // namespace

std::vector<CylinderSet> cylinders(const SmoothFullBranchMap& f, int level, int cap) {
    if (level < 1) raise(Errc::InvalidArgument, "cylinder level must be >= 1");
    if (power_count(f.size(), level) > cap)
        raise(Errc::LevelTooDeep, "B^level exceeds the cylinder cap of " + std::to_string(cap));

    std::vector<CylinderSet> cur;
    for (int b = 0; b < f.size(); ++b)
        cur.push_back({{b}, f.branch(b).domain, f.branch(b).increasing});

    for (int lv = 2; lv <= level; ++lv) {
        std::vector<CylinderSet> next;
        next.reserve(cur.size() * f.size());
        for (int b = 0; b < f.size(); ++b) {
            const bool inc = f.branch(b).increasing;
            for (const CylinderSet& c : cur) {
                double a = f.inverse_branch(b, c.interval.lo);
                double e = f.inverse_branch(b, c.interval.hi);
                CylinderSet nc;
                nc.word.reserve(c.word.size() + 1);
                nc.word.push_back(b);
                nc.word.insert(nc.word.end(), c.word.begin(), c.word.end());
                nc.interval = {std::min(a, e), std::max(a, e)};
                nc.increasing = inc;
                next.push_back(std::move(nc));
            }
        }
        cur.swap(next);
    }
    return cur;
}

PiecewiseLinearMarkovMap linearize(const SmoothFullBranchMap& f, int level, int cap) {
    const std::vector<CylinderSet> cyl = cylinders(f, level, cap);
    // Image of the word (i0, ..., i_{n-1}) is the level-(n-1) cylinder of the
    // shifted word; at level 1 that is the whole domain.
    std::vector<CylinderSet> img;
    if (level == 1) {
        img.push_back({{}, f.domain(), true});
    } else {
        img = cylinders(f, level - 1, cap);
    }
    const int b = f.size();
    auto suffix_index = [&](const std::vector<int>& word) {
        long long idx = 0;
        for (std::size_t j = 1; j < word.size(); ++j) idx = idx * b + word[j];
        return static_cast<std::size_t>(level == 1 ? 0 : idx);
    };

    struct BranchSpec {
        Interval dom, im;
        bool inc;
    };
    std::vector<BranchSpec> specs;
    specs.reserve(cyl.size());
    for (const CylinderSet& c : cyl)
        specs.push_back({c.interval, img[suffix_index(c.word)].interval, c.increasing});
    std::sort(specs.begin(), specs.end(),
              [](const BranchSpec& x, const BranchSpec& y) { return x.dom.lo < y.dom.lo; });

    std::vector<double> bp;
    bp.reserve(specs.size() + 1);
    bp.push_back(specs.front().dom.lo);
    for (const BranchSpec& s : specs) bp.push_back(s.dom.hi);

    std::vector<double> slopes, intercepts;
    slopes.reserve(specs.size());
    intercepts.reserve(specs.size());
    for (const BranchSpec& s : specs) {
        double ratio = s.im.length() / s.dom.length();
        if (s.inc) {
            slopes.push_back(ratio);
            intercepts.push_back(s.im.lo - ratio * s.dom.lo);
        } else {
            slopes.push_back(-ratio);
            intercepts.push_back(s.im.hi + ratio * s.dom.lo);
        }
    }
    return {bp, slopes, intercepts};
}

}  // namespace dynspec
