#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mosearch {

// Objective vectors are minimization-oriented throughout this module.
using ObjectiveVector = std::vector<double>;

inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("objective arity mismatch");
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

namespace metrics_detail {

// Area between the staircase of points and the nadir corner.
inline double hv2(std::vector<ObjectiveVector> pts, double nx, double ny) {
    std::sort(pts.begin(), pts.end());
    double hv = 0.0, ceiling = ny;
    for (const ObjectiveVector& p : pts) {
        if (p[1] < ceiling) {
            hv += (nx - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    return hv;
}

}  // namespace metrics_detail

// Exact dominated hypervolume against a nadir corner. Two objectives are
// swept as a staircase; three are sliced along the last axis.
inline double hypervolume(const std::vector<ObjectiveVector>& front, const ObjectiveVector& nadir) {
    const std::size_t arity = nadir.size();
    if (arity != 2 && arity != 3)
        throw std::invalid_argument("hypervolume supports 2 or 3 objectives, got " +
                                    std::to_string(arity));
    for (const ObjectiveVector& p : front) {
        if (p.size() != arity) throw std::invalid_argument("objective arity mismatch");
        for (std::size_t i = 0; i < arity; ++i)
            if (p[i] > nadir[i])
                throw std::invalid_argument("front point lies outside the nadir box");
    }
    if (front.empty()) return 0.0;

    if (arity == 2) return metrics_detail::hv2(front, nadir[0], nadir[1]);

    std::vector<double> levels;
    for (const ObjectiveVector& p : front) levels.push_back(p[2]);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    double hv = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double top = i + 1 < levels.size() ? levels[i + 1] : nadir[2];
        std::vector<ObjectiveVector> slab;
        for (const ObjectiveVector& p : front)
            if (p[2] <= levels[i]) slab.push_back({p[0], p[1]});
        hv += metrics_detail::hv2(std::move(slab), nadir[0], nadir[1]) * (top - levels[i]);
    }
    return hv;
}

struct ReferenceSet {
    std::vector<ObjectiveVector> points;  // pairwise non-dominated, sorted, unique
};

inline ReferenceSet merge_reference_set(const std::vector<std::vector<ObjectiveVector>>& fronts) {
    std::set<ObjectiveVector> pool;
    std::size_t arity = 0;
    for (const auto& front : fronts) {
        for (const ObjectiveVector& p : front) {
            if (arity == 0) arity = p.size();
            if (p.size() != arity) throw std::invalid_argument("objective arity mismatch");
            pool.insert(p);
        }
    }
    ReferenceSet rs;
    for (const ObjectiveVector& p : pool) {
        bool covered = false;
        for (const ObjectiveVector& q : pool)
            if (dominates(q, p)) {
                covered = true;
                break;
            }
        if (!covered) rs.points.push_back(p);
    }
    return rs;
}

// Share of the reference set contributed by `contribution`, matched by exact
// equality (or a documented epsilon for real-valued objectives).
inline double bsr(const std::vector<ObjectiveVector>& contribution, const ReferenceSet& reference,
                  double epsilon = 0.0) {
    if (reference.points.empty()) throw std::invalid_argument("empty reference set");
    auto matches = [epsilon](const ObjectiveVector& a, const ObjectiveVector& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > epsilon) return false;
        return true;
    };
    std::size_t hit = 0;
    for (const ObjectiveVector& r : reference.points)
        for (const ObjectiveVector& c : contribution)
            if (matches(c, r)) {
                ++hit;
                break;
            }
    return static_cast<double>(hit) / static_cast<double>(reference.points.size());
}

// Statistics mirror the reported table columns. Entries that need more
// samples than given are NaN.
struct SummaryStats {
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double sd = std::numeric_limits<double>::quiet_NaN();
    double skewness = std::numeric_limits<double>::quiet_NaN();
    double kurtosis = std::numeric_limits<double>::quiet_NaN();  // excess
};

inline SummaryStats summarize(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("summarize needs at least one sample");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();

    SummaryStats s;
    s.min = samples.front();
    s.max = samples.back();
    s.median = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);

    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    if (n >= 2) s.sd = std::sqrt(m2 / static_cast<double>(n - 1));
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (n >= 3 && m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

struct MannWhitneyResult {
    double u;  // U statistic of the first sample
    double p_two_sided;
};

// Midrank-based U with a tie-corrected normal approximation (documented
// approximation; fine at the experiment's sample sizes).
inline MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u needs two samples");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());

    std::vector<std::pair<double, int>> all;  // value, sample id
    for (double x : a) all.push_back({x, 0});
    for (double x : b) all.push_back({x, 1});
    std::sort(all.begin(), all.end());

    double rank_sum_a = 0.0, tie_term = 0.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second == 0) rank_sum_a += midrank;
        i = j;
    }

    const double u = rank_sum_a - na * (na + 1.0) / 2.0;
    const double mu = na * nb / 2.0;
    const double total = na + nb;
    const double var =
        na * nb / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    double p = 1.0;
    if (var > 0.0 && u != mu) {
        const double shift = u > mu ? -0.5 : 0.5;  // continuity correction
        const double z = (u - mu + shift) / std::sqrt(var);
        p = std::erfc(std::abs(z) / std::sqrt(2.0));
    }
    return {u, std::min(1.0, p)};
}

struct EffectSize {
    double d = std::numeric_limits<double>::quiet_NaN();
    std::string label = "undefined";
};

inline EffectSize cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("cohens_d needs at least two samples per group");
    auto mean_var = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        return std::pair{mean, ss};
    };
    const auto [mean_a, ss_a] = mean_var(a);
    const auto [mean_b, ss_b] = mean_var(b);
    const double pooled =
        std::sqrt((ss_a + ss_b) / static_cast<double>(a.size() + b.size() - 2));

    EffectSize e;
    if (pooled == 0.0) {
        if (mean_a != mean_b) return e;  // separated constants: effect size undefined
        e.d = 0.0;
    } else {
        e.d = (mean_a - mean_b) / pooled;
    }
    const double mag = std::abs(e.d);
    e.label = mag < 0.2 ? "negligible" : mag < 0.5 ? "small" : mag < 0.8 ? "medium" : "large";
    return e;
}

// Worst observed value per objective pushed out by a relative margin, so
// boundary points keep a nonzero dominated volume.
inline ObjectiveVector nadir_with_margin(const std::vector<ObjectiveVector>& points,
                                         double margin = 0.01) {
    if (points.empty()) throw std::invalid_argument("nadir of an empty set");
    ObjectiveVector lo = points.front(), hi = points.front();
    for (const ObjectiveVector& p : points) {
        if (p.size() != lo.size()) throw std::invalid_argument("objective arity mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    ObjectiveVector nadir(hi.size());
    for (std::size_t i = 0; i < hi.size(); ++i) {
        const double range = hi[i] - lo[i];
        nadir[i] = hi[i] + margin * (range > 0.0 ? range : 1.0);
    }
    return nadir;
}

}  // namespace mosearch
