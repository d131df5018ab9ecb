#include "dosetc/interval_set.hpp"

#include <algorithm>
#include <cmath>

namespace dosetc {

IntervalSet::IntervalSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    for (const Interval& iv : intervals_) {
        if (!std::isfinite(iv.start) || !std::isfinite(iv.length)) {
            throw numeric_error("IntervalSet: non-finite interval");
        }
        if (iv.start < 0.0 || iv.length < 0.0) {
            throw ordering_error("IntervalSet: negative start or length");
        }
    }
    normalize();
}

void IntervalSet::normalize() {
    std::vector<Interval> positive;
    std::vector<double> impulses;
    for (const Interval& iv : intervals_) {
        if (iv.length > 0.0) {
            positive.push_back(iv);
        } else {
            impulses.push_back(iv.start);
        }
    }
    std::sort(positive.begin(), positive.end(),
              [](const Interval& a, const Interval& b) { return a.start < b.start; });

    std::vector<Interval> merged;
    for (const Interval& iv : positive) {
        if (!merged.empty() && iv.start <= merged.back().end()) {
            merged.back().length = std::max(merged.back().end(), iv.end()) - merged.back().start;
        } else {
            merged.push_back(iv);
        }
    }

    std::sort(impulses.begin(), impulses.end());
    impulses.erase(std::unique(impulses.begin(), impulses.end()), impulses.end());

    intervals_.clear();
    std::size_t pi = 0;
    for (double p : impulses) {
        // Emit positive intervals that lie before this impulse; drop the
        // impulse when a positive interval already contains it.
        bool covered = false;
        while (pi < merged.size() && merged[pi].start <= p) {
            if (p < merged[pi].end()) {
                covered = true;
                break;
            }
            intervals_.push_back(merged[pi]);
            ++pi;
        }
        if (!covered) intervals_.push_back(Interval{p, 0.0});
    }
    for (; pi < merged.size(); ++pi) intervals_.push_back(merged[pi]);
    std::sort(intervals_.begin(), intervals_.end(),
              [](const Interval& a, const Interval& b) { return a.start < b.start; });
}

bool IntervalSet::contains(double t) const {
    for (const Interval& iv : intervals_) {
        if (iv.start > t) break;
        if (t == iv.start || t < iv.end()) return true;
    }
    return false;
}

bool IntervalSet::contains_interior(double t) const {
    for (const Interval& iv : intervals_) {
        if (iv.start >= t) break;
        if (t < iv.end()) return true;
    }
    return false;
}

double IntervalSet::measure() const {
    double m = 0.0;
    for (const Interval& iv : intervals_) m += iv.length;
    return m;
}

IntervalSet IntervalSet::union_with(const IntervalSet& other) const {
    std::vector<Interval> all = intervals_;
    all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
    return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
    const auto member = [](const Interval& iv, double t) {
        return t == iv.start || (t > iv.start && t < iv.end());
    };
    std::vector<Interval> out;
    for (const Interval& a : intervals_) {
        for (const Interval& b : other.intervals_) {
            if (a.length > 0.0 && b.length > 0.0) {
                const double lo = std::max(a.start, b.start);
                const double hi = std::min(a.end(), b.end());
                if (hi > lo) out.push_back(Interval{lo, hi - lo});
            } else if (a.length == 0.0) {
                if (member(b, a.start)) out.push_back(Interval{a.start, 0.0});
            } else {
                if (member(a, b.start)) out.push_back(Interval{b.start, 0.0});
            }
        }
    }
    return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::restrict_to(double a, double b) const {
    if (a > b) throw ordering_error("IntervalSet::restrict_to: a > b");
    std::vector<Interval> out;
    for (const Interval& iv : intervals_) {
        if (iv.length == 0.0) {
            if (iv.start >= a && iv.start <= b) out.push_back(iv);
            continue;
        }
        const double lo = std::max(iv.start, a);
        const double hi = std::min(iv.end(), b);
        if (hi > lo) {
            out.push_back(Interval{lo, hi - lo});
        } else if (hi == lo && iv.start <= lo && lo < iv.end()) {
            // window touches the set at a single covered point
            out.push_back(Interval{lo, 0.0});
        }
    }
    return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::complement_within(double a, double b) const {
    if (a > b) throw ordering_error("IntervalSet::complement_within: a > b");
    std::vector<Interval> out;
    double cursor = a;
    const IntervalSet clipped = restrict_to(a, b);
    for (const Interval& iv : clipped.intervals()) {
        if (iv.length == 0.0) continue;
        if (iv.start > cursor) out.push_back(Interval{cursor, iv.start - cursor});
        cursor = std::max(cursor, iv.end());
    }
    if (cursor < b) out.push_back(Interval{cursor, b - cursor});
    return IntervalSet(std::move(out));
}

std::vector<double> IntervalSet::start_points() const {
    std::vector<double> out;
    out.reserve(intervals_.size());
    for (const Interval& iv : intervals_) out.push_back(iv.start);
    return out;
}

std::vector<double> IntervalSet::end_points() const {
    std::vector<double> out;
    out.reserve(intervals_.size());
    for (const Interval& iv : intervals_) out.push_back(iv.end());
    return out;
}

}  // namespace dosetc
