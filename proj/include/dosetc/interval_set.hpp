#pragma once

#include <vector>

#include "dosetc/matrix.hpp"

namespace dosetc {

/// Half-open interval [start, start+length); length 0 is the impulse {start}.
struct Interval {
    double start = 0.0;
    double length = 0.0;
    double end() const { return start + length; }
};

struct ordering_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Sorted disjoint union of half-open intervals and impulse points.
/// Normalization merges overlapping/touching positive intervals and drops
/// impulses covered by a positive interval; starts stay strictly increasing.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> intervals);

    static IntervalSet empty_set() { return IntervalSet(); }

    const std::vector<Interval>& intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }

    /// start <= t < start+length, or t == start for an impulse.
    bool contains(double t) const;
    /// start < t < start+length (interior only; impulses have none).
    bool contains_interior(double t) const;

    double measure() const;

    IntervalSet union_with(const IntervalSet& other) const;
    IntervalSet intersect(const IntervalSet& other) const;
    /// Clip to the closed window [a, b].
    IntervalSet restrict_to(double a, double b) const;
    /// [a, b] minus this set, as half-open gaps (impulse points are not
    /// carved out; they are measure zero).
    IntervalSet complement_within(double a, double b) const;

    std::vector<double> start_points() const;
    std::vector<double> end_points() const;

private:
    std::vector<Interval> intervals_;
    void normalize();
};

}  // namespace dosetc
