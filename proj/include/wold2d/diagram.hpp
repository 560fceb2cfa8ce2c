#pragma once

#include <optional>
#include <set>
#include <vector>

#include "wold2d/halfplane.hpp"

namespace wold2d {

/// Upper set J (J + Z_+^2 inside J) stored as a column staircase:
/// (i,j) in J iff j >= b(i). b(i) = +inf marks an empty column and
/// b(i) = -inf a full one. The boundary is nonincreasing in i.
class Diagram {
public:
    Diagram() = default;
    Diagram(std::int64_t lo, std::vector<ExtInt> boundary);

    std::int64_t lo() const { return lo_; }
    std::int64_t hi() const { return lo_ + static_cast<std::int64_t>(b_.size()) - 1; }
    std::size_t width() const { return b_.size(); }
    bool has_column(std::int64_t i) const { return i >= lo_ && i <= hi(); }
    const ExtInt& b(std::int64_t i) const;
    const std::vector<ExtInt>& boundary() const { return b_; }

    friend bool operator==(const Diagram&, const Diagram&) = default;

private:
    std::int64_t lo_ = 0;
    std::vector<ExtInt> b_;
};

bool diagram_contains(const Diagram& d, Point p);

Diagram translate(const Diagram& d, Point by);

/// Offset (dx,dy) with d2 = translate(d1, (dx,dy)), or none. Requires equal
/// column counts; dy is pinned by the finite columns (0 if none are finite).
std::optional<Point> translation_equivalent(const Diagram& d1, const Diagram& d2);

struct PeriodDescriptor {
    std::int64_t m = 1;
    std::int64_t n = 0;
    // J_0: the columns first_column .. first_column + m - 1 of J.
    std::int64_t first_column = 0;
    std::vector<ExtInt> period_boundary;
};

/// Lexicographically smallest (m,n), 1 <= m <= m_max, 0 <= n <= n_max, with
/// b(i+m) = b(i) - n on every testable column pair. Masked columns are left
/// out of the comparison. J_0 starts at column 0 when it is in range.
std::optional<PeriodDescriptor> find_period(const Diagram& d, std::int64_t m_max, std::int64_t n_max,
                                            const std::set<std::int64_t>& masked_columns = {});

/// Checks J = disjoint union of J_k = (km, -kn) + J_0 on columns in range
/// and rows j_lo..j_hi. Each column slab meets exactly one J_k, so the check
/// reduces to membership agreement.
bool verify_period_decomposition(const Diagram& d, const PeriodDescriptor& period, std::int64_t j_lo,
                                 std::int64_t j_hi, const std::set<std::int64_t>& masked_columns = {});

/// -S u {(0,0)} as a diagram on columns [-window, window];
/// b(i) = max{j : (i,j) in S} + 1.
Diagram halfplane_to_diagram(const HalfPlane& hp, std::int64_t window);

}  // namespace wold2d
