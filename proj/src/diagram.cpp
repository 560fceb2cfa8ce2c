#include "wold2d/diagram.hpp"

namespace wold2d {

Diagram::Diagram(std::int64_t lo, std::vector<ExtInt> boundary) : lo_(lo), b_(std::move(boundary)) {
    for (std::size_t k = 1; k < b_.size(); ++k)
        if (b_[k - 1] < b_[k])
            throw DomainError("diagram boundary must be nonincreasing (column " +
                              std::to_string(lo_ + static_cast<std::int64_t>(k)) + ")");
}

const ExtInt& Diagram::b(std::int64_t i) const {
    if (!has_column(i))
        throw WindowExceeded("column " + std::to_string(i) + " outside diagram range [" + std::to_string(lo_) +
                             "," + std::to_string(hi()) + "]");
    return b_[static_cast<std::size_t>(i - lo_)];
}

bool diagram_contains(const Diagram& d, Point p) {
    const ExtInt& b = d.b(p.i);
    if (b.is_pos_inf()) return false;
    if (b.is_neg_inf()) return true;
    return p.j >= b.value;
}

Diagram translate(const Diagram& d, Point by) {
    std::vector<ExtInt> nb;
    nb.reserve(d.width());
    for (const ExtInt& e : d.boundary()) nb.push_back(e.plus(by.j));
    return Diagram(d.lo() + by.i, std::move(nb));
}

std::optional<Point> translation_equivalent(const Diagram& d1, const Diagram& d2) {
    if (d1.width() != d2.width()) return std::nullopt;
    const std::int64_t dx = d2.lo() - d1.lo();
    std::optional<std::int64_t> dy;
    for (std::size_t k = 0; k < d1.width(); ++k) {
        const ExtInt &a = d1.boundary()[k], &b = d2.boundary()[k];
        if (a.kind != b.kind) return std::nullopt;
        if (!a.is_finite()) continue;
        std::int64_t off = b.value - a.value;
        if (dy && *dy != off) return std::nullopt;
        dy = off;
    }
    return Point{dx, dy.value_or(0)};
}

namespace {

bool pair_matches(const Diagram& d, std::int64_t m, std::int64_t n, const std::set<std::int64_t>& mask,
                  bool& tested) {
    for (std::int64_t i = d.lo(); i + m <= d.hi(); ++i) {
        if (mask.count(i) || mask.count(i + m)) continue;
        const ExtInt &a = d.b(i), &b = d.b(i + m);
        if (!a.is_finite() || !b.is_finite()) {
            if (a.kind != b.kind) return false;
            continue;
        }
        tested = true;
        if (b.value != a.value - n) return false;
    }
    return true;
}

}  // namespace

std::optional<PeriodDescriptor> find_period(const Diagram& d, std::int64_t m_max, std::int64_t n_max,
                                            const std::set<std::int64_t>& masked_columns) {
    for (std::int64_t m = 1; m <= m_max; ++m)
        for (std::int64_t n = 0; n <= n_max; ++n) {
            bool tested = false;
            if (!pair_matches(d, m, n, masked_columns, tested) || !tested) continue;

            auto usable = [&](std::int64_t c) {
                for (std::int64_t i = c; i < c + m; ++i)
                    if (!d.has_column(i) || masked_columns.count(i)) return false;
                return true;
            };
            std::int64_t first = d.lo();
            for (std::int64_t c = std::max<std::int64_t>(0, d.lo()); c + m - 1 <= d.hi(); ++c)
                if (usable(c)) {
                    first = c;
                    break;
                }
            if (first + m - 1 > d.hi()) continue;
            PeriodDescriptor pd;
            pd.m = m;
            pd.n = n;
            pd.first_column = first;
            for (std::int64_t i = first; i < first + m; ++i) pd.period_boundary.push_back(d.b(i));
            return pd;
        }
    return std::nullopt;
}

bool verify_period_decomposition(const Diagram& d, const PeriodDescriptor& period, std::int64_t j_lo,
                                 std::int64_t j_hi, const std::set<std::int64_t>& masked_columns) {
    const std::int64_t m = period.m, n = period.n, c0 = period.first_column;
    auto fdiv = [](std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); };
    for (std::int64_t i = d.lo(); i <= d.hi(); ++i) {
        if (masked_columns.count(i)) continue;
        const std::int64_t k = fdiv(i - c0, m);
        const ExtInt& b0 = period.period_boundary[static_cast<std::size_t>(i - k * m - c0)];
        for (std::int64_t j = j_lo; j <= j_hi; ++j) {
            // (i,j) in J_k iff (i - km, j + kn) in J_0
            bool in_jk = b0.is_neg_inf() || (b0.is_finite() && j + k * n >= b0.value);
            if (in_jk != diagram_contains(d, {i, j})) return false;
        }
    }
    return true;
}

Diagram halfplane_to_diagram(const HalfPlane& hp, std::int64_t window) {
    if (window < 0) throw DomainError("halfplane_to_diagram: negative window");
    std::vector<ExtInt> b;
    for (std::int64_t i = -window; i <= window; ++i) {
        // the column of S is a down-ray; its complement is -S plus the origin
        b.push_back(column_max(hp, i).plus(1));
    }
    return Diagram(-window, std::move(b));
}

}  // namespace wold2d
