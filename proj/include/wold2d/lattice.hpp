#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <boost/rational.hpp>

namespace wold2d {

using Rational = boost::rational<std::int64_t>;

struct Point {
    std::int64_t i = 0;
    std::int64_t j = 0;

    friend bool operator==(const Point&, const Point&) = default;
    friend auto operator<=>(const Point&, const Point&) = default;
    Point operator+(const Point& o) const { return {i + o.i, j + o.j}; }
    Point operator-(const Point& o) const { return {i - o.i, j - o.j}; }
    Point operator-() const { return {-i, -j}; }
};

using Predicate = std::function<bool(Point)>;

/// Integer extended by the two infinities. Used for corner sequences and
/// diagram boundaries, where an infinite value means "whole row/column"
/// or "empty row/column".
struct ExtInt {
    enum class Kind { NegInf, Finite, PosInf };
    Kind kind = Kind::Finite;
    std::int64_t value = 0;

    static ExtInt finite(std::int64_t v) { return {Kind::Finite, v}; }
    static ExtInt pos_inf() { return {Kind::PosInf, 0}; }
    static ExtInt neg_inf() { return {Kind::NegInf, 0}; }

    bool is_finite() const { return kind == Kind::Finite; }
    bool is_pos_inf() const { return kind == Kind::PosInf; }
    bool is_neg_inf() const { return kind == Kind::NegInf; }

    std::int64_t get() const {
        if (!is_finite()) throw std::domain_error("ExtInt: infinite value has no integer representation");
        return value;
    }

    friend bool operator==(const ExtInt& a, const ExtInt& b) {
        return a.kind == b.kind && (a.kind != Kind::Finite || a.value == b.value);
    }
    friend bool operator<(const ExtInt& a, const ExtInt& b) {
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        return a.kind == Kind::Finite && a.value < b.value;
    }
    friend bool operator<=(const ExtInt& a, const ExtInt& b) { return a < b || a == b; }

    ExtInt plus(std::int64_t d) const { return is_finite() ? finite(value + d) : *this; }

    std::string to_string() const;
    static ExtInt parse(const std::string& s);
};

// Errors raised by the library. Each maps to a distinct failure mode named
// in the operation contracts.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct WindowExceeded : std::out_of_range {
    using std::out_of_range::out_of_range;
};

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& s);

std::int64_t floor_div(const Rational& q);

}  // namespace wold2d
