#include "wold2d/lattice.hpp"

#include <charconv>

namespace wold2d {

namespace {

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    return v;
}

}  // namespace

std::string ExtInt::to_string() const {
    switch (kind) {
        case Kind::NegInf: return "-inf";
        case Kind::PosInf: return "+inf";
        default: return std::to_string(value);
    }
}

ExtInt ExtInt::parse(const std::string& s) {
    if (s == "+inf" || s == "inf") return pos_inf();
    if (s == "-inf") return neg_inf();
    return finite(parse_int(s));
}

std::string to_string(const Rational& q) {
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_int(s));
    std::int64_t num = parse_int(std::string_view(s).substr(0, slash));
    std::int64_t den = parse_int(std::string_view(s).substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return Rational(num, den);
}

std::int64_t floor_div(const Rational& q) {
    std::int64_t n = q.numerator(), d = q.denominator();  // d > 0
    std::int64_t f = n / d;
    if ((n % d != 0) && (n < 0)) --f;
    return f;
}

}  // namespace wold2d
