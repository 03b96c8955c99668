#pragma once

// Exact arithmetic over Q and real quadratic extensions Q(sqrt(d)).
//
// Every number produced by the two-level constructions lives in a single
// extension Q(sqrt(k-lambda)); arithmetic between values of distinct
// irrational radicands is rejected rather than widened to a number tower.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cretan {

using Int = boost::multiprecision::cpp_int;

class qfield_error : public std::runtime_error {
public:
    explicit qfield_error(const std::string& msg) : std::runtime_error(msg) {}
};

class mixed_radicand_error : public qfield_error {
public:
    mixed_radicand_error(const Int& a, const Int& b)
        : qfield_error("mixed radicands: sqrt(" + a.str() + ") vs sqrt(" + b.str() + ")") {}
};

class division_by_zero_error : public qfield_error {
public:
    division_by_zero_error() : qfield_error("division by zero") {}
};

class float_overflow_error : public qfield_error {
public:
    float_overflow_error() : qfield_error("value exceeds double range") {}
};

class number_parse_error : public qfield_error {
public:
    explicit number_parse_error(const std::string& msg) : qfield_error("parse error: " + msg) {}
};

/// Arbitrary-precision rational, always reduced, denominator >= 1.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}            // NOLINT: implicit by design
    Rational(Int n) : num_(std::move(n)), den_(1) {}       // NOLINT
    Rational(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) {
        if (den_ == 0) throw division_by_zero_error();
        normalize();
    }

    const Int& num() const { return num_; }
    const Int& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

    Rational operator-() const { return Rational(unchecked{}, -num_, den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw division_by_zero_error();
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const Int lhs = a.num_ * b.den_;
        const Int rhs = b.num_ * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    /// Nonnegative integer power.
    Rational pow(unsigned long long e) const {
        Rational base = *this, acc = 1;
        while (e != 0) {
            if (e & 1ULL) acc *= base;
            base *= base;
            e >>= 1ULL;
        }
        return acc;
    }

    /// Round to double. Exact for |num|,|den| < 2^53; otherwise correctly
    /// scaled by the multiprecision backend.
    double to_double() const {
        namespace mp = boost::multiprecision;
        mp::cpp_rational q(num_, den_);
        double x = q.convert_to<double>();
        if (!std::isfinite(x)) throw float_overflow_error();
        return x;
    }

    std::string str() const {
        if (den_ == 1) return num_.str();
        return num_.str() + "/" + den_.str();
    }

    /// Parse "n" or "n/d" with optional leading sign.
    static Rational parse(std::string_view text);

private:
    struct unchecked {};
    Rational(unchecked, Int n, Int d) : num_(std::move(n)), den_(std::move(d)) {}

    void normalize() {
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        if (num_ == 0) { den_ = 1; return; }
        Int g = boost::multiprecision::gcd(num_ < 0 ? Int(-num_) : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    Int num_;
    Int den_;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

namespace detail {

/// Split d = s^2 * f with f squarefree. d must be >= 0 and fit in 64 bits.
inline std::pair<Int, Int> squarefree_split(const Int& d) {
    if (d < 0) throw qfield_error("negative radicand");
    if (d > Int(std::numeric_limits<std::int64_t>::max()))
        throw qfield_error("radicand too large to factor: " + d.str());
    std::int64_t n = d.convert_to<std::int64_t>();
    std::int64_t square = 1, free_part = 1;
    for (std::int64_t f = 2; f * f <= n; ++f) {
        while (n % (f * f) == 0) { n /= f * f; square *= f; }
        if (n % f == 0) { n /= f; free_part *= f; }
    }
    free_part *= n;
    return {Int(square), Int(free_part)};
}

} // namespace detail

/// Exact value rational_part + radical_part * sqrt(radicand).
///
/// Canonical form: radicand is squarefree; radicand in {0,1} and zero
/// radical parts are folded so every purely rational value has radicand 0.
/// Equality is then plain field equality.
class QuadExt {
public:
    QuadExt() : rat_(0), rad_(0), d_(0) {}
    QuadExt(Rational r) : rat_(std::move(r)), rad_(0), d_(0) {}  // NOLINT
    QuadExt(long long n) : rat_(n), rad_(0), d_(0) {}            // NOLINT
    QuadExt(Rational rational_part, Rational radical_part, Int radicand)
        : rat_(std::move(rational_part)), rad_(std::move(radical_part)), d_(std::move(radicand)) {
        normalize();
    }

    const Rational& rational_part() const { return rat_; }
    const Rational& radical_part() const { return rad_; }
    const Int& radicand() const { return d_; }

    bool is_rational() const { return d_ == 0; }
    bool is_zero() const { return rat_.is_zero() && rad_.is_zero(); }
    bool is_one() const { return d_ == 0 && rat_ == Rational(1); }

    /// Exact sign, by rational sign analysis only (no floating point).
    int sign() const {
        const int sr = rat_.sign();
        const int sq = rad_.sign();
        if (sq == 0) return sr;
        if (sr == 0) return sq;
        if (sr == sq) return sr;
        // Opposite signs: |rat| vs |rad|*sqrt(d) decided by squaring.
        const Rational lhs = rat_ * rat_;
        const Rational rhs = rad_ * rad_ * Rational(d_);
        if (lhs == rhs) return 0;  // impossible for squarefree d > 1, kept for safety
        return lhs > rhs ? sr : sq;
    }

    QuadExt operator-() const { return QuadExt(unchecked{}, -rat_, -rad_, d_); }

    friend QuadExt operator+(const QuadExt& a, const QuadExt& b) {
        Int d = common_radicand(a, b);
        return QuadExt(a.rat_ + b.rat_, a.rad_ + b.rad_, std::move(d));
    }
    friend QuadExt operator-(const QuadExt& a, const QuadExt& b) { return a + (-b); }
    friend QuadExt operator*(const QuadExt& a, const QuadExt& b) {
        Int d = common_radicand(a, b);
        // (p + q sqrt(d)) (r + s sqrt(d)) = pr + qsd + (ps + qr) sqrt(d)
        Rational rat = a.rat_ * b.rat_ + a.rad_ * b.rad_ * Rational(d);
        Rational rad = a.rat_ * b.rad_ + a.rad_ * b.rat_;
        return QuadExt(std::move(rat), std::move(rad), std::move(d));
    }
    friend QuadExt operator/(const QuadExt& a, const QuadExt& b) { return a * b.inverse(); }

    QuadExt& operator+=(const QuadExt& o) { return *this = *this + o; }
    QuadExt& operator-=(const QuadExt& o) { return *this = *this - o; }
    QuadExt& operator*=(const QuadExt& o) { return *this = *this * o; }

    /// Exact reciprocal via the conjugate: 1/(p+q sqrt(d)) = (p-q sqrt(d))/(p^2 - q^2 d).
    QuadExt inverse() const {
        if (is_zero()) throw division_by_zero_error();
        const Rational norm = rat_ * rat_ - rad_ * rad_ * Rational(d_);
        if (norm.is_zero()) throw division_by_zero_error();  // unreachable with squarefree d
        return QuadExt(rat_ / norm, -rad_ / norm, d_);
    }

    QuadExt conjugate() const { return QuadExt(unchecked{}, rat_, -rad_, d_); }

    QuadExt abs() const { return sign() < 0 ? -*this : *this; }

    friend bool operator==(const QuadExt& a, const QuadExt& b) {
        return a.d_ == b.d_ && a.rat_ == b.rat_ && a.rad_ == b.rad_;
    }

    /// Double evaluation; error <= 4 ulp for |parts| < 2^40.
    double to_double() const {
        double x = rat_.to_double();
        if (!rad_.is_zero()) x += rad_.to_double() * std::sqrt(d_.convert_to<double>());
        if (!std::isfinite(x)) throw float_overflow_error();
        return x;
    }

    /// Canonical rendering, e.g. "-2/3", "7 + 3/2*sqrt(3)", "-1/2 - 1/6*sqrt(3)".
    std::string str() const {
        if (rad_.is_zero()) return rat_.str();
        const std::string tail = rad_.abs().str() + "*sqrt(" + d_.str() + ")";
        if (rat_.is_zero()) return (rad_.sign() < 0 ? "-" : "") + tail;
        return rat_.str() + (rad_.sign() < 0 ? " - " : " + ") + tail;
    }

    /// Parse the canonical rendering (plus benign whitespace variants).
    static QuadExt parse(std::string_view text);

private:
    struct unchecked {};
    QuadExt(unchecked, Rational rat, Rational rad, Int d)
        : rat_(std::move(rat)), rad_(std::move(rad)), d_(std::move(d)) {}

    static Int common_radicand(const QuadExt& a, const QuadExt& b) {
        if (a.d_ == b.d_) return a.d_;
        if (a.d_ == 0) return b.d_;
        if (b.d_ == 0) return a.d_;
        throw mixed_radicand_error(a.d_, b.d_);
    }

    void normalize() {
        if (d_ < 0) throw qfield_error("negative radicand");
        if (rad_.is_zero()) { d_ = 0; return; }
        auto [square, free_part] = detail::squarefree_split(d_);
        if (square != 1) { rad_ *= Rational(square); d_ = free_part; }
        if (d_ == 1) { rat_ += rad_; rad_ = 0; d_ = 0; }
        else if (d_ == 0) { rad_ = 0; }
    }

    Rational rat_;
    Rational rad_;
    Int d_;
};

inline std::ostream& operator<<(std::ostream& os, const QuadExt& x) { return os << x.str(); }

/// Exact three-way comparison; throws mixed_radicand_error when neither
/// operand is purely rational and radicands differ.
inline std::strong_ordering compare(const QuadExt& a, const QuadExt& b) {
    const int s = (a - b).sign();
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

inline bool operator<(const QuadExt& a, const QuadExt& b) { return compare(a, b) < 0; }
inline bool operator<=(const QuadExt& a, const QuadExt& b) { return compare(a, b) <= 0; }
inline bool operator>(const QuadExt& a, const QuadExt& b) { return compare(a, b) > 0; }
inline bool operator>=(const QuadExt& a, const QuadExt& b) { return compare(a, b) >= 0; }

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct NumberScanner {
    std::string_view s;
    size_t pos = 0;

    void skip_ws() { while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos; }
    bool eof() { skip_ws(); return pos >= s.size(); }
    char peek() { skip_ws(); return pos < s.size() ? s[pos] : '\0'; }
    bool consume(char c) {
        if (peek() == c) { ++pos; return true; }
        return false;
    }
    bool consume_word(std::string_view w) {
        skip_ws();
        if (s.substr(pos, w.size()) == w) { pos += w.size(); return true; }
        return false;
    }

    Int integer() {
        skip_ws();
        size_t start = pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        size_t digits = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == digits) throw number_parse_error("expected integer in '" + std::string(s) + "'");
        return Int(std::string(s.substr(start, pos - start)));
    }

    Rational rational() {
        Int n = integer();
        if (consume('/')) {
            Int d = integer();
            return Rational(std::move(n), std::move(d));
        }
        return Rational(std::move(n));
    }

    // rational ["*" "sqrt(" int ")"] | "sqrt(" int ")"
    QuadExt term(bool negate) {
        Rational coeff(1);
        bool have_coeff = false;
        if (!(peek() == 's')) { coeff = rational(); have_coeff = true; }
        if ((!have_coeff || consume('*')) && consume_word("sqrt")) {
            if (!consume('(')) throw number_parse_error("expected '(' after sqrt");
            Int d = integer();
            if (!consume(')')) throw number_parse_error("expected ')' after radicand");
            if (negate) coeff = -coeff;
            return QuadExt(Rational(0), std::move(coeff), std::move(d));
        }
        if (!have_coeff) throw number_parse_error("expected number in '" + std::string(s) + "'");
        if (negate) coeff = -coeff;
        return QuadExt(std::move(coeff));
    }
};

} // namespace detail

inline Rational Rational::parse(std::string_view text) {
    detail::NumberScanner sc{text};
    Rational r = sc.rational();
    if (!sc.eof()) throw number_parse_error("trailing characters in '" + std::string(text) + "'");
    return r;
}

inline QuadExt QuadExt::parse(std::string_view text) {
    detail::NumberScanner sc{text};
    QuadExt value = sc.term(false);
    while (!sc.eof()) {
        if (sc.consume('+')) value += sc.term(false);
        else if (sc.consume('-')) value += sc.term(true);
        else throw number_parse_error("unexpected character in '" + std::string(text) + "'");
    }
    return value;
}

} // namespace cretan
