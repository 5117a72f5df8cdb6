#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/functional/hash.hpp>
#include <stdexcept>
#include <string>
#include <string_view>

namespace itm {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg)
        : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct ParseError : Error {
    ParseError(const std::string& msg) : Error("parse-error", msg) {}
};

/// Parses "p/q" or a plain integer string. Denominator must be nonzero.
Rat parse_rat(std::string_view s);

/// Renders as "p/q", or just "p" when the denominator is 1.
std::string rat_str(const Rat& x);

inline Int rat_num(const Rat& x) { return numerator(x); }
inline Int rat_den(const Rat& x) { return denominator(x); }

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

struct RatHash {
    size_t operator()(const Rat& x) const { return boost::hash<Rat>{}(x); }
};

}  // namespace itm
