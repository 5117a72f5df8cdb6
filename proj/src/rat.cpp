#include "itm/rat.hpp"

namespace itm {

Rat parse_rat(std::string_view s) {
    if (s.empty()) throw ParseError("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) {
            return Rat(Int(std::string(s)));
        }
        Int num{std::string(s.substr(0, slash))};
        Int den{std::string(s.substr(slash + 1))};
        if (den == 0) throw ParseError("zero denominator in \"" + std::string(s) + "\"");
        return Rat(num, den);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("bad rational literal \"" + std::string(s) + "\"");
    }
}

std::string rat_str(const Rat& x) {
    if (rat_den(x) == 1) return rat_num(x).str();
    return rat_num(x).str() + "/" + rat_den(x).str();
}

}  // namespace itm
