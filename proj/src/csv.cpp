#include "pbgq/csv.hpp"

#include <charconv>
#include <cmath>

namespace pbgq::csv {

std::string format(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
    return std::string(buf, res.ptr);
}

void write_row(std::ostream& os, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            os << ',';
        const auto& f = fields[i];
        if (f.find_first_of(",\"\n") == std::string::npos) {
            os << f;
            continue;
        }
        os << '"';
        for (char ch : f)
            os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
    }
    os << '\n';
}

} // namespace pbgq::csv
