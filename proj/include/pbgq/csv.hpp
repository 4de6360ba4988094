#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace pbgq::csv {

/// Shortest round-trip scientific representation, independent of the
/// global locale ("nan"/"inf" for non-finite values).
std::string format(double x);

/// Writes one comma-separated row terminated by '\n'. Fields containing a
/// comma, quote or newline are quoted.
void write_row(std::ostream& os, const std::vector<std::string>& fields);

} // namespace pbgq::csv
