#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gls {

/// Round-trippable decimal text: 17 significant digits, "inf"/"-inf"/"nan".
std::string format_double(double x);

/// Parses the output of format_double (and ordinary decimal input).
double parse_double(std::string_view text);

std::string join_doubles(const std::vector<double>& values, char sep = ',');

std::vector<std::string> split(std::string_view text, char sep);

std::string_view trim(std::string_view text);

}  // namespace gls
