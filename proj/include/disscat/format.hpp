#pragma once

#include <string>

namespace disscat {

/// Shortest-independent, locale-free decimal with 17 significant digits.
std::string fmt17(double v);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace disscat
