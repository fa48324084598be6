#include "disscat/format.hpp"

#include "disscat/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace disscat {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InvalidInput("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw InvalidInput("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

}  // namespace disscat
