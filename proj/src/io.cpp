#include "kslab/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace kslab {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_checkpoint(std::ostream& os, const Checkpoint& cp) {
  if (!(cp.u.grid() == cp.v.grid())) throw std::invalid_argument("write_checkpoint: u and v grids differ");
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cp.cfg_hash));
  os << "cfg_hash," << hash << "\nstep," << cp.step << "\ntime," << format_double(cp.time) << "\nindex,u,v\n";
  for (Eigen::Index c = 0; c < cp.u.size(); ++c)
    os << c << ',' << format_double(cp.u[c]) << ',' << format_double(cp.v[c]) << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

template <typename T>
T parse(const std::string& s, int line, int base = 10) {
  T v{};
  std::from_chars_result r;
  if constexpr (std::is_floating_point_v<T>)
    r = std::from_chars(s.data(), s.data() + s.size(), v);
  else
    r = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::runtime_error("checkpoint line " + std::to_string(line) + ": cannot parse '" + s + "'");
  return v;
}

std::vector<std::string> expect(std::istream& is, int& line, const char* key, std::size_t fields) {
  std::string text;
  if (!std::getline(is, text)) throw std::runtime_error("checkpoint: truncated before '" + std::string(key) + "'");
  ++line;
  auto parts = split(text);
  if (parts.size() != fields || parts[0] != key)
    throw std::runtime_error("checkpoint line " + std::to_string(line) + ": expected '" + key + "'");
  return parts;
}

}  // namespace

Checkpoint read_checkpoint(std::istream& is, const Grid& grid) {
  int line = 0;
  Checkpoint cp;
  cp.cfg_hash = parse<std::uint64_t>(expect(is, line, "cfg_hash", 2)[1], line, 16);
  cp.step = parse<int>(expect(is, line, "step", 2)[1], line);
  cp.time = parse<double>(expect(is, line, "time", 2)[1], line);
  const auto header = expect(is, line, "index", 3);
  if (header[1] != "u" || header[2] != "v") throw std::runtime_error("checkpoint: bad column header");
  Field::Vector u(grid.size()), v(grid.size());
  std::string text;
  for (Eigen::Index c = 0; c < grid.size(); ++c) {
    if (!std::getline(is, text)) throw std::runtime_error("checkpoint: fewer rows than grid cells");
    ++line;
    const auto parts = split(text);
    if (parts.size() != 3 || parse<long long>(parts[0], line) != c)
      throw std::runtime_error("checkpoint line " + std::to_string(line) + ": malformed row");
    u[c] = parse<double>(parts[1], line);
    v[c] = parse<double>(parts[2], line);
  }
  cp.u = Field(grid, std::move(u));
  cp.v = Field(grid, std::move(v));
  return cp;
}

void write_field_csv(std::ostream& os, const Field& f) {
  const Grid& g = f.grid();
  for (int a = 0; a < g.dim(); ++a) os << 'i' << a << ',';
  os << "value\n";
  for (Eigen::Index c = 0; c < f.size(); ++c) {
    const auto idx = g.unravel(c);
    for (int a = 0; a < g.dim(); ++a) os << idx[static_cast<std::size_t>(a)] << ',';
    os << format_double(f[c]) << '\n';
  }
}

}  // namespace kslab
