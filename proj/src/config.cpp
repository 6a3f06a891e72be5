#include "kslab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <vector>

namespace kslab {

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

MotilityFunction make_motility(const std::string& family, double parameter) {
  if (family == "power_law") return make_power_law(parameter);
  if (family == "exponential") return make_exponential(parameter);
  if (family == "shifted_power") return make_shifted_power(parameter);
  if (family == "constant") return make_constant(parameter);
  throw std::invalid_argument("unknown motility '" + family + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line = 0;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"model", {"alpha", "beta"}},
      {"grid", {"n", "points", "length"}},
      {"time", {"dt", "t_end", "scheme", "picard_iters", "negativity_tolerance"}},
      {"motility", {"motility", "k", "lambda", "rho0"}},
      {"output", {"record_every", "checkpoint_every", "weighted_p", "weighted_q"}},
      {"initial", {"kind", "baseline", "amplitude", "mode"}},
  };
  return s;
}

Sections tokenize(std::string_view text, std::map<std::string, int>& section_lines) {
  Sections out;
  std::string current;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string line(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + line + "'", lineno);
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema().count(current)) throw ConfigError("unknown section [" + current + "]", lineno);
      if (section_lines.count(current)) throw ConfigError("duplicate section [" + current + "]", lineno);
      section_lines[current] = lineno;
      out[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + line + "'", lineno);
    if (current.empty()) throw ConfigError("key outside of any section", lineno);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!schema().at(current).count(key)) throw ConfigError("unknown key '" + key + "' in [" + current + "]", lineno);
    if (out[current].count(key)) throw ConfigError("duplicate key '" + key + "'", lineno);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", lineno);
    out[current][key] = Entry{value, lineno};
  }
  return out;
}

class Reader {
 public:
  Reader(const Sections& s, const std::map<std::string, int>& lines) : s_(s), lines_(lines) {}

  const Entry* find(const std::string& sec, const std::string& key) const {
    const auto it = s_.find(sec);
    if (it == s_.end()) return nullptr;
    const auto jt = it->second.find(key);
    return jt == it->second.end() ? nullptr : &jt->second;
  }

  const Entry& require(const std::string& sec, const std::string& key) const {
    if (const Entry* e = find(sec, key)) return *e;
    const auto it = lines_.find(sec);
    throw ConfigError("missing key '" + key + "' in [" + sec + "]", it == lines_.end() ? 0 : it->second);
  }

  static double number(const Entry& e, const std::string& key) {
    double v = 0.0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    const auto r = std::from_chars(b, end, v);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v))
      throw ConfigError(key + " must be a finite number, got '" + e.value + "'", e.line);
    return v;
  }

  static int integer(const Entry& e, const std::string& key) {
    int v = 0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    const auto r = std::from_chars(b, end, v);
    if (r.ec != std::errc() || r.ptr != end) throw ConfigError(key + " must be an integer, got '" + e.value + "'", e.line);
    return v;
  }

  double number(const std::string& sec, const std::string& key) const { return number(require(sec, key), key); }
  double number_or(const std::string& sec, const std::string& key, double fallback) const {
    const Entry* e = find(sec, key);
    return e ? number(*e, key) : fallback;
  }
  int integer(const std::string& sec, const std::string& key) const { return integer(require(sec, key), key); }
  int integer_or(const std::string& sec, const std::string& key, int fallback) const {
    const Entry* e = find(sec, key);
    return e ? integer(*e, key) : fallback;
  }
  int line(const std::string& sec, const std::string& key) const {
    const Entry* e = find(sec, key);
    if (e) return e->line;
    const auto it = lines_.find(sec);
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  const Sections& s_;
  const std::map<std::string, int>& lines_;
};

void check(bool ok, const std::string& message, int line) {
  if (!ok) throw ConfigError(message, line);
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::map<std::string, int> section_lines;
  const Sections sections = tokenize(text, section_lines);
  for (const char* req : {"model", "grid", "time", "motility", "output"})
    if (!section_lines.count(req)) throw ConfigError(std::string("missing section [") + req + "]", 0);
  const Reader r(sections, section_lines);

  RunConfig rc;
  SimConfig& c = rc.sim;

  c.alpha = r.number("model", "alpha");
  check(c.alpha > 1.0 && c.alpha < 2.0, "alpha must lie in (1,2)", r.line("model", "alpha"));
  c.beta = r.number("model", "beta");
  check(c.beta > 0.0 && c.beta < 1.0, "beta must lie in (0,1)", r.line("model", "beta"));

  const int n = r.integer("grid", "n");
  check(n >= 1 && n <= 3, "n must be 1, 2 or 3", r.line("grid", "n"));
  const int points = r.integer("grid", "points");
  check(points >= 8 && (points & (points - 1)) == 0, "points must be a power of two >= 8", r.line("grid", "points"));
  const double length = r.number("grid", "length");
  check(length > 0.0, "length must be > 0", r.line("grid", "length"));
  c.grid = Grid::uniform(n, points, length);

  c.dt = r.number("time", "dt");
  check(c.dt > 0.0, "dt must be > 0", r.line("time", "dt"));
  c.t_end = r.number("time", "t_end");
  check(c.t_end >= c.dt, "t_end must be >= dt", r.line("time", "t_end"));
  if (const Entry* e = r.find("time", "scheme")) {
    try {
      c.scheme = parse_scheme(e->value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(ex.what(), e->line);
    }
  }
  c.picard_iters = r.integer_or("time", "picard_iters", 1);
  check(c.picard_iters >= 0, "picard_iters must be >= 0", r.line("time", "picard_iters"));
  c.negativity_tolerance = r.number_or("time", "negativity_tolerance", 1e-8);
  check(c.negativity_tolerance >= 0.0, "negativity_tolerance must be >= 0", r.line("time", "negativity_tolerance"));

  const Entry& fam = r.require("motility", "motility");
  double parameter = 0.0;
  std::string pkey;
  if (fam.value == "power_law" || fam.value == "shifted_power") {
    pkey = "k";
  } else if (fam.value == "exponential") {
    pkey = "lambda";
  } else if (fam.value == "constant") {
    pkey = "rho0";
  } else {
    throw ConfigError("motility must be power_law, exponential, shifted_power or constant", fam.line);
  }
  for (const char* k : {"k", "lambda", "rho0"})
    if (k != pkey && r.find("motility", k))
      throw ConfigError(std::string("key '") + k + "' does not apply to motility " + fam.value, r.line("motility", k));
  parameter = pkey == "lambda" ? r.number_or("motility", pkey, 1.0) : r.number("motility", pkey);
  check(parameter > 0.0, pkey + " must be > 0", r.line("motility", pkey));
  c.motility = make_motility(fam.value, parameter);

  c.record_every = r.integer_or("output", "record_every", 1);
  check(c.record_every >= 1, "record_every must be >= 1", r.line("output", "record_every"));
  rc.checkpoint_every = r.integer_or("output", "checkpoint_every", 0);
  check(rc.checkpoint_every >= 0, "checkpoint_every must be >= 0", r.line("output", "checkpoint_every"));
  c.weighted_p = r.number_or("output", "weighted_p", 1.0);
  check(c.weighted_p > 0.0, "weighted_p must be > 0", r.line("output", "weighted_p"));
  c.weighted_q = r.number_or("output", "weighted_q", 1.0);
  check(c.weighted_q > 0.0, "weighted_q must be > 0", r.line("output", "weighted_q"));

  InitialData& init = rc.initial;
  if (const Entry* e = r.find("initial", "kind")) {
    if (e->value == "cosine")
      init.kind = InitialKind::Cosine;
    else if (e->value == "random")
      init.kind = InitialKind::Random;
    else if (e->value == "constant")
      init.kind = InitialKind::Constant;
    else
      throw ConfigError("kind must be cosine, random or constant", e->line);
  }
  init.baseline = r.number_or("initial", "baseline", 1.0);
  check(init.baseline > 0.0, "baseline must be > 0", r.line("initial", "baseline"));
  init.amplitude = r.number_or("initial", "amplitude", 0.5);
  check(init.amplitude >= 0.0 && init.amplitude < init.baseline, "amplitude must lie in [0, baseline)",
        r.line("initial", "amplitude"));
  init.mode = r.integer_or("initial", "mode", 1);
  check(init.mode >= 1 && init.mode < points / 2, "mode must lie in [1, points/2)", r.line("initial", "mode"));

  std::ostringstream canon;
  canon << "model.alpha=" << fmt17(c.alpha) << "\nmodel.beta=" << fmt17(c.beta) << "\ngrid.n=" << n
        << "\ngrid.points=" << points << "\ngrid.length=" << fmt17(length) << "\ntime.dt=" << fmt17(c.dt)
        << "\ntime.t_end=" << fmt17(c.t_end) << "\ntime.scheme=" << to_string(c.scheme)
        << "\ntime.picard_iters=" << c.picard_iters << "\ntime.negativity_tolerance=" << fmt17(c.negativity_tolerance)
        << "\nmotility.motility=" << fam.value << "\nmotility." << pkey << "=" << fmt17(parameter)
        << "\noutput.record_every=" << c.record_every << "\noutput.checkpoint_every=" << rc.checkpoint_every
        << "\noutput.weighted_p=" << fmt17(c.weighted_p) << "\noutput.weighted_q=" << fmt17(c.weighted_q)
        << "\ninitial.kind="
        << (init.kind == InitialKind::Cosine ? "cosine" : init.kind == InitialKind::Random ? "random" : "constant")
        << "\ninitial.baseline=" << fmt17(init.baseline) << "\ninitial.amplitude=" << fmt17(init.amplitude)
        << "\ninitial.mode=" << init.mode << "\n";
  rc.canonical = canon.str();
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a(cfg.canonical); }

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

Field make_initial_data(const RunConfig& cfg, std::uint64_t seed) {
  const Grid& grid = cfg.sim.grid;
  const InitialData& in = cfg.initial;
  const int dim = grid.dim();
  if (in.kind == InitialKind::Constant) return Field::constant(grid, in.baseline);

  Eigen::VectorXd shape = Eigen::VectorXd::Zero(grid.size());
  if (in.kind == InitialKind::Cosine) {
    shape = sample(grid, [&](const std::array<double, 3>& x) {
              double s = 0.0;
              for (int a = 0; a < dim; ++a)
                s += std::cos(2.0 * std::numbers::pi * in.mode * x[static_cast<std::size_t>(a)] / grid.axis(a).length);
              return s / dim;
            }).values();
  } else {
    std::mt19937_64 gen(seed);
    auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    const int band = grid.axis(0).points / 8;
    // Half of the wavevector box: the first nonzero component is positive.
    std::array<int, 3> k{0, 0, 0};
    const int side = 2 * band + 1;
    int total = 1;
    for (int a = 0; a < dim; ++a) total *= side;
    for (int flat = 0; flat < total; ++flat) {
      int rem = flat;
      for (int a = dim - 1; a >= 0; --a) {
        k[static_cast<std::size_t>(a)] = rem % side - band;
        rem /= side;
      }
      int lead = 0;
      for (int a = 0; a < dim && lead == 0; ++a) lead = k[static_cast<std::size_t>(a)];
      if (lead <= 0) continue;
      const double ca = uniform(), sa = uniform();
      for (Eigen::Index c = 0; c < grid.size(); ++c) {
        const auto idx = grid.unravel(c);
        double phase = 0.0;
        for (int a = 0; a < dim; ++a)
          phase += 2.0 * std::numbers::pi * k[static_cast<std::size_t>(a)] * idx[static_cast<std::size_t>(a)] /
                   grid.axis(a).points;
        shape[c] += ca * std::cos(phase) + sa * std::sin(phase);
      }
    }
    const double peak = shape.cwiseAbs().maxCoeff();
    if (peak > 0.0) shape /= peak;
  }
  return Field(grid, (in.baseline + in.amplitude * shape.array()).matrix());
}

}  // namespace kslab
