#include "glpin/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#ifndef GLPIN_VERSION
#define GLPIN_VERSION "0.0.0"
#endif

namespace glpin::cli {

std::string toolkit_version() { return GLPIN_VERSION; }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> v;
  for (int i = 0; i < steps; ++i) v.push_back(steps == 1 ? from : from + (to - from) * i / (steps - 1));
  return v;
}

namespace {

// Walks the document, reporting errors as "<origin>:<line>: <path>: <msg>".
class Reader {
 public:
  Reader(const std::string* text, std::string origin) : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::string p;
    for (const auto& s : path) p += (p.empty() || s.front() == '[' ? "" : ".") + s;
    std::ostringstream os;
    os << origin_;
    if (const int line = line_of(path); line > 0) os << ":" << line;
    os << ": " << (p.empty() ? "<root>" : p) << ": " << msg;
    throw ConfigError(os.str());
  }

  void only(const json& obj, const std::vector<std::string>& path, const std::set<std::string>& keys) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!keys.count(it.key())) {
        auto p = path;
        p.push_back(it.key());
        fail(p, "unknown field");
      }
  }

  double number(const json& obj, std::vector<std::string> path, const std::string& key, double def,
                bool positive = true) const {
    path.push_back(key);
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    if (positive && !(x > 0.0)) fail(path, "must be positive");
    return x;
  }

  int integer(const json& obj, std::vector<std::string> path, const std::string& key, int def, int min) const {
    path.push_back(key);
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < min || x > 1000000000) fail(path, "must be an integer >= " + std::to_string(min));
    return static_cast<int>(x);
  }

  Point2 point(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(path, "expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  DomainSpec domain(const json& obj, const std::vector<std::string>& path, DomainSpec def) const {
    only(obj, path, {"shape", "a", "b", "center"});
    DomainSpec d = def;
    if (obj.contains("shape")) {
      auto p = path;
      p.push_back("shape");
      if (!obj["shape"].is_string()) fail(p, "expected a string");
      try {
        d.shape = shape_from_string(obj["shape"].get<std::string>());
      } catch (const std::exception&) {
        fail(p, "expected one of disk, ellipse, rectangle");
      }
    }
    d.a = number(obj, path, "a", d.a);
    d.b = number(obj, path, "b", d.shape == Shape::disk ? d.a : d.b);
    if (obj.contains("center")) {
      auto p = path;
      p.push_back("center");
      d.center = point(obj["center"], p);
    }
    if (d.shape == Shape::disk) d.b = d.a;
    try {
      d.validate();
    } catch (const ValidationError& e) {
      fail(path, e.what());
    }
    return d;
  }

 private:
  // Line of the last key on the path, found by scanning for each key in turn.
  int line_of(const std::vector<std::string>& path) const {
    if (!text_ || path.empty()) return 0;
    std::size_t pos = 0;
    for (const auto& k : path) {
      if (k.front() == '[') continue;
      const std::size_t f = text_->find("\"" + k + "\"", pos);
      if (f == std::string::npos) return 0;
      pos = f + 1;
    }
    return 1 + static_cast<int>(std::count(text_->begin(), text_->begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
  }

  const std::string* text_;
  std::string origin_;
};

VortexConfig read_vortices(const Reader& r, const json& j, const std::vector<std::string>& path) {
  if (!j.is_array()) r.fail(path, "expected an array of {x, y, degree}");
  VortexConfig c;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto p = path;
    p.push_back("[" + std::to_string(i) + "]");
    r.only(j[i], p, {"x", "y", "degree"});
    if (!j[i].contains("x") || !j[i].contains("y")) r.fail(p, "needs x and y");
    c.points.push_back({r.number(j[i], p, "x", 0.0, false), r.number(j[i], p, "y", 0.0, false)});
    const int d = j[i].contains("degree") ? r.integer(j[i], p, "degree", 1, -1000) : 1;
    if (d == 0) {
      p.push_back("degree");
      r.fail(p, "must be nonzero");
    }
    c.degrees.push_back(d);
  }
  return c;
}

RunConfig from_json(const json& j, const std::string* text, const std::string& origin) {
  const Reader r(text, origin);
  r.only(j, {}, {"domain", "resolution", "coarse_resolution", "pinning", "hex", "sweep", "seed", "output_dir",
                 "synthetic_xi0", "seed_vortices", "minimize", "fields", "window"});
  RunConfig c;
  c.source = j;
  c.hash = fnv1a_hex(j.dump());
  if (j.contains("domain")) c.domain = r.domain(j["domain"], {"domain"}, c.domain);
  c.resolution = r.integer(j, {}, "resolution", c.resolution, 16);
  c.coarse_resolution = r.integer(j, {}, "coarse_resolution", 0, 0);
  if (c.coarse_resolution > 0 && c.coarse_resolution < 16) r.fail({"coarse_resolution"}, "must be 0 or >= 16");
  if (c.coarse_resolution >= c.resolution && c.coarse_resolution > 0)
    r.fail({"coarse_resolution"}, "must be below resolution");

  if (j.contains("pinning")) {
    const json& p = j["pinning"];
    const std::vector<std::string> path{"pinning"};
    r.only(p, path, {"b", "lambda", "delta", "epsilon", "omega"});
    c.pinning.b = r.number(p, path, "b", c.pinning.b);
    if (c.pinning.b > 1.0) r.fail({"pinning", "b"}, "must be in (0, 1]");
    c.pinning.lambda = r.number(p, path, "lambda", c.pinning.lambda);
    c.pinning.delta = r.number(p, path, "delta", c.pinning.delta);
    c.pinning.epsilon = r.number(p, path, "epsilon", c.pinning.epsilon);
    if (p.contains("omega")) c.pinning.omega = r.domain(p["omega"], {"pinning", "omega"}, c.pinning.omega);
  }
  try {
    c.pinning.validate();
  } catch (const ValidationError& e) {
    r.fail({"pinning"}, e.what());
  }

  if (j.contains("hex")) c.hex = r.number(j, {}, "hex", 0.0);
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    const std::vector<std::string> path{"sweep"};
    r.only(s, path, {"from", "to", "steps", "relative"});
    if (!s.contains("from") || !s.contains("to")) r.fail(path, "needs from and to");
    SweepSpec sw;
    sw.from = r.number(s, path, "from", 0.0);
    sw.to = r.number(s, path, "to", 0.0);
    sw.steps = r.integer(s, path, "steps", 5, 1);
    if (sw.to < sw.from) r.fail({"sweep", "to"}, "must be >= from");
    if (s.contains("relative")) {
      if (!s["relative"].is_boolean()) r.fail({"sweep", "relative"}, "expected true or false");
      sw.relative = s["relative"].get<bool>();
    }
    c.sweep = sw;
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) r.fail({"seed"}, "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty())
      r.fail({"output_dir"}, "expected a non-empty string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("synthetic_xi0")) {
    const json& s = j["synthetic_xi0"];
    const std::vector<std::string> path{"synthetic_xi0"};
    r.only(s, path, {"wells", "depth", "curvature"});
    if (!s.contains("wells") || !s["wells"].is_array() || s["wells"].empty())
      r.fail({"synthetic_xi0", "wells"}, "expected a non-empty array of [x, y]");
    SyntheticXi0 x;
    for (std::size_t i = 0; i < s["wells"].size(); ++i) {
      const Point2 w = r.point(s["wells"][i], {"synthetic_xi0", "wells", "[" + std::to_string(i) + "]"});
      if (!c.domain.contains(w)) r.fail({"synthetic_xi0", "wells", "[" + std::to_string(i) + "]"}, "outside the domain");
      x.wells.push_back(w);
    }
    x.depth = r.number(s, path, "depth", x.depth);
    x.curvature = r.number(s, path, "curvature", x.curvature);
    c.synthetic_xi0 = x;
  }
  if (j.contains("seed_vortices")) {
    c.seed_vortices = read_vortices(r, j["seed_vortices"], {"seed_vortices"});
    for (std::size_t i = 0; i < c.seed_vortices.points.size(); ++i)
      if (!c.domain.contains(c.seed_vortices.points[i]))
        r.fail({"seed_vortices", "[" + std::to_string(i) + "]"}, "outside the domain");
  }
  if (j.contains("minimize")) {
    const json& m = j["minimize"];
    const std::vector<std::string> path{"minimize"};
    r.only(m, path, {"method", "max_sweeps", "rel_decrease", "patience", "memory", "grad_tol"});
    if (m.contains("method")) {
      const std::string s = m["method"].is_string() ? m["method"].get<std::string>() : "";
      if (s == "lbfgs")
        c.minimize.method = MinimizeOptions::Method::lbfgs;
      else if (s == "flow")
        c.minimize.method = MinimizeOptions::Method::flow;
      else
        r.fail({"minimize", "method"}, "expected \"lbfgs\" or \"flow\"");
    }
    c.minimize.max_sweeps = r.integer(m, path, "max_sweeps", c.minimize.max_sweeps, 1);
    c.minimize.rel_decrease = r.number(m, path, "rel_decrease", c.minimize.rel_decrease);
    c.minimize.patience = r.integer(m, path, "patience", c.minimize.patience, 1);
    c.minimize.memory = r.integer(m, path, "memory", c.minimize.memory, 1);
    c.minimize.grad_tol = r.number(m, path, "grad_tol", c.minimize.grad_tol);
  }
  if (j.contains("fields")) {
    const json& f = j["fields"];
    const std::vector<std::string> path{"fields"};
    r.only(f, path, {"kII_count", "n_theta", "micro_search", "Rhat", "rhat", "meso_multistart", "bbh_step"});
    c.fields.kII_count = r.integer(f, path, "kII_count", c.fields.kII_count, 0);
    c.fields.micro.n_theta = r.integer(f, path, "n_theta", c.fields.micro.n_theta, 16);
    c.fields.micro_search = r.integer(f, path, "micro_search", c.fields.micro_search, 1);
    c.fields.micro.Rhat = r.number(f, path, "Rhat", c.fields.micro.Rhat);
    c.fields.micro.rhat = r.number(f, path, "rhat", c.fields.micro.rhat);
    if (c.fields.micro.rhat >= c.fields.micro.Rhat) r.fail({"fields", "rhat"}, "must be below Rhat");
    c.fields.meso_multistart = r.integer(f, path, "meso_multistart", c.fields.meso_multistart, 0);
    c.fields.bbh_step = r.number(f, path, "bbh_step", c.fields.bbh_step);
  }
  c.fields.seed = c.seed;
  c.window = r.number(j, {}, "window", 0.0, false);
  if (c.window < 0.0) r.fail({"window"}, "must be >= 0");
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return from_json(j, &text, origin);
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.string());
}

RunConfig reparse(const json& source) {
  return from_json(source, nullptr, "command line");
}

VortexConfig vortices_from_json(const json& j, const std::string& path) {
  const Reader r(nullptr, path);
  return read_vortices(r, j, {});
}

json vortices_to_json(const VortexConfig& c) {
  json a = json::array();
  for (std::size_t i = 0; i < c.points.size(); ++i)
    a.push_back({{"x", c.points[i].x}, {"y", c.points[i].y}, {"degree", c.degrees[i]}});
  return a;
}

}  // namespace glpin::cli
