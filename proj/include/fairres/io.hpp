#pragma once

// Text formats. Vertices are 1-based in every file.
//
// Graph file:
//   k
//   c_1 ... c_k
//   i j            (one edge per line)
//
// Instance file (one record per line, `#` starts a comment):
//   fairres-instance 1
//   k <k>
//   costs <c_1> ... <c_k>
//   edge <i> <j>
//   set <size> <member_1> ... <member_size> <theta_0> ... <theta_{2^size - 1}>
//   meta <key> <value>
// Theta index bit t is the fixed bit of member t (members ascending).
// Reals are written in shortest round-trip form, so files reload bit-exactly.
//
// Sequence file: lines `t i loss`; lines sharing t form one step, steps in
// ascending t.
//
// Config file: `key = value` lines.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "fairres/adversarial.hpp"
#include "fairres/core_model.hpp"
#include "fairres/environment.hpp"
#include "fairres/errors.hpp"

namespace fairres {

/// Shortest decimal form that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return trim(pos == std::string::npos ? line : line.substr(0, pos));
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// Next non-empty line with comments removed.
  std::optional<std::string> next() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      auto s = strip_comment(raw);
      if (!s.empty()) return s;
    }
    return std::nullopt;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(source_ + ":" + std::to_string(line_) + ": " + msg);
  }

  double real(const std::string& tok) const {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) fail("expected a number, got '" + tok + "'");
    return v;
  }

  std::uint64_t integer(const std::string& tok) const {
    std::uint64_t v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) fail("expected an integer, got '" + tok + "'");
    return v;
  }

  std::size_t vertex(const std::string& tok, std::size_t k) const {
    auto v = integer(tok);
    if (v < 1 || v > k) fail("vertex " + tok + " outside 1.." + std::to_string(k));
    return static_cast<std::size_t>(v - 1);
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Graph files

inline IncompatibilityGraph parse_graph(std::istream& in, const std::string& source = "<graph>") {
  detail::LineReader r(in, source);
  auto first = r.next();
  if (!first) r.fail("missing vertex count");
  auto head = detail::split_ws(*first);
  if (head.size() != 1) r.fail("first line must hold k only");
  const auto k = static_cast<std::size_t>(r.integer(head[0]));
  if (k == 0) r.fail("k must be >= 1");
  auto second = r.next();
  if (!second) r.fail("missing fixing costs");
  auto toks = detail::split_ws(*second);
  if (toks.size() != k) r.fail("expected " + std::to_string(k) + " fixing costs, got " + std::to_string(toks.size()));
  std::vector<double> costs;
  for (const auto& t : toks) costs.push_back(r.real(t));
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  while (auto line = r.next()) {
    auto e = detail::split_ws(*line);
    if (e.size() != 2) r.fail("edge lines hold two vertices");
    auto a = r.vertex(e[0], k);
    auto b = r.vertex(e[1], k);
    if (a == b) r.fail("self loop");
    edges.emplace_back(a, b);
  }
  try {
    return IncompatibilityGraph(k, edges, std::move(costs));
  } catch (const Error& ex) {
    r.fail(ex.what());
  }
}

inline IncompatibilityGraph read_graph_file(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return parse_graph(in, path.string());
}

inline std::string format_graph(const IncompatibilityGraph& g) {
  std::ostringstream out;
  out << g.size() << "\n";
  for (std::size_t i = 0; i < g.size(); ++i) out << (i ? " " : "") << format_real(g.cost(i));
  out << "\n";
  for (const auto& e : g.edges()) out << e.u + 1 << " " << e.v + 1 << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Instance files

inline std::string format_instance(const Instance& inst) {
  std::ostringstream out;
  const auto& g = inst.graph;
  out << "fairres-instance 1\n";
  out << "k " << g.size() << "\n";
  out << "costs";
  for (double c : g.costs()) out << " " << format_real(c);
  out << "\n";
  for (const auto& e : g.edges()) out << "edge " << e.u + 1 << " " << e.v + 1 << "\n";
  for (const auto& c : inst.model.sets()) {
    out << "set " << c.members.size();
    for (auto v : c.members) out << " " << v + 1;
    for (double t : c.theta) out << " " << format_real(t);
    out << "\n";
  }
  if (const auto& cfg = inst.meta.config) {
    out << "meta seed " << cfg->seed << "\n";
    out << "meta alpha " << format_real(cfg->alpha) << "\n";
    out << "meta lambda " << format_real(cfg->lambda) << "\n";
    out << "meta cost_min " << format_real(cfg->cost_min) << "\n";
    out << "meta cost_max " << format_real(cfg->cost_max) << "\n";
    if (cfg->p) out << "meta p " << format_real(*cfg->p) << "\n";
  }
  out << "meta m " << inst.model.max_set_size() << "\n";
  out << "meta connected " << (inst.meta.connected ? 1 : 0) << "\n";
  return out.str();
}

inline Instance parse_instance(std::istream& in, const std::string& source = "<instance>") {
  detail::LineReader r(in, source);
  auto magic = r.next();
  if (!magic || *magic != "fairres-instance 1") r.fail("missing 'fairres-instance 1' header");
  std::optional<std::size_t> k;
  std::vector<double> costs;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<CorrelationSet> sets;
  ExperimentConfig cfg;
  bool has_cfg = false;
  bool connected = false;
  auto need_k = [&]() {
    if (!k) r.fail("'k' must precede this record");
    return *k;
  };
  while (auto line = r.next()) {
    auto t = detail::split_ws(*line);
    const auto& key = t[0];
    if (key == "k") {
      if (t.size() != 2) r.fail("k record takes one value");
      k = static_cast<std::size_t>(r.integer(t[1]));
    } else if (key == "costs") {
      if (t.size() != need_k() + 1) r.fail("costs record needs k values");
      for (std::size_t i = 1; i < t.size(); ++i) costs.push_back(r.real(t[i]));
    } else if (key == "edge") {
      if (t.size() != 3) r.fail("edge record takes two vertices");
      edges.emplace_back(r.vertex(t[1], need_k()), r.vertex(t[2], need_k()));
    } else if (key == "set") {
      if (t.size() < 2) r.fail("set record needs a size");
      auto size = static_cast<std::size_t>(r.integer(t[1]));
      if (size == 0 || size > kMaxCorrelationSetSize) r.fail("bad set size");
      if (t.size() != 2 + size + (std::size_t{1} << size)) r.fail("set record has the wrong number of fields");
      CorrelationSet c;
      for (std::size_t q = 0; q < size; ++q) c.members.push_back(r.vertex(t[2 + q], need_k()));
      for (std::size_t q = 2 + size; q < t.size(); ++q) c.theta.push_back(r.real(t[q]));
      sets.push_back(std::move(c));
    } else if (key == "meta") {
      if (t.size() != 3) r.fail("meta record takes a key and a value");
      const auto& mk = t[1];
      if (mk == "seed") {
        cfg.seed = r.integer(t[2]);
        has_cfg = true;
      } else if (mk == "alpha") {
        cfg.alpha = r.real(t[2]);
      } else if (mk == "lambda") {
        cfg.lambda = r.real(t[2]);
      } else if (mk == "cost_min") {
        cfg.cost_min = r.real(t[2]);
      } else if (mk == "cost_max") {
        cfg.cost_max = r.real(t[2]);
      } else if (mk == "p") {
        cfg.p = r.real(t[2]);
      } else if (mk == "connected") {
        connected = t[2] == "1";
      }
      // other meta keys are informational
    } else {
      r.fail("unknown record '" + key + "'");
    }
  }
  if (!k) r.fail("missing k");
  if (costs.empty()) r.fail("missing costs");
  try {
    Instance inst{IncompatibilityGraph(*k, edges, std::move(costs)), CorrelationModel(*k, std::move(sets)), {}};
    if (has_cfg) {
      cfg.k = *k;
      inst.meta.config = cfg;
    }
    inst.meta.connected = connected;
    return inst;
  } catch (const Error& ex) {
    r.fail(ex.what());
  }
}

inline Instance read_instance_file(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return parse_instance(in, path.string());
}

inline void write_instance_file(const std::filesystem::path& path, const Instance& inst) {
  detail::write_text(path, format_instance(inst));
}

// ---------------------------------------------------------------------------
// Complaint sequences

inline GroupedSequence parse_sequence(std::istream& in, std::size_t k, const std::string& source = "<sequence>") {
  detail::LineReader r(in, source);
  std::map<std::uint64_t, std::vector<Complaint>> steps;
  while (auto line = r.next()) {
    auto t = detail::split_ws(*line);
    if (t.size() != 3) r.fail("sequence lines are 't i loss'");
    double loss = r.real(t[2]);
    if (!(loss >= 0.0)) r.fail("losses must be >= 0");
    steps[r.integer(t[0])].push_back({r.vertex(t[1], k), loss});
  }
  GroupedSequence out;
  for (auto& [t, events] : steps) out.push_back(std::move(events));
  return out;
}

inline GroupedSequence read_sequence_file(const std::filesystem::path& path, std::size_t k) {
  auto in = detail::open_in(path);
  return parse_sequence(in, k, path.string());
}

inline std::string format_sequence(const GroupedSequence& steps) {
  std::ostringstream out;
  for (std::size_t t = 0; t < steps.size(); ++t)
    for (const auto& c : steps[t]) out << t + 1 << " " << c.vertex + 1 << " " << format_real(c.loss) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Config files

/// Ordered `key = value` map; later keys override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>") {
    detail::LineReader r(in, source);
    KeyValueConfig cfg;
    while (auto line = r.next()) {
      auto eq = line->find('=');
      if (eq == std::string::npos) r.fail("expected 'key = value'");
      auto key = detail::trim(std::string_view(*line).substr(0, eq));
      auto value = detail::trim(std::string_view(*line).substr(eq + 1));
      if (key.empty()) r.fail("empty key");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig read(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    return parse(in, path.string());
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double real(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    const auto& s = it->second;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw ConfigError("config key '" + key + "' expects a number, got '" + s + "'");
    return v;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::uint64_t v = 0;
    const auto& s = it->second;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      // accept integral reals such as 1e5
      double d = real(key, 0.0);
      if (d < 0 || d != std::floor(d)) throw ConfigError("config key '" + key + "' expects an integer, got '" + s + "'");
      return static_cast<std::uint64_t>(d);
    }
    return v;
  }

  /// Comma-separated list.
  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    auto it = values_.find(key);
    if (it == values_.end()) return out;
    std::string item;
    std::istringstream in(it->second);
    while (std::getline(in, item, ',')) {
      auto t = detail::trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace fairres
