#include "persuade/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace persuade::io {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void Table::add(const std::vector<double>& row) {
  std::vector<std::string> r;
  r.reserve(row.size());
  for (double x : row) r.push_back(fmt(x));
  rows.push_back(std::move(r));
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_field(cells[i]);
  }
  out += "\r\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << content;
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path);
}

void dump_rec(const json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string pad_close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += nl + pad_close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j)
        if (e.is_structured()) flat = false;
      out += "[";
      if (!flat) out += nl;
      bool first = true;
      for (const auto& e : j) {
        if (!first) {
          out += ",";
          out += flat ? (indent > 0 ? " " : "") : nl;
        }
        first = false;
        if (!flat) out += pad;
        dump_rec(e, indent, depth + 1, out);
      }
      if (!flat) out += nl + pad_close;
      out += "]";
      return;
    }
    case json::value_t::number_float: {
      double x = j.get<double>();
      out += std::isfinite(x) ? fmt(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(key, "missing");
  return j.at(key);
}

template <class T>
T as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw InputError(field, std::string("wrong type: ") + e.what());
  }
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw InputError(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys)
      if (it.key() == k) ok = true;
    if (!ok) throw InputError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
  }
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  write_line(out, t.header);
  for (const auto& r : t.rows) write_line(out, r);
  return out;
}

void emit_csv(const Table& t, const std::string& path) { write_file(path, to_csv(t)); }

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  if (indent > 0) out += "\n";
  return out;
}

void emit_json(const json& j, const std::string& path) { write_file(path, dump_json(j)); }

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("file", "cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("file", path + ": " + e.what());
  }
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(cell);
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        row.push_back(cell);
        rows.push_back(row);
      }
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (any || !cell.empty()) {
    row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

Primitives primitives_from_json(const json& j) {
  only_keys(j, {"states", "actions", "times", "prior", "u", "v"}, "");
  Primitives p;
  p.states = as<std::vector<std::string>>(need(j, "states"), "states");
  p.actions = as<std::vector<std::string>>(need(j, "actions"), "actions");
  p.times = as<std::vector<double>>(need(j, "times"), "times");
  p.prior = as<std::vector<double>>(need(j, "prior"), "prior");
  p.u = as<Tensor3>(need(j, "u"), "u");
  p.v = as<Tensor3>(need(j, "v"), "v");
  p.validate();
  return p;
}

json to_json(const Primitives& p) {
  return json{{"states", p.states}, {"actions", p.actions}, {"times", p.times},
              {"prior", p.prior},   {"u", p.u},             {"v", p.v}};
}

json to_json(const BeliefTimeDistribution& f) {
  json arr = json::array();
  for (const Atom& a : f.atoms)
    arr.push_back({{"belief", a.belief}, {"time", f.times.at(a.time)}, {"weight", a.weight}});
  return arr;
}

BeliefTimeDistribution distribution_from_json(const json& j, const std::vector<double>& times) {
  if (!j.is_array()) throw InputError("distribution", "expected an array of atoms");
  BeliefTimeDistribution f;
  f.times = times;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "distribution[" + std::to_string(i) + "]";
    only_keys(j[i], {"belief", "time", "weight"}, where);
    Atom a;
    a.belief = as<Belief>(need(j[i], "belief"), where + ".belief");
    const double t = as<double>(need(j[i], "time"), where + ".time");
    a.weight = as<double>(need(j[i], "weight"), where + ".weight");
    std::size_t k = times.size();
    for (std::size_t q = 0; q < times.size(); ++q)
      if (std::abs(times[q] - t) <= 1e-12) k = q;
    if (k == times.size()) throw InputError(where + ".time", "not on the problem's time grid");
    a.time = k;
    f.atoms.push_back(std::move(a));
  }
  return f;
}

json to_json(const FiniteBeliefProcess& p) {
  json nodes = json::array();
  for (const ProcessNode& n : p.nodes) {
    json ch = json::array();
    for (auto [c, q] : n.children) ch.push_back(json::array({c, q}));
    nodes.push_back({{"k", n.k}, {"belief", n.belief}, {"stop", n.stop}, {"children", ch}});
  }
  return json{{"times", p.times}, {"nodes", nodes}};
}

FiniteBeliefProcess process_from_json(const json& j) {
  only_keys(j, {"times", "nodes"}, "process");
  FiniteBeliefProcess p;
  p.times = as<std::vector<double>>(need(j, "times"), "process.times");
  const json& nodes = need(j, "nodes");
  if (!nodes.is_array()) throw InputError("process.nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "process.nodes[" + std::to_string(i) + "]";
    only_keys(nodes[i], {"k", "belief", "stop", "children"}, where);
    ProcessNode n;
    n.k = as<int>(need(nodes[i], "k"), where + ".k");
    n.belief = as<Belief>(need(nodes[i], "belief"), where + ".belief");
    n.stop = nodes[i].value("stop", false);
    if (nodes[i].contains("children"))
      n.children = as<std::vector<std::pair<std::size_t, double>>>(nodes[i]["children"], where + ".children");
    p.nodes.push_back(std::move(n));
  }
  p.validate(1e-9);
  return p;
}

std::string hash_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace persuade::io
