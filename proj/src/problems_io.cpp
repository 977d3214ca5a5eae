/*
    Copyright (c) 2026 the dsap-cfp authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include "dsap/problems_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dsap/rng.hpp"

namespace dsap {

namespace {

using nlohmann::json;

constexpr int kFileVersion = 1;

Vec parse_vec(const json& j, const std::string& where) {
  if (!j.is_array()) throw std::runtime_error(where + ": expected an array of numbers");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw std::runtime_error(where + ": expected an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

ConvexSet parse_set(const json& j, std::size_t index) {
  const std::string where = "sets[" + std::to_string(index) + "]";
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw std::runtime_error(where + ": expected an object with a \"type\" field");
  const std::string type = j["type"].get<std::string>();

  auto need = [&](const char* field) -> const json& {
    if (!j.contains(field))
      throw std::runtime_error(where + ": missing field \"" + field + "\" for type " + type);
    return j[field];
  };

  ConvexSet set;
  if (type == "hyperplane")
    set = Hyperplane{parse_vec(need("a"), where + ".a"), need("b").get<double>()};
  else if (type == "halfspace")
    set = Halfspace{parse_vec(need("a"), where + ".a"), need("b").get<double>()};
  else if (type == "ball")
    set = Ball{parse_vec(need("center"), where + ".center"), need("radius").get<double>()};
  else if (type == "box") {
    Box b{parse_vec(need("lower"), where + ".lower"), parse_vec(need("upper"), where + ".upper")};
    if (b.lower.size() == b.upper.size())
      for (std::size_t i = 0; i < b.lower.size(); ++i)
        if (b.lower[i] > b.upper[i])
          throw std::runtime_error("box bounds inverted at set index " + std::to_string(index));
    set = std::move(b);
  } else
    throw std::runtime_error(where + ": unknown set type \"" + type + "\"");

  try {
    validate_set(set);
  } catch (const std::exception& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
  return set;
}

json set_to_json(const ConvexSet& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Hyperplane>)
          return json{{"type", "hyperplane"}, {"a", v.a}, {"b", v.b}};
        else if constexpr (std::is_same_v<T, Halfspace>)
          return json{{"type", "halfspace"}, {"a", v.a}, {"b", v.b}};
        else if constexpr (std::is_same_v<T, Ball>)
          return json{{"type", "ball"}, {"center", v.center}, {"radius", v.radius}};
        else
          return json{{"type", "box"}, {"lower", v.lower}, {"upper", v.upper}};
      },
      s);
}

}  // namespace

Problem parse_problem(const std::string& text, const std::string& context) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(context + ": malformed JSON: " + e.what());
  }
  try {
    if (!j.is_object()) throw std::runtime_error("top level must be an object");
    if (!j.contains("version") || !j["version"].is_number_integer())
      throw std::runtime_error("missing integer \"version\" field");
    if (j["version"].get<int>() != kFileVersion)
      throw std::runtime_error("unsupported version " + j["version"].dump());
    if (!j.contains("dimension") || !j["dimension"].is_number_integer())
      throw std::runtime_error("missing integer \"dimension\" field");
    if (!j.contains("sets") || !j["sets"].is_array() || j["sets"].empty())
      throw std::runtime_error("\"sets\" must be a nonempty array");

    Problem p;
    p.dimension = j["dimension"].get<int>();
    for (std::size_t i = 0; i < j["sets"].size(); ++i) p.sets.push_back(parse_set(j["sets"][i], i));
    if (j.contains("feasible_point"))
      p.feasible_point = parse_vec(j["feasible_point"], "feasible_point");
    if (j.contains("metadata")) {
      const auto& md = j["metadata"];
      if (md.contains("name") && md["name"].is_string()) p.name = md["name"].get<std::string>();
      if (md.contains("seed") && md["seed"].is_number_unsigned())
        p.seed = md["seed"].get<std::uint64_t>();
    }
    validate_problem(p);
    return p;
  } catch (const std::exception& e) {
    throw std::runtime_error(context + ": " + e.what());
  }
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open problem file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

std::string serialize_problem(const Problem& p) {
  json j;
  j["version"] = kFileVersion;
  j["dimension"] = p.dimension;
  j["sets"] = json::array();
  for (const auto& s : p.sets) j["sets"].push_back(set_to_json(s));
  if (p.feasible_point) j["feasible_point"] = *p.feasible_point;
  if (!p.name.empty() || p.seed) {
    json md = json::object();
    if (!p.name.empty()) md["name"] = p.name;
    if (p.seed) md["seed"] = *p.seed;
    j["metadata"] = md;
  }
  return j.dump(2) + "\n";
}

void save_problem(const Problem& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << serialize_problem(p);
  if (!out) throw std::runtime_error(path + ": write failed");
}

Problem generate_random(GeneratorKind kind, int n, int m, std::uint64_t seed, double margin) {
  if (n < 1 || m < 1) throw std::invalid_argument("generate_random: n and m must be >= 1");
  if (!(margin > 0.0)) throw std::invalid_argument("generate_random: margin must be > 0");
  Rng g(mix64(seed, 0x6366703067656eULL));

  Problem p;
  p.dimension = n;
  p.seed = seed;
  p.name = (kind == GeneratorKind::Halfspaces ? "random-halfspaces" : "random-mixed");

  Vec anchor(static_cast<std::size_t>(n));
  for (auto& c : anchor) c = uniform(g, -1.0, 1.0);

  for (int i = 0; i < m; ++i) {
    const int shape = (kind == GeneratorKind::Halfspaces) ? 0 : i % 3;
    if (shape == 0) {
      const Vec a = random_unit(g, static_cast<std::size_t>(n));
      p.sets.push_back(Halfspace{a, dot(a, anchor) + margin});
    } else if (shape == 1) {
      const double radius = margin + uniform(g, 0.5, 2.0);
      const Vec dir = random_unit(g, static_cast<std::size_t>(n));
      const double off = uniform01(g) * (radius - margin);
      p.sets.push_back(Ball{add_scaled(anchor, off, dir), radius});
    } else {
      Vec lower(static_cast<std::size_t>(n)), upper(static_cast<std::size_t>(n));
      for (int c = 0; c < n; ++c) {
        lower[static_cast<std::size_t>(c)] = anchor[static_cast<std::size_t>(c)] - margin -
                                             uniform(g, 0.0, 2.0);
        upper[static_cast<std::size_t>(c)] = anchor[static_cast<std::size_t>(c)] + margin +
                                             uniform(g, 0.0, 2.0);
      }
      p.sets.push_back(Box{std::move(lower), std::move(upper)});
    }
  }
  p.feasible_point = std::move(anchor);
  validate_problem(p);
  return p;
}

// ---------------------------------------------------------------------------
// Trace CSV

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_trace(const IterationTrace& trace) {
  bool has_fejer = false, has_beta = false, has_obj = false;
  for (const auto& r : trace.rows) {
    has_fejer |= r.fejer_margin.has_value();
    has_beta |= r.beta.has_value();
    has_obj |= r.objective.has_value();
  }
  std::ostringstream os;
  os << "k,proximity,phi_sum,step_norm";
  if (has_fejer) os << ",fejer_margin";
  if (has_beta) os << ",beta_k";
  if (has_obj) os << ",objective_value";
  os << '\n';
  for (const auto& r : trace.rows) {
    os << r.k << ',' << fmt17(r.proximity) << ',' << fmt17(r.phi_sum) << ','
       << fmt17(r.step_norm);
    if (has_fejer) os << ',' << fmt17(r.fejer_margin.value_or(0.0));
    if (has_beta) os << ',' << fmt17(r.beta.value_or(0.0));
    if (has_obj) os << ',' << fmt17(r.objective.value_or(0.0));
    os << '\n';
  }
  return os.str();
}

void write_trace(const IterationTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << serialize_trace(trace);
  if (!out) throw std::runtime_error(path + ": write failed");
}

IterationTrace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open trace file");

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty trace file");
  std::vector<std::string> cols;
  {
    std::istringstream hs(header);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  if (cols.size() < 4 || cols[0] != "k" || cols[1] != "proximity" || cols[2] != "phi_sum" ||
      cols[3] != "step_norm")
    throw std::runtime_error(path + ": unexpected trace header: " + header);

  IterationTrace trace;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (cells.size() != cols.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(cols.size()) + " columns, got " +
                               std::to_string(cells.size()));
    TraceRow r;
    r.k = std::stoi(cells[0]);
    for (std::size_t i = 1; i < cols.size(); ++i) {
      const double v = std::strtod(cells[i].c_str(), nullptr);
      if (cols[i] == "proximity")
        r.proximity = v;
      else if (cols[i] == "phi_sum")
        r.phi_sum = v;
      else if (cols[i] == "step_norm")
        r.step_norm = v;
      else if (cols[i] == "fejer_margin")
        r.fejer_margin = v;
      else if (cols[i] == "beta_k")
        r.beta = v;
      else if (cols[i] == "objective_value")
        r.objective = v;
      else
        throw std::runtime_error(path + ": unknown trace column " + cols[i]);
    }
    trace.rows.push_back(r);
  }
  return trace;
}

}  // namespace dsap
