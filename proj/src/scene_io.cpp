#include "projrigid/scene_io.hpp"

#include <fstream>
#include <sstream>

#include "projrigid/zero.hpp"

namespace projrigid {

namespace {

std::set<std::string> chart_identifiers(const Chart& chart,
                                        const std::map<std::string, double>& params) {
  std::set<std::string> ids(chart.coords.begin(), chart.coords.end());
  for (const auto& [k, v] : params) ids.insert(k);
  for (int i = 0; i < chart.dim && i < 10; ++i) ids.insert("x" + std::to_string(i));
  return ids;
}

std::map<std::string, Expr> alias_substitution(const Chart& chart) {
  std::map<std::string, Expr> sub;
  for (int i = 0; i < chart.dim && i < 10; ++i) {
    std::string alias = "x" + std::to_string(i);
    if (alias != chart.coord(i)) sub[alias] = Expr::var(chart.coord(i));
  }
  return sub;
}

}  // namespace

Expr parse_in_chart(const std::string& text, const Chart& chart,
                    const std::map<std::string, double>& params) {
  Expr e = parse_expr(text, chart_identifiers(chart, params));
  auto sub = alias_substitution(chart);
  return sub.empty() ? e : substitute(e, sub);
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw SceneError(origin + ": " + what);
}

Chart parse_chart(const nlohmann::json& j, int dim, const std::string& origin) {
  Chart c;
  c.name = j.at("name").get<std::string>();
  c.dim = dim;
  c.coords = j.at("coords").get<std::vector<std::string>>();
  if (static_cast<int>(c.coords.size()) != dim)
    fail(origin, "chart '" + c.name + "' declares " + std::to_string(c.coords.size()) +
                     " coordinates for dimension " + std::to_string(dim));
  c.boundary = j.value("boundary", false);
  auto box = j.at("box").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(box.size()) != dim)
    fail(origin, "chart '" + c.name + "' box entry count mismatch");
  for (const auto& b : box) {
    if (b.size() != 2 || !(b[0] < b[1]))
      fail(origin, "chart '" + c.name + "' has a malformed box range");
    c.box.push_back({b[0], b[1]});
  }
  if (c.boundary && c.box[0][0] != 0.0)
    fail(origin, "boundary chart '" + c.name +
                     "' must start its first coordinate range at 0 (the boundary)");
  return c;
}

void parse_transitions(const nlohmann::json& j, Chart& chart, const Scene& scene,
                       const std::string& origin) {
  if (!j.contains("transitions")) return;
  for (const auto& tj : j.at("transitions")) {
    Transition t;
    t.target = tj.at("target").get<std::string>();
    const Chart* target = scene.find_chart(t.target);
    if (!target)
      fail(origin, "chart '" + chart.name + "' transition targets unknown chart '" + t.target +
                       "'");
    auto fwd = tj.at("forward").get<std::vector<std::string>>();
    auto inv = tj.at("inverse").get<std::vector<std::string>>();
    if (static_cast<int>(fwd.size()) != chart.dim || static_cast<int>(inv.size()) != chart.dim)
      fail(origin, "transition " + chart.name + " -> " + t.target +
                       " needs one forward and one inverse component per coordinate");
    try {
      for (const std::string& s : fwd) t.forward.push_back(parse_in_chart(s, chart, scene.params));
      for (const std::string& s : inv) t.inverse.push_back(parse_in_chart(s, *target, scene.params));
    } catch (const ParseError& e) {
      fail(origin, "transition " + chart.name + " -> " + t.target + ": " + e.what());
    }

    // boundary compatibility between boundary charts: the boundary maps to
    // the boundary with positive normal derivative
    if (chart.boundary && target->boundary) {
      SamplerOptions so;
      so.samples = 8;
      Sampler bs = boundary_sampler(chart, scene.params, so);
      Expr restricted = substitute(t.forward[0], {{chart.coord(0), Expr::number(0)}});
      Expr normal = diff(t.forward[0], chart.coord(0));
      for (const VarMap& p : bs.points()) {
        try {
          if (std::abs(eval(restricted, p)) > 1e-9)
            fail(origin, "transition " + chart.name + " -> " + t.target +
                             " does not map the boundary to the boundary");
          if (eval(substitute(normal, {{chart.coord(0), Expr::number(0)}}), p) <= 0)
            fail(origin, "transition " + chart.name + " -> " + t.target +
                             " has a non-positive boundary normal derivative");
        } catch (const EvalError&) {
          continue;
        }
      }
    }
    chart.transitions.push_back(std::move(t));
  }
}

}  // namespace

Scene scene_from_json(const nlohmann::json& j, const std::string& origin) {
  Scene scene;
  try {
    scene.dim = j.at("dimension").get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(origin, std::string("missing or malformed 'dimension': ") + e.what());
  }
  if (scene.dim < 2) fail(origin, "dimension must be at least 2");
  if (j.contains("params"))
    scene.params = j.at("params").get<std::map<std::string, double>>();

  try {
    for (const auto& cj : j.at("charts")) {
      Chart c = parse_chart(cj, scene.dim, origin);
      if (scene.find_chart(c.name)) fail(origin, "duplicate chart name '" + c.name + "'");
      for (const std::string& coord : c.coords)
        if (scene.params.count(coord))
          fail(origin, "coordinate '" + coord + "' of chart '" + c.name +
                           "' collides with a parameter name");
      scene.charts.push_back(std::move(c));
    }
    // transitions second, so targets resolve independently of order
    std::size_t idx = 0;
    for (const auto& cj : j.at("charts")) parse_transitions(cj, scene.charts[idx++], scene, origin);
  } catch (const nlohmann::json::exception& e) {
    fail(origin, std::string("malformed 'charts': ") + e.what());
  }

  if (j.contains("connections")) {
    for (const auto& gj : j.at("connections")) {
      std::string name = gj.at("name").get<std::string>();
      std::string chart_name = gj.at("chart").get<std::string>();
      const Chart* chart = scene.find_chart(chart_name);
      if (!chart)
        fail(origin, "connection '" + name + "' references unknown chart '" + chart_name + "'");
      ConnectionField g(*chart);
      std::map<std::string, Expr> seen;
      for (const auto& [key, value] : gj.at("gamma").items()) {
        int i, jj, k;
        if (std::sscanf(key.c_str(), "%d,%d,%d", &i, &jj, &k) != 3 || i < 0 || jj < 0 || k < 0 ||
            i >= scene.dim || jj >= scene.dim || k >= scene.dim)
          fail(origin, "connection '" + name + "' has a malformed index key '" + key + "'");
        Expr e;
        try {
          e = parse_in_chart(value.get<std::string>(), *chart, scene.params);
        } catch (const ParseError& pe) {
          fail(origin, "connection '" + name + "' entry " + key + ": " + pe.what());
        }
        std::string canon = std::to_string(i) + "," + std::to_string(std::min(jj, k)) + "," +
                            std::to_string(std::max(jj, k));
        auto it = seen.find(canon);
        if (it != seen.end() && !struct_equal(simplify(it->second), simplify(e)))
          fail(origin, "connection '" + name + "' breaks the lower-index symmetry at " + canon);
        seen.emplace(canon, e);
        g.set(i, jj, k, e);
      }
      scene.connections.push_back({name, std::move(g)});
    }
  }

  if (j.contains("maps")) {
    for (const auto& mj : j.at("maps")) {
      std::string name = mj.at("name").get<std::string>();
      const Chart* source = scene.find_chart(mj.at("source").get<std::string>());
      const Chart* target = scene.find_chart(mj.at("target").get<std::string>());
      if (!source || !target) fail(origin, "map '" + name + "' references an unknown chart");
      std::vector<Expr> comps;
      try {
        for (const auto& cs : mj.at("components"))
          comps.push_back(parse_in_chart(cs.get<std::string>(), *source, scene.params));
      } catch (const ParseError& pe) {
        fail(origin, "map '" + name + "': " + pe.what());
      }
      scene.maps.push_back({name, make_map(*source, *target, std::move(comps))});
    }
  }
  return scene;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError(path + ": cannot open scene file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SceneError(path + ": " + e.what());
  }
  return scene_from_json(j, path);
}

nlohmann::ordered_json scene_to_json(const Scene& scene) {
  nlohmann::ordered_json j;
  j["dimension"] = scene.dim;
  if (!scene.params.empty()) j["params"] = scene.params;
  j["charts"] = nlohmann::ordered_json::array();
  for (const Chart& c : scene.charts) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["coords"] = c.coords;
    cj["boundary"] = c.boundary;
    auto box = nlohmann::ordered_json::array();
    for (const auto& b : c.box) box.push_back({b[0], b[1]});
    cj["box"] = box;
    if (!c.transitions.empty()) {
      auto ts = nlohmann::ordered_json::array();
      for (const Transition& t : c.transitions) {
        nlohmann::ordered_json tj;
        tj["target"] = t.target;
        auto fw = nlohmann::ordered_json::array(), iv = nlohmann::ordered_json::array();
        for (const Expr& e : t.forward) fw.push_back(to_string(e));
        for (const Expr& e : t.inverse) iv.push_back(to_string(e));
        tj["forward"] = fw;
        tj["inverse"] = iv;
        ts.push_back(tj);
      }
      cj["transitions"] = ts;
    }
    j["charts"].push_back(cj);
  }
  if (!scene.connections.empty()) {
    j["connections"] = nlohmann::ordered_json::array();
    for (const auto& [name, g] : scene.connections) {
      nlohmann::ordered_json gj;
      gj["name"] = name;
      gj["chart"] = g.chart.name;
      nlohmann::ordered_json entries = nlohmann::ordered_json::object();
      int n = g.chart.dim;
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b) {
            const Expr& e = g.gamma(i, a, b);
            if (!e.is_zero_literal())
              entries[std::to_string(i) + "," + std::to_string(a) + "," + std::to_string(b)] =
                  to_string(e);
          }
      gj["gamma"] = entries;
      j["connections"].push_back(gj);
    }
  }
  if (!scene.maps.empty()) {
    j["maps"] = nlohmann::ordered_json::array();
    for (const auto& [name, m] : scene.maps) {
      nlohmann::ordered_json mj;
      mj["name"] = name;
      mj["source"] = m.source.name;
      mj["target"] = m.target.name;
      auto cs = nlohmann::ordered_json::array();
      for (const Expr& e : m.comp) cs.push_back(to_string(e));
      mj["components"] = cs;
      j["maps"].push_back(mj);
    }
  }
  return j;
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SceneError(path + ": cannot open for writing");
  out << scene_to_json(scene).dump(2) << "\n";
}

std::string hash_bytes(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string scene_hash(const Scene& scene) { return hash_bytes(scene_to_json(scene).dump()); }

}  // namespace projrigid
