#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "projrigid/cartan.hpp"
#include "projrigid/fixtures.hpp"
#include "projrigid/geodesic.hpp"
#include "projrigid/geometry.hpp"
#include "projrigid/report.hpp"
#include "projrigid/rigidity.hpp"
#include "projrigid/scene_io.hpp"

using namespace projrigid;

namespace {

struct CommonOpts {
  std::string scene_path;
  std::uint64_t seed = 0;
  int samples = 64;
  double tol = 1e-9;
  std::string format = "text";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_scene = true) {
  auto* sc = cmd->add_option("--scene", o.scene_path, "scene file (JSON)");
  if (needs_scene) sc->required();
  cmd->add_option("--seed", o.seed, "sampling seed");
  cmd->add_option("--samples", o.samples, "sample count for residual checks");
  cmd->add_option("--tol", o.tol, "zero-test tolerance");
  cmd->add_option("--format", o.format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
}

std::vector<double> parse_point(const std::string& text, int dim, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw SceneError(what + ": cannot parse component '" + item + "'");
    }
  }
  if (static_cast<int>(out.size()) != dim)
    throw SceneError(what + ": expected " + std::to_string(dim) + " comma-separated values");
  return out;
}

int emit(const Report& rep, const std::string& format) {
  if (format == "json")
    std::cout << rep.to_json().dump(2) << "\n";
  else
    std::cout << rep.to_text();
  return rep.exit_code();
}

Sampler make_sampler(const Scene& scene, const Chart& chart, const CommonOpts& o) {
  SamplerOptions so;
  so.samples = o.samples;
  so.seed = o.seed;
  so.tolerance = o.tol;
  return chart_sampler(chart, scene.params, so);
}

// --------------------------------------------------------------------------

int cmd_rigidity(const CommonOpts& o, int points) {
  Scene scene = load_scene(o.scene_path);
  ScanOptions opt;
  opt.boundary_points = points;
  opt.seed = o.seed;
  opt.tol = o.tol;
  RigidityReport rr = rigidity_scan(scene, opt);

  Report rep;
  rep.command = "rigidity";
  rep.scene_hash = scene_hash(scene);
  rep.seed = o.seed;

  for (const ConnectionScan& scan : rr.scans) {
    CheckRecord r;
    r.id = "rigidity/" + scan.connection;
    r.anchor = "boundary-obstruction-span";
    r.verdict = verdict_name(scan.verdict);
    r.undetermined = scan.verdict == Verdict::Undetermined;
    r.details["chart"] = scan.chart;
    r.details["points"] = scan.points.size();
    double max_ob = 0;
    auto witnesses = nlohmann::ordered_json::array();
    for (const ScanPoint& p : scan.points) {
      max_ob = std::max(max_ob, p.obstruction_max);
      if (witnesses.size() < 4 && p.verdict == Verdict::Rigid) {
        nlohmann::ordered_json w;
        w["point"] = p.point;
        w["obstruction"] = nlohmann::ordered_json(p.obstruction_max);
        witnesses.push_back(w);
      }
    }
    r.details["max_obstruction"] = nlohmann::ordered_json(max_ob);
    if (!witnesses.empty()) r.details["witnesses"] = witnesses;
    rep.add(std::move(r));
  }

  CheckRecord cc;
  cc.id = "rigidity/cross-checks";
  cc.anchor = "chart-and-shift-invariance";
  cc.ok = rr.cross_checks_consistent;
  cc.verdict = rr.cross_checks_consistent ? "agree" : rr.inconsistency;
  rep.add(std::move(cc));

  CheckRecord gl;
  gl.id = "rigidity/global";
  gl.anchor = "boundary-rigidity-verdict";
  gl.verdict = verdict_name(rr.global);
  gl.undetermined = rr.global == Verdict::Undetermined;
  rep.add(std::move(gl));
  return emit(rep, o.format);
}

int cmd_verify_map(const CommonOpts& o, const std::string& map_name,
                   const std::string& connection_name) {
  Scene scene = load_scene(o.scene_path);
  const MapField* map = scene.find_map(map_name);
  if (!map) throw SceneError("scene has no map named '" + map_name + "'");

  Report rep;
  rep.command = "verify-map";
  rep.scene_hash = scene_hash(scene);
  rep.seed = o.seed;

  bool found = false;
  for (const auto& [name, gamma] : scene.connections) {
    if (gamma.chart.name != map->source.name) continue;
    if (!connection_name.empty() && name != connection_name) continue;
    found = true;
    Sampler s = make_sampler(scene, map->source, o);
    double jac_floor = min_abs_jacobian(*map, s);
    MapVerdict v = is_projective_transformation(*map, gamma, s);
    CheckRecord r;
    r.id = "verify-map/" + map_name + "/" + name;
    r.anchor = "pullback-shift-residual";
    r.details["min_abs_jacobian"] = nlohmann::ordered_json(jac_floor);
    bool passes = v.residual.status != ZeroStatus::NonzeroWitness;
    r.ok = passes;
    r.undetermined = v.residual.status == ZeroStatus::Undetermined && v.residual.max_abs > o.tol;
    r.verdict = v.residual.status == ZeroStatus::ProvablyZero ? "projective (residual provably zero)"
                : passes ? "projective (sampled residual below tolerance)"
                         : "not projective";
    r.details["residual_max"] = nlohmann::ordered_json(v.residual.max_abs);
    r.details["zero_status"] = zero_status_name(v.residual.status);
    auto ups = nlohmann::ordered_json::array();
    for (const Expr& c : v.upsilon.comp) ups.push_back(to_string(simplify(c)));
    r.details["one_form"] = ups;
    if (v.residual.status == ZeroStatus::NonzeroWitness) {
      r.details["witness_value"] = nlohmann::ordered_json(v.residual.value);
    }
    rep.add(std::move(r));
  }
  if (!found)
    throw SceneError("no connection on chart '" + map->source.name + "' matches the request");
  return emit(rep, o.format);
}

int cmd_geodesic(const CommonOpts& o, const std::string& connection_name, const std::string& point,
                 const std::string& velocity, double h, int steps) {
  Scene scene = load_scene(o.scene_path);
  const ConnectionField* gamma = nullptr;
  if (!connection_name.empty()) {
    gamma = scene.find_connection(connection_name);
    if (!gamma) throw SceneError("scene has no connection named '" + connection_name + "'");
  } else if (scene.connections.size() == 1) {
    gamma = &scene.connections[0].second;
  } else {
    throw SceneError("scene declares several connections; pick one with --connection");
  }
  int n = gamma->chart.dim;
  std::vector<double> x0 = parse_point(point, n, "--point");
  std::vector<double> v0 = parse_point(velocity, n, "--velocity");

  Report rep;
  rep.command = "geodesic";
  rep.scene_hash = scene_hash(scene);
  rep.seed = o.seed;

  Trajectory tr = geodesic_integrate(*gamma, x0, v0, h, steps, scene.params);
  CheckRecord r;
  r.id = "geodesic/run";
  r.anchor = "geodesic-flow";
  r.verdict = tr.exited ? "trajectory left the chart box (truncated)" : "completed";
  r.details["steps_taken"] = tr.states.size() - 1;
  r.details["step"] = nlohmann::ordered_json(h);
  if (tr.exited) r.details["exit_step"] = tr.exit_step;
  auto table = nlohmann::ordered_json::array();
  std::size_t stride = std::max<std::size_t>(1, (tr.states.size() - 1) / 32);
  for (std::size_t s = 0; s < tr.states.size(); s += stride) {
    nlohmann::ordered_json row;
    row["t"] = nlohmann::ordered_json(static_cast<double>(s) * h);
    row["x"] = tr.states[s].x;
    row["v"] = tr.states[s].v;
    table.push_back(row);
  }
  r.details["trajectory"] = table;
  rep.add(std::move(r));

  if (gamma->chart.boundary && std::abs(x0[0]) < 1e-12 && std::abs(v0[0]) < 1e-12) {
    DriftResult d = tangency_drift(*gamma, x0, v0, h, steps, scene.params);
    CheckRecord dr;
    dr.id = "geodesic/tangency-drift";
    dr.anchor = "totally-geodesic-boundary";
    dr.verdict = d.max_drift <= 1e-10 ? "boundary-tangent run stays on the boundary"
                                      : "boundary-tangent run drifts off the boundary";
    dr.details["max_drift"] = nlohmann::ordered_json(d.max_drift);
    dr.details["quadratic_coefficient"] = nlohmann::ordered_json(d.quad_coeff);
    rep.add(std::move(dr));
  }
  return emit(rep, o.format);
}

int cmd_cartan(const CommonOpts& o, const std::string& connection_name) {
  Scene scene = load_scene(o.scene_path);
  Report rep;
  rep.command = "cartan";
  rep.scene_hash = scene_hash(scene);
  rep.seed = o.seed;

  bool found = false;
  for (const auto& [name, gamma] : scene.connections) {
    if (!connection_name.empty() && name != connection_name) continue;
    found = true;
    const Chart& chart = gamma.chart;
    Sampler s = make_sampler(scene, chart, o);

    FormMatrix w = normal_gauge(gamma);
    TwoFormMatrix w2 = gauge_curvature(w);

    {
      CheckRecord r;
      r.id = "cartan/" + name + "/curvature";
      r.anchor = "normal-gauge-curvature";
      ZeroResult z = is_zero_all(w2.c, s);
      r.verdict = z.status == ZeroStatus::ProvablyZero ? "flat (provably zero curvature)"
                  : z.status == ZeroStatus::NonzeroWitness ? "curved"
                                                           : "flat within tolerance (sampled)";
      r.details["max_sampled"] = nlohmann::ordered_json(z.max_abs);
      rep.add(std::move(r));
    }
    {
      NormalityReport nr = check_normality_traces(w2, s);
      CheckRecord r;
      r.id = "cartan/" + name + "/normality";
      r.anchor = "torsion-free-and-trace-conditions";
      r.ok = nr.passed();
      r.verdict = nr.passed() ? "normal gauge conditions hold" : "trace condition failed";
      if (!nr.failing_trace.empty()) r.details["failing_trace"] = nr.failing_trace;
      r.details["torsion_status"] = zero_status_name(nr.torsion.status);
      r.details["trace_status"] = zero_status_name(nr.traces.status);
      rep.add(std::move(r));
    }

    if (!chart.boundary) continue;
    SamplerOptions so;
    so.samples = o.samples;
    so.seed = o.seed;
    so.tolerance = o.tol;
    Sampler bs = boundary_sampler(chart, scene.params, so);
    BoundaryPullback bp = boundary_pullback(w, bs);
    bool member = bp.membership.status != ZeroStatus::NonzeroWitness;
    {
      CheckRecord r;
      r.id = "cartan/" + name + "/boundary-pullback";
      r.anchor = "hyperplane-subalgebra-membership";
      r.verdict = member ? "restricts into the hyperplane-stabilizer subalgebra"
                         : "outside the subalgebra (rigid-boundary witness)";
      r.undetermined = bp.membership.status == ZeroStatus::Undetermined &&
                       bp.membership.max_abs > o.tol;
      if (!member) r.details["witness"] = bp.witness;
      r.details["membership_status"] = zero_status_name(bp.membership.status);
      rep.add(std::move(r));
    }
    if (member) {
      FormMatrix reduced = mod_k_project(bp.gauge);
      CheckRecord r;
      r.id = "cartan/" + name + "/kernel-quotient";
      r.anchor = "kernel-quotient-gauge";
      r.verdict = "induced lower-dimensional projective gauge";
      auto entries = nlohmann::ordered_json::object();
      for (int A = 0; A < reduced.msize; ++A)
        for (int B = 0; B < reduced.msize; ++B)
          for (int i = 0; i < reduced.chart.dim; ++i) {
            const Expr& e = reduced.coef(A, B, i);
            if (!e.is_zero_literal())
              entries[std::to_string(A) + "," + std::to_string(B) + "|d" + reduced.chart.coord(i)] =
                  to_string(e);
          }
      r.details["gauge"] = entries;
      rep.add(std::move(r));

      ConnectionField induced = induce_boundary_connection(gamma, bs);
      CheckRecord ir;
      ir.id = "cartan/" + name + "/induced-connection";
      ir.anchor = "induced-boundary-connection";
      ir.verdict = "boundary connection induced by restriction";
      auto ientries = nlohmann::ordered_json::object();
      int m = induced.chart.dim;
      for (int i = 0; i < m; ++i)
        for (int a = 0; a < m; ++a)
          for (int b = a; b < m; ++b)
            if (!induced.gamma(i, a, b).is_zero_literal())
              ientries[std::to_string(i) + "," + std::to_string(a) + "," + std::to_string(b)] =
                  to_string(induced.gamma(i, a, b));
      ir.details["gamma"] = ientries;
      rep.add(std::move(ir));

      if (chart.dim >= 3) {
        SchoutenComparison sc = schouten_compare(gamma, bs);
        CheckRecord r2;
        r2.id = "cartan/" + name + "/schouten-comparison";
        r2.anchor = "boundary-schouten-comparison";
        ZeroResult dz = is_zero_all(*sc.difference, bs);
        r2.verdict = dz.status == ZeroStatus::NonzeroWitness
                         ? "ambient and induced normalizations differ"
                         : "ambient and induced normalizations agree on samples";
        r2.details["difference_status"] = zero_status_name(dz.status);
        r2.details["difference_max"] = nlohmann::ordered_json(dz.max_abs);
        auto tbl = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < sc.restricted.size(); ++i) {
          nlohmann::ordered_json row;
          row["restricted"] = to_string(sc.restricted[i]);
          row["induced"] = to_string((*sc.induced)[i]);
          tbl.push_back(row);
        }
        r2.details["entries"] = tbl;
        rep.add(std::move(r2));
      }
    }
  }
  if (!found) throw SceneError("no connection matches the request");
  return emit(rep, o.format);
}

int cmd_jets(const CommonOpts& o, const std::string& connection_name, const std::string& point) {
  Scene scene = load_scene(o.scene_path);
  Report rep;
  rep.command = "jets";
  rep.scene_hash = scene_hash(scene);
  rep.seed = o.seed;

  bool found = false;
  for (const auto& [name, gamma] : scene.connections) {
    if (!connection_name.empty() && name != connection_name) continue;
    if (!gamma.chart.boundary) continue;
    found = true;
    std::vector<std::vector<double>> pts;
    if (!point.empty()) {
      pts.push_back(parse_point(point, gamma.chart.dim, "--point"));
    } else {
      pts = boundary_grid(gamma.chart, 5);
    }
    for (const std::vector<double>& p : pts) {
      JetSolution sol = solve_boundary_jets(gamma, p, scene.params);
      int n = gamma.chart.dim;
      CheckRecord r;
      r.id = "jets/" + name;
      r.anchor = "boundary-2jet-system";
      r.verdict = "solution space dimension " + std::to_string(sol.dimension);
      r.ok = sol.max_residual < 1e-10 && sol.dimension <= n * (n + 2);
      r.undetermined = !sol.well_conditioned;
      r.details["point"] = p;
      r.details["dimension"] = sol.dimension;
      r.details["dimension_bound"] = n * (n + 2);
      r.details["max_residual"] = nlohmann::ordered_json(sol.max_residual);
      if (!sol.well_conditioned) r.details["singular_value_gap"] = nlohmann::ordered_json(sol.sv_gap);
      auto basis = nlohmann::ordered_json::array();
      for (const JetElement& el : sol.basis) {
        nlohmann::ordered_json ej;
        ej["a"] = nlohmann::ordered_json(el.a);
        ej["b"] = std::vector<double>(el.b.data(), el.b.data() + el.b.size());
        ej["c"] = std::vector<double>(el.c.data(), el.c.data() + el.c.size());
        std::vector<double> db(el.db.data(), el.db.data() + el.db.size());
        ej["db"] = db;
        ej["normal_form_value"] = nlohmann::ordered_json(el.upsilon0);
        basis.push_back(ej);
      }
      r.details["basis"] = basis;
      rep.add(std::move(r));
    }
  }
  if (!found) throw SceneError("no boundary-chart connection matches the request");
  return emit(rep, o.format);
}

int cmd_fixtures(bool list, const std::string& export_dir, const std::string& only_name) {
  std::vector<Fixture> all = all_fixtures();
  if (list) {
    for (const Fixture& f : all) {
      std::cout << f.name;
      if (!f.expectations.empty()) {
        std::cout << "  [";
        bool first = true;
        for (const auto& [k, v] : f.expectations) {
          if (!first) std::cout << ", ";
          std::cout << k << "=" << v;
          first = false;
        }
        std::cout << "]";
      }
      std::cout << "\n";
    }
    return 0;
  }
  if (export_dir.empty()) {
    std::cerr << "fixtures: use --list or --export DIR\n";
    return 2;
  }
  std::filesystem::create_directories(export_dir);
  bool matched = false;
  for (const Fixture& f : all) {
    if (!only_name.empty() && f.name != only_name) continue;
    matched = true;
    std::string path = export_dir + "/" + f.name + ".json";
    save_scene(f.scene, path);
    std::cout << "wrote " << path << "\n";
  }
  if (!matched) {
    std::cerr << "fixtures: no fixture named '" << only_name << "'\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projective boundary-structure analyzer"};
  app.require_subcommand(1);

  CommonOpts o;
  int scan_points = 32;
  std::string map_name, connection_name, point, velocity;
  double step = 1e-3;
  int steps = 100;
  bool list_fixtures = false;
  std::string export_dir, fixture_name;

  CLI::App* rigidity = app.add_subcommand("rigidity", "boundary rigidity scan");
  add_common(rigidity, o);
  rigidity->add_option("--points", scan_points, "boundary sample points");

  CLI::App* verify = app.add_subcommand("verify-map", "projective-transformation test for a map");
  add_common(verify, o);
  verify->add_option("--map", map_name, "map name")->required();
  verify->add_option("--connection", connection_name, "restrict to one connection");

  CLI::App* geod = app.add_subcommand("geodesic", "integrate a geodesic");
  add_common(geod, o);
  geod->add_option("--connection", connection_name, "connection name");
  geod->add_option("--point", point, "initial point v0,...,v_{n-1}")->required();
  geod->add_option("--velocity", velocity, "initial velocity")->required();
  geod->add_option("--step", step, "step size");
  geod->add_option("--steps", steps, "step count");

  CLI::App* cartan = app.add_subcommand("cartan", "gauge, curvature and boundary reduction");
  add_common(cartan, o);
  cartan->add_option("--connection", connection_name, "restrict to one connection");

  CLI::App* jets = app.add_subcommand("jets", "boundary 2-jet solution space");
  add_common(jets, o);
  jets->add_option("--connection", connection_name, "restrict to one connection");
  jets->add_option("--point", point, "boundary point");

  CLI::App* fixtures = app.add_subcommand("fixtures", "built-in scenes");
  fixtures->add_flag("--list", list_fixtures, "list fixture names");
  fixtures->add_option("--export", export_dir, "write fixture scenes into a directory");
  fixtures->add_option("--name", fixture_name, "restrict to one fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rigidity->parsed()) return cmd_rigidity(o, scan_points);
    if (verify->parsed()) return cmd_verify_map(o, map_name, connection_name);
    if (geod->parsed()) return cmd_geodesic(o, connection_name, point, velocity, step, steps);
    if (cartan->parsed()) return cmd_cartan(o, connection_name);
    if (jets->parsed()) return cmd_jets(o, connection_name, point);
    if (fixtures->parsed()) return cmd_fixtures(list_fixtures, export_dir, fixture_name);
  } catch (const SceneError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const GeomError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ExprError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
