#include "projrigid/fixtures.hpp"

#include "projrigid/exprmat.hpp"

namespace projrigid {

namespace {

Expr P(const std::string& s) { return parse_expr(s); }

std::vector<std::string> halfspace_coords(int n) {
  std::vector<std::string> c{"r"};
  if (n == 2) {
    c.push_back("y");
  } else {
    for (int i = 1; i < n; ++i) c.push_back("y" + std::to_string(i));
  }
  return c;
}

}  // namespace

Fixture flat_half_space(int n) {
  if (n < 2) throw GeomError("half-space fixture needs dimension >= 2");
  Fixture f;
  f.name = "flat_half_space_" + std::to_string(n);

  Chart main;
  main.name = "halfspace";
  main.dim = n;
  main.coords = halfspace_coords(n);
  main.boundary = true;
  main.box.push_back({0.0, 1.0});
  for (int i = 1; i < n; ++i) main.box.push_back({-1.0, 1.0});

  Chart alt = main;
  alt.name = "halfspace_exp";
  // r_bar = r * exp(y^1): boundary-compatible (maps {r=0} to {r_bar=0},
  // with positive normal derivative)
  const std::string y1 = main.coords[1];
  {
    Transition t;
    t.target = "halfspace_exp";
    t.forward.push_back(P("r*exp(" + y1 + ")"));
    t.inverse.push_back(P("r*exp(-" + y1 + ")"));
    for (int i = 1; i < n; ++i) {
      t.forward.push_back(Expr::var(main.coords[static_cast<std::size_t>(i)]));
      t.inverse.push_back(Expr::var(main.coords[static_cast<std::size_t>(i)]));
    }
    main.transitions.push_back(t);
    alt.transitions.push_back(t.reversed("halfspace"));
  }
  alt.box[0] = {0.0, 2.72};

  f.scene.dim = n;
  f.scene.charts = {main, alt};
  f.scene.connections.push_back({"flat", ConnectionField::zero(main)});
  f.scene.params["beta"] = 1.2;
  f.scene.params["gamma"] = 0.3;
  if (n == 2) {
    Scene& sc = f.scene;
    sc.maps.push_back({"mobius", mobius_map(sc)});
    std::vector<Expr> shear{Expr::var("r"), P("y + r^2")};
    sc.maps.push_back({"shear", make_map(main, main, shear)});
  }
  f.expectations["rigidity"] = "NONRIGID_CANDIDATE";
  f.expectations["jet_dimension_at_origin"] = std::to_string(n);
  return f;
}

MapField mobius_map(const Scene& flat2) {
  const Chart* c = flat2.find_chart("halfspace");
  if (!c || c->dim != 2) throw GeomError("mobius map needs the 2d half-space scene");
  std::vector<Expr> comp{P("r/(gamma*r+1)"), P("(beta*r+y)/(gamma*r+1)")};
  return make_map(*c, *c, std::move(comp));
}

Fixture projective_disk() {
  Fixture f;
  f.name = "projective_disk";

  Chart disk;
  disk.name = "disk";
  disk.dim = 2;
  disk.coords = {"r", "t"};
  disk.boundary = true;
  disk.box = {{0.0, 0.5}, {-1.2, 1.2}};

  Chart plane;
  plane.name = "plane";
  plane.dim = 2;
  plane.coords = {"x", "y"};
  plane.boundary = false;
  plane.box = {{0.25, 1.0}, {-0.7, 0.7}};

  {
    Transition t;
    t.target = "plane";
    t.forward = {P("(1-r)*cos(t)"), P("(1-r)*sin(t)")};
    t.inverse = {P("1 - sqrt(x^2 + y^2)"), P("atan(y/x)")};
    disk.transitions.push_back(t);
    plane.transitions.push_back(t.reversed("disk"));
  }

  Chart alt = disk;
  alt.name = "disk_exp";
  alt.transitions.clear();
  {
    Transition t;
    t.target = "disk_exp";
    t.forward = {P("r*exp(t)"), Expr::var("t")};
    t.inverse = {P("r*exp(-t)"), Expr::var("t")};
    disk.transitions.push_back(t);
    alt.transitions.push_back(t.reversed("disk"));
  }
  alt.box[0] = {0.0, 1.7};

  ConnectionField gamma(disk);
  gamma.set(0, 1, 1, P("1-r"));
  gamma.set(1, 0, 1, P("-1/(1-r)"));

  f.scene.dim = 2;
  f.scene.charts = {disk, plane, alt};
  f.scene.connections.push_back({"disk", gamma});
  f.scene.connections.push_back({"flat_plane", ConnectionField::zero(plane)});
  f.scene.params["theta"] = 0.0;
  f.scene.params["psi"] = 0.0;
  f.scene.params["phi"] = 0.0;
  f.scene.maps.push_back({"o21", o21_map(f.scene)});
  f.expectations["rigidity"] = "RIGID";
  f.expectations["obstruction_entry"] = "1";
  f.expectations["jet_dimension"] = "0";
  return f;
}

MapField o21_map(const Scene& disk_scene) {
  const Chart* disk = disk_scene.find_chart("disk");
  if (!disk) throw GeomError("o21 map needs the disk scene");

  auto rot = [](const std::string& a) {
    ExprMat m(3, 3);
    m.at(0, 0) = P("cos(" + a + ")");
    m.at(0, 1) = P("-sin(" + a + ")");
    m.at(0, 2) = Expr::number(0);
    m.at(1, 0) = P("sin(" + a + ")");
    m.at(1, 1) = P("cos(" + a + ")");
    m.at(1, 2) = Expr::number(0);
    m.at(2, 0) = Expr::number(0);
    m.at(2, 1) = Expr::number(0);
    m.at(2, 2) = Expr::number(1);
    return m;
  };
  ExprMat boost(3, 3);
  boost.at(0, 0) = P("cosh(psi)");
  boost.at(0, 1) = Expr::number(0);
  boost.at(0, 2) = P("sinh(psi)");
  boost.at(1, 0) = Expr::number(0);
  boost.at(1, 1) = Expr::number(1);
  boost.at(1, 2) = Expr::number(0);
  boost.at(2, 0) = P("sinh(psi)");
  boost.at(2, 1) = Expr::number(0);
  boost.at(2, 2) = P("cosh(psi)");

  ExprMat g = mat_mul(rot("theta"), mat_mul(boost, rot("phi")));

  // affine-chart action on (x, y) = ((1-r)cos t, (1-r)sin t), then back to (r, t)
  Expr x = P("(1-r)*cos(t)");
  Expr y = P("(1-r)*sin(t)");
  auto row = [&](int i) {
    return simplify(g.at(i, 0) * x + g.at(i, 1) * y + g.at(i, 2));
  };
  Expr X = row(0), Y = row(1), W = row(2);
  Expr xp = simplify(X / W);
  Expr yp = simplify(Y / W);
  Expr rp = simplify(Expr::number(1) - Expr::call(Func::Sqrt, simplify(xp * xp + yp * yp)));
  Expr tp = Expr::call(Func::Atan, simplify(yp / xp));
  return make_map(*disk, *disk, {rp, tp});
}

Fixture degenerate_conic_halfspace(int n) {
  Fixture f = flat_half_space(n);
  f.name = "degenerate_conic_halfspace_" + std::to_string(n);
  for (Chart& c : f.scene.charts) {
    if (c.name == "halfspace") c.name = "conic_halfspace";
    if (c.name == "halfspace_exp") c.name = "conic_halfspace_exp";
    for (Transition& t : c.transitions) {
      if (t.target == "halfspace") t.target = "conic_halfspace";
      if (t.target == "halfspace_exp") t.target = "conic_halfspace_exp";
    }
  }
  for (auto& [name, conn] : f.scene.connections) conn.chart = f.scene.charts[0];
  for (auto& [name, m] : f.scene.maps) {
    m.source = f.scene.charts[0];
    m.target = f.scene.charts[0];
  }
  return f;
}

std::vector<Fixture> all_fixtures() {
  return {flat_half_space(2), flat_half_space(3), projective_disk(),
          degenerate_conic_halfspace(2), degenerate_conic_halfspace(3)};
}

}  // namespace projrigid
