#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "projrigid/cartan.hpp"
#include "projrigid/geometry.hpp"
#include "projrigid/rigidity.hpp"

using namespace projrigid;
using projrigid::testing::PolyGen;

TEST_CASE("boundary obstruction verdicts") {
  Fixture fd = projective_disk();
  const ConnectionField& disk = *fd.scene.find_connection("disk");

  SUBCASE("disk is rigid with unit obstruction") {
    for (double t : {-1.0, -0.3, 0.0, 0.8}) {
      ObstructionResult ob = boundary_obstruction(disk, {0.0, t}, fd.scene.params);
      CHECK(ob.verdict == Verdict::Rigid);
      CHECK(ob.values(0, 0) == doctest::Approx(1.0));
      // the restricted entry is the exact constant 1
      CHECK(simplify(ob.symbolic[0]).is_one_literal());
    }
  }

  SUBCASE("flat half-plane stays a candidate") {
    Fixture ff = flat_half_space(2);
    ObstructionResult ob = boundary_obstruction(*ff.scene.find_connection("flat"), {0.0, 0.4},
                                                ff.scene.params);
    CHECK(ob.verdict == Verdict::NonrigidCandidate);
    CHECK(ob.max_abs == 0.0);
  }

  SUBCASE("projective shifts do not move the obstruction") {
    PolyGen gen(5);
    OneFormField u = gen.one_form(disk.chart, 1);
    ConnectionField shifted = projective_shift(disk, u);
    for (double t : {-0.9, 0.2}) {
      ObstructionResult a = boundary_obstruction(disk, {0.0, t}, fd.scene.params);
      ObstructionResult b = boundary_obstruction(shifted, {0.0, t}, fd.scene.params);
      CHECK(b.verdict == Verdict::Rigid);
      CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  SUBCASE("interior points are rejected") {
    CHECK_THROWS_AS(boundary_obstruction(disk, {0.2, 0.0}, fd.scene.params), GeomError);
  }
}

TEST_CASE("rigidity scan over the fixtures") {
  SUBCASE("disk scene is rigid everywhere with agreeing cross-checks") {
    Fixture f = projective_disk();
    RigidityReport rep = rigidity_scan(f.scene);
    CHECK(rep.global == Verdict::Rigid);
    CHECK(rep.cross_checks_consistent);
    for (const ConnectionScan& scan : rep.scans)
      for (const ScanPoint& p : scan.points) {
        CHECK(p.verdict == Verdict::Rigid);
        CHECK(p.shift_agrees);
        CHECK(p.chart_agrees);
      }
  }

  SUBCASE("flat half-plane is a candidate everywhere, also in the exponential chart") {
    Fixture f = flat_half_space(2);
    RigidityReport rep = rigidity_scan(f.scene);
    CHECK(rep.global == Verdict::NonrigidCandidate);
    CHECK(rep.cross_checks_consistent);
    for (const ConnectionScan& scan : rep.scans)
      for (const ScanPoint& p : scan.points) CHECK(p.chart_agrees);
  }

  SUBCASE("an obstruction vanishing on part of the boundary reports MIXED") {
    Fixture f = flat_half_space(2);
    Chart hs = f.scene.charts[0];
    hs.box[1] = {0.0, 1.0};  // grid includes y = 0 where the obstruction vanishes
    hs.transitions.clear();
    Scene scene;
    scene.dim = 2;
    scene.charts = {hs};
    ConnectionField g(hs);
    g.set(0, 1, 1, Expr::var("y"));
    scene.connections.push_back({"partial", g});
    RigidityReport rep = rigidity_scan(scene);
    CHECK(rep.global == Verdict::Mixed);
    bool saw_candidate = false, saw_rigid = false;
    for (const ScanPoint& p : rep.scans[0].points) {
      saw_candidate |= p.verdict == Verdict::NonrigidCandidate;
      saw_rigid |= p.verdict == Verdict::Rigid;
    }
    CHECK(saw_candidate);
    CHECK(saw_rigid);
  }

  SUBCASE("a scene without boundary connections is refused") {
    Fixture f = projective_disk();
    Scene scene;
    scene.dim = 2;
    scene.charts = {*f.scene.find_chart("plane")};
    scene.connections.push_back({"flat_plane", *f.scene.find_connection("flat_plane")});
    CHECK_THROWS_AS(rigidity_scan(scene), GeomError);
  }
}

TEST_CASE("jet system at boundary points") {
  SUBCASE("flat: the coupling row ties db to a, dimension n") {
    for (int n : {2, 3}) {
      Fixture f = flat_half_space(n);
      const ConnectionField& flat = *f.scene.find_connection("flat");
      std::vector<double> p(static_cast<std::size_t>(n), 0.0);
      JetSolution sol = solve_boundary_jets(flat, p, f.scene.params);
      CHECK(sol.dimension == n);
      CHECK(sol.max_residual < 1e-10);
      CHECK(sol.dimension <= n * (n + 2));
      for (const JetElement& el : sol.basis) {
        // db = a * I on the solution family
        for (int mu = 0; mu < n - 1; ++mu)
          for (int nu = 0; nu < n - 1; ++nu)
            CHECK(el.db(mu, nu) == doctest::Approx(mu == nu ? el.a : 0.0).epsilon(1e-12));
        // c = a b and the normal 1-form value equals a
        for (int mu = 0; mu < n - 1; ++mu)
          CHECK(el.c(mu) == doctest::Approx(el.a * el.b(mu)).epsilon(1e-12));
        CHECK(el.upsilon0 == doctest::Approx(el.a));
      }
    }
  }

  SUBCASE("disk: only the zero jet") {
    Fixture f = projective_disk();
    JetSolution sol =
        solve_boundary_jets(*f.scene.find_connection("disk"), {0.0, 0.3}, f.scene.params);
    CHECK(sol.dimension == 0);
  }

  SUBCASE("normal-normal coupling without tangential obstruction") {
    // Gamma^0_{nu 0} nonzero, Gamma^0_{nu tau} zero: b stays unconstrained by
    // the obstruction row, the coupling row ties db to a and b
    Fixture f = flat_half_space(2);
    const Chart& hs = f.scene.charts[0];
    ConnectionField g(hs);
    g.set(0, 0, 1, Expr::number(1, 2));
    JetSolution sol = solve_boundary_jets(g, {0.0, 0.2}, f.scene.params);
    CHECK(sol.dimension == 2);
    CHECK(sol.max_residual < 1e-10);
    for (const JetElement& el : sol.basis)
      CHECK(el.db(0, 0) == doctest::Approx(el.a + el.b(0)).epsilon(1e-12));
  }

  SUBCASE("solution-space dimension bound on all fixtures") {
    for (const Fixture& f : all_fixtures()) {
      for (const auto& [name, gamma] : f.scene.connections) {
        if (!gamma.chart.boundary) continue;
        std::vector<double> p(static_cast<std::size_t>(gamma.chart.dim), 0.0);
        JetSolution sol = solve_boundary_jets(gamma, p, f.scene.params);
        int n = gamma.chart.dim;
        CHECK(sol.dimension <= n * (n + 2));
        CHECK(sol.max_residual < 1e-10);
      }
    }
  }
}

TEST_CASE("the fractional-linear family solves the jet system along the boundary") {
  Fixture f = flat_half_space(2);
  const ConnectionField& flat = *f.scene.find_connection("flat");
  double beta = f.scene.params.at("beta"), gamma = f.scene.params.at("gamma");
  for (double y : {-0.8, 0.0, 0.5}) {
    JetSystem sys = jet_system_assemble(flat, {0.0, y}, f.scene.params);
    Eigen::VectorXd w(sys.unknowns());
    w(sys.idx_a()) = -gamma;
    w(sys.idx_b(0)) = beta - gamma * y;
    w(sys.idx_db(0, 0)) = -gamma;
    CHECK((sys.A * w).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("boundary taylor data") {
  Fixture f = flat_half_space(2);
  const MapField& mob = *f.scene.find_map("mobius");
  double beta = f.scene.params.at("beta"), gamma = f.scene.params.at("gamma");

  SUBCASE("fractional-linear map matches the closed form") {
    for (double y : {-0.7, 0.0, 0.4}) {
      TaylorData td = boundary_taylor(mob, {0.0, y}, f.scene.params);
      CHECK(td.a == doctest::Approx(-gamma).epsilon(1e-12));
      CHECK(td.b(0) == doctest::Approx(beta - gamma * y).epsilon(1e-12));
      CHECK(td.c(0) == doctest::Approx(td.a * td.b(0)).epsilon(1e-10));
      CHECK(td.db(0, 0) == doctest::Approx(-gamma).epsilon(1e-10));
    }
  }

  SUBCASE("identity map gives the zero jet") {
    TaylorData td = boundary_taylor(identity_map(f.scene.charts[0]), {0.0, 0.1}, f.scene.params);
    CHECK(td.a == doctest::Approx(0.0));
    CHECK(td.b(0) == doctest::Approx(0.0));
    CHECK(td.c(0) == doctest::Approx(0.0));
  }

  SUBCASE("a rescaled normal derivative names the required factor") {
    const Chart& hs = f.scene.charts[0];
    MapField stretched = make_map(hs, hs, {parse_expr("2*r"), parse_expr("y")});
    try {
      boundary_taylor(stretched, {0.0, 0.1}, f.scene.params);
      FAIL("expected a normalization error");
    } catch (const TaylorPreconditionError& e) {
      CHECK(std::string(e.what()).find("rescale") != std::string::npos);
      CHECK(std::string(e.what()).find("2.0") != std::string::npos);
    }
  }

  SUBCASE("a boosted conic map fails the boundary-identity precondition") {
    Fixture fd = projective_disk();
    auto params = fd.scene.params;
    params["psi"] = 0.3;
    const MapField& o21 = *fd.scene.find_map("o21");
    CHECK_THROWS_AS(boundary_taylor(o21, {0.0, 0.2}, params), TaylorPreconditionError);
  }

  SUBCASE("taylor data lies in the jet solution span") {
    const ConnectionField& flat = *f.scene.find_connection("flat");
    for (double y : {-0.5, 0.3}) {
      TaylorData td = boundary_taylor(mob, {0.0, y}, f.scene.params);
      JetSolution sol = solve_boundary_jets(flat, {0.0, y}, f.scene.params);
      JetSystem sys = jet_system_assemble(flat, {0.0, y}, f.scene.params);
      Eigen::VectorXd target(sys.unknowns());
      target(sys.idx_a()) = td.a;
      target(sys.idx_b(0)) = td.b(0);
      target(sys.idx_db(0, 0)) = td.db(0, 0);
      Eigen::MatrixXd basis(sys.unknowns(), sol.dimension);
      for (int i = 0; i < sol.dimension; ++i) {
        const JetElement& el = sol.basis[static_cast<std::size_t>(i)];
        basis(sys.idx_a(), i) = el.a;
        basis(sys.idx_b(0), i) = el.b(0);
        basis(sys.idx_db(0, 0), i) = el.db(0, 0);
      }
      Eigen::VectorXd coeffs = basis.colPivHouseholderQr().solve(target);
      CHECK((basis * coeffs - target).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("obstruction and gauge-pullback membership agree") {
  SamplerOptions so;
  for (const Fixture& f : {projective_disk(), flat_half_space(2)}) {
    for (const auto& [name, gamma] : f.scene.connections) {
      if (!gamma.chart.boundary) continue;
      Sampler bs = boundary_sampler(gamma.chart, f.scene.params, so);
      BoundaryPullback bp = boundary_pullback(normal_gauge(gamma), bs);
      bool member = bp.membership.status != ZeroStatus::NonzeroWitness;
      ObstructionResult ob =
          boundary_obstruction(gamma, std::vector<double>(static_cast<std::size_t>(gamma.chart.dim), 0.0),
                               f.scene.params);
      bool candidate = ob.verdict == Verdict::NonrigidCandidate;
      CHECK(member == candidate);
    }
  }
}

TEST_CASE("fixture expectations reproduce under the full pipeline") {
  for (const Fixture& f : all_fixtures()) {
    CAPTURE(f.name);
    auto exp = f.expectations.find("rigidity");
    REQUIRE(exp != f.expectations.end());
    RigidityReport rep = rigidity_scan(f.scene);
    CHECK(std::string(verdict_name(rep.global)) == exp->second);
    CHECK(rep.cross_checks_consistent);

    auto jd = f.expectations.find("jet_dimension_at_origin");
    if (jd == f.expectations.end()) jd = f.expectations.find("jet_dimension");
    if (jd != f.expectations.end()) {
      for (const auto& [name, gamma] : f.scene.connections) {
        if (!gamma.chart.boundary) continue;
        std::vector<double> p(static_cast<std::size_t>(gamma.chart.dim), 0.0);
        JetSolution sol = solve_boundary_jets(gamma, p, f.scene.params);
        CHECK(std::to_string(sol.dimension) == jd->second);
      }
    }
  }
}
