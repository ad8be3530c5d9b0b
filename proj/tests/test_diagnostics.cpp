#include "doctest.h"

#include "relaxfv/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace relaxfv;

namespace {

const ModelParams kP21{2.0, 1.0};

Field rest_field(const Grid &g) { return Field{g, std::vector<ConsTriple>(g.size(), equilibrium(kP21)), 0.0}; }

TheoremPlan smoke_plan() { return evaluate_plan(kP21, uniform_density(1.0), 2.0, 8); }

// Records of the short smooth run used throughout: L = 2, M = 8, dx = 1/32.
const std::vector<DiagRecord> &smoke_records() {
    static const std::vector<DiagRecord> records = [] {
        const TheoremPlan plan = smoke_plan();
        SimConfig cfg;
        cfg.dx = 1.0 / 32.0;
        cfg.t_end = 0.2;
        cfg.output_dt = 0.005;
        const InitialData data{ProfileSpec(2.0, 8), uniform_density(1.0)};
        const RecordContext ctx{kP21, 1e-6, 8.0, plan.sigma_tilde};
        DiagSeries s;
        const RunResult r = run(cfg, data, plan.sigma_tilde, [&](const Field &f) { s.push(record(f, ctx)); });
        REQUIRE(r.outcome == Outcome::Completed);
        return s.records();
    }();
    return records;
}

DiagRecord at(double t) {
    DiagRecord r;
    r.t = t;
    return r;
}

} // namespace

TEST_CASE("records of the rest state vanish") {
    const Grid g = Grid::symmetric(4.0, 0.125);
    const DiagRecord r = record(rest_field(g), RecordContext{kP21, 1e-6, 2.0, 1.0});
    CHECK(r.mass_dev == 0.0);
    CHECK(r.total_mom == 0.0);
    CHECK(r.F == 0.0);
    CHECK(r.E == 0.0);
    CHECK(r.D == 0.0);
    CHECK(r.support_radius == 0.0);
    CHECK(r.max_grad == 0.0);
    CHECK(r.min_rho == 1.0);
    CHECK(r.ball_x2rho == doctest::Approx(2.0 * 8.0 / 3.0).epsilon(1e-2));
}

TEST_CASE("record of a single perturbed cell") {
    const Grid g(-5.5, 5.5, 11); // centres at the integers
    Field f = rest_field(g);
    f.cells[8] = to_conservative({1.5, 2.0, 0.5}); // x = 3
    f.time = 0.25;
    const DiagRecord r = record(f, RecordContext{kP21, 1e-6, 2.0, 4.0});
    CHECK(r.t == 0.25);
    CHECK(r.support_radius == 3.0);
    CHECK(r.mass_dev == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.total_mom == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(r.F == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(r.D == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.kinetic == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(r.pressure_excess == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(r.stress == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.E == doctest::Approx(entropy_density({1.5, 2.0, 0.5}, kP21)).epsilon(1e-15));
    CHECK(r.min_rho == 1.0);
    // B_t has radius 2 + 4 * 0.25 = 3, so the cell at x = 3 lies outside
    CHECK(r.ball_radius == 3.0);
    CHECK(r.ball_pressure_excess == 0.0);

    f.cells[8].rw = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(record(f, RecordContext{}), DiagnosticError);
    f.cells[8] = {-1.0, 0.0, 0.0};
    CHECK_THROWS_AS(record(f, RecordContext{}), DiagnosticError);
}

TEST_CASE("support tolerance") {
    const Grid g(-5.5, 5.5, 11);
    Field f = rest_field(g);
    f.cells[1].rho = 1.0 + 5e-7; // x = -4, below the tolerance
    f.cells[9].rho = 1.0 + 2e-6; // x = 4
    CHECK(record(f, RecordContext{kP21, 1e-6}).support_radius == 4.0);
    f.cells[9].rho = 1.0;
    CHECK(record(f, RecordContext{kP21, 1e-6}).support_radius == 0.0);
    CHECK(record(f, RecordContext{kP21, 1e-7}).support_radius == 4.0);
}

TEST_CASE("the initial profile's weighted momentum") {
    const DiagRecord &r0 = smoke_records().front();
    CHECK(r0.t == 0.0);
    CHECK(r0.F == doctest::Approx(112.2159).epsilon(0.01));
    CHECK(r0.kinetic == doctest::Approx(55.0).epsilon(0.01));
    CHECK(r0.support_radius <= 8.0);
    CHECK(r0.support_radius >= 8.0 - 2.0 / 32.0);
    CHECK(std::abs(r0.mass_dev) < 1e-12);
}

TEST_CASE("trapezoid accumulation of D") {
    DiagSeries s;
    for (int k = 0; k <= 4; ++k) {
        DiagRecord r = at(0.5 * k);
        r.D = 2.0 * r.t; // D = 2t integrates exactly
        s.push(r);
    }
    CHECK(s.size() == 5);
    CHECK(s.records()[0].D_cum == 0.0);
    CHECK(s.records()[4].D_cum == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS(s.push(at(1.0)), DiagnosticError);
}

TEST_CASE("checks on the smooth run") {
    const auto &recs = smoke_records();
    const TheoremPlan plan = smoke_plan();
    const double grad_limit = 32.0;
    CHECK(conservation_check(recs).pass);
    CHECK(record_sanity_check(recs).pass);
    CHECK(entropy_inequality_check(recs).pass);
    CHECK(s2_bound_check(recs, plan).pass);
    CHECK(cone_check(recs, plan, 1.0 / 32.0).pass);
    CHECK(jensen_check(recs).pass);
    CHECK(holder_check(recs).pass);
    const CheckResult fd = f_derivative_check(recs, grad_limit);
    CHECK(fd.applicable);
    CHECK(fd.pass);
    for (const auto &s : f_derivative_samples(recs, grad_limit)) CHECK(s.rel_error < 0.01);
    // small plans are not theorem runs
    CHECK_FALSE(plan.admissible);
    CHECK_FALSE(apriori_check(recs, EnvelopeParams::from_plan(plan), grad_limit).applicable);
}

TEST_CASE("entropy inequality and residual detect created entropy") {
    std::vector<DiagRecord> recs;
    DiagSeries s;
    for (int k = 0; k < 4; ++k) {
        DiagRecord r = at(0.1 * k);
        r.E = 10.0 - 0.5 * k;
        r.D = 1.0;
        s.push(r);
    }
    recs = s.records();
    CHECK(entropy_inequality_check(recs).pass);
    const auto res = entropy_balance_residual(recs);
    REQUIRE(res.size() == 3);
    for (double v : res) CHECK(v == doctest::Approx(-4.0));
    CHECK(entropy_residual_check(recs).pass);

    recs[3].E = 9.8; // E + D_cum = 10.1 > E(0)
    const CheckResult c = entropy_inequality_check(recs);
    CHECK_FALSE(c.pass);
    CHECK(c.worst_margin == doctest::Approx(-0.1));
    CHECK(c.detail.find("t = 0.3") != std::string::npos);
    CHECK_FALSE(entropy_residual_check(recs).pass);
}

TEST_CASE("conservation detects drift") {
    std::vector<DiagRecord> recs{at(0.0), at(0.1)};
    recs[0].mass_dev = 2.0;
    recs[1].mass_dev = 2.0 + 1e-11;
    CHECK(conservation_check(recs).pass);
    recs[1].mass_dev = 2.0 + 1e-9;
    CHECK_FALSE(conservation_check(recs).pass);
    recs[1].mass_dev = 2.0;
    recs[1].total_mom = 1e-9;
    CHECK_FALSE(conservation_check(recs).pass);
}

TEST_CASE("S^2 bound and cone checks fail where expected") {
    const TheoremPlan plan = smoke_plan();
    const double bound = plan.H0 + 0.5 * plan.rho_max * plan.norm_sq;
    CHECK(bound == doctest::Approx(27.5).epsilon(1e-12));
    std::vector<DiagRecord> recs{at(0.0), at(0.5)};
    recs[1].D = bound * (1.0 + 1e-12);
    CheckResult c = s2_bound_check(recs, plan);
    CHECK_FALSE(c.pass);
    CHECK(c.detail.find("t = 0.5") != std::string::npos);

    const double dx = 0.01;
    recs[1].support_radius = 8.0 + plan.sigma_tilde * 0.5 + 1.0;
    c = cone_check(recs, plan, dx);
    CHECK_FALSE(c.pass);
    CHECK(c.worst_margin == doctest::Approx(10 * dx - 1.0));
    recs[1].support_radius = 8.0 + plan.sigma_tilde * 0.5 + 5 * dx;
    CHECK(cone_check(recs, plan, dx).pass);
    CHECK(cone_overshoot(recs, plan) == doctest::Approx(5 * dx));
}

TEST_CASE("Jensen and Hoelder checks") {
    std::vector<DiagRecord> recs{at(0.0)};
    recs[0].mass_dev = 0.1;
    recs[0].ball_pressure_excess = -1e-3;
    CHECK_FALSE(jensen_check(recs).pass);
    recs[0].mass_dev = -0.1;
    CHECK_FALSE(jensen_check(recs).applicable);

    recs[0].F = 3.0;
    recs[0].ball_x2rho = 2.0;
    recs[0].kinetic = 4.5;
    CHECK(holder_check(recs).pass); // equality
    recs[0].kinetic = 4.4;
    CHECK_FALSE(holder_check(recs).pass);
}

TEST_CASE("F derivative samples use a central difference") {
    // F = t^2 on uneven times: the three-point formula is exact for quadratics
    std::vector<DiagRecord> recs;
    for (double t : {0.0, 0.1, 0.3, 0.35}) {
        DiagRecord r = at(t);
        r.F = t * t;
        r.kinetic = 2.0 * t;
        recs.push_back(r);
    }
    const auto samples = f_derivative_samples(recs, 1.0);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].fd == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(samples[1].fd == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(samples[0].rel_error < 1e-12);
    // a rough neighbour removes the sample
    recs[2].max_grad = 0.6;
    CHECK(f_derivative_samples(recs, 1.0).empty());
}

TEST_CASE("Riccati envelope") {
    EnvelopeParams env{1.0, 0.5, 0.02, 0.0, 0.0, 100.0, 0.0, 10.0};
    CHECK(*riccati_envelope(0.0, env) == doctest::Approx(100.0).epsilon(1e-14));
    // with c4 = c5 = 0 the escape time solves (1 + c2 t)^2 = 1 / (1 - 4 c2 / (c3 F0))
    env.c3 = 0.04;
    const double t_escape = (1.0 / std::sqrt(1.0 - 4.0 * 0.5 / (0.04 * 100.0)) - 1.0) / 0.5;
    CHECK(riccati_envelope(t_escape * 0.999, env).has_value());
    CHECK_FALSE(riccati_envelope(t_escape * 1.001, env).has_value());
    double prev = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto v = riccati_envelope(t_escape * k / 100.0, env);
        REQUIRE(v.has_value());
        CHECK(*v >= prev);
        prev = *v;
    }

    // the admissible gamma = 2 plan escapes before its deadline
    const TheoremPlan plan = evaluate_plan(kP21, uniform_density(1.0), 56.0, 906);
    REQUIRE(plan.admissible);
    const EnvelopeParams p = EnvelopeParams::from_plan(plan);
    CHECK(p.valid());
    const double start = 1.0 / (1.0 / plan.F0 + p.c4 + p.c5 * p.norm_sq);
    CHECK(*riccati_envelope(0.0, p) == doctest::Approx(start).epsilon(1e-12));
    CHECK(start < plan.F0);
    CHECK(riccati_envelope(1e9, p) == std::nullopt);
    CHECK(riccati_envelope(*plan.t_star, p) == std::nullopt);
}

TEST_CASE("a priori bounds at the initial record of an admissible plan") {
    const TheoremPlan plan = evaluate_plan(kP21, uniform_density(1.0), 56.0, 906);
    const EnvelopeParams env = EnvelopeParams::from_plan(plan);
    DiagRecord r0 = at(0.0);
    r0.F = plan.F0;
    CheckResult c = apriori_check({r0}, env, 1.0);
    CHECK(c.applicable);
    CHECK(c.pass);
    CHECK(envelope_check({r0}, env, 1.0).pass);
    r0.F = 0.3 * plan.F0;
    CHECK_FALSE(envelope_check({r0}, env, 1.0).pass);
    // a smooth record after the escape time contradicts the envelope
    DiagRecord late = at(*plan.t_star);
    late.F = plan.F0;
    CHECK_FALSE(envelope_check({late}, env, 1.0).pass);
    late.max_grad = 0.6;
    CHECK(envelope_check({late}, env, 1.0).pass);
}

TEST_CASE("deadline check") {
    const TheoremPlan plan = evaluate_plan(kP21, uniform_density(1.0), 56.0, 906);
    CHECK(deadline_check(0.01, plan).pass);
    CHECK(deadline_check(0.01, plan).worst_margin == doctest::Approx(*plan.t_star - 0.01));
    CHECK_FALSE(deadline_check(*plan.t_star + 1.0, plan).pass);
    TheoremPlan none = plan;
    none.t_star.reset();
    CHECK_FALSE(deadline_check(0.01, none).applicable);
}
