#include "doctest.h"

#include "relaxfv/planner.hpp"

#include <cmath>
#include <random>
#include <string>

using namespace relaxfv;

namespace {

const ModelParams kP21{2.0, 1.0};
const double kPi = 3.14159265358979323846;
const double kSqrt3 = 1.7320508075688772;

// L (M^2 - 2M) + L (2M - 1) / 2 + 6 L / pi^2: the integral of x u_{L,M}(x).
double moment_closed_form(double L, double M) {
    return L * (M * M - 2.0 * M) + L * (2.0 * M - 1.0) / 2.0 + 6.0 * L / (kPi * kPi);
}

// Composite Simpson over unit subintervals split at every integer, so each
// smooth piece is integrated separately.
double simpson_norm_sq(const ProfileSpec &s, int per_unit) {
    double total = 0.0;
    const int n = 2 * per_unit;
    for (int k = -s.M(); k < s.M(); ++k) {
        const double a = k, h = 1.0 / n;
        // sample strictly inside the piece at the ends to avoid jump ambiguity
        auto f = [&](double x) {
            const double e = 1e-13;
            const double xx = std::min(std::max(x, a + e), a + 1.0 - e);
            const double u = velocity_profile(s, xx);
            return u * u;
        };
        double acc = f(a) + f(a + 1.0);
        for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
        total += acc * h / 3.0;
    }
    return total;
}

} // namespace

TEST_CASE("profile spec validation") {
    CHECK_THROWS_WITH_AS(ProfileSpec(0.0, 8), "L must be positive", PlanningError);
    CHECK_THROWS_WITH_AS(ProfileSpec(2.0, 2), "M must exceed 2", PlanningError);
    CHECK_THROWS_WITH_AS(ProfileSpec(2.0, 9), "M must be even", PlanningError);
    CHECK_THROWS_WITH_AS(ProfileSpec(2.0, 6, 7.0), "M must be at least max(4, R)", PlanningError);
    CHECK_THROWS_WITH_AS(ProfileSpec(2.0, 8, 0.0), "R must be positive", PlanningError);
    CHECK_NOTHROW(ProfileSpec(2.0, 4));
    CHECK(parse_profile_variant("printed") == ProfileVariant::Printed);
    CHECK_THROWS_AS(parse_profile_variant("other"), PlanningError);
}

TEST_CASE("velocity profile examples") {
    const ProfileSpec s(2.0, 8);
    CHECK(velocity_profile(s, 8.0) == 0.0);
    CHECK(velocity_profile(s, -8.0) == 0.0);
    CHECK(velocity_profile(s, 20.0) == 0.0);
    CHECK(velocity_profile(s, 0.0) == 0.0);
    CHECK(velocity_profile(s, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(velocity_profile(s, -8.0 + 0.5) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(velocity_profile(s, 4.0) == 2.0);
    CHECK(velocity_profile(s, -4.0) == -2.0);
}

TEST_CASE("velocity profile is odd") {
    std::mt19937_64 rng(11);
    for (const ProfileSpec &s : {ProfileSpec(2.0, 8), ProfileSpec(56.0, 906), ProfileSpec(0.3, 4)}) {
        std::uniform_real_distribution<double> x_d(-s.M() - 2.0, s.M() + 2.0);
        for (int k = 0; k < 10000; ++k) {
            const double x = x_d(rng);
            REQUIRE(std::abs(velocity_profile(s, x) + velocity_profile(s, -x)) <= 1e-14 * s.L());
        }
    }
}

TEST_CASE("velocity profile is C1 at every breakpoint") {
    const ProfileSpec s(2.0, 8);
    const double M = s.M();
    for (double b : {-M, -M + 1.0, -1.0, 1.0, M - 1.0, M}) {
        double prev = 0.0;
        for (double h : {1e-3, 5e-4, 2.5e-4}) {
            const double jump = std::abs(velocity_profile(s, b + h) - velocity_profile(s, b - h));
            const double left = (velocity_profile(s, b) - velocity_profile(s, b - h)) / h;
            const double right = (velocity_profile(s, b + h) - velocity_profile(s, b)) / h;
            const double mismatch = std::abs(left - right);
            CAPTURE(b);
            CAPTURE(h);
            CHECK(jump <= 4.0 * s.L() * h);
            CHECK(mismatch <= 2.0 * s.L() * kPi * kPi * h);
            if (prev > 1e-12) CHECK(mismatch / prev <= 0.55); // O(h)
            prev = mismatch;
        }
    }
}

TEST_CASE("printed variant jumps at the middle and right breakpoints") {
    const ProfileSpec p(2.0, 8, 1.0, ProfileVariant::Printed);
    const double h = 1e-9;
    CHECK(std::abs(velocity_profile(p, 1.0 + h) - velocity_profile(p, 1.0 - h)) > 1.0);
    CHECK(std::abs(velocity_profile(p, 7.0 + h) - velocity_profile(p, 7.0 - h)) > 1.0);
}

TEST_CASE("profile norm: closed form, bound and quadrature") {
    CHECK(profile_norm_sq(ProfileSpec(2.0, 8)) == doctest::Approx(55.0).epsilon(1e-15));
    CHECK(profile_norm_sq(ProfileSpec(2.0, 8)) <= 64.0);
    CHECK(simpson_norm_sq(ProfileSpec(2.0, 8), 64) == doctest::Approx(55.0).epsilon(1e-10));
    // both variants share the norm for even M
    CHECK(simpson_norm_sq(ProfileSpec(2.0, 8, 1.0, ProfileVariant::Printed), 64) ==
          doctest::Approx(55.0).epsilon(1e-10));
    CHECK(profile_norm_sq(ProfileSpec(1e-9, 8)) < 1e-15);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> L_d(0.01, 100.0);
    std::uniform_int_distribution<int> M_d(2, 60);
    for (int k = 0; k < 100; ++k) {
        const ProfileSpec s(L_d(rng), 2 * M_d(rng));
        REQUIRE(profile_norm_sq(s) <= 2.0 * s.L() * s.L() * s.M());
    }
}

TEST_CASE("H0 examples") {
    CHECK(compute_H0(uniform_density(1.0), kP21, 64) == 0.0);
    DensityData indicator{[](double) { return 1.0; }, [](double x) { return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0; },
                          1.0};
    CHECK(compute_H0(indicator, kP21, 64) == doctest::Approx(0.5).epsilon(1e-14));
    DensityData plateau{[](double x) { return std::abs(x) < 1.0 ? 1.1 : 1.0; }, [](double) { return 0.0; }, 1.0};
    CHECK(compute_H0(plateau, kP21, 64) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK_THROWS_AS(compute_H0(uniform_density(1.0), kP21, 32), PlanningError);

    const DensityData bump = bump_density(0.4, 0.3, 2.0);
    const double h64 = compute_H0(bump, ModelParams(1.4, 0.5), 64);
    const double h128 = compute_H0(bump, ModelParams(1.4, 0.5), 128);
    CHECK(h64 > 0.0);
    CHECK(std::abs(h64 - h128) <= 1e-8 * h128);
}

TEST_CASE("initial moment against the closed form") {
    const InitialData d{ProfileSpec(2.0, 8), uniform_density(1.0)};
    const double F = initial_moment(d, 64);
    CHECK(moment_closed_form(2.0, 8.0) == doctest::Approx(112.2159).epsilon(1e-6));
    CHECK(F == doctest::Approx(moment_closed_form(2.0, 8.0)).epsilon(1e-8));
    CHECK(F > 64.0);
    const InitialData rest{ProfileSpec(2.0, 8), uniform_density(1.0), 0.0};
    CHECK(initial_moment(rest, 64) == 0.0);
}

TEST_CASE("plan for gamma = 2, tau = 1, uniform data") {
    const TheoremPlan p = plan(kP21, uniform_density(1.0));
    CHECK(p.sigma == doctest::Approx(kSqrt3).epsilon(1e-15));
    CHECK(p.sigma_tilde == doctest::Approx(kSqrt3).epsilon(1e-15));
    CHECK(p.L == 56.0);
    CHECK(p.M == 906);
    CHECK(p.H0 == 0.0);
    CHECK(p.F0_threshold == doctest::Approx(16.0 * kSqrt3 * 906.0 * 906.0).epsilon(1e-14));
    CHECK(p.F0_threshold == doctest::Approx(2.2747e7).epsilon(1e-4));
    CHECK(p.F0 == doctest::Approx(moment_closed_form(56.0, 906.0)).epsilon(1e-8));
    CHECK(p.F0 == doctest::Approx(4.5916e7).epsilon(1e-4));
    CHECK(p.F0 > p.F0_threshold);
    CHECK(p.F0 > p.F0_critical);
    CHECK(p.admissible);
    CHECK(p.violated.empty());
    for (const auto &c : p.checks) {
        CAPTURE(c.name);
        CHECK(c.pass);
    }
    REQUIRE(p.t_star.has_value());
    // (1/c2)(sqrt((c3/(4c2)) / (c3/(8c2) - 1/F0)) - 1) with the constants above
    const double c2 = kSqrt3 / 906.0, c3 = 1.0 / (2.0 * 906.0 * 906.0 * 906.0);
    const double t_star = (std::sqrt((c3 / (4 * c2)) / (c3 / (8 * c2) - 1.0 / p.F0)) - 1.0) / c2;
    CHECK(*p.t_star == doctest::Approx(t_star).epsilon(1e-12));
    CHECK(*p.t_star == doctest::Approx(518.32).epsilon(1e-4));
    // the smallest even L with L/2 > 16 sqrt3 and the smallest even M >= L^2/(2 sqrt3)
    CHECK(54.0 / 2.0 < 16.0 * kSqrt3);
    CHECK(904.0 < 56.0 * 56.0 / (2.0 * kSqrt3));
}

TEST_CASE("plan constants, chain and t = 0 anchors") {
    for (const DensityData &d : {uniform_density(1.0), bump_density(0.5, 0.4, 3.0)}) {
        for (const ModelParams &mp : {ModelParams(2.0, 1.0), ModelParams(1.4, 0.2), ModelParams(3.0, 5.0)}) {
            const TheoremPlan p = plan(mp, d);
            REQUIRE(p.admissible);
            const double rmax = p.rho_max, M = p.M;
            CHECK(p.sigma_tilde * p.sigma_tilde == doctest::Approx(std::max(p.sigma * p.sigma, 1.0 / (8.0 * rmax))));
            CHECK(p.L / 2.0 * p.rho_min > std::max(std::sqrt(8.0 * rmax), 16.0 * p.sigma_tilde * rmax));
            CHECK(p.H0 + rmax * p.L * p.L * M <= 2.0 * p.sigma_tilde * M * M * rmax);
            CHECK(p.c2 == doctest::Approx(p.sigma_tilde / M).epsilon(1e-15));
            CHECK(p.c3 == doctest::Approx(1.0 / (2.0 * rmax * M * M * M)).epsilon(1e-15));
            CHECK(p.c1 == doctest::Approx(2.0 * p.c2 / p.c3).epsilon(1e-15));
            CHECK(p.c4 == doctest::Approx(p.H0 / (2.0 * p.c1 * p.c1)).epsilon(1e-15));
            CHECK(p.c5 == doctest::Approx(rmax / (4.0 * p.c1 * p.c1)).epsilon(1e-15));
            const double left = p.c4 + p.c5 * p.norm_sq;
            const double mid = p.c3 * p.c3 / (8.0 * p.c2 * p.c2) * (p.H0 + rmax * p.L * p.L * M);
            const double right = p.c3 / (8.0 * p.c2);
            CHECK(left <= mid);
            CHECK(mid <= right);
            CHECK(p.F0 > std::max(16.0 * p.sigma_tilde * M * M * rmax, M * M * std::sqrt(8.0 * rmax)));
            CHECK(p.F0 >= 2.0 * p.c1);
            CHECK(p.F0 * p.F0 >= 4.0 * M / p.c3);
        }
    }
}

TEST_CASE("planner monotonicity on a 5 x 5 grid") {
    const DensityData d = uniform_density(1.0);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const double L = 56.0 + 2.0 * i;
            const int M = 906 + 2 * j;
            const TheoremPlan p = evaluate_plan(kP21, d, L, M);
            if (i + 1 < 5) {
                const TheoremPlan q = evaluate_plan(kP21, d, L + 2.0, M);
                CHECK(q.F0 >= p.F0);
            }
            if (j + 1 < 5) {
                const TheoremPlan q = evaluate_plan(kP21, d, L, M + 2);
                // relative margin of the deadline denominator c3/(8c2) - 1/F0
                const double mp = 1.0 - p.F0_critical / p.F0;
                const double mq = 1.0 - q.F0_critical / q.F0;
                CHECK(mq >= mp);
                REQUIRE(q.t_star.has_value());
            }
        }
    }
}

TEST_CASE("planner failure modes name the binding constraint") {
    PlanPolicy tight;
    tight.max_M = 100;
    try {
        (void)plan(kP21, uniform_density(1.0), tight);
        FAIL("expected PlanningError");
    } catch (const PlanningError &e) {
        CHECK(std::string(e.what()).rfind("largesupport", 0) == 0);
    }
    PlanPolicy smallL;
    smallL.max_L = 20;
    try {
        (void)plan(kP21, uniform_density(1.0), smallL);
        FAIL("expected PlanningError");
    } catch (const PlanningError &e) {
        CHECK(std::string(e.what()).rfind("largedata", 0) == 0);
    }
    try {
        (void)plan(kP21, bump_density(-0.2, 0.0, 1.0));
        FAIL("expected PlanningError");
    } catch (const PlanningError &e) {
        CHECK(std::string(e.what()).rfind("initialmass", 0) == 0);
    }
    CHECK_THROWS_AS(plan(ModelParams(2.0, 1.0, 2.0), uniform_density(1.0)), PlanningError);
    // an explicit (L, M) that is too small evaluates but is not admissible
    const TheoremPlan small = evaluate_plan(kP21, uniform_density(1.0), 2.0, 8);
    CHECK_FALSE(small.admissible);
    CHECK_FALSE(small.violated.empty());
}

TEST_CASE("blow-up deadline closed form") {
    const double c2 = 0.01, c3 = 0.002;
    CHECK(blowup_deadline(c2, c3, 16.0 * c2 / c3) == doctest::Approx(1.0 / c2).epsilon(1e-12));
    const double near = blowup_deadline(c2, c3, 8.0 * c2 / c3 * (1.0 + 1e-9));
    CHECK(near > 1e5);
    CHECK(blowup_deadline(c2, c3, 8.0 * c2 / c3 * (1.0 + 1e-3)) > blowup_deadline(c2, c3, 8.0 * c2 / c3 * 1.1));
    CHECK_THROWS_AS(blowup_deadline(c2, c3, 8.0 * c2 / c3), PlanningError);
    CHECK_THROWS_AS(blowup_deadline(c2, c3, 1.0), PlanningError);
}

TEST_CASE("plan report round-trips through JSON") {
    const TheoremPlan p = plan(kP21, bump_density(0.2, 0.1, 1.0));
    const nlohmann::json j = to_json(p);
    CHECK(j.at("model.gamma") == 2.0);
    CHECK(j.contains("check.largesupport.margin"));
    const TheoremPlan q = plan_from_json(nlohmann::json::parse(j.dump()));
    CHECK(q.L == p.L);
    CHECK(q.M == p.M);
    CHECK(q.F0 == p.F0);
    CHECK(q.c3 == p.c3);
    CHECK(q.t_star == p.t_star);
    CHECK(q.checks.size() == p.checks.size());
    CHECK(q.admissible == p.admissible);
    const TheoremPlan small = evaluate_plan(kP21, uniform_density(1.0), 2.0, 8);
    const TheoremPlan r = plan_from_json(to_json(small));
    CHECK(r.t_star.has_value() == small.t_star.has_value());
    CHECK_THROWS_AS(plan_from_json(nlohmann::json::object()), PlanningError);
}
