#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lowmach/runner.hpp"

#include <cmath>
#include <random>

using namespace lowmach;

TEST_CASE("radial profile")
{
	CHECK(vortex_profile(0).f == 0);
	CHECK(vortex_profile(0).F == 0);
	CHECK(vortex_profile(0.5).f == doctest::Approx(0.625));
	for(double xi : {1.0, 1.5, 40.0}) {
		CHECK(vortex_profile(xi).f == 0);
		CHECK(vortex_profile(xi).F == doctest::Approx(10.0/63));
	}
	// F continuous at the rim
	CHECK(std::abs(vortex_profile(1 - 1e-12).F - 10.0/63) < 1e-10);
	CHECK_THROWS(vortex_profile(-0.1));
}

TEST_CASE("F' = f^2")
{
	const double h = 1e-5;
	for(int i = 1; i < 100; i++) {
		const double xi = i/100.0;
		const double d = (vortex_profile(xi + h).F - vortex_profile(xi - h).F)/(2*h);
		const double f = vortex_profile(xi).f;
		CHECK(d == doctest::Approx(f*f).epsilon(1e-8).scale(1));
	}
}

TEST_CASE("radial momentum balance of the stationary vortex")
{
	for(double c_M : {1.0, 1e4, 1e8}) {
		VortexParams p;
		p.c_M = c_M;
		for(int i = 0; i <= 1000; i++) {
			const double xi = 1.2*i/1000;
			const double f = vortex_profile(xi).f;
			const double r = -std::pow(vortex_g(xi, p), 1/p.gamma)*f*f + 2*vortex_g_prime(xi, p);
			CHECK(std::abs(r) <= 1e-9*std::max(1.0, std::pow(vortex_g(xi, p), 1/p.gamma)));
		}
	}
}

TEST_CASE("exterior state and Mach numbers")
{
	VortexParams p;
	const double base = (10.0/63 + 1)/3;
	CHECK(p_ext(p) == doctest::Approx(std::pow(base, 1.5)).epsilon(1e-14));
	CHECK(rho_ext(p) == doctest::Approx(std::sqrt(base)).epsilon(1e-14));
	CHECK(mach_table(1).c == doctest::Approx(1.0764432909959347).epsilon(1e-12));
	CHECK(mach_table(1e2).c == doctest::Approx(10.008).epsilon(1e-4));
	CHECK(mach_table(1e4).c == doctest::Approx(100).epsilon(1e-5));
	CHECK(mach_table(1e8).c == doctest::Approx(1e4).epsilon(1e-8));
	for(double c : benchmark_pressure_levels()) CHECK(mach_table(c).Ma*mach_table(c).c == doctest::Approx(1));
	CHECK_THROWS(mach_table(0));
}

TEST_CASE("exact solution")
{
	VortexParams p;
	const ExactState centre = exact_solution(p.x0 + 0.8*p.a, 0.8, p);
	CHECK(centre.u.x == doctest::Approx(1));
	CHECK(centre.u.y == doctest::Approx(1));
	CHECK(centre.p == doctest::Approx(std::pow((1.0/3)*p.c_M, 1.5)));
	const ExactState far = exact_solution({2.5, -1}, 0, p);
	CHECK(far.p == doctest::Approx(p_ext(p)));
	CHECK(far.rho == doctest::Approx(rho_ext(p)));
	CHECK(far.u.x == 1);
	CHECK(far.u.y == 1);
	// rotation: the swirl is orthogonal to the offset from the centre
	const Vec2 y{0.3, -0.4};
	const Vec2 w = exact_solution(p.x0 + y, 0, p).u - p.a;
	CHECK(std::abs(w.x*y.x + w.y*y.y) < 1e-15);
}

TEST_CASE("viscosity and source")
{
	const StaggeredMesh m = build_uniform_grid(20, 20, {-1.2, 2.8, -1.2, 2.8});
	VortexParams p;
	p.c_M = 1e2;
	const VortexForcing e = forcing_terms(m, p);
	CHECK(e.mu == doctest::Approx(rho_ext(p)*1.4*0.2/10));
	CHECK_FALSE(e.source);
	p.mode = ViscosityMode::navier_stokes;
	const VortexForcing ns = forcing_terms(m, p);
	// Reynolds number 50 for unit reference velocity and length
	CHECK(rho_ext(p)/ns.mu == doctest::Approx(50));
	REQUIRE(ns.source);
	const FaceVectorField s = ns.source(0);
	for(int f : m.internal_faces()) {
		const Face& fc = m.face(f);
		// the stencil reaches one cell beyond the face; the exact field is constant past xi = 1
		if(norm2(fc.center - p.x0) > 1.7*1.7) {
			CHECK(std::abs(s[f].x) < 1e-12);
			CHECK(std::abs(s[f].y) < 1e-12);
		}
	}
	p.analytic_source = true;
	const FaceVectorField sa = forcing_terms(m, p).source(0.3);
	for(int f : m.internal_faces())
		if(norm2(m.face(f).center - p.x0 - 0.3*p.a) > 1.0) CHECK(norm(sa[f]) == 0);
}

TEST_CASE("error norms vanish on exact samples")
{
	const StaggeredMesh m = build_uniform_grid(12, 12, {-1.2, 2.8, -1.2, 2.8});
	VortexParams p;
	p.c_M = 1e4;
	const EosParams eos(p.gamma);
	SolverState s;
	s.u = exact_face_velocity(m, p, 0.4);
	s.rho.resize(m.num_cells());
	for(int k = 0; k < m.num_cells(); k++) s.rho[k] = exact_solution(m.cell(k).center, 0.4, p).rho;
	const VortexErrors e = error_norms(m, s, p, 0.4, eos);
	CHECK(e.velocity_l1 == 0);
	CHECK(e.pressure_l1 <= 1e-12*p_ext(p)*16);
	for(const ProfilePoint& q : velocity_profile(m, s, p, 0.4, vortex_profile_line(p))) CHECK(q.numerical == q.exact);
	s.u[m.internal_faces().front()] += Vec2{1, 0};
	CHECK(error_norms(m, s, p, 0.4, eos).velocity_l1 == doctest::Approx(m.face(m.internal_faces().front()).diamond));
}

TEST_CASE("profile line and row")
{
	VortexParams p;
	CHECK(vortex_profile_line(p) == doctest::Approx(0.8));
	const StaggeredMesh m = build_uniform_grid(10, 10, {-1.2, 2.8, -1.2, 2.8});
	CHECK(m.ys()[nearest_face_row(m, 0.8)] == doctest::Approx(0.8));
}

TEST_CASE("initial vortex state")
{
	const StaggeredMesh m = build_uniform_grid(16, 16, {-1.2, 2.8, -1.2, 2.8});
	VortexParams p;
	p.c_M = 1e2;
	const SchemeConfig cfg = vortex_config(m, p, 0.05);
	CHECK(cfg.kind == SchemeKind::pressure_correction);
	CHECK(cfg.eps == 1);
	CHECK(cfg.bc.rho_ext == doctest::Approx(rho_ext(p)));
	const SolverState s = vortex_initial_state(m, p, 0.05);
	for(int k = 0; k < m.num_cells(); k++) CHECK(s.rho[k] > 0);
	for(int f = 0; f < m.num_faces(); f++)
		if(!m.face(f).internal()) CHECK(norm(s.u[f] - p.a) < 1e-14);
}
