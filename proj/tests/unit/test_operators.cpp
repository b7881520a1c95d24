#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lowmach/operators.hpp"
#include "lowmach/solvers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace lowmach;

namespace {

StaggeredMesh random_grid(std::mt19937_64& gen, int nmax)
{
	std::uniform_int_distribution<int> n(1, nmax);
	std::uniform_real_distribution<double> w(0.3, 1.7);
	const int nx = n(gen), ny = n(gen);
	std::vector<double> xs{0}, ys{0};
	for(int i = 0; i < nx; i++) xs.push_back(xs.back() + w(gen)/nx);
	for(int j = 0; j < ny; j++) ys.push_back(ys.back() + w(gen)/ny);
	return build_tensor_grid(xs, ys);
}

// random velocity, zero on the boundary
FaceVectorField random_velocity(const StaggeredMesh& m, std::mt19937_64& gen)
{
	std::uniform_real_distribution<double> u(-1, 1);
	FaceVectorField v(m.num_faces());
	for(int s : m.internal_faces()) v[s] = {u(gen), u(gen)};
	return v;
}

CellField random_density(const StaggeredMesh& m, std::mt19937_64& gen)
{
	std::uniform_real_distribution<double> u(0.5, 2);
	CellField r(m.num_cells());
	for(double& x : r) x = u(gen);
	return r;
}

// (1/|K|) sum of outward-oriented in-cell dual fluxes of D_{K,sigma}, per the corner incidence
const int incidence[4][4] = {{1, 0, 1, 0}, {0, 1, 0, 1}, {-1, -1, 0, 0}, {0, 0, -1, -1}};

}

TEST_CASE("mass fluxes are upwind")
{
	const StaggeredMesh m = build_uniform_grid(2, 1, {0, 2, 0, 1});
	const int s = m.internal_faces()[0];
	FaceVectorField u(m.num_faces());
	CHECK(primal_mass_fluxes(m, {2, 1}, u).phi[s] == 0.0);
	u[s] = {1, 0};
	PrimalFluxes f = primal_mass_fluxes(m, {2, 1}, u);
	CHECK(f.F(m, 0, EAST) == doctest::Approx(2.0));
	CHECK(f.F(m, 1, WEST) == doctest::Approx(-2.0));
	u[s] = {-1, 0};
	f = primal_mass_fluxes(m, {2, 1}, u);
	CHECK(f.F(m, 0, EAST) == doctest::Approx(-1.0));

	const CellField d = mass_divergence(m, f);
	CHECK(d[0] == doctest::Approx(-1.0));
	CHECK(d[1] == doctest::Approx(1.0));
}

TEST_CASE("divergence of affine fields")
{
	const StaggeredMesh m = build_uniform_grid(5, 4, {0, 1, 0, 2});
	FaceVectorField a(m.num_faces()), b(m.num_faces()), c(m.num_faces(), Vec2{0.3, -0.7});
	for(int s = 0; s < m.num_faces(); s++) {
		const Vec2 x = m.face(s).center;
		a[s] = {x.x, -x.y};
		b[s] = {x.x, x.y};
	}
	const CellField da = velocity_divergence(m, a), db = velocity_divergence(m, b), dc = velocity_divergence(m, c);
	for(int k = 0; k < m.num_cells(); k++) {
		CHECK(std::abs(da[k]) < 1e-12);
		CHECK(db[k] == doctest::Approx(2.0));
		CHECK(std::abs(dc[k]) < 1e-12);
	}
	CHECK(velocity_divergence(m, FaceVectorField(m.num_faces())) == CellField(m.num_cells(), 0.0));
}

TEST_CASE("dual densities")
{
	const StaggeredMesh m = build_uniform_grid(2, 1, {0, 2, 0, 1});
	const int s = m.internal_faces()[0];
	CHECK(dual_density(m, {2, 4})[s] == doctest::Approx(3.0));
	for(double r : dual_density(m, {0.7, 0.7})) CHECK(r == doctest::Approx(0.7));
	// |D_{K,sigma}| = 1 and |D_{L,sigma}| = 3
	const StaggeredMesh w = build_tensor_grid({0, 4, 16}, {0, 1});
	const Face& f = w.face(w.internal_faces()[0]);
	CHECK(f.half_diamond[0] == doctest::Approx(1.0));
	CHECK(f.half_diamond[1] == doctest::Approx(3.0));
	CHECK(dual_density(w, {4, 0.8})[w.internal_faces()[0]] == doctest::Approx(1.6));
}

TEST_CASE("dual fluxes: equal primal fluxes give zero")
{
	const StaggeredMesh m = build_uniform_grid(1, 1, {0, 1, 0, 1});
	PrimalFluxes p;
	p.phi.assign(4, 0.0);
	for(int slot = 0; slot < 4; slot++) {
		const int s = m.cell(0).faces[slot];
		p.phi[s] = 0.8*m.side_sign(0, s);
	}
	for(double f : dual_fluxes(m, p).f) CHECK(std::abs(f) < 1e-15);
	p.phi.assign(4, 0.0);
	for(double f : dual_fluxes(m, p).f) CHECK(f == 0.0);
}

TEST_CASE("dual fluxes satisfy the half-diamond balance, antisymmetry and the bound")
{
	std::mt19937_64 gen(3);
	for(int trial = 0; trial < 30; trial++) {
		const StaggeredMesh m = random_grid(gen, 6);
		const CellField rho = random_density(m, gen);
		const FaceVectorField u = random_velocity(m, gen);
		const PrimalFluxes p = primal_mass_fluxes(m, rho, u);
		const DualFluxTable d = dual_fluxes(m, p);
		for(int k = 0; k < m.num_cells(); k++) {
			double F[4], S = 0, bound = 0;
			for(int slot = 0; slot < 4; slot++) {
				F[slot] = p.F(m, k, slot);
				S += F[slot];
				bound = std::max(bound, std::abs(F[slot]));
			}
			for(int slot = 0; slot < 4; slot++) {
				double lhs = 0;
				for(int c = 0; c < 4; c++) lhs += incidence[slot][c]*d.f[4*k + c];
				CHECK(std::abs(lhs - (m.xi(k, slot)*S - F[slot])) <= 1e-13*std::max(bound, 1e-300));
			}
			for(int c = 0; c < 4; c++) CHECK(std::abs(d.f[4*k + c]) <= bound*(1 + 1e-12));
		}
		// each dual face appears in exactly two diamonds with opposite orientation
		std::vector<double> seen(m.num_dual_faces(), 0.0);
		std::vector<int> count(m.num_dual_faces(), 0);
		for(int s : m.internal_faces())
			for(const DiamondLink& l : m.diamond_links(s)) {
				seen[l.dual] += l.sign;
				count[l.dual]++;
			}
		for(int e = 0; e < m.num_dual_faces(); e++)
			if(count[e] == 2) CHECK(seen[e] == 0.0);
	}
}

TEST_CASE("dual mass balance follows from the primal one")
{
	std::mt19937_64 gen(5);
	for(int trial = 0; trial < 30; trial++) {
		const StaggeredMesh m = random_grid(gen, 7);
		const CellField rho = random_density(m, gen);
		FaceVectorField u = random_velocity(m, gen);
		for(auto& v : u) v = v*0.1;
		const double dt = 0.01;
		const PrimalFluxes p = primal_mass_fluxes(m, rho, u);
		const CellField div = mass_divergence(m, p);
		CellField next(rho.size());
		for(size_t k = 0; k < rho.size(); k++) next[k] = rho[k] - dt*div[k];
		const std::vector<double> rd0 = dual_density(m, rho), rd1 = dual_density(m, next);
		const std::vector<double> sum = dual_flux_sum(m, dual_fluxes(m, p));
		for(int s : m.internal_faces()) {
			const double scale = m.face(s).diamond*(rd0[s] + rd1[s])/dt;
			CHECK(std::abs(m.face(s).diamond*(rd1[s] - rd0[s])/dt + sum[s]) <= 1e-11*scale);
		}
	}
}

TEST_CASE("convection of a single dual flux")
{
	const StaggeredMesh m = build_uniform_grid(3, 3, {0, 1, 0, 1});
	const int s = m.vface_index(1, 1);
	const DiamondLink* pick = nullptr;
	for(const DiamondLink& l : m.diamond_links(s))
		if(m.face(l.neighbor).internal()) { pick = &l; break; }
	REQUIRE(pick);
	DualFluxTable d;
	d.f.assign(m.num_dual_faces(), 0.0);
	const double F = 0.6;
	d.f[pick->dual] = F*pick->sign;
	FaceVectorField v(m.num_faces());
	v[s] = {1, 0};
	v[pick->neighbor] = {3, 0};
	const double D = m.face(s).diamond;
	const FaceVectorField c = momentum_convection(m, d, v, ConvectionMode::centered);
	const FaceVectorField w = momentum_convection(m, d, v, ConvectionMode::upwind);
	CHECK(c[s].x == doctest::Approx(2*F/D));
	CHECK(w[s].x == doctest::Approx(F/D));
	CHECK(c[s].y == 0.0);
}

TEST_CASE("convection of a constant field is the dual mass defect")
{
	std::mt19937_64 gen(9);
	const StaggeredMesh m = random_grid(gen, 5);
	const DualFluxTable d = dual_fluxes(m, primal_mass_fluxes(m, random_density(m, gen), random_velocity(m, gen)));
	const FaceVectorField v(m.num_faces(), Vec2{2, -1});
	const std::vector<double> sum = dual_flux_sum(m, d);
	for(ConvectionMode mode : {ConvectionMode::centered, ConvectionMode::upwind}) {
		const FaceVectorField c = momentum_convection(m, d, v, mode);
		for(int s : m.internal_faces()) {
			CHECK(c[s].x == doctest::Approx(2*sum[s]/m.face(s).diamond));
			CHECK(c[s].y == doctest::Approx(-sum[s]/m.face(s).diamond));
		}
	}
	const FaceVectorField zero(m.num_faces());
	for(const Vec2& c : momentum_convection(m, d, zero, ConvectionMode::upwind)) CHECK(c == Vec2{});
}

TEST_CASE("shape functions: face means are Kronecker deltas")
{
	static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
	static const double gw[3] = {5/9.0, 8/9.0, 5/9.0};
	// face positions in reference coordinates, local order W,E,S,N
	for(int i = 0; i < 4; i++)
		for(int j = 0; j < 4; j++) {
			double mean = 0;
			for(int q = 0; q < 3; q++) {
				const double a = j == WEST ? -1 : j == EAST ? 1 : gx[q];
				const double b = j == SOUTH ? -1 : j == NORTH ? 1 : gx[q];
				mean += 0.5*gw[q]*rt_shape(i, a, b);
			}
			CHECK(mean == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
		}
}

TEST_CASE("rigidity: symmetry, definiteness and the energy identity")
{
	std::mt19937_64 gen(21);
	std::uniform_real_distribution<double> uu(0.01, 1);
	for(int trial = 0; trial < 10; trial++) {
		const StaggeredMesh m = random_grid(gen, 5);
		if(m.num_internal_faces() == 0) continue;
		const double mu = uu(gen), lambda = (trial % 2 ? -0.5 : 1.0)*mu;
		const RigidityMatrix a = assemble_rigidity(m, mu, lambda);
		const Eigen::MatrixXd A(a.a_int);
		CHECK((A - A.transpose()).norm() <= 1e-14*A.norm());
		Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
		CHECK(eig.eigenvalues().minCoeff() > 0);

		// energy by pointwise quadrature of the finite element gradient
		const FaceVectorField u = random_velocity(m, gen);
		static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
		static const double gw[3] = {5/9.0, 8/9.0, 5/9.0};
		double energy = 0;
		for(int k = 0; k < m.num_cells(); k++) {
			const Cell& c = m.cell(k);
			for(int qa = 0; qa < 3; qa++)
				for(int qb = 0; qb < 3; qb++) {
					double g[2][2] = {{0, 0}, {0, 0}};
					for(int i = 0; i < 4; i++) {
						const Vec2 r = rt_shape_grad_ref(i, gx[qa], gx[qb]);
						const Vec2 v = u[c.faces[i]];
						g[0][0] += v.x*r.x*2/c.hx; g[0][1] += v.x*r.y*2/c.hy;
						g[1][0] += v.y*r.x*2/c.hx; g[1][1] += v.y*r.y*2/c.hy;
					}
					const double w = gw[qa]*gw[qb]*0.25*c.area;
					const double div = g[0][0] + g[1][1];
					energy += w*(mu*(g[0][0]*g[0][0] + g[0][1]*g[0][1] + g[1][0]*g[1][0] + g[1][1]*g[1][1])
					             + (mu + lambda)*div*div);
				}
		}
		const Eigen::VectorXd x = pack_internal(m, u);
		const double au = x.dot(a.a_int*x);
		CHECK(std::abs(au - energy) <= 1e-10*energy);

		// -div(tau) is A scaled by the diamond
		const FaceVectorField dv = diffusion(m, a, u);
		double pair = 0;
		for(int s : m.internal_faces()) pair -= m.face(s).diamond*dot(u[s], dv[s]);
		CHECK(pair == doctest::Approx(au).epsilon(1e-12));
	}
	const RigidityMatrix z = assemble_rigidity(build_uniform_grid(3, 3, {0, 1, 0, 1}), 0, 0);
	CHECK(z.a_int.nonZeros() == 0);
	CHECK(spectral_radius(z.a_int).estimate == 0.0);
	CHECK_THROWS(assemble_rigidity(build_uniform_grid(3, 3, {0, 1, 0, 1}), 1, -2));
}

TEST_CASE("rigidity annihilates constants away from the boundary")
{
	const StaggeredMesh m = build_uniform_grid(6, 6, {0, 1, 0, 1});
	const RigidityMatrix a = assemble_rigidity(m, 0.3, 0.1);
	const FaceVectorField c(m.num_faces(), Vec2{1.5, -2});
	const FaceVectorField r = apply_rigidity(m, a, c);
	for(int s : m.internal_faces()) CHECK(norm(r[s]) < 1e-12);
}

TEST_CASE("coercivity")
{
	std::mt19937_64 gen(33);
	std::uniform_real_distribution<double> uu(0.01, 2);
	for(int trial = 0; trial < 200; trial++) {
		const StaggeredMesh m = random_grid(gen, 6);
		if(m.num_internal_faces() == 0) continue;
		const double mu = uu(gen), lambda = uu(gen) - mu;
		const RigidityMatrix a = assemble_rigidity(m, mu, lambda);
		const FaceVectorField u = random_velocity(m, gen);
		const FaceVectorField dv = diffusion(m, a, u);
		double lhs = 0;
		for(int s : m.internal_faces()) lhs -= m.face(s).diamond*dot(u[s], dv[s]);
		const double h1 = h1_seminorm_sq(m, u);
		CHECK(h1 > 0);
		CHECK(lhs >= mu*h1*(1 - 1e-12));
	}
	const StaggeredMesh m = build_uniform_grid(3, 3, {0, 1, 0, 1});
	CHECK(h1_seminorm(m, FaceVectorField(m.num_faces())) == 0.0);
}

TEST_CASE("pressure gradient")
{
	const StaggeredMesh m = build_uniform_grid(2, 1, {0, 2, 0, 1});
	const int s = m.internal_faces()[0];
	const FaceVectorField g = pressure_gradient(m, {1, 3});
	// |sigma| = 1, |D_sigma| = 1/2
	CHECK(g[s].x == doctest::Approx(4.0));
	CHECK(g[s].y == 0.0);
	for(const Vec2& v : pressure_gradient(build_uniform_grid(4, 3, {0, 1, 0, 1}), CellField(12, 4.2)))
		CHECK(v == Vec2{});
}

TEST_CASE("discrete duality of gradient and divergence")
{
	std::mt19937_64 gen(44);
	std::uniform_real_distribution<double> uu(-1, 1);
	for(int trial = 0; trial < 100; trial++) {
		const StaggeredMesh m = random_grid(gen, 8);
		CellField p(m.num_cells());
		for(double& x : p) x = uu(gen);
		const FaceVectorField u = random_velocity(m, gen);
		const CellField d = velocity_divergence(m, u);
		const FaceVectorField g = pressure_gradient(m, p);
		double a = 0, b = 0, scale = 0;
		for(int k = 0; k < m.num_cells(); k++) {
			a += m.cell(k).area*p[k]*d[k];
			scale += std::abs(m.cell(k).area*p[k]*d[k]);
		}
		for(int s : m.internal_faces()) {
			b += m.face(s).diamond*dot(u[s], g[s]);
			scale += std::abs(m.face(s).diamond*dot(u[s], g[s]));
		}
		CHECK(std::abs(a + b) <= 1e-12*std::max(scale, 1.0));
	}
}
