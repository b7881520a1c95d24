#include "lowmach/schemes.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lowmach {

namespace {

FaceVectorField source_at(const SchemeConfig& cfg, const StaggeredMesh& mesh, double t)
{
	if(!cfg.source) return FaceVectorField(mesh.num_faces());
	FaceVectorField s = cfg.source(t);
	if(static_cast<int>(s.size()) != mesh.num_faces())
		throw std::invalid_argument("momentum source has the wrong size");
	return s;
}

void shift_zero_mean(const StaggeredMesh& mesh, CellField& p)
{
	const double m = cell_mean(mesh, p);
	for(double& v : p) v -= m;
}

// Solves div(grad phi) = g with phi_0 = 0, then shifts phi to zero mean
CellField solve_poisson(const StaggeredMesh& mesh, const CellField& g, const SolveOptions& opts)
{
	SparseOperator L = cell_laplacian(mesh);
	Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
	L.prune([](Eigen::Index r, Eigen::Index, double) { return r != 0; });
	L.coeffRef(0, 0) = 1.0;
	L.makeCompressed();
	b[0] = 0;
	SolveOptions o = opts;
	o.method = LinearMethod::direct;
	const Eigen::VectorXd x = linear_solve(L, b, o);
	CellField phi(x.data(), x.data() + x.size());
	shift_zero_mean(mesh, phi);
	return phi;
}

// Convective, viscous and identity terms of the velocity balance with frozen dual fluxes
void assemble_velocity(const StaggeredMesh& mesh, const DualFluxTable& dual, ConvectionMode mode, double dt,
                       const RigidityMatrix& a, const FaceVectorField& u_bnd, std::vector<Eigen::Triplet<double>>& t,
                       Eigen::VectorXd& rhs)
{
	const int n = 2*mesh.num_internal_faces();
	rhs = Eigen::VectorXd::Zero(n);
	for(int s : mesh.internal_faces()) {
		const int r = mesh.face(s).interior_index;
		double self = mesh.face(s).diamond/dt;
		for(const DiamondLink& l : mesh.diamond_links(s)) {
			const double F = l.sign*dual.f[l.dual];
			double cs, cn;
			if(mode == ConvectionMode::centered) { cs = 0.5*F; cn = 0.5*F; }
			else if(F >= 0) { cs = F; cn = 0; }
			else { cs = 0; cn = F; }
			self += cs;
			if(cn == 0) continue;
			const int rn = mesh.face(l.neighbor).interior_index;
			if(rn >= 0) {
				t.emplace_back(2*r, 2*rn, cn);
				t.emplace_back(2*r+1, 2*rn+1, cn);
			} else {
				rhs[2*r] -= cn*u_bnd[l.neighbor].x;
				rhs[2*r+1] -= cn*u_bnd[l.neighbor].y;
			}
		}
		t.emplace_back(2*r, 2*r, self);
		t.emplace_back(2*r+1, 2*r+1, self);
	}
	for(int k = 0; k < a.a_int.outerSize(); k++)
		for(SparseOperator::InnerIterator it(a.a_int, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
	if(a.a_bnd.nonZeros() > 0) rhs -= a.a_bnd*pack_external(mesh, a, u_bnd);
}

SolverState finish(const StaggeredMesh& mesh, const SolverState& s, const SchemeConfig& cfg, FaceVectorField u,
                   CellField dp)
{
	SolverState out;
	out.rho_prev = s.rho;
	out.rho.assign(mesh.num_cells(), 1.0);
	out.u = std::move(u);
	out.dp = std::move(dp);
	out.n = s.n + 1;
	out.t = s.t + cfg.dt;
	BoundaryData bc;
	out.fluxes = primal_mass_fluxes(mesh, out.rho, out.u, bc);
	out.dual = dual_fluxes(mesh, out.fluxes);
	return out;
}

double max_divergence(const StaggeredMesh& mesh, const FaceVectorField& u)
{
	double m = 0;
	for(double d : velocity_divergence(mesh, u)) m = std::max(m, std::abs(d));
	return m;
}

// u - dt grad(phi) with div(grad phi) = div(u)/dt
void project(const StaggeredMesh& mesh, const SolveOptions& opts, double dt, FaceVectorField& u, CellField& phi)
{
	CellField g = velocity_divergence(mesh, u);
	for(double& v : g) v /= dt;
	phi = solve_poisson(mesh, g, opts);
	const FaceVectorField gp = pressure_gradient(mesh, phi);
	for(int s : mesh.internal_faces()) u[s] -= dt*gp[s];
}

StepResult step_pc(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a)
{
	const double dt = cfg.dt;
	const CellField dp = s.dp.empty() ? CellField(mesh.num_cells(), 0.0) : s.dp;
	const FaceVectorField gp = pressure_gradient(mesh, dp);
	const FaceVectorField src = source_at(cfg, mesh, s.t + dt);
	std::vector<Eigen::Triplet<double>> t;
	Eigen::VectorXd rhs;
	assemble_velocity(mesh, s.dual, cfg.convection, dt, a, s.u, t, rhs);
	const int n = 2*mesh.num_internal_faces();
	SparseOperator M(n, n);
	M.setFromTriplets(t.begin(), t.end());
	for(int f : mesh.internal_faces()) {
		const int r = mesh.face(f).interior_index;
		const double D = mesh.face(f).diamond;
		const Vec2 v = (D/dt)*s.u[f] - D*gp[f] + D*src[f];
		rhs[2*r] += v.x;
		rhs[2*r+1] += v.y;
	}
	StepResult res;
	const Eigen::VectorXd x = linear_solve(M, rhs, cfg.linear, &res.prediction);
	res.u_tilde = s.u;
	unpack_internal(mesh, x, res.u_tilde);
	FaceVectorField u = res.u_tilde;
	CellField phi;
	project(mesh, cfg.linear, dt, u, phi);
	CellField dpn = dp;
	for(int k = 0; k < mesh.num_cells(); k++) dpn[k] += phi[k];
	shift_zero_mean(mesh, dpn);
	res.state = finish(mesh, s, cfg, std::move(u), std::move(dpn));
	res.coupled_residual = max_divergence(mesh, res.state.u)*dt;
	return res;
}

StepResult step_semi(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a)
{
	const double dt = cfg.dt;
	const FaceVectorField conv = momentum_convection(mesh, s.dual, s.u, ConvectionMode::upwind);
	const FaceVectorField au = apply_rigidity(mesh, a, s.u);
	const FaceVectorField src = source_at(cfg, mesh, s.t + dt);
	StepResult res;
	res.u_tilde = s.u;
	for(int f : mesh.internal_faces()) {
		const double D = mesh.face(f).diamond;
		res.u_tilde[f] = s.u[f] - dt*(conv[f] + au[f]*(1/D) - src[f]);
	}
	FaceVectorField u = res.u_tilde;
	CellField dp;
	project(mesh, cfg.linear, dt, u, dp);
	res.state = finish(mesh, s, cfg, std::move(u), std::move(dp));
	res.coupled_residual = max_divergence(mesh, res.state.u)*dt;
	return res;
}

/**
 * Saddle-point system per Picard iterate, unknowns [u_int; dp]:
 *   (|D|/dt + C(u^k) + A) u - B^T dp = |D| u^n / dt + |D| f
 *   B u = -(boundary flux),  (Bu)_K = sum |sigma| u.n_{K,sigma}
 * with the continuity row of cell 0 replaced by dp_0 = 0.
 */
StepResult step_impl(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a)
{
	const double dt = cfg.dt;
	const int nu = 2*mesh.num_internal_faces(), nc = mesh.num_cells();
	const FaceVectorField src = source_at(cfg, mesh, s.t + dt);
	const CellField ones(nc, 1.0);
	StepResult res;

	auto split = [&](const Eigen::VectorXd& x, FaceVectorField& u, CellField& dp) {
		u = s.u;
		unpack_internal(mesh, x.head(nu), u);
		dp.assign(x.data() + nu, x.data() + nu + nc);
	};
	auto join = [&](const FaceVectorField& u, const CellField& dp) {
		Eigen::VectorXd x(nu + nc);
		x.head(nu) = pack_internal(mesh, u);
		for(int k = 0; k < nc; k++) x[nu + k] = dp[k];
		return x;
	};

	auto solve = [&](const Eigen::VectorXd& xk) -> Eigen::VectorXd {
		FaceVectorField uk;
		CellField dpk;
		split(xk, uk, dpk);
		const DualFluxTable dual = dual_fluxes(mesh, primal_mass_fluxes(mesh, ones, uk));
		std::vector<Eigen::Triplet<double>> t;
		Eigen::VectorXd rm;
		assemble_velocity(mesh, dual, cfg.convection, dt, a, s.u, t, rm);
		Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu + nc);
		rhs.head(nu) = rm;
		for(int f : mesh.internal_faces()) {
			const int r = mesh.face(f).interior_index;
			const double D = mesh.face(f).diamond;
			const Vec2 v = (D/dt)*s.u[f] + D*src[f];
			rhs[2*r] += v.x;
			rhs[2*r+1] += v.y;
		}
		for(int f = 0; f < mesh.num_faces(); f++) {
			const Face& fc = mesh.face(f);
			for(int side = 0; side < 2; side++) {
				const int k = fc.cells[side];
				if(k < 0) continue;
				const Vec2 n = fc.normal*(side == 0 ? 1.0 : -1.0);
				if(fc.internal()) {
					const int r = fc.interior_index;
					const double bx = fc.length*n.x, by = fc.length*n.y;
					if(k != 0) {
						t.emplace_back(nu + k, 2*r, bx);
						t.emplace_back(nu + k, 2*r+1, by);
					}
					t.emplace_back(2*r, nu + k, -bx);
					t.emplace_back(2*r+1, nu + k, -by);
				} else if(k != 0)
					rhs[nu + k] -= fc.length*dot(s.u[f], n);
			}
		}
		t.emplace_back(nu, nu, 1.0);
		SparseOperator K(nu + nc, nu + nc);
		K.setFromTriplets(t.begin(), t.end());
		SolveOptions o = cfg.linear;
		o.method = LinearMethod::direct;
		const Eigen::VectorXd x = linear_solve(K, rhs, o, &res.prediction);
		FaceVectorField u;
		CellField dp;
		split(x, u, dp);
		shift_zero_mean(mesh, dp);
		return join(u, dp);
	};

	auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
		FaceVectorField u;
		CellField dp;
		split(x, u, dp);
		const DualFluxTable dual = dual_fluxes(mesh, primal_mass_fluxes(mesh, ones, u));
		const FaceVectorField conv = momentum_convection(mesh, dual, u, cfg.convection);
		const FaceVectorField au = apply_rigidity(mesh, a, u);
		const FaceVectorField gp = pressure_gradient(mesh, dp);
		double umax = 1;
		for(int f : mesh.internal_faces()) umax = std::max(umax, norm(u[f]));
		Eigen::VectorXd r(nu + nc);
		for(int f : mesh.internal_faces()) {
			const double D = mesh.face(f).diamond;
			const Vec2 m = (u[f] - s.u[f])*(1/dt) + conv[f] + au[f]*(1/D) + gp[f] - src[f];
			const int q = mesh.face(f).interior_index;
			r[2*q] = m.x*dt/umax;
			r[2*q+1] = m.y*dt/umax;
		}
		const CellField d = velocity_divergence(mesh, u);
		for(int k = 0; k < nc; k++) r[nu + k] = d[k]*dt/umax;
		return r;
	};

	CellField dp0 = s.dp.empty() ? CellField(nc, 0.0) : s.dp;
	NonlinearOptions opts = cfg.outer;
	opts.atol = 0;
	Eigen::VectorXd x = fixed_point_solve(residual, solve, join(s.u, dp0), opts, 1.0, res.outer);
	if(!res.outer.converged)
		throw SolverError("incompressible implicit step: Picard iteration did not converge", res.outer.residual);
	// an undamped last solve keeps the continuity equation exact
	x = solve(x);
	res.outer_iters = res.outer.iterations + 1;
	FaceVectorField u;
	CellField dp;
	split(x, u, dp);
	res.u_tilde = u;
	res.coupled_residual = residual(x).lpNorm<Eigen::Infinity>();
	res.state = finish(mesh, s, cfg, std::move(u), std::move(dp));
	return res;
}

}

SolverState init_incompressible(const StaggeredMesh& mesh, const VectorInit& u0, bool face_means, const CellField& dp0)
{
	SolverState s;
	s.rho.assign(mesh.num_cells(), 1.0);
	s.rho_prev = s.rho;
	s.u = face_means ? face_averages(mesh, u0) : diamond_averages(mesh, u0);
	for(int f : mesh.external_faces()) s.u[f] = Vec2{};
	if(dp0.empty()) s.dp.assign(mesh.num_cells(), 0.0);
	else {
		if(static_cast<int>(dp0.size()) != mesh.num_cells())
			throw std::invalid_argument("init_incompressible: dp0 has the wrong size");
		s.dp = dp0;
	}
	s.fluxes = primal_mass_fluxes(mesh, s.rho, s.u);
	s.dual = dual_fluxes(mesh, s.fluxes);
	return s;
}

StepResult step_incompressible(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg,
                               const RigidityMatrix& a, IncompressibleVariant variant)
{
	switch(variant) {
	case IncompressibleVariant::implicit: return step_impl(s, mesh, cfg, a);
	case IncompressibleVariant::pc: return step_pc(s, mesh, cfg, a);
	case IncompressibleVariant::semi: return step_semi(s, mesh, cfg, a);
	}
	throw std::logic_error("step_incompressible: unknown variant");
}

FaceVectorField project_divergence_free(const StaggeredMesh& mesh, const FaceVectorField& u)
{
	FaceVectorField out = u;
	CellField phi;
	project(mesh, SolveOptions{}, 1.0, out, phi);
	return out;
}

}
