#include "lowmach/schemes.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lowmach {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

const double gauss5_x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
const double gauss5_w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                            0.2369268850561891};
const double gauss3_x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
const double gauss3_w[3] = {5/9.0, 8/9.0, 5/9.0};

// integral of f over the triangle (a,b,c) with a collapsed tensor rule
Vec2 triangle_integral(const VectorInit& f, const Vec2& a, const Vec2& b, const Vec2& c)
{
	const Vec2 e1 = b - a, e2 = c - b;
	const double twice_area = std::abs(e1.x*e2.y - e1.y*e2.x);
	Vec2 acc;
	for(int i = 0; i < 3; i++)
		for(int j = 0; j < 3; j++) {
			const double s = 0.5*(gauss3_x[i] + 1), t = 0.5*(gauss3_x[j] + 1);
			const double w = 0.25*gauss3_w[i]*gauss3_w[j]*s*twice_area;
			acc += w*f(a + s*e1 + (s*t)*e2);
		}
	return acc;
}

FaceVectorField source_at(const SchemeConfig& cfg, const StaggeredMesh& mesh, double t)
{
	if(!cfg.source) return FaceVectorField(mesh.num_faces());
	FaceVectorField s = cfg.source(t);
	if(static_cast<int>(s.size()) != mesh.num_faces())
		throw std::invalid_argument("momentum source has the wrong size");
	return s;
}

// Linear momentum operator diag + convection + rigidity, boundary neighbours moved to rhs_bnd
void assemble_momentum(const StaggeredMesh& mesh, const DualFluxTable& dual, ConvectionMode mode,
                       const std::vector<double>& diag, const RigidityMatrix& a, const FaceVectorField& u_bnd,
                       SparseOperator& M, Eigen::VectorXd& rhs_bnd)
{
	const int n = 2*mesh.num_internal_faces();
	std::vector<Eigen::Triplet<double>> t;
	t.reserve(static_cast<size_t>(n)*6);
	rhs_bnd = Eigen::VectorXd::Zero(n);
	for(int s : mesh.internal_faces()) {
		const int r = mesh.face(s).interior_index;
		double self = diag[s];
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
				rhs_bnd[2*r] -= cn*u_bnd[l.neighbor].x;
				rhs_bnd[2*r+1] -= cn*u_bnd[l.neighbor].y;
			}
		}
		t.emplace_back(2*r, 2*r, self);
		t.emplace_back(2*r+1, 2*r+1, self);
	}
	M.resize(n, n);
	M.setFromTriplets(t.begin(), t.end());
	M += a.a_int;
	M.makeCompressed();
	if(a.a_bnd.nonZeros() > 0) rhs_bnd -= a.a_bnd*pack_external(mesh, a, u_bnd);
}

struct Correction
{
	CellField rho;
	FaceVectorField u;
	NonlinearReport report;
};

double safe_p(const EosParams& eos, double r) { return eos.p(r); }

/**
 * Solves rho - rho_n + dt div(rho u) = 0 with
 * u.n = ut.n - dt/(eps^2 w) ((|sigma|/|D|)(p_L - p_K) - G.n) on internal faces.
 * Newton on rho with frozen upwinding per iterate, then a last linear mass solve with the final normal velocity.
 */
Correction correct(const StaggeredMesh& mesh, const SchemeConfig& cfg, const CellField& rho_n,
                   const std::vector<double>& w, const FaceVectorField* G, const FaceVectorField& ut,
                   const CellField& guess)
{
	const int nc = mesh.num_cells(), nf = mesh.num_faces();
	const double dt = cfg.dt, e2 = cfg.eps*cfg.eps;
	const EosParams& eos = cfg.eos;
	std::vector<double> av(nf), bv(nf, 0.0);
	for(int s = 0; s < nf; s++) {
		const Face& f = mesh.face(s);
		av[s] = dot(ut[s], f.normal);
		if(f.internal()) {
			if(G) av[s] += dt/(e2*w[s])*dot((*G)[s], f.normal);
			bv[s] = dt*f.length/(e2*w[s]*f.diamond);
		}
	}
	auto normal_velocity = [&](const std::vector<double>& p, int s) {
		const Face& f = mesh.face(s);
		return f.internal() ? av[s] - bv[s]*(p[f.cells[1]] - p[f.cells[0]]) : av[s];
	};
	auto pressures = [&](const Eigen::VectorXd& x, std::vector<double>& p) {
		p.resize(nc);
		for(int k = 0; k < nc; k++) {
			if(!(x[k] > 0) || !std::isfinite(x[k])) return false;
			p[k] = safe_p(eos, x[k]);
		}
		return true;
	};

	auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
		std::vector<double> p;
		if(!pressures(x, p)) return Eigen::VectorXd::Constant(nc, inf);
		Eigen::VectorXd r(nc);
		for(int k = 0; k < nc; k++) r[k] = x[k] - rho_n[k];
		for(int s = 0; s < nf; s++) {
			const Face& f = mesh.face(s);
			const double un = normal_velocity(p, s);
			if(un == 0) continue;
			const int up = un > 0 ? f.cells[0] : f.cells[1];
			const double phi = f.length*(up >= 0 ? x[up] : cfg.bc.rho_ext)*un;
			if(f.cells[0] >= 0) r[f.cells[0]] += dt/mesh.cell(f.cells[0]).area*phi;
			if(f.cells[1] >= 0) r[f.cells[1]] -= dt/mesh.cell(f.cells[1]).area*phi;
		}
		return r;
	};

	auto newton = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
		std::vector<double> p;
		if(!pressures(x, p)) return x;
		Eigen::VectorXd r = residual(x);
		std::vector<Eigen::Triplet<double>> t;
		t.reserve(static_cast<size_t>(nc)*9);
		for(int k = 0; k < nc; k++) t.emplace_back(k, k, 1.0);
		for(int s = 0; s < nf; s++) {
			const Face& f = mesh.face(s);
			const double un = normal_velocity(p, s);
			const int up = un > 0 ? f.cells[0] : f.cells[1];
			const double rho_up = up >= 0 ? x[up] : cfg.bc.rho_ext;
			// d phi / d rho_j for the (up to three) cells involved
			int cols[3];
			double vals[3];
			int m = 0;
			if(up >= 0 && un != 0) { cols[m] = up; vals[m++] = f.length*un; }
			if(f.internal()) {
				cols[m] = f.cells[0]; vals[m++] = f.length*rho_up*bv[s]*eos.dp(x[f.cells[0]]);
				cols[m] = f.cells[1]; vals[m++] = -f.length*rho_up*bv[s]*eos.dp(x[f.cells[1]]);
			}
			for(int side = 0; side < 2; side++) {
				const int row = f.cells[side];
				if(row < 0) continue;
				const double c = (side == 0 ? 1.0 : -1.0)*dt/mesh.cell(row).area;
				for(int j = 0; j < m; j++) t.emplace_back(row, cols[j], c*vals[j]);
			}
		}
		SparseOperator J(nc, nc);
		J.setFromTriplets(t.begin(), t.end());
		Eigen::SparseLU<SparseOperator, Eigen::COLAMDOrdering<int>> lu;
		lu.compute(J);
		if(lu.info() != Eigen::Success) throw SingularMatrixError("correction: singular Jacobian");
		Eigen::VectorXd dx = lu.solve(r);
		return x - dx;
	};

	Eigen::VectorXd x0(nc);
	for(int k = 0; k < nc; k++) x0[k] = guess[k];
	double scale = 0;
	for(int k = 0; k < nc; k++) scale = std::max(scale, rho_n[k]);

	Correction out;
	Eigen::VectorXd x = fixed_point_solve(residual, newton, x0, cfg.nonlinear, scale, out.report);
	if(!out.report.converged)
		throw SolverError("correction: density iteration did not converge", out.report.residual);

	// Newton steps keep the total mass exactly (the Jacobian conserves mass column-wise), so x is used as is.
	// A further mass solve with frozen velocity would move rho by the residual floor, which is O(eps^2) in dp.
	std::vector<double> p;
	if(!pressures(x, p)) throw SolverError("correction: nonpositive density", out.report.residual);
	std::vector<double> un(nf);
	for(int s = 0; s < nf; s++) un[s] = normal_velocity(p, s);
	const Eigen::VectorXd& rho = x;

	out.rho.assign(rho.data(), rho.data() + nc);
	for(int k = 0; k < nc; k++)
		if(!(out.rho[k] > 0)) throw SolverError("correction: nonpositive density in cell " + std::to_string(k), -1);
	out.u = ut;
	for(int s : mesh.internal_faces()) {
		const Vec2& n = mesh.face(s).normal;
		out.u[s] = ut[s] + n*(un[s] - dot(ut[s], n));
	}
	return out;
}

SolverState finish_state(const StaggeredMesh& mesh, const SolverState& s, const SchemeConfig& cfg,
                         CellField rho, FaceVectorField u)
{
	SolverState out;
	out.rho_prev = s.rho;
	out.rho = std::move(rho);
	out.u = std::move(u);
	out.n = s.n + 1;
	out.t = s.t + cfg.dt;
	out.fluxes = primal_mass_fluxes(mesh, out.rho, out.u, cfg.bc);
	out.dual = dual_fluxes(mesh, out.fluxes);
	return out;
}

double mass_residual_norm(const StaggeredMesh& mesh, const CellField& rho_n, const SolverState& next, double dt)
{
	const CellField d = mass_divergence(mesh, next.fluxes);
	double r = 0, m = 0;
	for(int k = 0; k < mesh.num_cells(); k++) {
		r = std::max(r, std::abs(next.rho[k] - rho_n[k] + dt*d[k]));
		m = std::max(m, next.rho[k]);
	}
	return r/m;
}

// Rounding floor of the velocity correction: pressure differences carry relative errors of a few ulps
double velocity_noise_floor(const StaggeredMesh& mesh, const SchemeConfig& cfg, const CellField& rho,
                            const std::vector<double>& w)
{
	double pmax = 0, ratio = 0, wmin = inf;
	for(double r : rho) pmax = std::max(pmax, std::abs(cfg.eos.p(r)));
	for(int s : mesh.internal_faces()) {
		ratio = std::max(ratio, mesh.face(s).length/mesh.face(s).diamond);
		wmin = std::min(wmin, w[s]);
	}
	return 16*DBL_EPSILON*pmax*ratio*cfg.dt/(cfg.eps*cfg.eps*wmin);
}

}

CellField cell_averages(const StaggeredMesh& mesh, const ScalarInit& f)
{
	const double g = 1/std::sqrt(3.0);
	CellField out(mesh.num_cells());
	for(int k = 0; k < mesh.num_cells(); k++) {
		const Cell& c = mesh.cell(k);
		double acc = 0;
		for(double a : {-g, g})
			for(double b : {-g, g}) acc += f({c.center.x + 0.5*a*c.hx, c.center.y + 0.5*b*c.hy});
		out[k] = 0.25*acc;
	}
	return out;
}

FaceVectorField face_averages(const StaggeredMesh& mesh, const VectorInit& f)
{
	FaceVectorField out(mesh.num_faces());
	for(int s = 0; s < mesh.num_faces(); s++) {
		const Face& fc = mesh.face(s);
		Vec2 acc;
		for(int q = 0; q < 5; q++) {
			const double t = 0.5*(gauss5_x[q] + 1);
			acc += (0.5*gauss5_w[q])*f(fc.p0 + t*(fc.p1 - fc.p0));
		}
		out[s] = acc;
	}
	return out;
}

FaceVectorField diamond_averages(const StaggeredMesh& mesh, const VectorInit& f)
{
	FaceVectorField out(mesh.num_faces());
	for(int s : mesh.internal_faces()) {
		const Face& fc = mesh.face(s);
		Vec2 acc;
		for(int side = 0; side < 2; side++)
			acc += triangle_integral(f, mesh.cell(fc.cells[side]).center, fc.p0, fc.p1);
		out[s] = acc*(1/fc.diamond);
	}
	return out;
}

SolverState init_implicit(const StaggeredMesh& mesh, const ScalarInit& rho0, const VectorInit& u0)
{
	SolverState s;
	s.rho = cell_averages(mesh, rho0);
	for(int k = 0; k < mesh.num_cells(); k++)
		if(!(s.rho[k] > 0)) throw std::domain_error("init_implicit: nonpositive initial density in cell " + std::to_string(k));
	s.rho_prev = s.rho;
	s.u = diamond_averages(mesh, u0);
	s.fluxes = primal_mass_fluxes(mesh, s.rho, s.u);
	s.dual = dual_fluxes(mesh, s.fluxes);
	return s;
}

SolverState init_pressure_correction(const StaggeredMesh& mesh, const ScalarInit& rho0, const VectorInit& u0,
                                     double dt, const BoundaryData& bc, const VectorInit& boundary_velocity)
{
	if(!(dt > 0)) throw std::invalid_argument("init_pressure_correction: dt must be positive");
	SolverState s;
	s.rho = cell_averages(mesh, rho0);
	for(int k = 0; k < mesh.num_cells(); k++)
		if(!(s.rho[k] > 0))
			throw std::domain_error("init_pressure_correction: nonpositive initial density in cell " + std::to_string(k));
	s.u = face_averages(mesh, u0);
	for(int f : mesh.external_faces())
		s.u[f] = boundary_velocity ? boundary_velocity(mesh.face(f).center) : Vec2{};
	s.fluxes = primal_mass_fluxes(mesh, s.rho, s.u, bc);
	s.dual = dual_fluxes(mesh, s.fluxes);
	const CellField d = mass_divergence(mesh, s.fluxes);
	s.rho_prev.resize(s.rho.size());
	for(int k = 0; k < mesh.num_cells(); k++) {
		s.rho_prev[k] = s.rho[k] + dt*d[k];
		if(!(s.rho_prev[k] > 0))
			throw std::domain_error("init_pressure_correction: rho^{-1} is not positive in cell " + std::to_string(k)
			                        + "; reduce dt or the Mach number");
	}
	return s;
}

StepResult step_pressure_correction(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg,
                                    const RigidityMatrix& a)
{
	const double dt = cfg.dt, e2 = cfg.eps*cfg.eps;
	const std::vector<double> rd = dual_density(mesh, s.rho);
	const std::vector<double> rdp = dual_density(mesh, s.rho_prev);
	const CellField p = pressure(s.rho, cfg.eos);
	const FaceVectorField gp = pressure_gradient(mesh, p);
	FaceVectorField gbar(mesh.num_faces());
	for(int f : mesh.internal_faces()) gbar[f] = gp[f]*std::sqrt(rd[f]/rdp[f]);

	std::vector<double> diag(mesh.num_faces(), 0.0);
	for(int f : mesh.internal_faces()) diag[f] = mesh.face(f).diamond*rd[f]/dt;
	SparseOperator M;
	Eigen::VectorXd rhs;
	assemble_momentum(mesh, s.dual, cfg.convection, diag, a, s.u, M, rhs);
	const FaceVectorField src = source_at(cfg, mesh, s.t + dt);
	for(int f : mesh.internal_faces()) {
		const int r = mesh.face(f).interior_index;
		const double D = mesh.face(f).diamond;
		const Vec2 v = (D*rdp[f]/dt)*s.u[f] - (D/e2)*gbar[f] + D*src[f];
		rhs[2*r] += v.x;
		rhs[2*r+1] += v.y;
	}
	StepResult res;
	const Eigen::VectorXd x = linear_solve(M, rhs, cfg.linear, &res.prediction);
	res.u_tilde = s.u;
	unpack_internal(mesh, x, res.u_tilde);

	Correction c = correct(mesh, cfg, s.rho, rd, &gbar, res.u_tilde, s.rho);
	res.correction = c.report;
	res.state = finish_state(mesh, s, cfg, std::move(c.rho), std::move(c.u));
	res.coupled_residual = mass_residual_norm(mesh, s.rho, res.state, dt);
	return res;
}

StepResult step_semi_implicit(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg,
                              const RigidityMatrix& a)
{
	const double dt = cfg.dt;
	const std::vector<double> rd = dual_density(mesh, s.rho);
	const std::vector<double> rdp = dual_density(mesh, s.rho_prev);
	const FaceVectorField conv = momentum_convection(mesh, s.dual, s.u, ConvectionMode::upwind);
	const FaceVectorField au = apply_rigidity(mesh, a, s.u);
	const FaceVectorField src = source_at(cfg, mesh, s.t + dt);

	StepResult res;
	res.u_tilde = s.u;
	for(int f : mesh.internal_faces()) {
		const double D = mesh.face(f).diamond;
		const Vec2 m = (D*rdp[f])*s.u[f] - dt*(D*conv[f] + au[f]) + (dt*D)*src[f];
		res.u_tilde[f] = m*(1/(D*rd[f]));
	}
	Correction c = correct(mesh, cfg, s.rho, rd, nullptr, res.u_tilde, s.rho);
	res.correction = c.report;
	res.state = finish_state(mesh, s, cfg, std::move(c.rho), std::move(c.u));
	res.coupled_residual = mass_residual_norm(mesh, s.rho, res.state, dt);
	return res;
}

namespace {

// Residual of the implicit momentum and mass equations, in velocity and relative density units
Eigen::VectorXd implicit_residual(const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a,
                                  const SolverState& s, const std::vector<double>& rd_n, const FaceVectorField& src,
                                  const CellField& rho, const FaceVectorField& u)
{
	const int nc = mesh.num_cells();
	const double dt = cfg.dt;
	Eigen::VectorXd r(nc + 2*mesh.num_internal_faces());
	for(int k = 0; k < nc; k++)
		if(!(rho[k] > 0) || !std::isfinite(rho[k])) return Eigen::VectorXd::Constant(r.size(), inf);
	const PrimalFluxes fl = primal_mass_fluxes(mesh, rho, u, cfg.bc);
	const CellField d = mass_divergence(mesh, fl);
	double rmax = 0, umax = 1;
	for(int k = 0; k < nc; k++) rmax = std::max(rmax, rho[k]);
	for(int k = 0; k < nc; k++) r[k] = (rho[k] - s.rho[k] + dt*d[k])/rmax;
	for(int f : mesh.internal_faces()) umax = std::max(umax, norm(u[f]));

	const std::vector<double> rd = dual_density(mesh, rho);
	const FaceVectorField conv = momentum_convection(mesh, dual_fluxes(mesh, fl), u, cfg.convection);
	const FaceVectorField au = apply_rigidity(mesh, a, u);
	const FaceVectorField gp = pressure_gradient(mesh, pressure(rho, cfg.eos));
	const double e2 = cfg.eps*cfg.eps;
	for(int f : mesh.internal_faces()) {
		const double D = mesh.face(f).diamond;
		const Vec2 m = (D/dt)*(rd[f]*u[f] - rd_n[f]*s.u[f]) + D*conv[f] + au[f] + (D/e2)*gp[f] - D*src[f];
		const double scale = dt/(D*rd[f]*umax);
		const int q = mesh.face(f).interior_index;
		r[nc + 2*q] = m.x*scale;
		r[nc + 2*q + 1] = m.y*scale;
	}
	return r;
}

}

StepResult step_implicit(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg,
                         const RigidityMatrix& a)
{
	const int nc = mesh.num_cells();
	const double dt = cfg.dt, e2 = cfg.eps*cfg.eps;
	const std::vector<double> rd_n = dual_density(mesh, s.rho);
	const FaceVectorField src = source_at(cfg, mesh, s.t + dt);

	auto unpack = [&](const Eigen::VectorXd& x, CellField& rho, FaceVectorField& u) {
		rho.assign(x.data(), x.data() + nc);
		u = s.u;
		unpack_internal(mesh, x.segment(nc, x.size() - nc), u);
	};
	auto pack = [&](const CellField& rho, const FaceVectorField& u) {
		Eigen::VectorXd x(nc + 2*mesh.num_internal_faces());
		for(int k = 0; k < nc; k++) x[k] = rho[k];
		x.segment(nc, x.size() - nc) = pack_internal(mesh, u);
		return x;
	};

	StepResult res;
	// one pass: momentum predictor with frozen density, fluxes and pressure, then the pressure/density correction
	auto sweep = [&](const CellField& rho, const FaceVectorField& u, FaceVectorField& ut, Correction& c) {
		const std::vector<double> rd = dual_density(mesh, rho);
		const DualFluxTable dual = dual_fluxes(mesh, primal_mass_fluxes(mesh, rho, u, cfg.bc));
		const FaceVectorField gp = pressure_gradient(mesh, pressure(rho, cfg.eos));
		std::vector<double> diag(mesh.num_faces(), 0.0);
		for(int f : mesh.internal_faces()) diag[f] = mesh.face(f).diamond*rd[f]/dt;
		SparseOperator M;
		Eigen::VectorXd rhs;
		assemble_momentum(mesh, dual, cfg.convection, diag, a, s.u, M, rhs);
		for(int f : mesh.internal_faces()) {
			const int r = mesh.face(f).interior_index;
			const double D = mesh.face(f).diamond;
			const Vec2 v = (D*rd_n[f]/dt)*s.u[f] - (D/e2)*gp[f] + D*src[f];
			rhs[2*r] += v.x;
			rhs[2*r+1] += v.y;
		}
		const Eigen::VectorXd x = linear_solve(M, rhs, cfg.linear, &res.prediction);
		ut = s.u;
		unpack_internal(mesh, x, ut);
		c = correct(mesh, cfg, s.rho, rd, &gp, ut, rho);
		res.correction = c.report;
	};

	auto update = [&](const Eigen::VectorXd& x) {
		CellField rho;
		FaceVectorField u, ut;
		unpack(x, rho, u);
		Correction c;
		sweep(rho, u, ut, c);
		return pack(c.rho, c.u);
	};
	auto residual = [&](const Eigen::VectorXd& x) {
		CellField rho;
		FaceVectorField u;
		unpack(x, rho, u);
		return implicit_residual(mesh, cfg, a, s, rd_n, src, rho, u);
	};

	NonlinearOptions opts = cfg.outer;
	opts.rtol = std::max(opts.rtol, velocity_noise_floor(mesh, cfg, s.rho, rd_n));
	opts.atol = 0;
	Eigen::VectorXd x = fixed_point_solve(residual, update, pack(s.rho, s.u), opts, 1.0, res.outer);
	res.outer_iters = res.outer.iterations;
	if(!res.outer.converged)
		throw SolverError("implicit step: coupled iteration did not converge", res.outer.residual);

	// finish with an undamped pass so the mass balance is exact for the returned pair
	CellField rho;
	FaceVectorField u, ut;
	unpack(x, rho, u);
	Correction c;
	sweep(rho, u, ut, c);
	res.outer_iters++;
	res.state = finish_state(mesh, s, cfg, std::move(c.rho), std::move(c.u));
	res.u_tilde = res.state.u;
	res.coupled_residual = implicit_residual(mesh, cfg, a, s, rd_n, src, res.state.rho, res.state.u)
		.lpNorm<Eigen::Infinity>();
	return res;
}

StepResult step(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a)
{
	switch(cfg.kind) {
	case SchemeKind::implicit: return step_implicit(s, mesh, cfg, a);
	case SchemeKind::pressure_correction: return step_pressure_correction(s, mesh, cfg, a);
	case SchemeKind::semi_implicit: return step_semi_implicit(s, mesh, cfg, a);
	case SchemeKind::incomp_implicit: return step_incompressible(s, mesh, cfg, a, IncompressibleVariant::implicit);
	case SchemeKind::incomp_pc: return step_incompressible(s, mesh, cfg, a, IncompressibleVariant::pc);
	case SchemeKind::incomp_semi: return step_incompressible(s, mesh, cfg, a, IncompressibleVariant::semi);
	}
	throw std::logic_error("step: unknown scheme");
}

MeshCflConstants mesh_cfl_constants(const StaggeredMesh& mesh)
{
	double ratio = 0, dmin = inf;
	for(int s : mesh.internal_faces()) {
		const Face& f = mesh.face(s);
		dmin = std::min(dmin, f.diamond);
		for(int side = 0; side < 2; side++)
			for(int g : mesh.cell(f.cells[side]).faces) ratio = std::max(ratio, mesh.face(g).length/f.diamond);
	}
	return {mesh.h()*ratio, mesh.h()/std::sqrt(dmin)};
}

double mach_uniform_dt(const StaggeredMesh& mesh, double rho_a, double C0, double eta)
{
	if(!(eta > 0 && eta < 1)) throw std::invalid_argument("mach_uniform_dt: eta must lie in (0,1)");
	if(!(C0 > 0)) throw std::invalid_argument("mach_uniform_dt: C0 must be positive");
	const MeshCflConstants k = mesh_cfl_constants(mesh);
	const double d = 2, h = mesh.h();
	const double C = 1/(2*std::sqrt(2.0)*d*k.C1*k.C2*std::sqrt(C0));
	double diff = inf;
	if(rho_a > 0)
		for(int s : mesh.internal_faces()) diff = std::min(diff, 2*mesh.face(s).diamond/rho_a);
	return (1 - eta)*std::min(C*h*h, diff);
}

CflBudget cfl_budget(const SolverState& s, const StaggeredMesh& mesh, double rho_a, double C0, double eta)
{
	CflBudget b;
	b.rho_a = rho_a;
	b.eta = eta;
	b.C0 = C0;
	const MeshCflConstants k = mesh_cfl_constants(mesh);
	b.C1 = k.C1;
	b.C2 = k.C2;
	if(C0 > 0) b.C = 1/(2*std::sqrt(2.0)*2*k.C1*k.C2*std::sqrt(C0));
	const std::vector<double> rd = dual_density(mesh, s.rho);
	for(int f : mesh.internal_faces()) {
		double neg = 0;
		for(const DiamondLink& l : mesh.diamond_links(f)) neg += std::max(0.0, -l.sign*s.dual.f[l.dual]);
		const double m = rd[f]*mesh.face(f).diamond;
		if(neg > 0) b.dt_convective = std::min(b.dt_convective, m/neg);
		if(rho_a > 0) b.dt_diffusive = std::min(b.dt_diffusive, 2*m/rho_a);
		if(2*neg + rho_a > 0) b.dt_combined = std::min(b.dt_combined, 4*m/(2*neg + rho_a));
	}
	if(C0 > 0 && eta > 0 && eta < 1) b.dt_mach_uniform = mach_uniform_dt(mesh, rho_a, C0, eta);
	return b;
}

CflBudget cfl_budget(const SolverState& s, const StaggeredMesh& mesh, const RigidityMatrix& a, double C0, double eta)
{
	return cfl_budget(s, mesh, spectral_radius(a.a_int).conservative, C0, eta);
}

double initial_energy(const StaggeredMesh& mesh, const SolverState& s0, double eps, const EosParams& eos)
{
	const std::vector<double> rdp = dual_density(mesh, s0.rho_prev.empty() ? s0.rho : s0.rho_prev);
	double ke = 0, pi = 0;
	for(int f : mesh.internal_faces()) ke += 0.5*mesh.face(f).diamond*rdp[f]*norm2(s0.u[f]);
	for(int k = 0; k < mesh.num_cells(); k++) pi += mesh.cell(k).area*eos.pi(s0.rho[k]);
	return ke + pi/(eps*eps);
}

}
