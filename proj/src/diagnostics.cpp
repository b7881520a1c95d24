#include "lowmach/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lowmach {

namespace {

FaceVectorField source_at(const SchemeConfig& cfg, const StaggeredMesh& mesh, double t)
{
	if(!cfg.source) return FaceVectorField(mesh.num_faces());
	return cfg.source(t);
}

// sum_eps F u_eps . u_sigma - 1/2 sum_eps F |u_sigma|^2; equals 1/2 sum F u_sigma . u_sigma' for centered convection
double convection_work(const StaggeredMesh& mesh, const DualFluxTable& dual, const FaceVectorField& u, int s,
                       ConvectionMode mode)
{
	double acc = 0;
	for(const DiamondLink& l : mesh.diamond_links(s)) {
		const double F = l.sign*dual.f[l.dual];
		Vec2 ue;
		if(mode == ConvectionMode::centered) ue = 0.5*(u[s] + u[l.neighbor]);
		else ue = F >= 0 ? u[s] : u[l.neighbor];
		acc += F*dot(ue, u[s]) - 0.5*F*norm2(u[s]);
	}
	return acc;
}

double negative_flux_sum(const StaggeredMesh& mesh, const DualFluxTable& dual, int s)
{
	double neg = 0;
	for(const DiamondLink& l : mesh.diamond_links(s)) neg += std::max(0.0, -l.sign*dual.f[l.dual]);
	return neg;
}

// max of psi'' on [a,b], sampled (exact at the ends for the gamma law, which is monotone)
double psi_dd_max(const EosParams& eos, double a, double b)
{
	if(a > b) std::swap(a, b);
	double m = std::max(eos.psi_dd(a), eos.psi_dd(b));
	if(!eos.is_gamma_law())
		for(int i = 1; i < 8; i++) m = std::max(m, eos.psi_dd(a + (b - a)*i/8.0));
	return m*(1 + 1e-9);
}

bool homogeneous_boundary(const StaggeredMesh& mesh, const FaceVectorField& u)
{
	for(int s : mesh.external_faces())
		if(u[s].x != 0 || u[s].y != 0) return false;
	return true;
}

double source_work(const StaggeredMesh& mesh, const FaceVectorField& src, const FaceVectorField& v, double dt)
{
	double w = 0;
	for(int s : mesh.internal_faces()) w += dt*mesh.face(s).diamond*dot(src[s], v[s]);
	return w;
}

double gradient_energy(const StaggeredMesh& mesh, const FaceVectorField& gp, const std::vector<double>& rd)
{
	double e = 0;
	for(int s : mesh.internal_faces()) e += mesh.face(s).diamond*norm2(gp[s])/rd[s];
	return e;
}

}

double kinetic_energy(const StaggeredMesh& mesh, const std::vector<double>& rho_dual, const FaceVectorField& u)
{
	double e = 0;
	for(int s : mesh.internal_faces()) e += mesh.face(s).diamond*rho_dual[s]*norm2(u[s]);
	return 0.5*e;
}

double elastic_potential(const StaggeredMesh& mesh, const CellField& rho, double eps, const EosParams& eos)
{
	double e = 0;
	for(int k = 0; k < mesh.num_cells(); k++) e += mesh.cell(k).area*eos.pi(rho[k]);
	return e/(eps*eps);
}

PressureDeviation pressure_deviation(const StaggeredMesh& mesh, const CellField& rho, const EosParams& eos, double eps)
{
	PressureDeviation out;
	const CellField p = pressure(rho, eos);
	const double m = cell_mean(mesh, p);
	out.dp.resize(p.size());
	for(size_t k = 0; k < p.size(); k++) out.dp[k] = (p[k] - m)/(eps*eps);
	out.mean = cell_mean(mesh, out.dp);
	out.l2 = cell_l2(mesh, out.dp);
	out.linf = cell_linf(out.dp);
	return out;
}

KineticCheck kinetic_energy_check(const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a,
                                  const SolverState& before, const StepResult& result, double rho_a)
{
	if(is_incompressible(cfg.kind))
		throw std::invalid_argument("kinetic_energy_check: no compressible balance for " + to_string(cfg.kind));
	KineticCheck out;
	out.residual.assign(mesh.num_faces(), 0.0);
	out.min_face_remainder = CflBudget::unbounded;
	const double dt = cfg.dt, e2 = cfg.eps*cfg.eps;
	const SolverState& next = result.state;
	const FaceVectorField& u = next.u;
	const FaceVectorField& un = before.u;
	const FaceVectorField src = source_at(cfg, mesh, next.t);
	const FaceVectorField gp = pressure_gradient(mesh, pressure(next.rho, cfg.eos));
	const std::vector<double> rdn = dual_density(mesh, before.rho);

	if(cfg.kind == SchemeKind::implicit) {
		const std::vector<double> rd1 = dual_density(mesh, next.rho);
		const FaceVectorField au = apply_rigidity(mesh, a, u);
		for(int s : mesh.internal_faces()) {
			const double D = mesh.face(s).diamond;
			const double R = rdn[s]*norm2(u[s] - un[s])/(2*dt);
			const double r = 0.5*D*(rd1[s]*norm2(u[s]) - rdn[s]*norm2(un[s]))
				+ dt*convection_work(mesh, next.dual, u, s, cfg.convection) + dt*dot(au[s], u[s])
				+ dt*D*dot(gp[s], u[s])/e2 + dt*D*R - dt*D*dot(src[s], u[s]);
			out.residual[s] = r;
			out.lhs += r;
			out.remainder += dt*D*R;
			out.min_face_remainder = std::min(out.min_face_remainder, R);
			out.max_abs = std::max(out.max_abs, std::abs(r));
		}
		return out;
	}

	const std::vector<double> rdp = dual_density(mesh, before.rho_prev);
	const FaceVectorField& ut = result.u_tilde;
	if(cfg.kind == SchemeKind::pressure_correction) {
		const FaceVectorField gpo = pressure_gradient(mesh, pressure(before.rho, cfg.eos));
		const FaceVectorField au = apply_rigidity(mesh, a, ut);
		for(int s : mesh.internal_faces()) {
			const double D = mesh.face(s).diamond;
			const double R = rdp[s]*norm2(ut[s] - un[s])/(2*dt);
			const double r = 0.5*D*(rdn[s]*norm2(u[s]) - rdp[s]*norm2(un[s]))
				+ dt*convection_work(mesh, before.dual, ut, s, cfg.convection) + dt*dot(au[s], ut[s])
				+ dt*D*dot(gp[s], u[s])/e2
				+ dt*dt*D/(2*e2*e2)*(norm2(gp[s])/rdn[s] - norm2(gpo[s])/rdp[s])
				+ dt*D*R - dt*D*dot(src[s], ut[s]);
			out.residual[s] = r;
			out.lhs += r;
			out.remainder += dt*D*R;
			out.min_face_remainder = std::min(out.min_face_remainder, R);
			out.max_abs = std::max(out.max_abs, std::abs(r));
		}
		return out;
	}

	// semi-implicit: an inequality once summed over the faces
	out.inequality = true;
	for(int s : mesh.internal_faces()) {
		const double D = mesh.face(s).diamond;
		const double coef = rdn[s]*D/(2*dt) - 0.5*negative_flux_sum(mesh, before.dual, s) - 0.25*rho_a;
		const double RE = coef*norm2(ut[s] - un[s]);
		const double r = 0.5*D*(rdn[s]*norm2(u[s]) - rdp[s]*norm2(un[s])) + dt*D*dot(gp[s], u[s])/e2
			+ dt*dt*D/(2*e2*e2)*norm2(gp[s])/rdn[s] + dt*RE - dt*D*dot(src[s], ut[s]);
		out.residual[s] = r;
		out.lhs += r;
		out.remainder += dt*RE;
		out.max_abs = std::max(out.max_abs, std::abs(r));
	}
	out.min_face_remainder = 0;
	return out;
}

RenormCheck renormalization_check(const StaggeredMesh& mesh, const SchemeConfig& cfg, const SolverState& before,
                                  const StepResult& result)
{
	const int nc = mesh.num_cells();
	const CellField& r1 = result.state.rho;
	const CellField& r0 = before.rho;
	const FaceVectorField& u = result.state.u;
	const EosParams& eos = cfg.eos;
	for(int k = 0; k < nc; k++)
		if(!(r1[k] > 0) || !(r0[k] > 0)) throw std::domain_error("renormalization_check: nonpositive density");
	const double dt = cfg.dt, e2 = cfg.eps*cfg.eps, p1 = eos.p(1.0);

	CellField flux(nc, 0.0), div(nc, 0.0), jump(nc, 0.0);
	for(int s = 0; s < mesh.num_faces(); s++) {
		const Face& f = mesh.face(s);
		const double un = dot(u[s], f.normal);
		if(un == 0) continue;
		const int up = un > 0 ? f.cells[0] : f.cells[1];
		const double rs = up >= 0 ? r1[up] : cfg.bc.rho_ext;
		const double pis = eos.pi(rs);
		for(int side = 0; side < 2; side++) {
			const int k = f.cells[side];
			if(k < 0) continue;
			const double unk = side == 0 ? un : -un;
			flux[k] += f.length*pis*unk;
			div[k] += f.length*unk;
			if(unk < 0 && rs != r1[k])
				jump[k] += 0.5*f.length*(-unk)*psi_dd_max(eos, rs, r1[k])*(rs - r1[k])*(rs - r1[k]);
		}
	}
	RenormCheck out;
	out.defect.resize(nc);
	out.envelope.resize(nc);
	out.max_defect = -CflBudget::unbounded;
	out.min_defect = CflBudget::unbounded;
	out.envelope_excess = -CflBudget::unbounded;
	for(int k = 0; k < nc; k++) {
		const double K = mesh.cell(k).area;
		const double dpi = eos.pi(r1[k]) - eos.pi(r0[k]);
		const double d = (K*dpi + dt*flux[k] + dt*(eos.p(r1[k]) - p1)*div[k])/e2;
		const double dr = r1[k] - r0[k];
		const double env = (0.5*K*psi_dd_max(eos, r0[k], r1[k])*dr*dr + dt*jump[k])/e2;
		out.defect[k] = d;
		out.envelope[k] = env;
		out.total += d;
		out.max_defect = std::max(out.max_defect, d);
		out.min_defect = std::min(out.min_defect, d);
		out.envelope_excess = std::max(out.envelope_excess, -d - env);
	}
	return out;
}

std::vector<std::string> violations(const StepReport& r, const Tolerances& tol)
{
	std::vector<std::string> v;
	auto add = [&](const std::string& what, double value, double limit) {
		std::ostringstream os;
		os.precision(6);
		os << "step " << r.n << ": " << what << " = " << value << " (limit " << limit << ")";
		v.push_back(os.str());
	};
	if(!(r.min_rho > 0)) add("minimum density", r.min_rho, 0);
	if(r.max_divergence > tol.divergence) add("max |div u|", r.max_divergence, tol.divergence);
	if(r.balances) {
		const double s = r.scale;
		if(r.ke_residual > tol.kinetic*s) add("kinetic energy balance", r.ke_residual, tol.kinetic*s);
		if(r.renorm_max > tol.renorm*s) add("renormalization defect", r.renorm_max, tol.renorm*s);
		if(r.renorm_excess > tol.renorm*s) add("renormalization defect beyond Taylor bound", r.renorm_excess, tol.renorm*s);
		if(r.min_face_remainder < -tol.remainder*s) add("face remainder", r.min_face_remainder, -tol.remainder*s);
	}
	if(r.globals) {
		const double s = r.scale;
		if(r.mass_change > tol.mass) add("relative mass change", r.mass_change, tol.mass);
		if(r.entropy_lhs > tol.entropy*s) add("step entropy inequality", r.entropy_lhs, tol.entropy*s);
		if(r.cfl_required && !(r.cfl_margin >= 1)) add("stability bound dt_combined/dt", r.cfl_margin, 1);
		if(r.face_remainder < -tol.remainder*s) add("stability remainder", r.face_remainder, -tol.remainder*s);
		if(r.global_applies && r.global_entropy > r.global_bound + tol.global*std::max(1.0, r.global_bound))
			add("global entropy bound", r.global_entropy - r.global_bound, tol.global*std::max(1.0, r.global_bound));
	}
	return v;
}

EntropyAudit::EntropyAudit(const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a,
                           const SolverState& s0)
	: mesh_{mesh}, cfg_{cfg}, a_{a}
{
	homogeneous_ = homogeneous_boundary(mesh, s0.u);
	mass0_ = total_mass(mesh, s0.rho);
	if(cfg.kind == SchemeKind::semi_implicit && a.a_int.nonZeros() > 0) rho_a_ = spectral_radius(a.a_int).conservative;
	if(is_incompressible(cfg.kind)) {
		g0_ = kinetic_energy(mesh, std::vector<double>(mesh.num_faces(), 1.0), s0.u);
		return;
	}
	const double pot = elastic_potential(mesh, s0.rho, cfg.eps, cfg.eos);
	if(cfg.kind == SchemeKind::implicit) {
		g0_ = kinetic_energy(mesh, dual_density(mesh, s0.rho), s0.u) + pot;
		return;
	}
	const std::vector<double> rdp = dual_density(mesh, s0.rho_prev);
	g0_ = kinetic_energy(mesh, rdp, s0.u) + pot;
	if(cfg.kind == SchemeKind::pressure_correction) {
		const double e4 = std::pow(cfg.eps, 4);
		const FaceVectorField gp = pressure_gradient(mesh, pressure(s0.rho, cfg.eos));
		g0_ += cfg.dt*cfg.dt/(2*e4)*gradient_energy(mesh, gp, rdp);
	}
}

StepReport EntropyAudit::record(const SolverState& before, const StepResult& result, double cfl_margin)
{
	const SolverState& next = result.state;
	StepReport r;
	r.n = next.n;
	r.t = next.t;
	r.dt = cfg_.dt;
	r.mass = total_mass(mesh_, next.rho);
	r.min_rho = *std::min_element(next.rho.begin(), next.rho.end());
	r.mass_change = std::abs(r.mass - total_mass(mesh_, before.rho))/std::abs(total_mass(mesh_, before.rho));
	r.outer_iters = result.outer_iters;
	r.cfl_margin = cfl_margin;
	r.global_bound = g0_;
	const bool homogeneous = homogeneous_ && homogeneous_boundary(mesh_, next.u);

	if(is_incompressible(cfg_.kind)) {
		const std::vector<double> ones(mesh_.num_faces(), 1.0);
		r.kinetic_energy = kinetic_energy(mesh_, ones, next.u);
		for(double d : velocity_divergence(mesh_, next.u)) r.max_divergence = std::max(r.max_divergence, std::abs(d));
		if(!next.dp.empty()) {
			r.dp_l2 = cell_l2(mesh_, next.dp);
			r.dp_linf = cell_linf(next.dp);
		}
		r.global_entropy = r.kinetic_energy;
		r.scale = std::max(1.0, r.kinetic_energy);
		r.balances = false;
		r.globals = false;
		history_.push_back(r);
		return r;
	}

	const double dt = cfg_.dt, e2 = cfg_.eps*cfg_.eps, e4 = e2*e2;
	const KineticCheck kc = kinetic_energy_check(mesh_, cfg_, a_, before, result, rho_a_);
	const RenormCheck rc = renormalization_check(mesh_, cfg_, before, result);
	const FaceVectorField src = source_at(cfg_, mesh_, next.t);
	const std::vector<double> rdn = dual_density(mesh_, before.rho);
	const double pot0 = elastic_potential(mesh_, before.rho, cfg_.eps, cfg_.eos);
	const double pot1 = elastic_potential(mesh_, next.rho, cfg_.eps, cfg_.eos);
	const FaceVectorField gp1 = pressure_gradient(mesh_, pressure(next.rho, cfg_.eos));

	double ke0, ke1, extra_lhs = 0, step_sum = 0, level = 0;
	switch(cfg_.kind) {
	case SchemeKind::implicit: {
		ke0 = kinetic_energy(mesh_, rdn, before.u);
		ke1 = kinetic_energy(mesh_, dual_density(mesh_, next.rho), next.u);
		const double diss = cfg_.mu*dt*h1_seminorm_sq(mesh_, next.u);
		const double work = source_work(mesh_, src, next.u, dt);
		extra_lhs = diss - work;
		step_sum = diss - work;
		break;
	}
	case SchemeKind::pressure_correction: {
		const std::vector<double> rdp = dual_density(mesh_, before.rho_prev);
		ke0 = kinetic_energy(mesh_, rdp, before.u);
		ke1 = kinetic_energy(mesh_, rdn, next.u);
		const FaceVectorField gp0 = pressure_gradient(mesh_, pressure(before.rho, cfg_.eos));
		const double diss = cfg_.mu*dt*h1_seminorm_sq(mesh_, result.u_tilde);
		const double work = source_work(mesh_, src, result.u_tilde, dt);
		level = dt*dt/(2*e4)*gradient_energy(mesh_, gp1, rdn);
		extra_lhs = diss - work + level - dt*dt/(2*e4)*gradient_energy(mesh_, gp0, rdp);
		step_sum = diss - work;
		break;
	}
	default: {
		const std::vector<double> rdp = dual_density(mesh_, before.rho_prev);
		ke0 = kinetic_energy(mesh_, rdp, before.u);
		ke1 = kinetic_energy(mesh_, rdn, next.u);
		const double grad = dt*dt/(2*e4)*gradient_energy(mesh_, gp1, rdn);
		const double work = source_work(mesh_, src, result.u_tilde, dt);
		extra_lhs = grad - work;
		step_sum = grad - work;
		break;
	}
	}

	r.kinetic_energy = ke1;
	r.elastic_potential = pot1;
	r.ke_residual = kc.inequality ? kc.lhs : kc.max_abs;
	r.face_remainder = kc.remainder;
	r.min_face_remainder = kc.inequality ? 0 : kc.min_face_remainder;
	r.cell_remainder = -rc.total;
	r.renorm_max = rc.max_defect;
	r.renorm_excess = rc.envelope_excess;
	r.entropy_lhs = (ke1 - ke0) + (pot1 - pot0) + extra_lhs + kc.remainder - rc.total;
	cumulative_ += step_sum;
	r.global_entropy = ke1 + pot1 + level + cumulative_;
	r.scale = std::max({1.0, ke0, ke1, pot0, pot1});
	const PressureDeviation pd = pressure_deviation(mesh_, next.rho, cfg_.eos, cfg_.eps);
	r.dp_l2 = pd.l2;
	r.dp_linf = pd.linf;
	r.globals = homogeneous;
	// R_E >= 0 needs half the step of the combined bound; the global estimate holds while R_E stayed nonnegative
	if(cfg_.kind == SchemeKind::semi_implicit && !(cfl_margin >= 2 || kc.remainder >= 0)) cfl_held_ = false;
	r.global_applies = cfl_held_;
	r.cfl_required = cfg_.kind == SchemeKind::semi_implicit;
	history_.push_back(r);
	return r;
}

bool EntropyAudit::violated(const Tolerances& tol) const
{
	for(const StepReport& r : history_)
		if(!violations(r, tol).empty()) return true;
	return false;
}

void sweep_observe(SweepRecord& r, const StaggeredMesh& mesh, const SolverState& s, const EosParams& eos)
{
	CellField w(s.rho.size());
	for(size_t k = 0; k < w.size(); k++) w[k] = s.rho[k] - 1;
	r.rho_l1 = std::max(r.rho_l1, cell_lq(mesh, w, 1));
	r.rho_l2 = std::max(r.rho_l2, cell_l2(mesh, w));
	r.rho_lgamma = std::max(r.rho_lgamma, cell_lq(mesh, w, eos.gamma));
	r.rho_lq = std::max(r.rho_lq, cell_lq(mesh, w, std::min(2.0, eos.gamma)));
	const PressureDeviation pd = pressure_deviation(mesh, s.rho, eos, r.eps);
	r.dp_l2 = std::max(r.dp_l2, pd.l2);
	r.dp_linf = std::max(r.dp_linf, pd.linf);
	r.steps = s.n;
}

void sweep_finish(SweepRecord& r, const StaggeredMesh& mesh, const SolverState& s, const SolverState& reference,
                  const EosParams& eos)
{
	FaceVectorField du(s.u.size());
	for(size_t f = 0; f < du.size(); f++) du[f] = s.u[f] - reference.u[f];
	r.dist_u_l2 = face_l2(mesh, du);
	const PressureDeviation pd = pressure_deviation(mesh, s.rho, eos, r.eps);
	CellField dd(pd.dp.size());
	for(size_t k = 0; k < dd.size(); k++) dd[k] = pd.dp[k] - (reference.dp.empty() ? 0.0 : reference.dp[k]);
	r.dist_dp_l2 = cell_l2(mesh, dd);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
	if(x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
	double mx = 0, my = 0;
	const double n = static_cast<double>(x.size());
	for(size_t i = 0; i < x.size(); i++) {
		if(!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("loglog_slope: nonpositive data");
		mx += std::log(x[i])/n;
		my += std::log(y[i])/n;
	}
	double sxy = 0, sxx = 0;
	for(size_t i = 0; i < x.size(); i++) {
		const double dx = std::log(x[i]) - mx;
		sxy += dx*(std::log(y[i]) - my);
		sxx += dx*dx;
	}
	return sxy/sxx;
}

SweepSummary sweep_compare(std::vector<SweepRecord> records)
{
	if(records.empty()) throw std::invalid_argument("sweep_compare: no records");
	std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) { return a.eps > b.eps; });
	for(size_t i = 1; i < records.size(); i++)
		if(records[i].eps == records[i-1].eps || records[i].dt != records[0].dt)
			throw std::invalid_argument("sweep_compare: inconsistent run configurations");
	SweepSummary out;
	out.records = records;
	if(records.size() >= 2) {
		std::vector<double> x, y;
		for(const SweepRecord& r : records) {
			x.push_back(r.eps);
			y.push_back(r.rho_l2);
		}
		out.slope_rho_l2 = loglog_slope(x, y);
		out.has_slope = true;
	}
	double lo = CflBudget::unbounded, hi = 0;
	for(size_t i = 0; i < records.size(); i++) {
		lo = std::min(lo, records[i].dp_l2);
		hi = std::max(hi, records[i].dp_l2);
		if(i > 0 && (records[i].dist_u_l2 > records[i-1].dist_u_l2 || records[i].dist_dp_l2 > records[i-1].dist_dp_l2))
			out.distances_monotone = false;
	}
	out.dp_band = lo > 0 ? hi/lo : CflBudget::unbounded;
	out.distance_ratio = records.front().dist_u_l2 > 0 ? records.back().dist_u_l2/records.front().dist_u_l2 : 0;
	return out;
}

}
