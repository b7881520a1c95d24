#include "lowmach/vortex.hpp"

#include <cmath>
#include <stdexcept>

namespace lowmach {

void VortexParams::validate() const
{
	if(!(c_M > 0)) throw std::invalid_argument("vortex: c_M must be positive");
	if(!(gamma > 1)) throw std::invalid_argument("vortex: gamma must exceed 1");
	if(!(t_end > 0)) throw std::invalid_argument("vortex: t_end must be positive");
	if(!(v_max > 0)) throw std::invalid_argument("vortex: v_max must be positive");
	if(!(domain.x1 > domain.x0 && domain.y1 > domain.y0)) throw std::invalid_argument("vortex: degenerate domain");
}

VortexShape vortex_profile(double xi)
{
	if(xi < 0) throw std::domain_error("vortex_profile: xi must be nonnegative");
	if(xi >= 1) return {0, 10.0/63};
	const double s = xi*(1 - xi);
	const double x2 = xi*xi, x5 = x2*x2*xi;
	const double F = 100*x5*(1.0/5 - xi*(2.0/3 - xi*(6.0/7 - xi*(0.5 - xi/9))));
	return {10*s*s, F};
}

namespace {

double f_prime(double xi) { return xi >= 1 ? 0 : 10*(2*xi - 6*xi*xi + 4*xi*xi*xi); }
double f_second(double xi) { return xi >= 1 ? 0 : 10*(2 - 12*xi + 12*xi*xi); }

double g_base(double xi, const VortexParams& p)
{
	return (p.gamma - 1)/(2*p.gamma)*(vortex_profile(xi).F + p.c_M);
}

}

double vortex_g(double xi, const VortexParams& p)
{
	return std::pow(g_base(xi, p), p.gamma/(p.gamma - 1));
}

double vortex_g_prime(double xi, const VortexParams& p)
{
	const double f = vortex_profile(xi).f;
	// d/dxi of base^(gamma/(gamma-1)) with base' = (gamma-1)/(2 gamma) f^2
	return 0.5*std::pow(g_base(xi, p), 1/(p.gamma - 1))*f*f;
}

ExactState exact_solution(const Vec2& x, double t, const VortexParams& p)
{
	const Vec2 y = x - p.x0 - t*p.a;
	const double xi = norm2(y);
	const double g = vortex_g(xi, p);
	const double f = vortex_profile(xi).f;
	return {std::pow(g, 1/p.gamma), g, Vec2{-f*y.y, f*y.x} + p.a};
}

double p_ext(const VortexParams& p) { return vortex_g(1.0, p); }
double rho_ext(const VortexParams& p) { return std::pow(p_ext(p), 1/p.gamma); }

MachRow mach_table(double c_M, double gamma)
{
	if(!(c_M > 0)) throw std::invalid_argument("mach_table: c_M must be positive");
	VortexParams p;
	p.c_M = c_M;
	p.gamma = gamma;
	const double c = std::sqrt(gamma*std::pow(p_ext(p), (gamma - 1)/gamma));
	return {c, 1/c};
}

const std::vector<double>& benchmark_pressure_levels()
{
	static const std::vector<double> levels{1, 1e2, 1e4, 1e6, 1e8};
	return levels;
}

FaceVectorField exact_face_velocity(const StaggeredMesh& mesh, const VortexParams& p, double t)
{
	FaceVectorField u(mesh.num_faces());
	for(int s = 0; s < mesh.num_faces(); s++) u[s] = exact_solution(mesh.face(s).center, t, p).u;
	return u;
}

VortexForcing forcing_terms(const StaggeredMesh& mesh, const VortexParams& p)
{
	p.validate();
	VortexForcing out;
	const double re = rho_ext(p);
	if(p.mode == ViscosityMode::euler_artificial) {
		out.mu = re*p.v_max*mesh.space_step()/10;
		return out;
	}
	out.mu = re/50;
	const double mu = out.mu;
	if(p.analytic_source) {
		// -mu Laplacian of the exact velocity; the translated field is divergence free
		out.source = [&mesh, p, mu](double t) {
			FaceVectorField s(mesh.num_faces());
			for(int f : mesh.internal_faces()) {
				const Vec2 y = mesh.face(f).center - p.x0 - t*p.a;
				const double xi = norm2(y);
				const double lap = 4*xi*f_second(xi) + 8*f_prime(xi);
				s[f] = -mu*lap*Vec2{-y.y, y.x};
			}
			return s;
		};
		return out;
	}
	auto a = std::make_shared<RigidityMatrix>(assemble_rigidity(mesh, mu, 0));
	out.source = [&mesh, p, a](double t) {
		FaceVectorField s = apply_rigidity(mesh, *a, exact_face_velocity(mesh, p, t));
		for(int f : mesh.internal_faces()) s[f] = s[f]*(1/mesh.face(f).diamond);
		return s;
	};
	return out;
}

SchemeConfig vortex_config(const StaggeredMesh& mesh, const VortexParams& p, double dt)
{
	p.validate();
	SchemeConfig cfg;
	cfg.kind = SchemeKind::pressure_correction;
	cfg.eps = 1;
	cfg.dt = dt;
	cfg.t_end = p.t_end;
	cfg.eos = EosParams(p.gamma);
	cfg.bc.rho_ext = rho_ext(p);
	const VortexForcing fr = forcing_terms(mesh, p);
	cfg.mu = fr.mu;
	cfg.lambda = fr.lambda;
	cfg.source = fr.source;
	cfg.convection = ConvectionMode::centered;
	return cfg;
}

SolverState vortex_initial_state(const StaggeredMesh& mesh, const VortexParams& p, double dt)
{
	return init_pressure_correction(
		mesh, [&p](const Vec2& x) { return exact_solution(x, 0, p).rho; },
		[&p](const Vec2& x) { return exact_solution(x, 0, p).u; }, dt, BoundaryData{rho_ext(p)},
		[&p](const Vec2& x) { return exact_solution(x, 0, p).u; });
}

VortexErrors error_norms(const StaggeredMesh& mesh, const SolverState& s, const VortexParams& p, double t,
                         const EosParams& eos)
{
	VortexErrors e;
	for(int f : mesh.internal_faces()) {
		// the diamond of a face of a uniform grid is symmetric about the face center
		const Vec2 ue = exact_solution(mesh.face(f).center, t, p).u;
		e.velocity_l1 += mesh.face(f).diamond*norm(s.u[f] - ue);
	}
	for(int k = 0; k < mesh.num_cells(); k++)
		e.pressure_l1 += mesh.cell(k).area*std::abs(eos.p(s.rho[k]) - exact_solution(mesh.cell(k).center, t, p).p);
	e.pressure_scaled = e.pressure_l1/mach_table(p.c_M, p.gamma).c;
	return e;
}

int nearest_face_row(const StaggeredMesh& mesh, double line)
{
	const std::vector<double>& ys = mesh.ys();
	int best = 0;
	for(int j = 1; j < static_cast<int>(ys.size()); j++)
		if(std::abs(ys[j] - line) < std::abs(ys[best] - line)) best = j;
	return best;
}

std::vector<ProfilePoint> velocity_profile(const StaggeredMesh& mesh, const SolverState& s, const VortexParams& p,
                                           double t, double line)
{
	const int j = nearest_face_row(mesh, line);
	std::vector<ProfilePoint> out;
	for(int i = 0; i < mesh.nx(); i++) {
		const int f = mesh.hface_index(i, j);
		const Vec2 c = mesh.face(f).center;
		out.push_back({c.x, s.u[f].y, exact_solution(c, t, p).u.y});
	}
	return out;
}

std::vector<ProfilePoint> pressure_profile(const StaggeredMesh& mesh, const SolverState& s, const VortexParams& p,
                                           double t, double line, const EosParams& eos)
{
	const int j = nearest_face_row(mesh, line);
	const double c = mach_table(p.c_M, p.gamma).c, pe = p_ext(p);
	std::vector<ProfilePoint> out;
	for(int i = 0; i < mesh.nx(); i++) {
		const Face& f = mesh.face(mesh.hface_index(i, j));
		double num = 0;
		int n = 0;
		for(int k : f.cells)
			if(k >= 0) {
				num += eos.p(s.rho[k]);
				n++;
			}
		num /= n;
		out.push_back({f.center.x, (num - pe)/c, (exact_solution(f.center, t, p).p - pe)/c});
	}
	return out;
}

}
