#include "lowmach/operators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace lowmach {

PrimalFluxes primal_mass_fluxes(const StaggeredMesh& mesh, const CellField& rho, const FaceVectorField& u,
                                const BoundaryData& bc)
{
	PrimalFluxes out;
	out.phi.assign(mesh.num_faces(), 0.0);
	for(int s = 0; s < mesh.num_faces(); s++) {
		const Face& f = mesh.face(s);
		const double un = dot(u[s], f.normal);
		if(un == 0) continue;
		const int m = f.cells[0], p = f.cells[1];
		// flow along the reference normal comes from the minus side
		int up = un > 0 ? m : p;
		const double rho_up = up >= 0 ? rho[up] : bc.rho_ext;
		out.phi[s] = f.length*rho_up*un;
	}
	return out;
}

CellField mass_divergence(const StaggeredMesh& mesh, const PrimalFluxes& fluxes)
{
	CellField d(mesh.num_cells(), 0.0);
	for(int k = 0; k < mesh.num_cells(); k++) {
		double s = 0;
		for(int slot = 0; slot < 4; slot++) s += fluxes.F(mesh, k, slot);
		d[k] = s/mesh.cell(k).area;
	}
	return d;
}

CellField velocity_divergence(const StaggeredMesh& mesh, const FaceVectorField& u)
{
	CellField d(mesh.num_cells(), 0.0);
	for(int k = 0; k < mesh.num_cells(); k++) {
		double s = 0;
		for(int slot = 0; slot < 4; slot++) {
			const int f = mesh.cell(k).faces[slot];
			s += mesh.side_sign(k, f)*mesh.face(f).length*dot(u[f], mesh.face(f).normal);
		}
		d[k] = s/mesh.cell(k).area;
	}
	return d;
}

std::vector<double> dual_density(const StaggeredMesh& mesh, const CellField& rho)
{
	std::vector<double> out(mesh.num_faces(), 0.0);
	for(int s = 0; s < mesh.num_faces(); s++) {
		const Face& f = mesh.face(s);
		double m = 0;
		for(int side = 0; side < 2; side++)
			if(f.cells[side] >= 0) m += f.half_diamond[side]*rho[f.cells[side]];
		out[s] = m/f.diamond;
	}
	return out;
}

const std::array<std::array<double,4>,4>& dual_flux_pinv()
{
	// pinv of B = [[1,0,1,0],[0,1,0,1],[-1,-1,0,0],[0,0,-1,-1]] (faces x corners), transposed to corners x faces
	static const std::array<std::array<double,4>,4> p = {{
		{ 6/16.0, -2/16.0, -6/16.0,  2/16.0},
		{-2/16.0,  6/16.0, -6/16.0,  2/16.0},
		{ 6/16.0, -2/16.0,  2/16.0, -6/16.0},
		{-2/16.0,  6/16.0,  2/16.0, -6/16.0},
	}};
	return p;
}

DualFluxTable dual_fluxes(const StaggeredMesh& mesh, const PrimalFluxes& fluxes)
{
	const auto& P = dual_flux_pinv();
	DualFluxTable out;
	out.f.assign(mesh.num_dual_faces(), 0.0);
	for(int k = 0; k < mesh.num_cells(); k++) {
		double F[4], bound = 0;
		for(int slot = 0; slot < 4; slot++) {
			F[slot] = fluxes.F(mesh, k, slot);
			bound = std::max(bound, std::abs(F[slot]));
		}
		// P annihilates the constant vector, so P(xi*S - F) = -P F
		for(int c = 0; c < 4; c++) {
			double v = 0;
			for(int slot = 0; slot < 4; slot++) v -= P[c][slot]*F[slot];
			if(std::abs(v) > bound*(1 + 1e-12))
				throw std::logic_error("dual_fluxes: bound by primal fluxes violated in cell " + std::to_string(k));
			out.f[4*k + c] = v;
		}
	}
	return out;
}

FaceVectorField momentum_convection(const StaggeredMesh& mesh, const DualFluxTable& dual,
                                    const FaceVectorField& v, ConvectionMode mode)
{
	FaceVectorField out(mesh.num_faces());
	for(int s : mesh.internal_faces()) {
		Vec2 acc;
		for(const DiamondLink& l : mesh.diamond_links(s)) {
			const double F = l.sign*dual.f[l.dual];
			if(mode == ConvectionMode::centered)
				acc += (0.5*F)*(v[s] + v[l.neighbor]);
			else
				acc += F*(F >= 0 ? v[s] : v[l.neighbor]);
		}
		out[s] = acc*(1/mesh.face(s).diamond);
	}
	return out;
}

FaceVectorField momentum_convection(const StaggeredMesh& mesh, const CellField& rho, const FaceVectorField& u,
                                    const FaceVectorField& v, ConvectionMode mode, const BoundaryData& bc)
{
	return momentum_convection(mesh, dual_fluxes(mesh, primal_mass_fluxes(mesh, rho, u, bc)), v, mode);
}

std::vector<double> dual_flux_sum(const StaggeredMesh& mesh, const DualFluxTable& dual)
{
	std::vector<double> out(mesh.num_faces(), 0.0);
	for(int s : mesh.internal_faces()) {
		double acc = 0;
		for(const DiamondLink& l : mesh.diamond_links(s)) acc += l.sign*dual.f[l.dual];
		out[s] = acc;
	}
	return out;
}

double rt_shape(int i, double a, double b)
{
	const double q = 0.375*(a*a - b*b);
	switch(i) {
	case WEST: return 0.25 - 0.5*a + q;
	case EAST: return 0.25 + 0.5*a + q;
	case SOUTH: return 0.25 - 0.5*b - q;
	default: return 0.25 + 0.5*b - q;
	}
}

Vec2 rt_shape_grad_ref(int i, double a, double b)
{
	switch(i) {
	case WEST: return {-0.5 + 0.75*a, -0.75*b};
	case EAST: return {0.5 + 0.75*a, -0.75*b};
	case SOUTH: return {-0.75*a, -0.5 + 0.75*b};
	default: return {-0.75*a, 0.5 + 0.75*b};
	}
}

RtLocal rt_local(double hx, double hy)
{
	static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
	static const double gw[3] = {5/9.0, 8/9.0, 5/9.0};
	RtLocal L{};
	const double jac = 0.25*hx*hy;
	for(int qa = 0; qa < 3; qa++)
		for(int qb = 0; qb < 3; qb++) {
			const double w = gw[qa]*gw[qb]*jac;
			double grad[4][2];
			for(int i = 0; i < 4; i++) {
				const Vec2 g = rt_shape_grad_ref(i, gx[qa], gx[qb]);
				grad[i][0] = g.x*2/hx;
				grad[i][1] = g.y*2/hy;
			}
			for(int c = 0; c < 2; c++)
				for(int d = 0; d < 2; d++)
					for(int i = 0; i < 4; i++)
						for(int j = 0; j < 4; j++)
							L.g[c][d][i][j] += w*grad[i][c]*grad[j][d];
		}
	return L;
}

RigidityMatrix assemble_rigidity(const StaggeredMesh& mesh, double mu, double lambda)
{
	if(mu < 0 || mu + lambda < 0)
		throw std::invalid_argument("assemble_rigidity: need mu >= 0 and mu + lambda >= 0");
	RigidityMatrix R;
	R.mu = mu;
	R.lambda = lambda;
	R.ext_index.assign(mesh.num_faces(), -1);
	const auto& ext = mesh.external_faces();
	for(size_t e = 0; e < ext.size(); e++) R.ext_index[ext[e]] = static_cast<int>(e);

	const int ni = 2*mesh.num_internal_faces(), ne = 2*static_cast<int>(ext.size());
	std::vector<Eigen::Triplet<double>> ti, tb;
	ti.reserve(static_cast<size_t>(mesh.num_cells())*64);
	tb.reserve(static_cast<size_t>(ne)*16);

	// uniform grids repeat the same cell, cache the last local matrix
	double last_hx = -1, last_hy = -1;
	RtLocal L{};
	for(int k = 0; k < mesh.num_cells(); k++) {
		const Cell& cell = mesh.cell(k);
		if(cell.hx != last_hx || cell.hy != last_hy) {
			L = rt_local(cell.hx, cell.hy);
			last_hx = cell.hx;
			last_hy = cell.hy;
		}
		for(int i = 0; i < 4; i++) {
			const int fi = cell.faces[i];
			const int ri = mesh.face(fi).interior_index;
			if(ri < 0) continue;
			for(int j = 0; j < 4; j++) {
				const int fj = cell.faces[j];
				const int rj = mesh.face(fj).interior_index;
				const double lap = L.g[0][0][i][j] + L.g[1][1][i][j];
				for(int c = 0; c < 2; c++)
					for(int d = 0; d < 2; d++) {
						double v = (mu + lambda)*L.g[c][d][i][j];
						if(c == d) v += mu*lap;
						if(v == 0) continue;
						if(rj >= 0) ti.emplace_back(2*ri + c, 2*rj + d, v);
						else tb.emplace_back(2*ri + c, 2*R.ext_index[fj] + d, v);
					}
			}
		}
	}
	R.a_int.resize(ni, ni);
	R.a_int.setFromTriplets(ti.begin(), ti.end());
	R.a_int.prune(0.0);
	R.a_bnd.resize(ni, ne);
	R.a_bnd.setFromTriplets(tb.begin(), tb.end());
	R.a_bnd.prune(0.0);
	R.a_int.makeCompressed();
	R.a_bnd.makeCompressed();
	return R;
}

Eigen::VectorXd pack_internal(const StaggeredMesh& mesh, const FaceVectorField& u)
{
	Eigen::VectorXd x(2*mesh.num_internal_faces());
	for(int s : mesh.internal_faces()) {
		const int r = mesh.face(s).interior_index;
		x[2*r] = u[s].x;
		x[2*r+1] = u[s].y;
	}
	return x;
}

void unpack_internal(const StaggeredMesh& mesh, const Eigen::VectorXd& x, FaceVectorField& u)
{
	u.resize(mesh.num_faces());
	for(int s : mesh.internal_faces()) {
		const int r = mesh.face(s).interior_index;
		u[s] = {x[2*r], x[2*r+1]};
	}
}

Eigen::VectorXd pack_external(const StaggeredMesh& mesh, const RigidityMatrix& a, const FaceVectorField& u)
{
	Eigen::VectorXd x(2*static_cast<int>(mesh.external_faces().size()));
	for(int s : mesh.external_faces()) {
		const int e = a.ext_index[s];
		x[2*e] = u[s].x;
		x[2*e+1] = u[s].y;
	}
	return x;
}

FaceVectorField apply_rigidity(const StaggeredMesh& mesh, const RigidityMatrix& a, const FaceVectorField& u)
{
	Eigen::VectorXd y = a.a_int*pack_internal(mesh, u);
	if(a.a_bnd.nonZeros() > 0) y += a.a_bnd*pack_external(mesh, a, u);
	FaceVectorField out(mesh.num_faces());
	unpack_internal(mesh, y, out);
	return out;
}

FaceVectorField diffusion(const StaggeredMesh& mesh, const RigidityMatrix& a, const FaceVectorField& u)
{
	FaceVectorField out = apply_rigidity(mesh, a, u);
	for(int s : mesh.internal_faces()) out[s] = out[s]*(-1/mesh.face(s).diamond);
	return out;
}

void export_rigidity(std::ostream& os, const RigidityMatrix& a)
{
	os.precision(17);
	for(int c = 0; c < a.a_int.outerSize(); c++)
		for(SparseOperator::InnerIterator it(a.a_int, c); it; ++it)
			os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

FaceVectorField pressure_gradient(const StaggeredMesh& mesh, const CellField& p)
{
	FaceVectorField g(mesh.num_faces());
	for(int s : mesh.internal_faces()) {
		const Face& f = mesh.face(s);
		g[s] = f.normal*(f.length/f.diamond*(p[f.cells[1]] - p[f.cells[0]]));
	}
	return g;
}

double h1_seminorm_sq(const StaggeredMesh& mesh, const FaceVectorField& u)
{
	double total = 0;
	double last_hx = -1, last_hy = -1;
	RtLocal L{};
	for(int k = 0; k < mesh.num_cells(); k++) {
		const Cell& cell = mesh.cell(k);
		if(cell.hx != last_hx || cell.hy != last_hy) {
			L = rt_local(cell.hx, cell.hy);
			last_hx = cell.hx;
			last_hy = cell.hy;
		}
		for(int i = 0; i < 4; i++)
			for(int j = 0; j < 4; j++)
				total += (L.g[0][0][i][j] + L.g[1][1][i][j])*dot(u[cell.faces[i]], u[cell.faces[j]]);
	}
	return std::max(total, 0.0);
}

double h1_seminorm(const StaggeredMesh& mesh, const FaceVectorField& u)
{
	return std::sqrt(h1_seminorm_sq(mesh, u));
}

SparseOperator cell_laplacian(const StaggeredMesh& mesh)
{
	std::vector<Eigen::Triplet<double>> t;
	t.reserve(static_cast<size_t>(mesh.num_internal_faces())*4);
	for(int s : mesh.internal_faces()) {
		const Face& f = mesh.face(s);
		const double c = f.length*f.length/f.diamond;
		const int K = f.cells[0], L = f.cells[1];
		const double aK = mesh.cell(K).area, aL = mesh.cell(L).area;
		t.emplace_back(K, K, -c/aK);
		t.emplace_back(K, L, c/aK);
		t.emplace_back(L, L, -c/aL);
		t.emplace_back(L, K, c/aL);
	}
	SparseOperator m(mesh.num_cells(), mesh.num_cells());
	m.setFromTriplets(t.begin(), t.end());
	m.makeCompressed();
	return m;
}

}
