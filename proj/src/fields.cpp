#include "lowmach/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lowmach {

std::string to_string(SchemeKind k)
{
	switch(k) {
	case SchemeKind::implicit: return "implicit";
	case SchemeKind::pressure_correction: return "pressure_correction";
	case SchemeKind::semi_implicit: return "semi_implicit";
	case SchemeKind::incomp_implicit: return "incomp_implicit";
	case SchemeKind::incomp_pc: return "incomp_pc";
	case SchemeKind::incomp_semi: return "incomp_semi";
	}
	return "?";
}

SchemeKind scheme_kind_from_string(const std::string& s)
{
	for(SchemeKind k : {SchemeKind::implicit, SchemeKind::pressure_correction, SchemeKind::semi_implicit,
	                    SchemeKind::incomp_implicit, SchemeKind::incomp_pc, SchemeKind::incomp_semi})
		if(to_string(k) == s) return k;
	throw std::invalid_argument("unknown scheme kind '" + s + "'");
}

bool is_incompressible(SchemeKind k)
{
	return k == SchemeKind::incomp_implicit || k == SchemeKind::incomp_pc || k == SchemeKind::incomp_semi;
}

void SchemeConfig::validate() const
{
	if(!(eps > 0)) throw std::invalid_argument("config: eps must be positive");
	if(!(dt > 0)) throw std::invalid_argument("config: dt must be positive");
	if(!(t_end >= 0)) throw std::invalid_argument("config: t_end must be nonnegative");
	if(mu < 0 || mu + lambda < 0) throw std::invalid_argument("config: need mu >= 0 and mu + lambda >= 0");
	if(!(eos.gamma >= 1)) throw std::invalid_argument("config: gamma must be >= 1");
	if(!(bc.rho_ext > 0)) throw std::invalid_argument("config: rho_ext must be positive");
}

int SchemeConfig::num_steps() const
{
	// tolerate t_end/dt landing a rounding error below an integer
	return static_cast<int>(std::floor(t_end/dt + 1e-9));
}

double total_mass(const StaggeredMesh& mesh, const CellField& rho)
{
	double m = 0;
	for(int k = 0; k < mesh.num_cells(); k++) m += mesh.cell(k).area*rho[k];
	return m;
}

double cell_mean(const StaggeredMesh& mesh, const CellField& w)
{
	return total_mass(mesh, w)/mesh.domain_area();
}

double cell_l2(const StaggeredMesh& mesh, const CellField& w)
{
	double s = 0;
	for(int k = 0; k < mesh.num_cells(); k++) s += mesh.cell(k).area*w[k]*w[k];
	return std::sqrt(s);
}

double cell_linf(const CellField& w)
{
	double m = 0;
	for(double v : w) m = std::max(m, std::abs(v));
	return m;
}

double cell_lq(const StaggeredMesh& mesh, const CellField& w, double q)
{
	double s = 0;
	for(int k = 0; k < mesh.num_cells(); k++) s += mesh.cell(k).area*std::pow(std::abs(w[k]), q);
	return std::pow(s, 1/q);
}

double face_l2(const StaggeredMesh& mesh, const FaceVectorField& u)
{
	double s = 0;
	for(int f : mesh.internal_faces()) s += mesh.face(f).diamond*norm2(u[f]);
	return std::sqrt(s);
}

double face_linf(const StaggeredMesh& mesh, const FaceVectorField& u)
{
	double m = 0;
	for(int f : mesh.internal_faces()) m = std::max(m, norm(u[f]));
	return m;
}

}
