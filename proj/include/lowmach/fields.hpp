/** \file fields.hpp
 * \brief Discrete fields, run configuration and the time-stepping state
 */

#ifndef LOWMACH_FIELDS_HPP
#define LOWMACH_FIELDS_HPP

#include "lowmach/eos.hpp"
#include "lowmach/mesh.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lowmach {

/// One velocity per face. External entries hold the Dirichlet boundary value (zero unless a case sets it)
using FaceVectorField = std::vector<Vec2>;

/// Flux along the reference normal of each face; F_{K,sigma} = side_sign(K,sigma) * phi[sigma]
struct PrimalFluxes
{
	std::vector<double> phi;

	double F(const StaggeredMesh& mesh, int k, int slot) const
	{
		const int s = mesh.cell(k).faces[slot];
		return mesh.side_sign(k, s)*phi[s];
	}
};

/// One value per dual face, oriented from its vertical face to its horizontal face
struct DualFluxTable
{
	std::vector<double> f;
};

enum class SchemeKind { implicit, pressure_correction, semi_implicit, incomp_implicit, incomp_pc, incomp_semi };

enum class ConvectionMode { centered, upwind };

enum class LinearMethod { automatic, direct, iterative };

std::string to_string(SchemeKind k);
SchemeKind scheme_kind_from_string(const std::string& s);
bool is_incompressible(SchemeKind k);

struct SolveOptions
{
	double rtol = 1e-10;
	double atol = 1e-14;
	int max_iter = 10000;
	LinearMethod method = LinearMethod::automatic;
};

struct NonlinearOptions
{
	double rtol = 1e-12;
	double atol = 1e-14;
	double stall = 1e-14;   ///< step-size stop, relative to the caller scale
	int max_iter = 200;
};

/// Inflow density used on external faces where the boundary velocity enters the domain
struct BoundaryData
{
	double rho_ext = 1.0;
};

struct SchemeConfig
{
	SchemeKind kind = SchemeKind::pressure_correction;
	double eps = 1.0;
	double dt = 0.01;
	double mu = 0.01;
	double lambda = 0.0;
	double t_end = 0.1;
	EosParams eos{1.4};
	BoundaryData bc;
	SolveOptions linear;
	NonlinearOptions nonlinear;
	NonlinearOptions outer{1e-12, 1e-14, 1e-15, 500};
	/// Convection of the implicit and pressure-correction momentum balance
	ConvectionMode convection = ConvectionMode::centered;
	/// Momentum source per unit volume on each face, evaluated at the new time level
	std::function<FaceVectorField(double t)> source;

	void validate() const;
	int num_steps() const;
};

struct SolverState
{
	CellField rho_prev;         ///< rho^{n-1}
	CellField rho;              ///< rho^n
	FaceVectorField u;          ///< u^n
	CellField dp;               ///< pressure unknown of the incompressible variants
	int n = 0;
	double t = 0;
	PrimalFluxes fluxes;        ///< F(rho^n, u^n)
	DualFluxTable dual;
};

double total_mass(const StaggeredMesh& mesh, const CellField& rho);
/// m(w) = sum |K| w_K / |Omega|
double cell_mean(const StaggeredMesh& mesh, const CellField& w);
double cell_l2(const StaggeredMesh& mesh, const CellField& w);
double cell_linf(const CellField& w);
double cell_lq(const StaggeredMesh& mesh, const CellField& w, double q);
/// sum over internal faces of |D_sigma| |u_sigma|^2, square-rooted
double face_l2(const StaggeredMesh& mesh, const FaceVectorField& u);
double face_linf(const StaggeredMesh& mesh, const FaceVectorField& u);

}

#endif
