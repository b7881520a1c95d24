/** \file schemes.hpp
 * \brief Time discretizations: implicit, pressure correction, semi-implicit and their incompressible limits
 */

#ifndef LOWMACH_SCHEMES_HPP
#define LOWMACH_SCHEMES_HPP

#include "lowmach/operators.hpp"
#include "lowmach/solvers.hpp"

#include <functional>
#include <limits>

namespace lowmach {

using ScalarInit = std::function<double(const Vec2&)>;
using VectorInit = std::function<Vec2(const Vec2&)>;

/// Cell means by 2x2 Gauss quadrature
CellField cell_averages(const StaggeredMesh& mesh, const ScalarInit& f);
/// Face means by 5-point Gauss quadrature, all faces
FaceVectorField face_averages(const StaggeredMesh& mesh, const VectorInit& f);
/// Diamond means (two triangles per diamond, collapsed 3x3 Gauss on each), internal faces
FaceVectorField diamond_averages(const StaggeredMesh& mesh, const VectorInit& f);

/// Cell densities, diamond velocities; external velocities are zero
SolverState init_implicit(const StaggeredMesh& mesh, const ScalarInit& rho0, const VectorInit& u0);

/// Cell densities, face velocities and rho^{-1} from the backward mass balance.
/// `boundary_velocity` (optional) overrides the external entries of u^0.
SolverState init_pressure_correction(const StaggeredMesh& mesh, const ScalarInit& rho0, const VectorInit& u0,
                                     double dt, const BoundaryData& bc = {},
                                     const VectorInit& boundary_velocity = nullptr);

struct StepResult
{
	SolverState state;
	FaceVectorField u_tilde;          ///< predicted velocity (equals u^{n+1} for the implicit scheme)
	LinearReport prediction;
	NonlinearReport correction;       ///< density solve of the last correction
	NonlinearReport outer;            ///< coupled iteration of the implicit schemes
	int outer_iters = 1;
	double coupled_residual = 0;      ///< max normalized residual of the discrete equations after the step
};

StepResult step_implicit(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg,
                         const RigidityMatrix& a);
StepResult step_pressure_correction(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg,
                                    const RigidityMatrix& a);
StepResult step_semi_implicit(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg,
                              const RigidityMatrix& a);

enum class IncompressibleVariant { implicit, pc, semi };

/// Incompressible state: rho identically 1, dp carries the pressure, u discretely divergence-free after one step
SolverState init_incompressible(const StaggeredMesh& mesh, const VectorInit& u0, bool face_means,
                                const CellField& dp0 = {});
StepResult step_incompressible(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg,
                               const RigidityMatrix& a, IncompressibleVariant variant);

/// Discrete divergence-free projection u - grad(phi) with div(grad phi) = div u
FaceVectorField project_divergence_free(const StaggeredMesh& mesh, const FaceVectorField& u);

/// Dispatch on cfg.kind
StepResult step(const SolverState& s, const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a);

struct CflBudget
{
	static constexpr double unbounded = std::numeric_limits<double>::infinity();
	double dt_convective = unbounded;
	double dt_diffusive = unbounded;
	double dt_combined = unbounded;
	double dt_mach_uniform = unbounded;
	double C1 = 0, C2 = 0, C0 = 0, C = 0, eta = 0;
	double rho_a = 0;   ///< spectral radius used (conservative estimate)
};

/// Mesh constants of the Mach-uniform step; C1 = h max |sigma'|/|D_sigma|, C2 = h (min |D_sigma|)^{-1/2}
struct MeshCflConstants
{
	double C1, C2;
};
MeshCflConstants mesh_cfl_constants(const StaggeredMesh& mesh);

/// Budget from the cached dual fluxes F(rho^n, u^n) of the state. rho_a is the spectral radius to use.
CflBudget cfl_budget(const SolverState& s, const StaggeredMesh& mesh, double rho_a, double C0, double eta);
CflBudget cfl_budget(const SolverState& s, const StaggeredMesh& mesh, const RigidityMatrix& a, double C0, double eta);

/// Mach-uniform step; depends only on (mesh, rho_a, C0, eta)
double mach_uniform_dt(const StaggeredMesh& mesh, double rho_a, double C0, double eta);

/// 1/2 sum |D| rho_D^{-1} |u^0|^2 + eps^{-2} sum |K| Pi(rho^0), the initial energy bounded by C0
double initial_energy(const StaggeredMesh& mesh, const SolverState& s0, double eps, const EosParams& eos);

}

#endif
