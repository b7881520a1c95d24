/** \file operators.hpp
 * \brief Discrete space operators on the staggered mesh
 *
 * Velocities live on faces, densities and pressures on cells. Vector
 * unknowns restricted to internal faces are packed as 2*interior_index + component.
 */

#ifndef LOWMACH_OPERATORS_HPP
#define LOWMACH_OPERATORS_HPP

#include "lowmach/fields.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <iosfwd>

namespace lowmach {

using SparseOperator = Eigen::SparseMatrix<double>;

/// Upwind mass fluxes; boundary faces use rho_ext on inflow and the interior density on outflow
PrimalFluxes primal_mass_fluxes(const StaggeredMesh& mesh, const CellField& rho, const FaceVectorField& u,
                                const BoundaryData& bc = {});

CellField mass_divergence(const StaggeredMesh& mesh, const PrimalFluxes& fluxes);
CellField velocity_divergence(const StaggeredMesh& mesh, const FaceVectorField& u);

/// rho_{D_sigma} per face (single half-diamond on external faces)
std::vector<double> dual_density(const StaggeredMesh& mesh, const CellField& rho);

/// Minimum-norm solution of the half-diamond mass balance in every cell.
/// Throws std::logic_error if the bound by the primal fluxes fails.
DualFluxTable dual_fluxes(const StaggeredMesh& mesh, const PrimalFluxes& fluxes);

/// Pseudoinverse of the corner/face incidence of a rectangle, rows = corners, columns = faces
const std::array<std::array<double,4>,4>& dual_flux_pinv();

/// (1/|D_sigma|) sum_eps F_{sigma,eps} v_eps on internal faces, zero elsewhere
FaceVectorField momentum_convection(const StaggeredMesh& mesh, const DualFluxTable& dual,
                                    const FaceVectorField& v, ConvectionMode mode);
FaceVectorField momentum_convection(const StaggeredMesh& mesh, const CellField& rho, const FaceVectorField& u,
                                    const FaceVectorField& v, ConvectionMode mode, const BoundaryData& bc = {});

/// Sum of the dual fluxes leaving each internal diamond
std::vector<double> dual_flux_sum(const StaggeredMesh& mesh, const DualFluxTable& dual);

/// Integrals of shape-function gradient products on one rectangle, local order W,E,S,N
struct RtLocal
{
	double g[2][2][4][4];   ///< g[c][d][i][j] = int_K d_c zeta_i d_d zeta_j
};

RtLocal rt_local(double hx, double hy);
/// Value of the rotated bilinear shape function of slot i at reference point (a,b) in [-1,1]^2
double rt_shape(int i, double a, double b);
/// Gradient in reference coordinates
Vec2 rt_shape_grad_ref(int i, double a, double b);

struct RigidityMatrix
{
	double mu = 0, lambda = 0;
	SparseOperator a_int;        ///< internal x internal
	SparseOperator a_bnd;        ///< internal rows, external columns (Dirichlet lift)
	std::vector<int> ext_index;  ///< face -> position among external faces, -1 if internal

	int size() const { return static_cast<int>(a_int.rows()); }
};

RigidityMatrix assemble_rigidity(const StaggeredMesh& mesh, double mu, double lambda);

/// (A u)_sigma on internal faces including the boundary lift
FaceVectorField apply_rigidity(const StaggeredMesh& mesh, const RigidityMatrix& a, const FaceVectorField& u);

/// div(tau(u))_sigma = -(A u)_sigma / |D_sigma|
FaceVectorField diffusion(const StaggeredMesh& mesh, const RigidityMatrix& a, const FaceVectorField& u);

void export_rigidity(std::ostream& os, const RigidityMatrix& a);

/// (|sigma|/|D_sigma|)(p_L - p_K) n_{K,sigma} on internal faces, zero on external
FaceVectorField pressure_gradient(const StaggeredMesh& mesh, const CellField& p);

double h1_seminorm_sq(const StaggeredMesh& mesh, const FaceVectorField& u);
double h1_seminorm(const StaggeredMesh& mesh, const FaceVectorField& u);

Eigen::VectorXd pack_internal(const StaggeredMesh& mesh, const FaceVectorField& u);
/// Writes internal entries; external entries of `u` are left untouched
void unpack_internal(const StaggeredMesh& mesh, const Eigen::VectorXd& x, FaceVectorField& u);
Eigen::VectorXd pack_external(const StaggeredMesh& mesh, const RigidityMatrix& a, const FaceVectorField& u);

/// Cell operator phi -> div(grad phi), (1/|K|) sum |sigma|^2/|D_sigma| (phi_L - phi_K)
SparseOperator cell_laplacian(const StaggeredMesh& mesh);

}

#endif
