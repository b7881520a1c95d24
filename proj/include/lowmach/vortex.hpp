/** \file vortex.hpp
 * \brief Traveling vortex with an exact solution of the barotropic Euler equations
 *
 * Standing vortex u = f(xi)(-x2, x1), xi = |x|^2, pressure g(xi), density g^(1/gamma),
 * translated with the constant velocity a.
 */

#ifndef LOWMACH_VORTEX_HPP
#define LOWMACH_VORTEX_HPP

#include "lowmach/schemes.hpp"

#include <memory>
#include <vector>

namespace lowmach {

enum class ViscosityMode { euler_artificial, navier_stokes };

struct VortexParams
{
	double c_M = 1;
	double gamma = 3;
	Vec2 a{1, 1};
	Vec2 x0{0, 0};
	Rect domain{-1.2, 2.8, -1.2, 2.8};
	double t_end = 0.8;
	ViscosityMode mode = ViscosityMode::euler_artificial;
	double v_max = 1.4;
	bool analytic_source = false;   ///< Navier-Stokes source from the continuous operator instead of the discrete one

	void validate() const;
};

struct VortexShape
{
	double f, F;
};
VortexShape vortex_profile(double xi);

/// g(xi) and g'(xi)
double vortex_g(double xi, const VortexParams& p);
double vortex_g_prime(double xi, const VortexParams& p);

struct ExactState
{
	double rho, p;
	Vec2 u;
};
ExactState exact_solution(const Vec2& x, double t, const VortexParams& p);

/// Exterior values (xi >= 1)
double rho_ext(const VortexParams& p);
double p_ext(const VortexParams& p);

struct MachRow
{
	double c, Ma;
};
/// Speed of sound outside the vortex and the Mach number for unit reference velocity
MachRow mach_table(double c_M, double gamma = 3);

/// The five pressure levels of the benchmark
const std::vector<double>& benchmark_pressure_levels();

struct VortexForcing
{
	double mu = 0, lambda = 0;
	std::function<FaceVectorField(double)> source;   ///< empty for the Euler runs
};

/// Viscosity and Navier-Stokes source. The discrete source applies A to the face interpolant of the exact velocity.
VortexForcing forcing_terms(const StaggeredMesh& mesh, const VortexParams& p);

/// Exact velocity on every face (boundary entries included)
FaceVectorField exact_face_velocity(const StaggeredMesh& mesh, const VortexParams& p, double t);

/// Configuration of a vortex run with the pressure-correction scheme
SchemeConfig vortex_config(const StaggeredMesh& mesh, const VortexParams& p, double dt);
SolverState vortex_initial_state(const StaggeredMesh& mesh, const VortexParams& p, double dt);

struct VortexErrors
{
	double velocity_l1 = 0;   ///< sum |D| |u - u_exact(center of D)|
	double pressure_l1 = 0;   ///< sum |K| |p - p_exact(center of K)|
	double pressure_scaled = 0;   ///< pressure_l1 / c
};
VortexErrors error_norms(const StaggeredMesh& mesh, const SolverState& s, const VortexParams& p, double t,
                         const EosParams& eos);

struct ProfilePoint
{
	double x1, numerical, exact;
};
/// Second velocity component on the horizontal face row nearest x2 = line
std::vector<ProfilePoint> velocity_profile(const StaggeredMesh& mesh, const SolverState& s, const VortexParams& p,
                                           double t, double line);
/// (p - p_ext)/c on the same row, from the mean of the two cells sharing each face
std::vector<ProfilePoint> pressure_profile(const StaggeredMesh& mesh, const SolverState& s, const VortexParams& p,
                                           double t, double line, const EosParams& eos);
/// Index j of the horizontal face row nearest the line
int nearest_face_row(const StaggeredMesh& mesh, double line);

}

#endif
