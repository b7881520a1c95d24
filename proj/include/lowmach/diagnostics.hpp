/** \file diagnostics.hpp
 * \brief Discrete energy and entropy balances of a step, global bounds and Mach sweep records
 *
 * All balances are in energy units: per-face terms carry |D_sigma| dt and per-cell terms |K| dt / eps^2.
 */

#ifndef LOWMACH_DIAGNOSTICS_HPP
#define LOWMACH_DIAGNOSTICS_HPP

#include "lowmach/schemes.hpp"

#include <string>
#include <vector>

namespace lowmach {

/// 1/2 sum |D| rho_D |u|^2 over internal faces
double kinetic_energy(const StaggeredMesh& mesh, const std::vector<double>& rho_dual, const FaceVectorField& u);
/// eps^-2 sum |K| Pi(rho_K)
double elastic_potential(const StaggeredMesh& mesh, const CellField& rho, double eps, const EosParams& eos);

struct PressureDeviation
{
	CellField dp;   ///< (p - m(p)) / eps^2
	double mean = 0, l2 = 0, linf = 0;
};
PressureDeviation pressure_deviation(const StaggeredMesh& mesh, const CellField& rho, const EosParams& eos,
                                     double eps);

struct KineticCheck
{
	std::vector<double> residual;   ///< per face; identity residual, or the summed terms for the semi-implicit scheme
	double max_abs = 0;
	double lhs = 0;                 ///< summed balance (the inequality for the semi-implicit scheme)
	double remainder = 0;           ///< dt sum |D| R_sigma, or dt R_E
	double min_face_remainder = 0;  ///< smallest R_sigma (implicit, pressure correction)
	bool inequality = false;
};

/// rho_a is the spectral radius estimate of the rigidity matrix (semi-implicit remainder only)
KineticCheck kinetic_energy_check(const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a,
                                  const SolverState& before, const StepResult& result, double rho_a = 0);

struct RenormCheck
{
	CellField defect;         ///< (|K|/eps^2)(dPi + dt div(Pi u) + dt (p - p(1)) div u) = -|K| dt R_K / eps^2
	CellField envelope;       ///< Taylor bound of |K| dt R_K / eps^2
	double max_defect = 0;    ///< should be <= 0
	double min_defect = 0;
	double envelope_excess = -1;   ///< max of -defect - envelope, <= 0 expected
	double total = 0;         ///< sum of defects = -eps^-2 sum |K| dt R_K
};
RenormCheck renormalization_check(const StaggeredMesh& mesh, const SchemeConfig& cfg, const SolverState& before,
                                  const StepResult& result);

struct StepReport
{
	int n = 0;
	double t = 0, dt = 0;
	double mass = 0, min_rho = 0;
	double mass_change = 0;        ///< relative to the previous total
	double kinetic_energy = 0;     ///< the scheme's kinetic energy at the new level
	double elastic_potential = 0;
	double global_entropy = 0;     ///< left side of the global bound
	double global_bound = 0;       ///< its initial value
	double ke_residual = 0;        ///< max per-face identity residual, or the semi-implicit balance
	double entropy_lhs = 0;
	double face_remainder = 0;
	double cell_remainder = 0;     ///< eps^-2 sum |K| dt R_K
	double min_face_remainder = 0;
	double renorm_max = 0;
	double renorm_excess = 0;      ///< worst excess over the Taylor envelope
	double dp_l2 = 0, dp_linf = 0;
	double cfl_margin = CflBudget::unbounded;   ///< dt_combined / dt; R_E >= 0 is guaranteed from 2 on
	int outer_iters = 0;
	double scale = 1;
	double max_divergence = 0;     ///< incompressible variants
	bool balances = true;          ///< the per-step identities apply
	bool globals = true;           ///< boundary work vanishes, so the summed inequalities apply
	bool cfl_required = false;     ///< explicit convection and diffusion (semi-implicit)
	bool global_applies = true;    ///< remainders stayed nonnegative so far (semi-implicit: R_E >= 0 at every step)
};

struct Tolerances
{
	double kinetic = 1e-9;
	double renorm = 1e-10;
	double entropy = 1e-9;
	double global = 1e-9;
	double mass = 1e-12;
	double remainder = 1e-12;
	double divergence = 1e-10;
};

/// Human readable list of failed checks; empty if the step is clean
std::vector<std::string> violations(const StepReport& r, const Tolerances& tol = {});

/**
 * Accumulates the global entropy bound along a run. The initial value is the scheme's
 * bound constant built from the initial state.
 */
class EntropyAudit
{
public:
	EntropyAudit(const StaggeredMesh& mesh, const SchemeConfig& cfg, const RigidityMatrix& a, const SolverState& s0);

	/// Builds the report of one step and updates the running sums
	StepReport record(const SolverState& before, const StepResult& result, double cfl_margin = CflBudget::unbounded);

	double initial_bound() const { return g0_; }
	const std::vector<StepReport>& history() const { return history_; }
	bool violated(const Tolerances& tol = {}) const;
	double rho_a() const { return rho_a_; }

private:
	const StaggeredMesh& mesh_;
	const SchemeConfig& cfg_;
	const RigidityMatrix& a_;
	double rho_a_ = 0;
	double g0_ = 0;
	double cumulative_ = 0;   ///< dissipation, pressure and source work summed over past steps
	double mass0_ = 0;
	bool homogeneous_ = true;
	bool cfl_held_ = true;
	std::vector<StepReport> history_;
};

struct SweepRecord
{
	double eps = 0;
	double rho_l1 = 0, rho_l2 = 0, rho_lgamma = 0, rho_lq = 0;   ///< max over time of ||rho - 1||
	double dp_l2 = 0, dp_linf = 0;                              ///< max over time
	double dist_u_l2 = 0, dist_dp_l2 = 0;                       ///< terminal distance to the incompressible run
	int steps = 0;
	double dt = 0;
};

/// Tracks the time maxima of a compressible run
void sweep_observe(SweepRecord& r, const StaggeredMesh& mesh, const SolverState& s, const EosParams& eos);
/// Terminal distances to the incompressible reference
void sweep_finish(SweepRecord& r, const StaggeredMesh& mesh, const SolverState& s, const SolverState& reference,
                  const EosParams& eos);

struct SweepSummary
{
	std::vector<SweepRecord> records;    ///< sorted by decreasing eps
	double slope_rho_l2 = 0;             ///< least-squares log-log slope, 0 for a single record
	bool has_slope = false;
	bool distances_monotone = true;      ///< nonincreasing as eps decreases
	double distance_ratio = 0;           ///< dist_u at the smallest eps over dist_u at the largest
	double dp_band = 0;                  ///< max over min of dp_l2 across the sweep
};
SweepSummary sweep_compare(std::vector<SweepRecord> records);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}

#endif
