/** \file runner.hpp
 * \brief Experiment orchestration behind the command line: single runs, Mach sweeps, vortex runs, invariant suite
 */

#ifndef LOWMACH_RUNNER_HPP
#define LOWMACH_RUNNER_HPP

#include "lowmach/config.hpp"
#include "lowmach/diagnostics.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace lowmach {

/// Exit codes of the commands
enum ExitCode { exit_ok = 0, exit_violation = 1, exit_config = 2, exit_solver = 3, exit_io = 4 };

/// Step failure tagged with the index of the step that failed
class StepFailure : public std::runtime_error
{
public:
	StepFailure(int n, const std::string& what)
		: std::runtime_error("step " + std::to_string(n) + ": " + what), step_{n} {}
	int step() const { return step_; }
private:
	int step_;
};

StaggeredMesh make_mesh(const RunConfig& c);

/// Initial data of the smooth and rest cases, for a given Mach number
struct SmoothData
{
	ScalarInit rho0;
	VectorInit u0;
	ScalarInit r;      ///< density perturbation shape, rho0 = 1 + eps^k * amplitude * r
};
SmoothData smooth_data(const RunConfig& c, double eps);

/// Scheme settings of the config at Mach number eps; the time step is set by resolve_dt
SchemeConfig make_scheme(const RunConfig& c, const StaggeredMesh& mesh, double eps);

/// Initial state of a scheme (compressible or incompressible)
SolverState make_initial_state(const RunConfig& c, const StaggeredMesh& mesh, const SchemeConfig& s);

/// The C0 of the Mach-uniform step: the override, or the largest initial energy over the given Mach numbers
double resolve_C0(const RunConfig& c, const StaggeredMesh& mesh, const std::vector<double>& eps_values);

/// The time step: fixed, or the Mach-uniform bound built from (mesh, rho_a, C0, eta)
double resolve_dt(const RunConfig& c, const StaggeredMesh& mesh, const RigidityMatrix& a, double C0);

using StepObserver = std::function<void(const SolverState&, const StepReport*)>;

struct RunResult
{
	SolverState state;
	std::vector<StepReport> reports;
	std::vector<std::string> violations;   ///< prefixed with the step index
	CflBudget initial_budget;
	double dt = 0;
	double initial_bound = 0;
};

/// Rejects a semi-implicit run whose step exceeds the stability budget of the initial state
void check_cfl_admissible(const RunConfig& c, const StaggeredMesh& mesh, const SchemeConfig& s,
                          const SolverState& s0, const RigidityMatrix& a);

/// Time loop with per-step diagnostics. The observer sees the initial state (report null) and every step.
RunResult simulate(const StaggeredMesh& mesh, const SchemeConfig& s, const RigidityMatrix& a, const SolverState& s0,
                   const StepObserver& observer = {}, const Tolerances& tol = {});

/// Incompressible counterpart of a compressible scheme
SchemeKind incompressible_limit(SchemeKind k);

struct SweepMember
{
	double eps = 0;
	double dt = 0;
	double C0 = 0;
	SweepRecord record;
	std::vector<double> cfl_margins;   ///< per step
	std::vector<StepReport> reports;
	std::vector<std::string> violations;
	std::string error;                 ///< nonempty if the member failed
};

struct SweepResult
{
	std::vector<SweepMember> members;   ///< in the order of the eps list as given
	SweepRecord reference_steps;       ///< only steps and dt are set
	SweepSummary summary;
	bool complete = false;
};

/// Runs every eps and the incompressible reference; members run on `threads` workers
SweepResult run_sweep(const RunConfig& c, const std::vector<double>& eps_list, int threads);

struct VortexRun
{
	double c_M = 0;
	MachRow mach;
	VortexErrors errors;
	std::vector<ProfilePoint> velocity, pressure;
	std::vector<std::string> violations;
	std::string error;
	int steps = 0;
};

/// One vortex run per pressure level
std::vector<VortexRun> run_vortex(const RunConfig& c, const std::vector<double>& levels, int threads);

/// The horizontal line through the vortex center at the final time
double vortex_profile_line(const VortexParams& p);

/// Writers; 17 significant digits, LF line endings
void write_run_log(std::ostream& os, const std::vector<StepReport>& reports);
void write_step_reports(std::ostream& os, const std::vector<StepReport>& reports);
void write_cell_snapshot(std::ostream& os, const StaggeredMesh& mesh, const SolverState& s, const EosParams& eos,
                         bool incompressible);
void write_face_snapshot(std::ostream& os, const StaggeredMesh& mesh, const SolverState& s);
void write_sweep_summary(std::ostream& os, const SweepResult& r);
void write_rate_report(std::ostream& os, const SweepResult& r);
void write_profile(std::ostream& os, const std::vector<ProfilePoint>& pts, const std::string& num_col,
                   const std::string& exact_col);
void write_vortex_errors(std::ostream& os, const std::vector<VortexRun>& runs);

struct CommandOptions
{
	bool strict = true;
	int threads = 1;
	std::string out_dir;                 ///< overrides the config when nonempty
	std::vector<double> eps_override;    ///< sweep list, or the Mach number of a run
};

int command_run(RunConfig c, const CommandOptions& o, std::ostream& log);
int command_sweep(RunConfig c, const CommandOptions& o, std::ostream& log);
int command_vortex(RunConfig c, const CommandOptions& o, std::ostream& log);
/// Identity and inequality checks for every compressible scheme on the configured case
int command_check(RunConfig c, const CommandOptions& o, std::ostream& log);

}

#endif
