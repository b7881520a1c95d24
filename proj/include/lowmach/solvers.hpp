/** \file solvers.hpp
 * \brief Sparse linear solves, the damped fixed-point driver and power iteration
 */

#ifndef LOWMACH_SOLVERS_HPP
#define LOWMACH_SOLVERS_HPP

#include "lowmach/operators.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lowmach {

class SolverError : public std::runtime_error
{
public:
	SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_{residual} {}
	double residual() const { return residual_; }
private:
	double residual_;
};

class SingularMatrixError : public SolverError
{
public:
	explicit SingularMatrixError(const std::string& what) : SolverError(what, -1) {}
};

struct LinearReport
{
	bool direct = true;
	int iterations = 0;
	double residual = 0;   ///< ||Ax - b||_2
};

/// Unknown count above which the automatic method switches to preconditioned BiCGSTAB
constexpr int direct_solve_limit = 200000;

Eigen::VectorXd linear_solve(const SparseOperator& A, const Eigen::VectorXd& b, const SolveOptions& opts,
                             LinearReport* report = nullptr);

struct NonlinearReport
{
	int iterations = 0;
	double residual = 0;
	bool converged = false;
	bool stalled = false;          ///< stopped on step size at rounding level
	std::vector<double> damping;   ///< relaxation used at each accepted iteration
};

/**
 * x <- x + w (update(x) - x), with w halved (down to 1/16) whenever the residual grows.
 * Stops when ||residual||_inf <= rtol*scale + atol, or when the accepted step is below stall*scale.
 */
Eigen::VectorXd fixed_point_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                                  const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& update,
                                  const Eigen::VectorXd& x0, const NonlinearOptions& opts, double scale,
                                  NonlinearReport& report);

struct SpectralEstimate
{
	double estimate = 0;       ///< converged Rayleigh quotient
	double conservative = 0;   ///< estimate * 1.01
	int iterations = 0;
};

/// Power iteration from a fixed pseudo-random start, relative tolerance 1e-8
SpectralEstimate spectral_radius(const SparseOperator& A, double rtol = 1e-8, int max_iter = 10000);

}

#endif
