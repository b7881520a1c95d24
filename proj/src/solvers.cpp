#include "lowmach/solvers.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>

namespace lowmach {

Eigen::VectorXd linear_solve(const SparseOperator& A, const Eigen::VectorXd& b, const SolveOptions& opts,
                             LinearReport* report)
{
	if(A.rows() != A.cols()) throw std::invalid_argument("linear_solve: matrix is not square");
	if(A.rows() != b.size()) throw std::invalid_argument("linear_solve: dimension mismatch");
	if(!(opts.rtol > 0) || !(opts.atol > 0)) throw std::invalid_argument("linear_solve: tolerances must be positive");

	LinearReport rep;
	const double bnorm = b.norm();
	const double target = opts.rtol*bnorm + opts.atol;
	const bool direct = opts.method == LinearMethod::direct
		|| (opts.method == LinearMethod::automatic && A.rows() <= direct_solve_limit);

	Eigen::VectorXd x;
	if(A.rows() == 0) x.resize(0);
	else if(direct) {
		Eigen::SparseLU<SparseOperator, Eigen::COLAMDOrdering<int>> lu;
		lu.analyzePattern(A);
		lu.factorize(A);
		if(lu.info() != Eigen::Success)
			throw SingularMatrixError("linear_solve: factorization failed (" + lu.lastErrorMessage() + ")");
		x = lu.solve(b);
	} else {
		rep.direct = false;
		Eigen::BiCGSTAB<SparseOperator, Eigen::DiagonalPreconditioner<double>> it;
		it.setTolerance(bnorm > 0 ? target/bnorm : opts.rtol);
		it.setMaxIterations(opts.max_iter);
		it.compute(A);
		x = it.solve(b);
		rep.iterations = static_cast<int>(it.iterations());
	}
	rep.residual = (A*x - b).norm();
	if(report) *report = rep;
	if(!x.allFinite()) throw SingularMatrixError("linear_solve: non-finite solution");
	// direct solves get slack for rounding on ill-conditioned systems
	const double allowed = direct ? std::max(target, 1e-8*bnorm) : target;
	if(!(rep.residual <= allowed))
		throw SolverError("linear_solve: residual " + std::to_string(rep.residual) + " above tolerance "
		                  + std::to_string(target), rep.residual);
	return x;
}

Eigen::VectorXd fixed_point_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                                  const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& update,
                                  const Eigen::VectorXd& x0, const NonlinearOptions& opts, double scale,
                                  NonlinearReport& report)
{
	report = {};
	const double tol = opts.rtol*scale + opts.atol;
	Eigen::VectorXd x = x0;
	double r = residual(x).lpNorm<Eigen::Infinity>();
	double w = 1;
	report.residual = r;
	if(r <= tol) {
		report.converged = true;
		return x;
	}
	for(int it = 0; it < opts.max_iter; it++) {
		const Eigen::VectorXd dx = update(x) - x;
		Eigen::VectorXd xn = x + w*dx;
		double rn = residual(xn).lpNorm<Eigen::Infinity>();
		while(!(rn <= r) && w > 1.0/16) {
			w *= 0.5;
			xn = x + w*dx;
			rn = residual(xn).lpNorm<Eigen::Infinity>();
		}
		if(!std::isfinite(rn)) break;
		const double step = (w*dx).lpNorm<Eigen::Infinity>();
		x = std::move(xn);
		r = rn;
		report.iterations = it + 1;
		report.residual = r;
		report.damping.push_back(w);
		if(r <= tol) {
			report.converged = true;
			break;
		}
		if(step <= opts.stall*scale) {
			report.converged = true;
			report.stalled = true;
			break;
		}
	}
	return x;
}

SpectralEstimate spectral_radius(const SparseOperator& A, double rtol, int max_iter)
{
	if(A.rows() != A.cols()) throw std::invalid_argument("spectral_radius: matrix is not square");
	SpectralEstimate out;
	const int n = static_cast<int>(A.rows());
	if(n == 0 || A.norm() == 0) return out;

	std::mt19937_64 gen(0x5eed);
	std::uniform_real_distribution<double> dist(0.5, 1.5);
	Eigen::VectorXd v(n);
	for(int i = 0; i < n; i++) v[i] = dist(gen);
	v.normalize();

	double lam = 0;
	for(int it = 1; it <= max_iter; it++) {
		Eigen::VectorXd w = A*v;
		const double nl = v.dot(w);
		const double wn = w.norm();
		if(wn == 0) return out;
		out.iterations = it;
		if(it > 1 && std::abs(nl - lam) <= rtol*std::abs(nl)) {
			out.estimate = std::abs(nl);
			out.conservative = 1.01*out.estimate;
			return out;
		}
		lam = nl;
		v = w/wn;
	}
	throw SolverError("spectral_radius: power iteration did not converge", lam);
}

}
