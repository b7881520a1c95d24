#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lowmach/solvers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace lowmach;

namespace {

SparseOperator sparse(const Eigen::MatrixXd& m)
{
	return m.sparseView();
}

}

TEST_CASE("linear solves")
{
	for(LinearMethod method : {LinearMethod::direct, LinearMethod::iterative}) {
		SolveOptions o;
		o.method = method;
		const Eigen::VectorXd b = Eigen::Vector3d(1, -2, 3);
		LinearReport rep;
		CHECK((linear_solve(sparse(Eigen::Matrix3d::Identity()), b, o, &rep) - b).norm() < 1e-12);
		CHECK(rep.direct == (method == LinearMethod::direct));
		Eigen::Matrix2d a;
		a << 2, 0, 0, 4;
		const Eigen::VectorXd x = linear_solve(sparse(a), Eigen::Vector2d(2, 8), o);
		CHECK(x[0] == doctest::Approx(1.0));
		CHECK(x[1] == doctest::Approx(2.0));
	}
}

TEST_CASE("sparse solve against a dense oracle")
{
	std::mt19937_64 gen(1);
	std::uniform_real_distribution<double> u(-1, 1);
	const int n = 40;
	Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
	for(int i = 0; i < n; i++) {
		a(i, i) = 6;
		if(i > 0) a(i, i-1) = u(gen);
		if(i + 1 < n) a(i, i+1) = u(gen);
		if(i + 7 < n) a(i, i+7) = u(gen);
	}
	Eigen::VectorXd b(n);
	for(int i = 0; i < n; i++) b[i] = u(gen);
	const Eigen::VectorXd ref = a.fullPivLu().solve(b);
	for(LinearMethod method : {LinearMethod::direct, LinearMethod::iterative}) {
		SolveOptions o;
		o.method = method;
		CHECK((linear_solve(sparse(a), b, o) - ref).norm() <= 1e-9*ref.norm());
	}
}

TEST_CASE("singular matrices are reported")
{
	Eigen::Matrix2d a;
	a << 1, 1, 1, 1;
	SolveOptions o;
	o.method = LinearMethod::direct;
	CHECK_THROWS_AS(linear_solve(sparse(a), Eigen::Vector2d(1, 0), o), SolverError);
}

TEST_CASE("fixed point driver")
{
	NonlinearOptions o;
	o.rtol = 1e-13;
	o.atol = 1e-15;
	NonlinearReport rep;
	const Eigen::VectorXd c = Eigen::Vector2d(0.3, -4);
	auto res = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x - c; };
	auto upd = [&](const Eigen::VectorXd&) -> Eigen::VectorXd { return c; };
	const Eigen::VectorXd x = fixed_point_solve(res, upd, Eigen::Vector2d(1, 1), o, 1.0, rep);
	CHECK(rep.converged);
	CHECK(rep.iterations == 1);
	CHECK((x - c).norm() < 1e-15);

	NonlinearReport r2;
	auto rc = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.array() - x.array().cos(); };
	auto uc = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.array().cos(); };
	const Eigen::VectorXd y = fixed_point_solve(rc, uc, Eigen::VectorXd::Constant(1, 1.0), o, 1.0, r2);
	CHECK(r2.converged);
	CHECK(std::abs(y[0] - 0.7390851332151607) < 1e-10);
}

TEST_CASE("fixed point driver reports stagnation")
{
	NonlinearOptions o;
	o.max_iter = 5;
	o.stall = 0;
	NonlinearReport rep;
	// update never moves, residual stays at 1
	auto res = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Ones(x.size()); };
	auto upd = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.array() + 1.0; };
	fixed_point_solve(res, upd, Eigen::VectorXd::Zero(2), o, 1.0, rep);
	CHECK_FALSE(rep.converged);
}

TEST_CASE("power iteration")
{
	Eigen::Matrix3d d = Eigen::Vector3d(1, 2, 5).asDiagonal();
	const SpectralEstimate e = spectral_radius(sparse(d));
	CHECK(std::abs(e.estimate - 5) < 1e-7);
	CHECK(e.conservative == doctest::Approx(1.01*e.estimate));
	CHECK(spectral_radius(SparseOperator(4, 4)).estimate == 0.0);
	CHECK_THROWS(spectral_radius(SparseOperator(3, 4)));
	// fixed start vector, so repeated calls agree bit for bit
	CHECK(spectral_radius(sparse(d)).estimate == e.estimate);
}
