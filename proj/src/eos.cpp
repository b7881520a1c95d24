#include "lowmach/eos.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace lowmach {

namespace {

void require_positive(double rho, const char* who)
{
	if(!(rho > 0))
		throw std::domain_error(std::string(who) + ": nonpositive density " + std::to_string(rho));
}

double integrate(const std::function<double(double)>& f, double a, double b)
{
	double err = 0;
	return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13, &err);
}

// sum_{k>=2} binom(g,k) x^k, valid for |x| small
double binomial_tail(double x, double g)
{
	double c = g*(g-1)/2, xk = x*x, sum = 0;
	for(int k = 2; k < 60; k++) {
		const double term = c*xk;
		sum += term;
		if(std::abs(term) <= 1e-18*std::abs(sum)) break;
		c *= (g-k)/(k+1);
		xk *= x;
	}
	return sum;
}

}

EosParams::EosParams(double g) : gamma{g}
{
	if(!(g >= 1)) throw std::invalid_argument("EosParams: gamma must be >= 1");
}

EosParams EosParams::general(std::function<double(double)> p)
{
	EosParams e;
	e.gamma = 1;
	e.law = std::move(p);
	const double step = 1e-5;
	const double d1 = (e.law(1+step) - e.law(1-step))/(2*step);
	if(!(d1 > 0)) throw std::invalid_argument("EosParams: the pressure law needs p'(1) > 0");
	return e;
}

double EosParams::p(double rho) const
{
	require_positive(rho, "pressure");
	if(law) return law(rho);
	return gamma == 1 ? rho : std::pow(rho, gamma);
}

double EosParams::dp(double rho) const
{
	if(law) {
		const double step = 1e-6*std::max(1.0, rho);
		return (law(rho+step) - law(std::max(rho-step, 0.5*rho)))/(rho+step - std::max(rho-step, 0.5*rho));
	}
	return gamma == 1 ? 1.0 : gamma*std::pow(rho, gamma-1);
}

double EosParams::psi(double rho) const
{
	if(!law) return lowmach::psi(rho, gamma);
	require_positive(rho, "psi");
	return rho*integrate([this](double s) { return law(s)/(s*s); }, 1.0, rho);
}

double EosParams::psi_dd(double rho) const
{
	if(!law) return lowmach::psi_dd(rho, gamma);
	return dp(rho)/rho;
}

double EosParams::pi(double rho) const
{
	if(!law) return pi_entropy(rho, gamma);
	require_positive(rho, "pi");
	// Pi(rho) = (rho-1)^2 int_0^1 p'(1+s(rho-1))/(1+s(rho-1)) (1-s) ds
	const double x = rho - 1;
	return x*x*integrate([this, x](double s) {
		const double r = 1 + s*x;
		return dp(r)/r*(1-s);
	}, 0.0, 1.0);
}

CellField pressure(const CellField& rho, const EosParams& eos)
{
	CellField p(rho.size());
	for(size_t k = 0; k < rho.size(); k++) p[k] = eos.p(rho[k]);
	return p;
}

double psi(double rho, double gamma)
{
	require_positive(rho, "psi");
	if(gamma == 1) return rho*std::log(rho);
	return std::pow(rho, gamma)/(gamma-1);
}

double psi_dd(double rho, double gamma)
{
	require_positive(rho, "psi_dd");
	if(gamma == 1) return 1/rho;
	return gamma*std::pow(rho, gamma-2);
}

double pi_entropy(double rho, double gamma)
{
	require_positive(rho, "pi_entropy");
	const double x = rho - 1;
	if(gamma == 1) {
		if(std::abs(x) < 0.1) {
			double sum = 0, xk = x*x;
			for(int k = 2; k < 60; k++) {
				const double term = (k % 2 == 0 ? 1.0 : -1.0)*xk/(k*(k-1.0));
				sum += term;
				if(std::abs(term) <= 1e-18*std::abs(sum)) break;
				xk *= x;
			}
			return sum;
		}
		return rho*std::log(rho) - rho + 1;
	}
	if(std::abs(x) < 0.1) return binomial_tail(x, gamma)/(gamma-1);
	return (std::pow(rho, gamma) - 1 - gamma*x)/(gamma-1);
}

PiBounds pi_bound_constants(double gamma, double R)
{
	if(!(R > 2)) throw std::invalid_argument("pi_bound_constants: R must exceed 2");
	if(!(gamma >= 1)) throw std::invalid_argument("pi_bound_constants: gamma must be >= 1");
	PiBounds b;
	if(gamma >= 2) {
		b.lower_small = 1;
		b.lower_tail = 1/(gamma-1);
		b.upper = gamma*integrate([gamma](double s) { return std::pow(1+s, gamma-2)*(1-s); }, 0.0, 1.0);
	} else {
		const double c = gamma*integrate([gamma, R](double s) {
			return (1-s)/std::pow(1+s*(R-1), 2-gamma);
		}, 0.0, 1.0);
		b.lower_small = c;
		b.lower_tail = c;
		b.upper = 1;
	}
	return b;
}

}
