/** \file eos.hpp
 * \brief Barotropic pressure law and the entropy functions psi, Pi
 */

#ifndef LOWMACH_EOS_HPP
#define LOWMACH_EOS_HPP

#include <functional>
#include <vector>

namespace lowmach {

using CellField = std::vector<double>;

/// Pressure law p = rho^gamma, or a user law when `law` is set
struct EosParams
{
	double gamma = 1.4;
	std::function<double(double)> law;

	EosParams() = default;
	explicit EosParams(double g);
	/// General barotropic law; checks p'(1) > 0 by a centered difference
	static EosParams general(std::function<double(double)> p);

	bool is_gamma_law() const { return !law; }
	double p(double rho) const;
	double dp(double rho) const;
	/// psi(rho) = rho * int_1^rho p(s)/s^2 ds for a general law
	double psi(double rho) const;
	double psi_dd(double rho) const;
	double pi(double rho) const;
};

CellField pressure(const CellField& rho, const EosParams& eos);

double psi(double rho, double gamma);
double psi_dd(double rho, double gamma);
/// Pi_gamma(rho) = psi(rho) - psi(1) - psi'(1)(rho-1), evaluated without cancellation near 1
double pi_entropy(double rho, double gamma);

struct PiBounds
{
	double lower_small;   ///< Pi >= lower_small (rho-1)^2 on (0,R), every rho > 0 when gamma >= 2
	double lower_tail;    ///< Pi >= lower_tail |rho-1|^gamma on [R, inf)
	double upper;         ///< Pi <= upper (rho-1)^2 on (0,2)
};

PiBounds pi_bound_constants(double gamma, double R);

}

#endif
