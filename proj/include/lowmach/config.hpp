/** \file config.hpp
 * \brief INI run configuration: mesh, scheme, case, solver, output and sweep blocks
 */

#ifndef LOWMACH_CONFIG_HPP
#define LOWMACH_CONFIG_HPP

#include "lowmach/vortex.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace lowmach {

class ConfigError : public std::runtime_error
{
public:
	ConfigError(const std::string& what, int line) : std::runtime_error(what), line_{line} {}
	int line() const { return line_; }   ///< 0 when not tied to a line
private:
	int line_;
};

enum class CaseType { rest, smooth, vortex };
enum class DtRule { fixed, mach_uniform };

struct RunConfig
{
	// [mesh]
	int nx = 16, ny = 16;
	Rect domain{0, 1, 0, 1};

	// [scheme] and [solver]
	SchemeConfig scheme;
	double gamma = 1.4;
	double eta = 0.5;
	double C0 = 0;                   ///< 0: from the initial data
	DtRule dt_rule = DtRule::fixed;
	bool allow_cfl_violation = false;

	// [case]
	CaseType case_type = CaseType::smooth;
	double amplitude = 32;           ///< stream function amplitude of the smooth velocity
	int density_order = 2;           ///< rho0 - 1 scales as eps^density_order
	double density_amplitude = 0.5;
	unsigned long long seed = 0;     ///< nonzero: random smooth Fourier data
	VortexParams vortex;
	std::vector<double> pressure_levels = benchmark_pressure_levels();

	// [output]
	std::string out_dir = "out";
	int snapshot_every = 0;          ///< 0: final snapshot only

	// [sweep]
	std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-4};

	void validate() const;
};

RunConfig parse_config(std::istream& is, const std::string& name = "<config>");
RunConfig load_config(const std::string& path);
/// Effective configuration with every default resolved; parse_config reads it back unchanged
void write_config(std::ostream& os, const RunConfig& c);

std::string to_string(CaseType t);
std::string to_string(DtRule r);
std::string to_string(ViscosityMode m);

/// Comma separated list of doubles
std::vector<double> parse_double_list(const std::string& s);

}

#endif
