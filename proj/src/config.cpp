#include "lowmach/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace lowmach {

namespace pt = boost::property_tree;

std::string to_string(CaseType t)
{
	switch(t) {
	case CaseType::rest: return "rest";
	case CaseType::smooth: return "smooth";
	case CaseType::vortex: return "vortex";
	}
	return "?";
}

std::string to_string(DtRule r) { return r == DtRule::fixed ? "fixed" : "mach_uniform"; }
std::string to_string(ViscosityMode m) { return m == ViscosityMode::euler_artificial ? "euler" : "navier_stokes"; }

namespace {

std::string trim(const std::string& s)
{
	const auto b = s.find_first_not_of(" \t\r");
	if(b == std::string::npos) return "";
	const auto e = s.find_last_not_of(" \t\r");
	return s.substr(b, e - b + 1);
}

// Line of `section.key` in the raw text, 0 if not found
int find_line(const std::string& text, const std::string& section, const std::string& key)
{
	std::istringstream is(text);
	std::string line, current;
	int n = 0;
	while(std::getline(is, line)) {
		n++;
		const std::string t = trim(line);
		if(t.empty() || t[0] == ';' || t[0] == '#') continue;
		if(t.front() == '[' && t.back() == ']') {
			current = trim(t.substr(1, t.size() - 2));
			continue;
		}
		const auto eq = t.find('=');
		if(eq != std::string::npos && current == section && trim(t.substr(0, eq)) == key) return n;
	}
	return 0;
}

double to_double(const std::string& v)
{
	size_t pos = 0;
	const double d = std::stod(v, &pos);
	if(trim(v.substr(pos)) != "") throw std::invalid_argument("trailing characters");
	return d;
}

long long to_integer(const std::string& v)
{
	size_t pos = 0;
	const long long d = std::stoll(v, &pos);
	if(trim(v.substr(pos)) != "") throw std::invalid_argument("trailing characters");
	return d;
}

bool to_bool(const std::string& v)
{
	if(v == "true" || v == "1" || v == "yes") return true;
	if(v == "false" || v == "0" || v == "no") return false;
	throw std::invalid_argument("expected true or false");
}

std::string fmt(double v)
{
	std::ostringstream os;
	os << std::setprecision(17) << v;
	return os.str();
}

std::string fmt_list(const std::vector<double>& v)
{
	std::string s;
	for(size_t i = 0; i < v.size(); i++) s += (i ? "," : "") + fmt(v[i]);
	return s;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
	static const std::map<std::string, Setter> m{
		{"mesh.nx", [](RunConfig& c, const std::string& v) { c.nx = static_cast<int>(to_integer(v)); }},
		{"mesh.ny", [](RunConfig& c, const std::string& v) { c.ny = static_cast<int>(to_integer(v)); }},
		{"mesh.x0", [](RunConfig& c, const std::string& v) { c.domain.x0 = to_double(v); }},
		{"mesh.x1", [](RunConfig& c, const std::string& v) { c.domain.x1 = to_double(v); }},
		{"mesh.y0", [](RunConfig& c, const std::string& v) { c.domain.y0 = to_double(v); }},
		{"mesh.y1", [](RunConfig& c, const std::string& v) { c.domain.y1 = to_double(v); }},
		{"scheme.kind", [](RunConfig& c, const std::string& v) { c.scheme.kind = scheme_kind_from_string(v); }},
		{"scheme.dt", [](RunConfig& c, const std::string& v) { c.scheme.dt = to_double(v); }},
		{"scheme.t_end", [](RunConfig& c, const std::string& v) { c.scheme.t_end = to_double(v); }},
		{"scheme.eps", [](RunConfig& c, const std::string& v) { c.scheme.eps = to_double(v); }},
		{"scheme.gamma", [](RunConfig& c, const std::string& v) { c.gamma = to_double(v); }},
		{"scheme.mu", [](RunConfig& c, const std::string& v) { c.scheme.mu = to_double(v); }},
		{"scheme.lambda", [](RunConfig& c, const std::string& v) { c.scheme.lambda = to_double(v); }},
		{"scheme.eta", [](RunConfig& c, const std::string& v) { c.eta = to_double(v); }},
		{"scheme.C0", [](RunConfig& c, const std::string& v) { c.C0 = to_double(v); }},
		{"scheme.dt_rule", [](RunConfig& c, const std::string& v) {
			if(v == "fixed") c.dt_rule = DtRule::fixed;
			else if(v == "mach_uniform") c.dt_rule = DtRule::mach_uniform;
			else throw std::invalid_argument("expected fixed or mach_uniform");
		}},
		{"scheme.allow_cfl_violation", [](RunConfig& c, const std::string& v) { c.allow_cfl_violation = to_bool(v); }},
		{"scheme.convection", [](RunConfig& c, const std::string& v) {
			if(v == "centered") c.scheme.convection = ConvectionMode::centered;
			else if(v == "upwind") c.scheme.convection = ConvectionMode::upwind;
			else throw std::invalid_argument("expected centered or upwind");
		}},
		{"case.type", [](RunConfig& c, const std::string& v) {
			if(v == "rest") c.case_type = CaseType::rest;
			else if(v == "smooth") c.case_type = CaseType::smooth;
			else if(v == "vortex") c.case_type = CaseType::vortex;
			else throw std::invalid_argument("expected rest, smooth or vortex");
		}},
		{"case.amplitude", [](RunConfig& c, const std::string& v) { c.amplitude = to_double(v); }},
		{"case.density_order", [](RunConfig& c, const std::string& v) { c.density_order = static_cast<int>(to_integer(v)); }},
		{"case.density_amplitude", [](RunConfig& c, const std::string& v) { c.density_amplitude = to_double(v); }},
		{"case.seed", [](RunConfig& c, const std::string& v) { c.seed = static_cast<unsigned long long>(to_integer(v)); }},
		{"case.c_M", [](RunConfig& c, const std::string& v) { c.vortex.c_M = to_double(v); }},
		{"case.vortex_mode", [](RunConfig& c, const std::string& v) {
			if(v == "euler") c.vortex.mode = ViscosityMode::euler_artificial;
			else if(v == "navier_stokes") c.vortex.mode = ViscosityMode::navier_stokes;
			else throw std::invalid_argument("expected euler or navier_stokes");
		}},
		{"case.v_max", [](RunConfig& c, const std::string& v) { c.vortex.v_max = to_double(v); }},
		{"case.analytic_source", [](RunConfig& c, const std::string& v) { c.vortex.analytic_source = to_bool(v); }},
		{"case.pressure_levels", [](RunConfig& c, const std::string& v) { c.pressure_levels = parse_double_list(v); }},
		{"solver.linear_rtol", [](RunConfig& c, const std::string& v) { c.scheme.linear.rtol = to_double(v); }},
		{"solver.linear_atol", [](RunConfig& c, const std::string& v) { c.scheme.linear.atol = to_double(v); }},
		{"solver.linear_max_iter", [](RunConfig& c, const std::string& v) { c.scheme.linear.max_iter = static_cast<int>(to_integer(v)); }},
		{"solver.linear_method", [](RunConfig& c, const std::string& v) {
			if(v == "automatic") c.scheme.linear.method = LinearMethod::automatic;
			else if(v == "direct") c.scheme.linear.method = LinearMethod::direct;
			else if(v == "iterative") c.scheme.linear.method = LinearMethod::iterative;
			else throw std::invalid_argument("expected automatic, direct or iterative");
		}},
		{"solver.newton_rtol", [](RunConfig& c, const std::string& v) { c.scheme.nonlinear.rtol = to_double(v); }},
		{"solver.newton_atol", [](RunConfig& c, const std::string& v) { c.scheme.nonlinear.atol = to_double(v); }},
		{"solver.newton_stall", [](RunConfig& c, const std::string& v) { c.scheme.nonlinear.stall = to_double(v); }},
		{"solver.newton_max_iter", [](RunConfig& c, const std::string& v) { c.scheme.nonlinear.max_iter = static_cast<int>(to_integer(v)); }},
		{"solver.outer_rtol", [](RunConfig& c, const std::string& v) { c.scheme.outer.rtol = to_double(v); }},
		{"solver.outer_atol", [](RunConfig& c, const std::string& v) { c.scheme.outer.atol = to_double(v); }},
		{"solver.outer_stall", [](RunConfig& c, const std::string& v) { c.scheme.outer.stall = to_double(v); }},
		{"solver.outer_max_iter", [](RunConfig& c, const std::string& v) { c.scheme.outer.max_iter = static_cast<int>(to_integer(v)); }},
		{"output.dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
		{"output.snapshot_every", [](RunConfig& c, const std::string& v) { c.snapshot_every = static_cast<int>(to_integer(v)); }},
		{"sweep.eps", [](RunConfig& c, const std::string& v) { c.eps_list = parse_double_list(v); }},
	};
	return m;
}

}

std::vector<double> parse_double_list(const std::string& s)
{
	std::vector<double> out;
	std::stringstream ss(s);
	std::string item;
	while(std::getline(ss, item, ',')) {
		item = trim(item);
		if(item.empty()) throw std::invalid_argument("empty list entry");
		out.push_back(to_double(item));
	}
	if(out.empty()) throw std::invalid_argument("empty list");
	return out;
}

void RunConfig::validate() const
{
	if(nx < 1 || ny < 1) throw ConfigError("mesh: nx and ny must be at least 1", 0);
	if(!(domain.x1 > domain.x0 && domain.y1 > domain.y0)) throw ConfigError("mesh: degenerate domain", 0);
	if(!(eta > 0 && eta < 1)) throw ConfigError("scheme: eta must lie in (0,1)", 0);
	if(C0 < 0) throw ConfigError("scheme: C0 must be nonnegative", 0);
	if(snapshot_every < 0) throw ConfigError("output: snapshot_every must be nonnegative", 0);
	if(density_order < 0) throw ConfigError("case: density_order must be nonnegative", 0);
	for(double e : eps_list)
		if(!(e > 0)) throw ConfigError("sweep: eps values must be positive", 0);
	for(double c : pressure_levels)
		if(!(c > 0)) throw ConfigError("case: pressure levels must be positive", 0);
	if(case_type == CaseType::vortex && scheme.kind != SchemeKind::pressure_correction)
		throw ConfigError("case: the vortex case runs the pressure_correction scheme", 0);
	try {
		SchemeConfig s = scheme;
		s.eos = EosParams(gamma);
		s.validate();
		if(case_type == CaseType::vortex) vortex.validate();
	} catch(const std::invalid_argument& e) {
		throw ConfigError(e.what(), 0);
	}
}

RunConfig parse_config(std::istream& is, const std::string& name)
{
	const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
	pt::ptree tree;
	try {
		std::istringstream ss(text);
		pt::read_ini(ss, tree);
	} catch(const pt::ini_parser_error& e) {
		throw ConfigError(name + ":" + std::to_string(e.line()) + ": " + e.message(), static_cast<int>(e.line()));
	}
	RunConfig c;
	for(const auto& [section, body] : tree) {
		if(body.empty() && !body.data().empty())
			throw ConfigError(name + ": key '" + section + "' outside a section", find_line(text, "", section));
		for(const auto& [key, value] : body) {
			const std::string full = section + "." + key;
			const int line = find_line(text, section, key);
			const auto it = setters().find(full);
			if(it == setters().end())
				throw ConfigError(name + ":" + std::to_string(line) + ": unknown key '" + full + "'", line);
			try {
				it->second(c, trim(value.data()));
			} catch(const std::exception& e) {
				throw ConfigError(name + ":" + std::to_string(line) + ": bad value '" + value.data() + "' for " + full
				                  + " (" + e.what() + ")", line);
			}
		}
	}
	c.scheme.eos = EosParams(c.gamma > 0 ? c.gamma : 1.4);
	c.vortex.domain = c.domain;
	c.vortex.gamma = c.gamma;
	c.vortex.t_end = c.scheme.t_end;
	try {
		c.validate();
	} catch(const ConfigError& e) {
		throw ConfigError(name + ": " + e.what(), 0);
	}
	return c;
}

RunConfig load_config(const std::string& path)
{
	std::ifstream f(path);
	if(!f) throw ConfigError("cannot read config file '" + path + "'", 0);
	return parse_config(f, path);
}

void write_config(std::ostream& os, const RunConfig& c)
{
	auto method = [](LinearMethod m) {
		return m == LinearMethod::automatic ? "automatic" : m == LinearMethod::direct ? "direct" : "iterative";
	};
	os << "[mesh]\n"
	   << "nx = " << c.nx << "\nny = " << c.ny << "\n"
	   << "x0 = " << fmt(c.domain.x0) << "\nx1 = " << fmt(c.domain.x1) << "\n"
	   << "y0 = " << fmt(c.domain.y0) << "\ny1 = " << fmt(c.domain.y1) << "\n\n";
	os << "[scheme]\n"
	   << "kind = " << to_string(c.scheme.kind) << "\n"
	   << "dt = " << fmt(c.scheme.dt) << "\nt_end = " << fmt(c.scheme.t_end) << "\n"
	   << "eps = " << fmt(c.scheme.eps) << "\ngamma = " << fmt(c.gamma) << "\n"
	   << "mu = " << fmt(c.scheme.mu) << "\nlambda = " << fmt(c.scheme.lambda) << "\n"
	   << "eta = " << fmt(c.eta) << "\nC0 = " << fmt(c.C0) << "\n"
	   << "dt_rule = " << to_string(c.dt_rule) << "\n"
	   << "allow_cfl_violation = " << (c.allow_cfl_violation ? "true" : "false") << "\n"
	   << "convection = " << (c.scheme.convection == ConvectionMode::centered ? "centered" : "upwind") << "\n\n";
	os << "[case]\n"
	   << "type = " << to_string(c.case_type) << "\n"
	   << "amplitude = " << fmt(c.amplitude) << "\n"
	   << "density_order = " << c.density_order << "\n"
	   << "density_amplitude = " << fmt(c.density_amplitude) << "\n"
	   << "seed = " << c.seed << "\n"
	   << "c_M = " << fmt(c.vortex.c_M) << "\n"
	   << "vortex_mode = " << to_string(c.vortex.mode) << "\n"
	   << "v_max = " << fmt(c.vortex.v_max) << "\n"
	   << "analytic_source = " << (c.vortex.analytic_source ? "true" : "false") << "\n"
	   << "pressure_levels = " << fmt_list(c.pressure_levels) << "\n\n";
	os << "[solver]\n"
	   << "linear_rtol = " << fmt(c.scheme.linear.rtol) << "\nlinear_atol = " << fmt(c.scheme.linear.atol) << "\n"
	   << "linear_max_iter = " << c.scheme.linear.max_iter << "\n"
	   << "linear_method = " << method(c.scheme.linear.method) << "\n"
	   << "newton_rtol = " << fmt(c.scheme.nonlinear.rtol) << "\nnewton_atol = " << fmt(c.scheme.nonlinear.atol) << "\n"
	   << "newton_stall = " << fmt(c.scheme.nonlinear.stall) << "\n"
	   << "newton_max_iter = " << c.scheme.nonlinear.max_iter << "\n"
	   << "outer_rtol = " << fmt(c.scheme.outer.rtol) << "\nouter_atol = " << fmt(c.scheme.outer.atol) << "\n"
	   << "outer_stall = " << fmt(c.scheme.outer.stall) << "\n"
	   << "outer_max_iter = " << c.scheme.outer.max_iter << "\n\n";
	os << "[output]\n"
	   << "dir = " << c.out_dir << "\nsnapshot_every = " << c.snapshot_every << "\n\n";
	os << "[sweep]\n"
	   << "eps = " << fmt_list(c.eps_list) << "\n";
}

}
