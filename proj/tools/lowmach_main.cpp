// Command line front end: run, sweep, vortex, check

#include "lowmach/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace lowmach;

int main(int argc, char** argv)
{
	CLI::App app{"Staggered-grid solver for barotropic flows at arbitrary Mach number"};
	app.require_subcommand(1);

	std::string config_path;
	CommandOptions opts;
	std::vector<double> eps;

	auto add_common = [&](CLI::App* cmd) {
		cmd->add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
		cmd->add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
		cmd->add_option("--eps", eps, "Mach number(s); the sweep list for `sweep`")->delimiter(',');
		cmd->add_flag("--strict,!--no-strict", opts.strict, "nonzero exit on diagnostic violations (default on)");
		cmd->add_option("--threads", opts.threads, "worker threads for sweep and vortex runs")
			->check(CLI::PositiveNumber);
	};
	CLI::App* run = app.add_subcommand("run", "single run with per-step diagnostics");
	CLI::App* sweep = app.add_subcommand("sweep", "Mach sweep against the incompressible limit");
	CLI::App* vortex = app.add_subcommand("vortex", "traveling vortex at every configured pressure level");
	CLI::App* check = app.add_subcommand("check", "identity and inequality suite for the compressible schemes");
	for(CLI::App* c : {run, sweep, vortex, check}) add_common(c);

	CLI11_PARSE(app, argc, argv);
	opts.eps_override = eps;

	try {
		RunConfig c = load_config(config_path);
		if(*run) return command_run(c, opts, std::cout);
		if(*sweep) return command_sweep(c, opts, std::cout);
		if(*vortex) return command_vortex(c, opts, std::cout);
		return command_check(c, opts, std::cout);
	} catch(const ConfigError& e) {
		std::cerr << "config error: " << e.what() << '\n';
		return exit_config;
	} catch(const StepFailure& e) {
		std::cerr << "solver failure at " << e.what() << '\n';
		return exit_solver;
	} catch(const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return exit_io;
	}
}
