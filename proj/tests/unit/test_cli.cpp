#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lowmach/config.hpp"

#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace lowmach;

namespace {

fs::path scratch()
{
	static const fs::path p = [] {
		fs::path d = fs::temp_directory_path()/("lowmach_cli_" + std::to_string(::getpid()));
		fs::remove_all(d);
		fs::create_directories(d);
		return d;
	}();
	return p;
}

std::string cli()
{
	const char* e = std::getenv("LOWMACH_CLI");
	REQUIRE_MESSAGE(e, "LOWMACH_CLI is not set");
	return e;
}

fs::path write_file(const std::string& name, const std::string& text)
{
	const fs::path p = scratch()/name;
	std::ofstream(p, std::ios::binary) << text;
	return p;
}

std::string slurp(const fs::path& p)
{
	std::ifstream f(p, std::ios::binary);
	std::stringstream ss;
	ss << f.rdbuf();
	return ss.str();
}

/// exit code of the command; stdout and stderr go to files under the scratch directory
int run(const std::string& args, const std::string& tag)
{
	const std::string cmd = cli() + " " + args + " > " + (scratch()/(tag + ".out")).string() + " 2> "
	                        + (scratch()/(tag + ".err")).string();
	const int st = std::system(cmd.c_str());
	return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const std::string rest_cfg =
	"[mesh]\nnx = 4\nny = 4\n\n[scheme]\nkind = implicit\ndt = 0.01\nt_end = 0.1\n\n[case]\ntype = rest\n";

const std::string sweep_cfg =
	"[mesh]\nnx = 6\nny = 6\n\n[scheme]\nkind = pressure_correction\ndt = 0.01\nt_end = 0.03\nmu = 0.05\n\n"
	"[case]\ntype = smooth\n\n[sweep]\neps = ";

}

TEST_CASE("rest run")
{
	const fs::path cfg = write_file("rest.ini", rest_cfg);
	const fs::path out = scratch()/"rest";
	CHECK(run("run --config " + cfg.string() + " --out " + out.string(), "rest") == 0);
	for(const char* f : {"run_log.csv", "step_reports.csv", "effective_config.ini", "summary.txt"})
		CHECK_MESSAGE(fs::exists(out/f), f);
	// header and 10 steps, plus the initial row if any
	std::ifstream log(out/"run_log.csv");
	int lines = 0;
	for(std::string l; std::getline(log, l);) lines++;
	CHECK(lines >= 11);
	CHECK(slurp(out/"run_log.csv").find('\r') == std::string::npos);
}

TEST_CASE("effective config round trip")
{
	const fs::path out = scratch()/"rest";
	REQUIRE(fs::exists(out/"effective_config.ini"));
	const std::string first = slurp(out/"effective_config.ini");
	std::stringstream again;
	std::istringstream in(first);
	write_config(again, parse_config(in));
	CHECK(again.str() == first);

	const fs::path out2 = scratch()/"rest2";
	CHECK(run("run --config " + (out/"effective_config.ini").string() + " --out " + out2.string(), "rest2") == 0);
	// only the output directory differs, since --out overrides it
	std::string expect = first;
	const std::string dir = "dir = " + out.string() + "\n";
	expect.replace(expect.find(dir), dir.size(), "dir = " + out2.string() + "\n");
	CHECK(slurp(out2/"effective_config.ini") == expect);
	CHECK(slurp(out2/"run_log.csv") == slurp(out/"run_log.csv"));
}

TEST_CASE("semi-implicit step over the stability bound is rejected")
{
	const std::string body = "[mesh]\nnx = 8\nny = 8\n\n[scheme]\nkind = semi_implicit\nmu = 0.1\n";
	const fs::path over = write_file("semi.ini", body + "dt = 0.05\nt_end = 0.05\n\n[case]\ntype = smooth\n");
	CHECK(run("run --config " + over.string() + " --out " + (scratch()/"semi").string(), "semi") == 2);
	CHECK(slurp(scratch()/"semi.err").find("stability bound") != std::string::npos);

	const fs::path forced = write_file("semi_forced.ini",
		body + "dt = 0.05\nt_end = 0.05\nallow_cfl_violation = true\n\n[case]\ntype = smooth\n");
	CHECK(run("run --config " + forced.string() + " --out " + (scratch()/"semi_f").string(), "semi_f") == 1);
	CHECK(run("run --no-strict --config " + forced.string() + " --out " + (scratch()/"semi_f").string(), "semi_f2") == 0);

	// inside the bound but above half of it: the remainder may change sign and is reported
	const fs::path near = write_file("semi_near.ini", body + "dt = 0.01\nt_end = 0.01\n\n[case]\ntype = smooth\n");
	CHECK(run("run --config " + near.string() + " --out " + (scratch()/"semi_n").string(), "semi_n") == 1);
	CHECK(slurp(scratch()/"semi_n.out").find("stability remainder") != std::string::npos);
}

TEST_CASE("config errors carry the line")
{
	const fs::path cfg = write_file("bad.ini", "[mesh]\nnx = 4\n\n[scheme]\nkind = implicit\ndtt = 0.1\n");
	CHECK(run("run --config " + cfg.string(), "bad") == 2);
	const std::string err = slurp(scratch()/"bad.err");
	CHECK(err.find(":6:") != std::string::npos);
	CHECK(err.find("scheme.dtt") != std::string::npos);

	const fs::path val = write_file("badval.ini", "[mesh]\nnx = four\n");
	CHECK(run("run --config " + val.string(), "badval") == 2);
	CHECK(slurp(scratch()/"badval.err").find(":2:") != std::string::npos);

	CHECK(run("run --config " + (scratch()/"missing.ini").string(), "missing") != 0);
	CHECK(run("", "none") != 0);
}

TEST_CASE("sweep output does not depend on the order of the list or the thread count")
{
	const fs::path a = write_file("sweep_a.ini", sweep_cfg + "1e-1, 1e-2, 1e-3\n");
	const fs::path b = write_file("sweep_b.ini", sweep_cfg + "1e-3, 1e-2, 1e-1\n");
	CHECK(run("sweep --config " + a.string() + " --out " + (scratch()/"sa").string(), "sa") == 0);
	CHECK(run("sweep --config " + b.string() + " --out " + (scratch()/"sb").string() + " --threads 3", "sb") == 0);
	const std::string sa = slurp(scratch()/"sa"/"sweep_summary.csv");
	CHECK_FALSE(sa.empty());
	CHECK(sa == slurp(scratch()/"sb"/"sweep_summary.csv"));
	CHECK(slurp(scratch()/"sa"/"rate_report.txt") == slurp(scratch()/"sb"/"rate_report.txt"));
}

TEST_CASE("check command")
{
	const fs::path cfg = write_file("check.ini",
		"[mesh]\nnx = 6\nny = 6\n\n[scheme]\ndt = 0.0005\nt_end = 0.002\nmu = 0.05\neps = 0.5\n\n[case]\ntype = smooth\n");
	CHECK(run("check --config " + cfg.string() + " --out " + (scratch()/"check").string(), "check") == 0);
	CHECK(fs::exists(scratch()/"check"/"check_report.csv"));
}

TEST_CASE("shipped configurations parse and validate")
{
	const char* dir = std::getenv("LOWMACH_CONFIGS");
	REQUIRE_MESSAGE(dir, "LOWMACH_CONFIGS is not set");
	int n = 0;
	for(const fs::directory_entry& e : fs::directory_iterator(dir)) {
		if(e.path().extension() != ".ini") continue;
		CAPTURE(e.path().string());
		CHECK_NOTHROW(load_config(e.path().string()).validate());
		n++;
	}
	CHECK(n >= 8);
}
