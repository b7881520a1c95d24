#include "lowmach/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace lowmach {

namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

/// Runs f(0..n-1) on a pool of workers; f must not throw
template<class F>
void parallel_for(int n, int threads, F f)
{
	std::atomic<int> next{0};
	auto work = [&] {
		for(int i; (i = next++) < n;) f(i);
	};
	threads = std::clamp(threads, 1, std::max(1, n));
	std::vector<std::thread> pool;
	for(int t = 1; t < threads; t++) pool.emplace_back(work);
	work();
	for(std::thread& t : pool) t.join();
}

std::ofstream open_out(const fs::path& p)
{
	std::ofstream f(p, std::ios::binary);
	if(!f) throw std::runtime_error("cannot write '" + p.string() + "'");
	f << std::setprecision(17);
	return f;
}

std::string level_tag(double v)
{
	std::ostringstream os;
	os << v;
	return os.str();
}

VortexParams vortex_params(const RunConfig& c)
{
	VortexParams p = c.vortex;
	p.domain = c.domain;
	p.gamma = c.gamma;
	p.t_end = c.scheme.t_end;
	return p;
}

void copy_solver_options(SchemeConfig& s, const RunConfig& c)
{
	s.linear = c.scheme.linear;
	s.nonlinear = c.scheme.nonlinear;
	s.outer = c.scheme.outer;
}

/// Report of the initial state, the n = 0 row of the run log
StepReport initial_report(const StaggeredMesh& mesh, const SchemeConfig& s, const SolverState& s0, double bound)
{
	StepReport r;
	r.dt = s.dt;
	r.mass = total_mass(mesh, s0.rho);
	r.min_rho = *std::min_element(s0.rho.begin(), s0.rho.end());
	r.global_bound = bound;
	r.global_entropy = bound;
	if(is_incompressible(s.kind)) {
		r.kinetic_energy = kinetic_energy(mesh, std::vector<double>(mesh.num_faces(), 1.0), s0.u);
		r.dp_l2 = cell_l2(mesh, s0.dp);
		r.dp_linf = cell_linf(s0.dp);
		return r;
	}
	const CellField& rd = s.kind == SchemeKind::implicit || s0.rho_prev.empty() ? s0.rho : s0.rho_prev;
	r.kinetic_energy = kinetic_energy(mesh, dual_density(mesh, rd), s0.u);
	r.elastic_potential = elastic_potential(mesh, s0.rho, s.eps, s.eos);
	const PressureDeviation pd = pressure_deviation(mesh, s0.rho, s.eos, s.eps);
	r.dp_l2 = pd.l2;
	r.dp_linf = pd.linf;
	return r;
}

}

StaggeredMesh make_mesh(const RunConfig& c)
{
	return build_uniform_grid(c.nx, c.ny, c.domain);
}

SmoothData smooth_data(const RunConfig& c, double eps)
{
	SmoothData d;
	if(c.case_type == CaseType::rest) {
		d.rho0 = [](const Vec2&) { return 1.0; };
		d.u0 = [](const Vec2&) { return Vec2{}; };
		d.r = [](const Vec2&) { return 0.0; };
		return d;
	}
	const Rect dom = c.domain;
	const double lx = dom.x1 - dom.x0, ly = dom.y1 - dom.y0, amp = c.amplitude;

	// stream function amp (X(1-X) Y(1-Y))^2 m(X,Y); m = 1 unless seeded
	std::vector<double> cm(9, 0.0), dr(4, 0.0);
	dr[0] = 1;
	if(c.seed != 0) {
		std::mt19937_64 gen(c.seed);
		std::uniform_real_distribution<double> uc(-0.3, 0.3), ud(-0.25, 0.25);
		for(double& v : cm) v = uc(gen);
		for(double& v : dr) v = ud(gen);
	}
	d.u0 = [=](const Vec2& x) {
		const double X = (x.x - dom.x0)/lx, Y = (x.y - dom.y0)/ly;
		const double sx = X*(1 - X), sy = Y*(1 - Y);
		const double b = sx*sx*sy*sy;
		const double bX = 2*sx*(1 - 2*X)*sy*sy, bY = 2*sy*(1 - 2*Y)*sx*sx;
		double m = 1, mX = 0, mY = 0;
		for(int i = 0; i < 3; i++)
			for(int j = 0; j < 3; j++) {
				const double c0 = cm[3*i + j], ki = (i + 1)*pi, kj = (j + 1)*pi;
				m += c0*std::cos(ki*X)*std::cos(kj*Y);
				mX -= c0*ki*std::sin(ki*X)*std::cos(kj*Y);
				mY -= c0*kj*std::cos(ki*X)*std::sin(kj*Y);
			}
		const double psiX = amp*(bX*m + b*mX), psiY = amp*(bY*m + b*mY);
		return Vec2{psiY/ly, -psiX/lx};
	};
	d.r = [=](const Vec2& x) {
		const double X = (x.x - dom.x0)/lx, Y = (x.y - dom.y0)/ly;
		double r = 0;
		for(int i = 0; i < 2; i++)
			for(int j = 0; j < 2; j++) r += dr[2*i + j]*std::cos(2*pi*(i + 1)*X)*std::cos(2*pi*(j + 1)*Y);
		return r;
	};
	const double scale = std::pow(eps, c.density_order)*c.density_amplitude;
	const ScalarInit r = d.r;
	d.rho0 = [r, scale](const Vec2& x) { return 1 + scale*r(x); };
	return d;
}

SchemeConfig make_scheme(const RunConfig& c, const StaggeredMesh& mesh, double eps)
{
	if(c.case_type == CaseType::vortex) {
		SchemeConfig s = vortex_config(mesh, vortex_params(c), c.scheme.dt);
		copy_solver_options(s, c);
		return s;
	}
	SchemeConfig s = c.scheme;
	s.eps = eps;
	s.eos = EosParams(c.gamma);
	return s;
}

SolverState make_initial_state(const RunConfig& c, const StaggeredMesh& mesh, const SchemeConfig& s)
{
	if(c.case_type == CaseType::vortex) return vortex_initial_state(mesh, vortex_params(c), s.dt);
	const SmoothData d = smooth_data(c, s.eps);
	switch(s.kind) {
	case SchemeKind::implicit: return init_implicit(mesh, d.rho0, d.u0);
	case SchemeKind::pressure_correction:
	case SchemeKind::semi_implicit: return init_pressure_correction(mesh, d.rho0, d.u0, s.dt);
	case SchemeKind::incomp_implicit: return init_incompressible(mesh, d.u0, false);
	case SchemeKind::incomp_semi: return init_incompressible(mesh, d.u0, true);
	case SchemeKind::incomp_pc: {
		// limit of the initial pressure deviation of well-prepared data
		CellField dp0;
		if(c.density_order == 2) {
			const double slope = s.eos.dp(1.0)*c.density_amplitude;
			dp0 = cell_averages(mesh, [&](const Vec2& x) { return slope*d.r(x); });
			const double m = cell_mean(mesh, dp0);
			for(double& v : dp0) v -= m;
		}
		return init_incompressible(mesh, d.u0, true, dp0);
	}
	}
	throw std::logic_error("make_initial_state: unknown scheme");
}

double resolve_C0(const RunConfig& c, const StaggeredMesh& mesh, const std::vector<double>& eps_values)
{
	if(c.C0 > 0) return c.C0;
	const EosParams eos(c.gamma);
	double C0 = 0;
	for(double eps : eps_values) {
		const SmoothData d = smooth_data(c, eps);
		SolverState s;
		s.rho = cell_averages(mesh, d.rho0);
		s.u = face_averages(mesh, d.u0);
		C0 = std::max(C0, initial_energy(mesh, s, eps, eos));
	}
	// a fluid at rest still needs a finite bound
	return C0 > 0 ? C0 : 1.0;
}

double resolve_dt(const RunConfig& c, const StaggeredMesh& mesh, const RigidityMatrix& a, double C0)
{
	if(c.dt_rule == DtRule::fixed || c.case_type == CaseType::vortex) return c.scheme.dt;
	const double rho_a = a.a_int.nonZeros() > 0 ? spectral_radius(a.a_int).conservative : 0.0;
	return mach_uniform_dt(mesh, rho_a, C0, c.eta);
}

void check_cfl_admissible(const RunConfig& c, const StaggeredMesh& mesh, const SchemeConfig& s,
                          const SolverState& s0, const RigidityMatrix& a)
{
	if(s.kind != SchemeKind::semi_implicit || c.allow_cfl_violation) return;
	const CflBudget b = cfl_budget(s0, mesh, a, 0, c.eta);
	if(s.dt > b.dt_combined) {
		std::ostringstream os;
		os << std::setprecision(6) << "semi_implicit: dt = " << s.dt << " exceeds the stability bound "
		   << b.dt_combined << " of the initial state (set scheme.allow_cfl_violation = true to run anyway)";
		throw ConfigError(os.str(), 0);
	}
}

RunResult simulate(const StaggeredMesh& mesh, const SchemeConfig& s, const RigidityMatrix& a, const SolverState& s0,
                   const StepObserver& observer, const Tolerances& tol)
{
	s.validate();
	EntropyAudit audit(mesh, s, a, s0);
	const double rho_a = audit.rho_a();
	RunResult res;
	res.dt = s.dt;
	res.initial_bound = audit.initial_bound();
	res.initial_budget = cfl_budget(s0, mesh, rho_a, 0, 0.5);
	res.reports.push_back(initial_report(mesh, s, s0, audit.initial_bound()));
	if(observer) observer(s0, nullptr);

	SolverState cur = s0;
	const int steps = s.num_steps();
	for(int n = 1; n <= steps; n++) {
		double margin = CflBudget::unbounded;
		if(!is_incompressible(s.kind)) margin = cfl_budget(cur, mesh, rho_a, 0, 0.5).dt_combined/s.dt;
		StepResult r;
		try {
			r = step(cur, mesh, s, a);
		} catch(const std::exception& e) {
			throw StepFailure(n, e.what());
		}
		const StepReport rep = audit.record(cur, r, margin);
		for(const std::string& v : violations(rep, tol)) res.violations.push_back(v);
		cur = std::move(r.state);
		res.reports.push_back(rep);
		if(observer) observer(cur, &res.reports.back());
	}
	res.state = std::move(cur);
	return res;
}

SchemeKind incompressible_limit(SchemeKind k)
{
	switch(k) {
	case SchemeKind::implicit: return SchemeKind::incomp_implicit;
	case SchemeKind::pressure_correction: return SchemeKind::incomp_pc;
	case SchemeKind::semi_implicit: return SchemeKind::incomp_semi;
	default: return k;
	}
}

SweepResult run_sweep(const RunConfig& c, const std::vector<double>& eps_list, int threads)
{
	if(eps_list.empty()) throw std::invalid_argument("sweep: empty eps list");
	if(is_incompressible(c.scheme.kind)) throw std::invalid_argument("sweep: the base scheme must be compressible");
	if(c.case_type == CaseType::vortex) throw std::invalid_argument("sweep: use the vortex command for the vortex case");

	const StaggeredMesh mesh = make_mesh(c);
	SweepResult out;
	out.members.resize(eps_list.size());

	// the incompressible reference does not depend on eps
	SchemeConfig ref = make_scheme(c, mesh, 1.0);
	ref.kind = incompressible_limit(c.scheme.kind);
	const RigidityMatrix a = assemble_rigidity(mesh, ref.mu, ref.lambda);
	ref.dt = resolve_dt(c, mesh, a, resolve_C0(c, mesh, eps_list));
	const RunResult reference = simulate(mesh, ref, a, make_initial_state(c, mesh, ref));
	out.reference_steps.steps = reference.state.n;
	out.reference_steps.dt = ref.dt;

	parallel_for(static_cast<int>(eps_list.size()), threads, [&](int i) {
		SweepMember& m = out.members[i];
		m.eps = eps_list[i];
		try {
			// everything below is rebuilt per member so that each run is isolated
			const StaggeredMesh mm = make_mesh(c);
			SchemeConfig s = make_scheme(c, mm, m.eps);
			const RigidityMatrix am = assemble_rigidity(mm, s.mu, s.lambda);
			m.C0 = resolve_C0(c, mm, eps_list);
			s.dt = resolve_dt(c, mm, am, m.C0);
			m.dt = s.dt;
			const SolverState s0 = make_initial_state(c, mm, s);
			check_cfl_admissible(c, mm, s, s0, am);
			m.record.eps = m.eps;
			m.record.dt = s.dt;
			RunResult r = simulate(mm, s, am, s0, [&](const SolverState& st, const StepReport*) {
				sweep_observe(m.record, mm, st, s.eos);
			});
			sweep_finish(m.record, mm, r.state, reference.state, s.eos);
			for(size_t k = 1; k < r.reports.size(); k++) m.cfl_margins.push_back(r.reports[k].cfl_margin);
			m.reports = std::move(r.reports);
			m.violations = std::move(r.violations);
		} catch(const std::exception& e) {
			m.error = e.what();
		}
	});

	std::vector<SweepRecord> records;
	out.complete = true;
	for(const SweepMember& m : out.members) {
		if(m.error.empty()) records.push_back(m.record);
		else out.complete = false;
	}
	if(!records.empty()) out.summary = sweep_compare(records);
	return out;
}

double vortex_profile_line(const VortexParams& p)
{
	return p.x0.y + p.t_end*p.a.y;
}

std::vector<VortexRun> run_vortex(const RunConfig& c, const std::vector<double>& levels, int threads)
{
	std::vector<VortexRun> runs(levels.size());
	parallel_for(static_cast<int>(levels.size()), threads, [&](int i) {
		VortexRun& v = runs[i];
		v.c_M = levels[i];
		try {
			RunConfig cc = c;
			cc.case_type = CaseType::vortex;
			cc.vortex.c_M = levels[i];
			const VortexParams p = vortex_params(cc);
			v.mach = mach_table(p.c_M, p.gamma);
			const StaggeredMesh mesh = make_mesh(cc);
			const SchemeConfig s = make_scheme(cc, mesh, 1.0);
			const RigidityMatrix a = assemble_rigidity(mesh, s.mu, s.lambda);
			const RunResult r = simulate(mesh, s, a, make_initial_state(cc, mesh, s));
			v.steps = r.state.n;
			v.errors = error_norms(mesh, r.state, p, r.state.t, s.eos);
			const double line = vortex_profile_line(p);
			v.velocity = velocity_profile(mesh, r.state, p, r.state.t, line);
			v.pressure = pressure_profile(mesh, r.state, p, r.state.t, line, s.eos);
			v.violations = r.violations;
		} catch(const std::exception& e) {
			v.error = e.what();
		}
	});
	return runs;
}

void write_run_log(std::ostream& os, const std::vector<StepReport>& reports)
{
	os << "n,t,dt,mass,kinetic_energy,elastic_potential,global_entropy,ke_residual,entropy_lhs,dp_l2,dp_linf,"
	      "cfl_margin,outer_iters\n";
	for(const StepReport& r : reports)
		os << r.n << ',' << r.t << ',' << r.dt << ',' << r.mass << ',' << r.kinetic_energy << ','
		   << r.elastic_potential << ',' << r.global_entropy << ',' << r.ke_residual << ',' << r.entropy_lhs << ','
		   << r.dp_l2 << ',' << r.dp_linf << ',' << r.cfl_margin << ',' << r.outer_iters << '\n';
}

void write_step_reports(std::ostream& os, const std::vector<StepReport>& reports)
{
	os << "n,t,dt,mass,min_rho,mass_change,kinetic_energy,elastic_potential,global_entropy,global_bound,"
	      "ke_residual,entropy_lhs,face_remainder,cell_remainder,min_face_remainder,renorm_max,renorm_excess,"
	      "dp_l2,dp_linf,cfl_margin,outer_iters,scale,max_divergence,balances,globals,global_applies\n";
	for(const StepReport& r : reports)
		os << r.n << ',' << r.t << ',' << r.dt << ',' << r.mass << ',' << r.min_rho << ',' << r.mass_change << ','
		   << r.kinetic_energy << ',' << r.elastic_potential << ',' << r.global_entropy << ',' << r.global_bound << ','
		   << r.ke_residual << ',' << r.entropy_lhs << ',' << r.face_remainder << ',' << r.cell_remainder << ','
		   << r.min_face_remainder << ',' << r.renorm_max << ',' << r.renorm_excess << ',' << r.dp_l2 << ','
		   << r.dp_linf << ',' << r.cfl_margin << ',' << r.outer_iters << ',' << r.scale << ',' << r.max_divergence
		   << ',' << r.balances << ',' << r.globals << ',' << r.global_applies << '\n';
}

void write_cell_snapshot(std::ostream& os, const StaggeredMesh& mesh, const SolverState& s, const EosParams& eos,
                         bool incompressible)
{
	os << "x,y,rho,u,v,p\n";
	for(int k = 0; k < mesh.num_cells(); k++) {
		const Cell& cell = mesh.cell(k);
		Vec2 u;
		for(int f : cell.faces) u += s.u[f]*0.25;
		const double p = incompressible ? s.dp[k] : eos.p(s.rho[k]);
		os << cell.center.x << ',' << cell.center.y << ',' << s.rho[k] << ',' << u.x << ',' << u.y << ',' << p << '\n';
	}
}

void write_face_snapshot(std::ostream& os, const StaggeredMesh& mesh, const SolverState& s)
{
	os << "x,y,nx,ny,ux,uy\n";
	for(int f = 0; f < mesh.num_faces(); f++) {
		const Face& face = mesh.face(f);
		os << face.center.x << ',' << face.center.y << ',' << face.normal.x << ',' << face.normal.y << ','
		   << s.u[f].x << ',' << s.u[f].y << '\n';
	}
}

void write_sweep_summary(std::ostream& os, const SweepResult& r)
{
	os << "eps,norm_rho_minus_1_L2,norm_rho_minus_1_Lq,dp_l2_max,dist_u_l2,dist_dp_l2\n";
	for(const SweepRecord& s : r.summary.records)
		os << s.eps << ',' << s.rho_l2 << ',' << s.rho_lq << ',' << s.dp_l2 << ',' << s.dist_u_l2 << ','
		   << s.dist_dp_l2 << '\n';
}

void write_rate_report(std::ostream& os, const SweepResult& r)
{
	const SweepSummary& s = r.summary;
	os << "members: " << r.members.size() << (r.complete ? "" : " (incomplete)") << '\n';
	for(const SweepMember& m : r.members)
		if(!m.error.empty()) os << "failed eps " << m.eps << ": " << m.error << '\n';
	if(s.records.empty()) return;
	os << "dt: " << s.records.front().dt << '\n';
	os << "steps: " << s.records.front().steps << '\n';
	if(s.has_slope) os << "slope of max_n ||rho - 1||_L2 against eps: " << s.slope_rho_l2 << '\n';
	os << "velocity distance nonincreasing as eps decreases: " << (s.distances_monotone ? "yes" : "no") << '\n';
	os << "velocity distance ratio smallest/largest eps: " << s.distance_ratio << '\n';
	os << "max_n ||dp||_L2 band (max/min over the sweep): " << s.dp_band << '\n';
}

void write_profile(std::ostream& os, const std::vector<ProfilePoint>& pts, const std::string& num_col,
                   const std::string& exact_col)
{
	os << "x1," << num_col << ',' << exact_col << '\n';
	for(const ProfilePoint& p : pts) os << p.x1 << ',' << p.numerical << ',' << p.exact << '\n';
}

void write_vortex_errors(std::ostream& os, const std::vector<VortexRun>& runs)
{
	os << "c_M,c,Ma,steps,velocity_l1,pressure_l1,pressure_l1_over_c\n";
	for(const VortexRun& v : runs)
		os << v.c_M << ',' << v.mach.c << ',' << v.mach.Ma << ',' << v.steps << ',' << v.errors.velocity_l1 << ','
		   << v.errors.pressure_l1 << ',' << v.errors.pressure_scaled << '\n';
}

namespace {

fs::path prepare_out(RunConfig& c, const CommandOptions& o)
{
	if(!o.out_dir.empty()) c.out_dir = o.out_dir;
	const fs::path dir(c.out_dir);
	std::error_code ec;
	fs::create_directories(dir, ec);
	if(ec) throw std::runtime_error("cannot create output directory '" + c.out_dir + "': " + ec.message());
	return dir;
}

void save_config(const fs::path& dir, const RunConfig& c)
{
	std::ofstream f = open_out(dir/"effective_config.ini");
	write_config(f, c);
}

int report_violations(const std::vector<std::string>& v, bool strict, std::ostream& log)
{
	const size_t shown = std::min<size_t>(v.size(), 20);
	for(size_t i = 0; i < shown; i++) log << "violation: " << v[i] << '\n';
	if(v.size() > shown) log << "... " << v.size() - shown << " more\n";
	if(v.empty()) return exit_ok;
	return strict ? exit_violation : exit_ok;
}

}

int command_run(RunConfig c, const CommandOptions& o, std::ostream& log)
{
	if(!o.eps_override.empty()) c.scheme.eps = o.eps_override.front();
	c.validate();
	const fs::path dir = prepare_out(c, o);
	save_config(dir, c);

	const StaggeredMesh mesh = make_mesh(c);
	SchemeConfig s = make_scheme(c, mesh, c.scheme.eps);
	const RigidityMatrix a = assemble_rigidity(mesh, s.mu, s.lambda);
	const double C0 = resolve_C0(c, mesh, {s.eps});
	s.dt = resolve_dt(c, mesh, a, C0);
	const SolverState s0 = make_initial_state(c, mesh, s);
	check_cfl_admissible(c, mesh, s, s0, a);

	const bool incompressible = is_incompressible(s.kind);
	fs::create_directories(dir/"snapshots");
	auto snapshot = [&](const SolverState& st) {
		std::ostringstream tag;
		tag << std::setw(6) << std::setfill('0') << st.n;
		std::ofstream fc = open_out(dir/"snapshots"/("cells_" + tag.str() + ".csv"));
		write_cell_snapshot(fc, mesh, st, s.eos, incompressible);
		std::ofstream ff = open_out(dir/"snapshots"/("faces_" + tag.str() + ".csv"));
		write_face_snapshot(ff, mesh, st);
	};
	const int steps = s.num_steps();
	log << "run: " << to_string(s.kind) << ", " << c.nx << "x" << c.ny << ", eps " << s.eps << ", dt " << s.dt
	    << ", " << steps << " steps\n";
	const RunResult r = simulate(mesh, s, a, s0, [&](const SolverState& st, const StepReport*) {
		if(st.n == steps || st.n == 0 || (c.snapshot_every > 0 && st.n % c.snapshot_every == 0)) snapshot(st);
	});

	{
		std::ofstream f = open_out(dir/"run_log.csv");
		write_run_log(f, r.reports);
	}
	{
		std::ofstream f = open_out(dir/"step_reports.csv");
		write_step_reports(f, r.reports);
	}
	std::ofstream sum = open_out(dir/"summary.txt");
	sum << "scheme = " << to_string(s.kind) << "\nsteps = " << r.state.n << "\nt = " << r.state.t
	    << "\ndt = " << s.dt << "\nC0 = " << C0 << "\ninitial_bound = " << r.initial_bound
	    << "\nfinal_mass = " << r.reports.back().mass << "\nfinal_kinetic_energy = " << r.reports.back().kinetic_energy
	    << "\nviolations = " << r.violations.size() << '\n';
	if(c.case_type == CaseType::vortex) {
		const VortexParams p = vortex_params(c);
		const VortexErrors e = error_norms(mesh, r.state, p, r.state.t, s.eos);
		sum << "velocity_l1 = " << e.velocity_l1 << "\npressure_l1_over_c = " << e.pressure_scaled << '\n';
	}
	log << "done: " << r.state.n << " steps, " << r.violations.size() << " violations\n";
	return report_violations(r.violations, o.strict, log);
}

int command_sweep(RunConfig c, const CommandOptions& o, std::ostream& log)
{
	if(!o.eps_override.empty()) c.eps_list = o.eps_override;
	c.validate();
	const fs::path dir = prepare_out(c, o);
	save_config(dir, c);
	log << "sweep: " << to_string(c.scheme.kind) << ", " << c.eps_list.size() << " members\n";
	const SweepResult r = run_sweep(c, c.eps_list, o.threads);

	fs::create_directories(dir/"members");
	std::vector<std::string> all;
	for(size_t i = 0; i < r.members.size(); i++) {
		const SweepMember& m = r.members[i];
		std::ofstream f = open_out(dir/"members"/("eps_" + level_tag(m.eps) + ".csv"));
		write_run_log(f, m.reports);
		for(const std::string& v : m.violations) all.push_back("eps " + level_tag(m.eps) + ", " + v);
	}
	{
		std::ofstream f = open_out(dir/"sweep_summary.csv");
		write_sweep_summary(f, r);
	}
	std::ofstream rep = open_out(dir/"rate_report.txt");
	write_rate_report(rep, r);
	write_rate_report(log, r);
	if(!r.complete) return exit_solver;
	return report_violations(all, o.strict, log);
}

int command_vortex(RunConfig c, const CommandOptions& o, std::ostream& log)
{
	c.case_type = CaseType::vortex;
	c.scheme.kind = SchemeKind::pressure_correction;
	c.validate();
	const fs::path dir = prepare_out(c, o);
	save_config(dir, c);
	log << "vortex: " << c.nx << "x" << c.ny << ", dt " << c.scheme.dt << ", " << c.pressure_levels.size()
	    << " pressure levels\n";
	const std::vector<VortexRun> runs = run_vortex(c, c.pressure_levels, o.threads);
	std::vector<std::string> all;
	bool failed = false;
	for(const VortexRun& v : runs) {
		const std::string tag = level_tag(v.c_M);
		if(!v.error.empty()) {
			log << "failed c_M " << tag << ": " << v.error << '\n';
			failed = true;
			continue;
		}
		std::ofstream fp = open_out(dir/("profile_cM_" + tag + ".csv"));
		write_profile(fp, v.velocity, "u2_numerical", "u2_exact");
		std::ofstream fd = open_out(dir/("dp_profile_cM_" + tag + ".csv"));
		write_profile(fd, v.pressure, "dp_numerical", "dp_exact");
		for(const std::string& s : v.violations) all.push_back("c_M " + tag + ", " + s);
		log << "c_M " << tag << ": Ma " << v.mach.Ma << ", velocity L1 error " << v.errors.velocity_l1
		    << ", pressure L1/c " << v.errors.pressure_scaled << '\n';
	}
	std::ofstream fe = open_out(dir/"errors.csv");
	write_vortex_errors(fe, runs);
	if(failed) return exit_solver;
	return report_violations(all, o.strict, log);
}

int command_check(RunConfig c, const CommandOptions& o, std::ostream& log)
{
	if(!o.eps_override.empty()) c.scheme.eps = o.eps_override.front();
	c.validate();
	const fs::path dir = prepare_out(c, o);
	save_config(dir, c);
	std::vector<SchemeKind> kinds{SchemeKind::implicit, SchemeKind::pressure_correction, SchemeKind::semi_implicit};
	if(c.case_type == CaseType::vortex) kinds = {SchemeKind::pressure_correction};

	std::ofstream rep = open_out(dir/"check_report.csv");
	rep << "scheme,steps,max_ke_residual_rel,max_renorm_defect_rel,min_face_remainder_rel,max_mass_change,min_rho,"
	       "violations\n";
	std::vector<std::string> all;
	const StaggeredMesh mesh = make_mesh(c);
	for(SchemeKind k : kinds) {
		RunConfig cc = c;
		cc.scheme.kind = k;
		SchemeConfig s = make_scheme(cc, mesh, cc.scheme.eps);
		const RigidityMatrix a = assemble_rigidity(mesh, s.mu, s.lambda);
		s.dt = resolve_dt(cc, mesh, a, resolve_C0(cc, mesh, {s.eps}));
		const SolverState s0 = make_initial_state(cc, mesh, s);
		try {
			check_cfl_admissible(cc, mesh, s, s0, a);
		} catch(const ConfigError& e) {
			log << to_string(k) << ": skipped, " << e.what() << '\n';
			continue;
		}
		const RunResult r = simulate(mesh, s, a, s0);
		double ke = 0, renorm = 0, rem = 0, dm = 0, rmin = s0.rho.front();
		for(size_t i = 1; i < r.reports.size(); i++) {
			const StepReport& x = r.reports[i];
			if(x.balances) ke = std::max(ke, x.ke_residual/x.scale);
			renorm = std::max(renorm, x.renorm_max/x.scale);
			rem = std::min(rem, x.min_face_remainder/x.scale);
			dm = std::max(dm, x.mass_change);
			rmin = std::min(rmin, x.min_rho);
		}
		rep << to_string(k) << ',' << r.state.n << ',' << ke << ',' << renorm << ',' << rem << ',' << dm << ','
		    << rmin << ',' << r.violations.size() << '\n';
		log << to_string(k) << ": " << r.state.n << " steps, " << r.violations.size() << " violations\n";
		for(const std::string& v : r.violations) all.push_back(to_string(k) + ", " + v);
	}
	return report_violations(all, o.strict, log);
}

}
