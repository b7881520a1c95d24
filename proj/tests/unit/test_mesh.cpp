#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lowmach/mesh.hpp"

#include <random>
#include <set>

using namespace lowmach;

TEST_CASE("single cell")
{
	const StaggeredMesh m = build_uniform_grid(1, 1, {0, 1, 0, 1});
	CHECK(m.num_cells() == 1);
	CHECK(m.num_faces() == 4);
	CHECK(m.num_internal_faces() == 0);
	CHECK(m.external_faces().size() == 4);
	CHECK(m.cell(0).area == doctest::Approx(1.0));
}

TEST_CASE("two unit squares share one face")
{
	const StaggeredMesh m = build_uniform_grid(2, 1, {0, 2, 0, 1});
	CHECK(m.num_cells() == 2);
	REQUIRE(m.num_internal_faces() == 1);
	const Face& f = m.face(m.internal_faces()[0]);
	CHECK(f.length == doctest::Approx(1.0));
	// half diamonds are the cones from each center, |K|/4 on a rectangle
	CHECK(f.half_diamond[0] == doctest::Approx(0.25));
	CHECK(f.half_diamond[1] == doctest::Approx(0.25));
	CHECK(f.diamond == doctest::Approx(0.5));
	for(int k = 0; k < 2; k++)
		for(int slot = 0; slot < 4; slot++) CHECK(m.xi(k, slot) == doctest::Approx(0.25));
	// every flux-carrying dual face sits inside one of the two cells
	const auto d = dual_face_enumeration(m, m.internal_faces()[0]);
	CHECK(d.size() == 4);
	for(const DualFaceInfo& e : d) CHECK((e.cell == 0 || e.cell == 1));
}

TEST_CASE("benchmark grid spacing")
{
	const StaggeredMesh m = build_uniform_grid(500, 500, {-1.2, 2.8, -1.2, 2.8});
	CHECK(m.cell(0).hx == doctest::Approx(0.008));
	CHECK(m.cell(12345).area == doctest::Approx(6.4e-5));
	CHECK(m.num_cells() == 250000);
}

TEST_CASE("partition and diamond invariants on random tensor grids")
{
	std::mt19937_64 gen(7);
	std::uniform_real_distribution<double> u(0.5, 1.5);
	for(int trial = 0; trial < 20; trial++) {
		const int nx = 1 + trial % 5, ny = 1 + (trial*3) % 4;
		std::vector<double> xs{0}, ys{0};
		for(int i = 0; i < nx; i++) xs.push_back(xs.back() + u(gen));
		for(int j = 0; j < ny; j++) ys.push_back(ys.back() + u(gen));
		const StaggeredMesh m = build_tensor_grid(xs, ys);

		double area = 0, diamonds = 0;
		for(int k = 0; k < m.num_cells(); k++) {
			area += m.cell(k).area;
			double xi = 0;
			for(int slot = 0; slot < 4; slot++) xi += m.xi(k, slot);
			CHECK(xi == doctest::Approx(1.0).epsilon(1e-14));
		}
		for(int s = 0; s < m.num_faces(); s++) diamonds += m.face(s).diamond;
		CHECK(area == doctest::Approx(m.domain_area()).epsilon(1e-13));
		CHECK(diamonds == doctest::Approx(m.domain_area()).epsilon(1e-13));
		CHECK(m.num_dual_faces() == 4*m.num_cells());

		for(int s : m.internal_faces()) {
			const auto d = dual_face_enumeration(m, s);
			REQUIRE(d.size() == 4);
			std::set<int> duals;
			int in0 = 0, in1 = 0;
			for(const DualFaceInfo& e : d) {
				duals.insert(e.dual);
				in0 += e.cell == m.face(s).cells[0];
				in1 += e.cell == m.face(s).cells[1];
				CHECK(e.neighbor != s);
			}
			CHECK(duals.size() == 4);
			CHECK(in0 == 2);
			CHECK(in1 == 2);
		}
	}
}

TEST_CASE("interior face of a 3x3 grid")
{
	const StaggeredMesh m = build_uniform_grid(3, 3, {0, 1, 0, 1});
	const int s = m.vface_index(1, 1);
	REQUIRE(m.face(s).internal());
	const auto d = dual_face_enumeration(m, s);
	CHECK(d.size() == 4);
	const int k = m.cell_index(0, 1), l = m.cell_index(1, 1);
	for(const DualFaceInfo& e : d) CHECK((e.cell == k || e.cell == l));
}

TEST_CASE("external and unknown faces are rejected")
{
	const StaggeredMesh m = build_uniform_grid(3, 3, {0, 1, 0, 1});
	CHECK_THROWS_AS(dual_face_enumeration(m, m.vface_index(0, 0)), std::invalid_argument);
	CHECK_THROWS_AS(dual_face_enumeration(m, m.num_faces()), std::out_of_range);
	CHECK_THROWS(build_uniform_grid(0, 3, {0, 1, 0, 1}));
	CHECK_THROWS(build_uniform_grid(2, 2, {0, 0, 0, 1}));
	CHECK_THROWS(build_tensor_grid({0, 1, 1}, {0, 1}));
}
