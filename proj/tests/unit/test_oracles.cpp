#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracle.hpp"

using namespace lowmach;
using namespace lowmach::oracle;

TEST_CASE("geometry of the oracle matches the mesh")
{
	const StaggeredMesh m = build_uniform_grid(2, 2, {0, 1, 0, 1});
	const RigidityMatrix a = assemble_rigidity(m, 0, 0);
	Oracle o{1, 1, 1.4, &m, &a};
	REQUIRE(m.num_internal_faces() == 4);
	for(int f = 0; f < 4; f++) {
		const Face& lf = m.face(o.lib_face(f));
		CHECK(lf.internal());
		CHECK(lf.cells[0] == minus_cell[f]);
		CHECK(lf.cells[1] == plus_cell[f]);
		CHECK(lf.normal == ref_normal[f]);
		CHECK(lf.diamond == doctest::Approx(diamond));
	}
}

TEST_CASE("implicit step against the 12-unknown oracle")
{
	CHECK(implicit_gap(true) <= 1e-8);
	CHECK(implicit_gap(false) <= 1e-8);
}

TEST_CASE("pressure correction step against the dense oracle")
{
	CHECK(pressure_correction_gap(true) <= 1e-8);
	CHECK(pressure_correction_gap(false) <= 1e-8);
}
