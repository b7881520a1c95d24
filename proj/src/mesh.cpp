#include "lowmach/mesh.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace lowmach {

StaggeredMesh::StaggeredMesh(std::vector<double> xs, std::vector<double> ys)
	: xs_{std::move(xs)}, ys_{std::move(ys)}
{
	if(xs_.size() < 2 || ys_.size() < 2)
		throw std::invalid_argument("mesh: at least one cell per direction is required");
	for(size_t i = 1; i < xs_.size(); i++)
		if(!(xs_[i] > xs_[i-1])) throw std::invalid_argument("mesh: x nodes must be strictly increasing");
	for(size_t j = 1; j < ys_.size(); j++)
		if(!(ys_[j] > ys_[j-1])) throw std::invalid_argument("mesh: y nodes must be strictly increasing");

	nx_ = static_cast<int>(xs_.size()) - 1;
	ny_ = static_cast<int>(ys_.size()) - 1;
	nv_ = (nx_+1)*ny_;

	cells_.resize(static_cast<size_t>(nx_)*ny_);
	faces_.resize(static_cast<size_t>(nv_) + static_cast<size_t>(nx_)*(ny_+1));

	// vertical faces
	for(int j = 0; j < ny_; j++)
		for(int i = 0; i <= nx_; i++) {
			Face& f = faces_[vface_index(i,j)];
			f.vertical = true;
			f.p0 = {xs_[i], ys_[j]};
			f.p1 = {xs_[i], ys_[j+1]};
			f.length = ys_[j+1] - ys_[j];
			f.center = {xs_[i], 0.5*(ys_[j]+ys_[j+1])};
			f.normal = {1.0, 0.0};
			f.cells = {i > 0 ? cell_index(i-1,j) : -1, i < nx_ ? cell_index(i,j) : -1};
		}
	// horizontal faces
	for(int j = 0; j <= ny_; j++)
		for(int i = 0; i < nx_; i++) {
			Face& f = faces_[hface_index(i,j)];
			f.vertical = false;
			f.p0 = {xs_[i], ys_[j]};
			f.p1 = {xs_[i+1], ys_[j]};
			f.length = xs_[i+1] - xs_[i];
			f.center = {0.5*(xs_[i]+xs_[i+1]), ys_[j]};
			f.normal = {0.0, 1.0};
			f.cells = {j > 0 ? cell_index(i,j-1) : -1, j < ny_ ? cell_index(i,j) : -1};
		}

	for(int j = 0; j < ny_; j++)
		for(int i = 0; i < nx_; i++) {
			Cell& c = cells_[cell_index(i,j)];
			c.hx = xs_[i+1] - xs_[i];
			c.hy = ys_[j+1] - ys_[j];
			c.area = c.hx*c.hy;
			c.center = {0.5*(xs_[i]+xs_[i+1]), 0.5*(ys_[j]+ys_[j+1])};
			c.diameter = std::sqrt(c.hx*c.hx + c.hy*c.hy);
			c.faces = {vface_index(i,j), vface_index(i+1,j), hface_index(i,j), hface_index(i,j+1)};
		}

	// half-diamonds: cones over each face with apex at the cell center, each of area |K|/4
	for(int k = 0; k < num_cells(); k++)
		for(int slot = 0; slot < 4; slot++) {
			Face& f = faces_[cells_[k].faces[slot]];
			const int side = f.cells[0] == k ? 0 : 1;
			f.half_diamond[side] = 0.25*cells_[k].area;
		}
	for(int s = 0; s < num_faces(); s++) {
		Face& f = faces_[s];
		f.diamond = f.half_diamond[0] + f.half_diamond[1];
		if(f.cells[0] >= 0 && f.cells[1] >= 0) {
			f.interior_index = static_cast<int>(internal_.size());
			internal_.push_back(s);
		} else {
			f.interior_index = -1;
			external_.push_back(s);
		}
	}

	duals_.reserve(4*cells_.size());
	for(int k = 0; k < num_cells(); k++) {
		const auto& fc = cells_[k].faces;
		duals_.push_back({k, SW, fc[WEST], fc[SOUTH]});
		duals_.push_back({k, SE, fc[EAST], fc[SOUTH]});
		duals_.push_back({k, NW, fc[WEST], fc[NORTH]});
		duals_.push_back({k, NE, fc[EAST], fc[NORTH]});
	}

	links_.resize(internal_.size());
	std::vector<int> count(internal_.size(), 0);
	for(int e = 0; e < num_dual_faces(); e++) {
		const DualFace& d = duals_[e];
		const int iv = faces_[d.vface].interior_index;
		const int ih = faces_[d.hface].interior_index;
		if(iv >= 0) links_[iv][count[iv]++] = {e, d.hface, d.cell, 1.0};
		if(ih >= 0) links_[ih][count[ih]++] = {e, d.vface, d.cell, -1.0};
	}
	for(size_t i = 0; i < count.size(); i++)
		if(count[i] != 4) throw std::logic_error("mesh: internal diamond without four dual faces");

	for(const Cell& c : cells_) {
		h_ = std::max(h_, c.diameter);
		space_step_ = std::max(space_step_, std::max(c.hx, c.hy));
		theta_ = std::max(theta_, c.diameter/std::min(c.hx, c.hy));
	}
}

double StaggeredMesh::xi(int k, int slot) const
{
	const Face& f = faces_[cells_[k].faces[slot]];
	const int side = f.cells[0] == k ? 0 : 1;
	return f.half_diamond[side]/cells_[k].area;
}

StaggeredMesh build_tensor_grid(std::vector<double> xs, std::vector<double> ys)
{
	return StaggeredMesh(std::move(xs), std::move(ys));
}

StaggeredMesh build_uniform_grid(int nx, int ny, const Rect& d)
{
	if(nx < 1 || ny < 1)
		throw std::invalid_argument("build_uniform_grid: cell counts must be positive");
	if(!(d.x1 > d.x0) || !(d.y1 > d.y0))
		throw std::invalid_argument("build_uniform_grid: degenerate domain");
	std::vector<double> xs(nx+1), ys(ny+1);
	for(int i = 0; i <= nx; i++) xs[i] = d.x0 + (d.x1-d.x0)*i/nx;
	for(int j = 0; j <= ny; j++) ys[j] = d.y0 + (d.y1-d.y0)*j/ny;
	xs[nx] = d.x1; ys[ny] = d.y1;
	return StaggeredMesh(std::move(xs), std::move(ys));
}

std::vector<DualFaceInfo> dual_face_enumeration(const StaggeredMesh& mesh, int face)
{
	if(face < 0 || face >= mesh.num_faces())
		throw std::out_of_range("dual_face_enumeration: unknown face id " + std::to_string(face));
	if(!mesh.face(face).internal())
		throw std::invalid_argument("dual_face_enumeration: face " + std::to_string(face) + " is external");
	std::vector<DualFaceInfo> out;
	for(const DiamondLink& l : mesh.diamond_links(face))
		out.push_back({l.dual, l.neighbor, l.cell});
	return out;
}

std::string mesh_summary(const StaggeredMesh& mesh)
{
	std::ostringstream os;
	os.precision(17);
	os << "cells " << mesh.num_cells() << " (" << mesh.nx() << " x " << mesh.ny() << ")\n"
	   << "faces " << mesh.num_faces() << " internal " << mesh.num_internal_faces()
	   << " external " << mesh.external_faces().size() << "\n"
	   << "dual_faces " << mesh.num_dual_faces() << "\n"
	   << "h " << mesh.h() << "\n"
	   << "space_step " << mesh.space_step() << "\n"
	   << "theta " << mesh.theta() << "\n";
	return os.str();
}

}
