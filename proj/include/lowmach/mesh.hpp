/** \file mesh.hpp
 * \brief Staggered discretization on axis-aligned rectangular grids
 */

#ifndef LOWMACH_MESH_HPP
#define LOWMACH_MESH_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace lowmach {

struct Vec2
{
	double x = 0, y = 0;

	Vec2() = default;
	Vec2(double a, double b) : x{a}, y{b} {}

	Vec2 operator+(const Vec2& o) const { return {x+o.x, y+o.y}; }
	Vec2 operator-(const Vec2& o) const { return {x-o.x, y-o.y}; }
	Vec2 operator*(double s) const { return {x*s, y*s}; }
	Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
	Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
	bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s*v.x, s*v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x*b.x + a.y*b.y; }
inline double norm2(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

/// Local face slots of a rectangle
enum FaceSlot : int { WEST = 0, EAST = 1, SOUTH = 2, NORTH = 3 };

/// Local corners; each corner holds one dual face joining a vertical and a horizontal face
enum CornerSlot : int { SW = 0, SE = 1, NW = 2, NE = 3 };

struct Rect
{
	double x0, x1, y0, y1;
};

struct Cell
{
	double area;
	Vec2 center;
	double hx, hy;
	double diameter;
	std::array<int,4> faces;          ///< indexed by FaceSlot
};

struct Face
{
	double length;
	Vec2 center;
	Vec2 normal;                      ///< reference normal, from cells[0] towards cells[1]
	bool vertical;
	std::array<int,2> cells;          ///< [minus side, plus side]; -1 when outside the domain
	std::array<double,2> half_diamond;///< |D_{K,sigma}| per side, 0 when absent
	double diamond;                   ///< |D_sigma|
	int interior_index;               ///< position among internal faces, -1 if external
	Vec2 p0, p1;                      ///< end points

	bool internal() const { return interior_index >= 0; }
};

/// One in-cell dual face, stored once and oriented from the vertical face to the horizontal one
struct DualFace
{
	int cell;
	int corner;
	int vface;
	int hface;
};

/// Entry of the dual-face list of a diamond: F_{sigma,eps} = sign * f[dual]
struct DiamondLink
{
	int dual;
	int neighbor;
	int cell;
	double sign;
};

class StaggeredMesh
{
public:
	StaggeredMesh(std::vector<double> xs, std::vector<double> ys);

	int nx() const { return nx_; }
	int ny() const { return ny_; }
	int num_cells() const { return static_cast<int>(cells_.size()); }
	int num_faces() const { return static_cast<int>(faces_.size()); }
	int num_internal_faces() const { return static_cast<int>(internal_.size()); }
	int num_dual_faces() const { return static_cast<int>(duals_.size()); }

	const Cell& cell(int k) const { return cells_[k]; }
	const Face& face(int s) const { return faces_[s]; }
	const DualFace& dual_face(int e) const { return duals_[e]; }
	const std::vector<int>& internal_faces() const { return internal_; }
	const std::vector<int>& external_faces() const { return external_; }
	const std::vector<double>& xs() const { return xs_; }
	const std::vector<double>& ys() const { return ys_; }

	int cell_index(int i, int j) const { return j*nx_ + i; }
	int vface_index(int i, int j) const { return j*(nx_+1) + i; }
	int hface_index(int i, int j) const { return nv_ + j*nx_ + i; }

	/// +1 if the outward normal of cell k on face s equals the reference normal, -1 otherwise
	double side_sign(int k, int s) const { return faces_[s].cells[0] == k ? 1.0 : -1.0; }

	/// xi_K^sigma = |D_{K,sigma}|/|K|
	double xi(int k, int slot) const;

	/// Four dual faces of the diamond of an internal face (two in each adjacent cell)
	const std::array<DiamondLink,4>& diamond_links(int s) const { return links_[faces_[s].interior_index]; }

	double h() const { return h_; }
	double space_step() const { return space_step_; }
	double theta() const { return theta_; }
	double domain_area() const { return (xs_.back()-xs_.front())*(ys_.back()-ys_.front()); }
	Rect domain() const { return {xs_.front(), xs_.back(), ys_.front(), ys_.back()}; }

private:
	int nx_, ny_, nv_;
	std::vector<double> xs_, ys_;
	std::vector<Cell> cells_;
	std::vector<Face> faces_;
	std::vector<DualFace> duals_;
	std::vector<int> internal_, external_;
	std::vector<std::array<DiamondLink,4>> links_;
	double h_ = 0, space_step_ = 0, theta_ = 0;
};

StaggeredMesh build_uniform_grid(int nx, int ny, const Rect& domain);

/// Tensor-product grid with arbitrary strictly increasing node coordinates
StaggeredMesh build_tensor_grid(std::vector<double> xs, std::vector<double> ys);

struct DualFaceInfo
{
	int dual;
	int neighbor;
	int cell;
};

/// Dual faces of D_sigma carrying flux; throws for external or unknown faces
std::vector<DualFaceInfo> dual_face_enumeration(const StaggeredMesh& mesh, int face);

std::string mesh_summary(const StaggeredMesh& mesh);

}

#endif
