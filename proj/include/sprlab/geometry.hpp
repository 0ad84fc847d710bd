#pragma once

// Exact geometry of the hyperbolic upper half-plane (curvature -1):
// points, boundary, PSL(2,R) isometries, distances, Busemann functions,
// Hopf coordinates, shadows and dynamical balls.

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "sprlab/error.hpp"

namespace sprlab {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

// Point of the upper half-plane, y > 0.
struct HPoint {
  double x = 0.0;
  double y = 1.0;

  std::complex<double> z() const { return {x, y}; }
  static HPoint from(std::complex<double> w) { return {w.real(), w.imag()}; }
};

bool valid(const HPoint& p);

// Point of the visual boundary R u {oo}, stored as an extended real.
struct BoundaryPoint {
  double xi = 0.0;
  bool infinite = false;

  static BoundaryPoint infinity() { return {0.0, true}; }
  static BoundaryPoint finite(double v) { return {v, false}; }
  bool operator==(const BoundaryPoint& o) const {
    return infinite ? o.infinite : (!o.infinite && xi == o.xi);
  }
};

// Angle of a boundary point on the circle, via the Cayley map based at i.
// Increases counterclockwise; oo maps to angle 0.
double boundary_angle(const BoundaryPoint& b);

// Real Moebius map z -> (az+b)/(cz+d), normalized to det 1 with
// sign fixed so the first nonzero entry of (a,b,c,d) is positive.
struct MobiusMap {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  MobiusMap() = default;
  MobiusMap(double a_, double b_, double c_, double d_);

  static MobiusMap identity() { return {}; }
  static MobiusMap translation(double t) { return {1.0, t, 0.0, 1.0}; }
  static MobiusMap dilation(double length);  // z -> e^length z, fixed points 0, oo

  MobiusMap inverse() const;
  MobiusMap operator*(const MobiusMap& o) const;
  double trace() const { return a + d; }
  bool is_identity(double tol = 1e-12) const;

  BoundaryPoint apply(const BoundaryPoint& p) const;
  std::complex<double> apply(std::complex<double> z) const;
};

HPoint apply_mobius(const MobiusMap& m, const HPoint& p);

double hyp_distance(const HPoint& p, const HPoint& q);

// B_xi(x,y) = lim_{z->xi} d(x,z) - d(y,z), exact closed form.
double busemann_exact(const BoundaryPoint& xi, const HPoint& x, const HPoint& y);

// Unit tangent vector: base point plus Euclidean direction angle in [0,2pi).
struct UnitTangent {
  HPoint base;
  double angle = kPi / 2.0;

  UnitTangent() = default;
  UnitTangent(HPoint b, double a);
};

// PSL(2,R) frame of a unit tangent: the unique M with M(i) = base and
// M_* (up at i) = the vector. Geodesic flow is right multiplication by
// diag(e^{t/2}, e^{-t/2}).
MobiusMap frame_of(const UnitTangent& v);
UnitTangent tangent_of(const MobiusMap& m);

UnitTangent flow(const UnitTangent& v, double t);
UnitTangent apply_mobius(const MobiusMap& m, const UnitTangent& v);

// Endpoints of the geodesic generated by v.
BoundaryPoint forward_endpoint(const UnitTangent& v);
BoundaryPoint backward_endpoint(const UnitTangent& v);

// Unit tangent at x pointing toward the boundary point xi.
UnitTangent toward_boundary(const HPoint& x, const BoundaryPoint& xi);
// Unit tangent at x pointing toward the point q (q != x).
UnitTangent toward_point(const HPoint& x, const HPoint& q);

// Geodesic distance from p to the (complete) geodesic with the given endpoints.
double distance_to_geodesic(const HPoint& p, const BoundaryPoint& a, const BoundaryPoint& b);

struct HopfCoordinates {
  BoundaryPoint xi_minus;
  BoundaryPoint xi_plus;
  double t = 0.0;  // Busemann time
};

HopfCoordinates hopf_coords(const UnitTangent& v, const HPoint& o);
UnitTangent hopf_inverse(const HopfCoordinates& h, const HPoint& o);

// Connected arc of the boundary circle from a to b counterclockwise,
// or the full boundary.
struct BoundaryArc {
  BoundaryPoint a;
  BoundaryPoint b;
  bool full = false;

  static BoundaryArc full_boundary() {
    BoundaryArc r;
    r.full = true;
    return r;
  }
  static BoundaryArc ccw(BoundaryPoint from, BoundaryPoint to) { return {from, to, false}; }
};

bool arc_contains(const BoundaryArc& arc, const BoundaryPoint& p);
bool arc_contains_arc(const BoundaryArc& outer, const BoundaryArc& inner);
bool arcs_disjoint(const BoundaryArc& u, const BoundaryArc& v);
double arc_angular_width(const BoundaryArc& arc);
BoundaryArc arc_complement(const BoundaryArc& arc);
// Image of an arc under an (orientation-preserving) Moebius map.
BoundaryArc apply_mobius(const MobiusMap& m, const BoundaryArc& arc);

// Shadow of the ball B(center,R) seen from o: the arc of endpoints of rays
// from o that meet the ball. Full boundary when o lies in the closed ball.
BoundaryArc shadow_arc(const HPoint& o, const HPoint& center, double R);

// Boundary point hit by the ray from o through p (p != o).
BoundaryPoint direction_from(const HPoint& o, const HPoint& p);

// Grid-certified dynamical ball membership:
// d(pi g^t v, pi g^t w) <= eps for all t on a step-grid of [0,T].
bool dynamical_ball_contains(const UnitTangent& v, const UnitTangent& w, double T, double eps,
                             double step = 0.05);

}  // namespace sprlab
