#include "sprlab/geometry.hpp"

#include <algorithm>

namespace sprlab {

namespace {

double mod_2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r;
}

// Poisson kernel P(p, xi); horospherical "height" of p at xi.
double poisson(const HPoint& p, const BoundaryPoint& xi) {
  if (xi.infinite) return p.y;
  double dx = p.x - xi.xi;
  return p.y / (dx * dx + p.y * p.y);
}

}  // namespace

bool valid(const HPoint& p) { return std::isfinite(p.x) && std::isfinite(p.y) && p.y > 0.0; }

double boundary_angle(const BoundaryPoint& b) {
  if (b.infinite) return 0.0;
  // Cayley at i: x -> (x-i)/(x+i); angle of the image on the unit circle.
  return mod_2pi(std::atan2(-2.0 * b.xi, b.xi * b.xi - 1.0));
}

MobiusMap::MobiusMap(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
  double det = a * d - b * c;
  if (!(det > 0.0) || !std::isfinite(det))
    throw Error(ErrorKind::Domain, "Moebius map must have positive determinant");
  double s = std::sqrt(det);
  a /= s;
  b /= s;
  c /= s;
  d /= s;
  double lead = (a != 0.0) ? a : (b != 0.0) ? b : (c != 0.0) ? c : d;
  if (lead < 0.0) {
    a = -a;
    b = -b;
    c = -c;
    d = -d;
  }
}

MobiusMap MobiusMap::dilation(double length) {
  double h = std::exp(length / 2.0);
  return {h, 0.0, 0.0, 1.0 / h};
}

MobiusMap MobiusMap::inverse() const { return {d, -b, -c, a}; }

MobiusMap MobiusMap::operator*(const MobiusMap& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

bool MobiusMap::is_identity(double tol) const {
  return std::abs(b) <= tol && std::abs(c) <= tol && std::abs(a - d) <= tol &&
         std::abs(a * d - 1.0) <= tol;
}

BoundaryPoint MobiusMap::apply(const BoundaryPoint& p) const {
  if (p.infinite) {
    if (c == 0.0) return BoundaryPoint::infinity();
    return BoundaryPoint::finite(a / c);
  }
  double den = c * p.xi + d;
  if (den == 0.0) return BoundaryPoint::infinity();
  return BoundaryPoint::finite((a * p.xi + b) / den);
}

std::complex<double> MobiusMap::apply(std::complex<double> z) const {
  return (a * z + b) / (c * z + d);
}

HPoint apply_mobius(const MobiusMap& m, const HPoint& p) {
  if (!valid(p)) throw Error(ErrorKind::Domain, "invalid HPoint");
  std::complex<double> w = m.apply(p.z());
  HPoint q = HPoint::from(w);
  if (!valid(q)) throw Error(ErrorKind::Domain, "Moebius image left the open half-plane");
  return q;
}

double hyp_distance(const HPoint& p, const HPoint& q) {
  double dx = p.x - q.x;
  double dy = p.y - q.y;
  double u = (dx * dx + dy * dy) / (2.0 * p.y * q.y);
  return std::acosh(1.0 + u);
}

double busemann_exact(const BoundaryPoint& xi, const HPoint& x, const HPoint& y) {
  return std::log(poisson(y, xi) / poisson(x, xi));
}

UnitTangent::UnitTangent(HPoint b, double a) : base(b) {
  if (!valid(b)) throw Error(ErrorKind::Domain, "invalid base point");
  angle = std::fmod(a, kTwoPi);
  if (angle < 0) angle += kTwoPi;
}

MobiusMap frame_of(const UnitTangent& v) {
  double sy = std::sqrt(v.base.y);
  MobiusMap translate(sy, v.base.x / sy, 0.0, 1.0 / sy);
  double phi = (v.angle - kPi / 2.0) / 2.0;
  // Rotation about i; rotates tangent directions at i by +2*phi.
  double cph = std::cos(phi), sph = std::sin(phi);
  MobiusMap rot;
  rot.a = cph;
  rot.b = sph;
  rot.c = -sph;
  rot.d = cph;
  return translate * rot;
}

UnitTangent tangent_of(const MobiusMap& m) {
  std::complex<double> base = m.apply(std::complex<double>(0.0, 1.0));
  double theta = kPi / 2.0 - 2.0 * std::atan2(m.c, m.d);
  return UnitTangent(HPoint::from(base), theta);
}

UnitTangent flow(const UnitTangent& v, double t) {
  MobiusMap m = frame_of(v);
  double h = std::exp(t / 2.0);
  MobiusMap a_t;
  a_t.a = h;
  a_t.d = 1.0 / h;
  return tangent_of(m * a_t);
}

UnitTangent apply_mobius(const MobiusMap& m, const UnitTangent& v) {
  return tangent_of(m * frame_of(v));
}

BoundaryPoint forward_endpoint(const UnitTangent& v) {
  MobiusMap m = frame_of(v);
  return m.apply(BoundaryPoint::infinity());
}

BoundaryPoint backward_endpoint(const UnitTangent& v) {
  MobiusMap m = frame_of(v);
  return m.apply(BoundaryPoint::finite(0.0));
}

UnitTangent toward_boundary(const HPoint& x, const BoundaryPoint& xi) {
  // Disk model centered at x: direction angle of the image of xi, pulled
  // back through the Cayley map (whose derivative at the center has
  // argument pi/2).
  std::complex<double> z = x.z();
  std::complex<double> w;
  if (xi.infinite) {
    w = {1.0, 0.0};
  } else {
    w = (xi.xi - z) / (xi.xi - std::conj(z));
  }
  double psi = std::atan2(w.imag(), w.real());
  return UnitTangent(x, psi + kPi / 2.0);
}

UnitTangent toward_point(const HPoint& x, const HPoint& q) {
  std::complex<double> z = x.z();
  std::complex<double> w = (q.z() - z) / (q.z() - std::conj(z));
  double psi = std::atan2(w.imag(), w.real());
  return UnitTangent(x, psi + kPi / 2.0);
}

double distance_to_geodesic(const HPoint& p, const BoundaryPoint& a, const BoundaryPoint& b) {
  // Map the geodesic to the imaginary axis and use dist((u,v), axis) = asinh(|u|/v).
  MobiusMap f;
  if (a.infinite) {
    f = MobiusMap(b.xi, -1.0, 1.0, 0.0);  // 0 -> oo, oo -> b
    f = f.inverse();
  } else if (b.infinite) {
    f = MobiusMap(1.0, -a.xi, 0.0, 1.0);  // a -> 0, oo -> oo
  } else if (a.xi < b.xi) {
    f = MobiusMap(-1.0, a.xi, 1.0, -b.xi);
  } else {
    f = MobiusMap(1.0, -a.xi, 1.0, -b.xi);
  }
  std::complex<double> w = f.apply(p.z());
  if (w.imag() <= 0.0) throw Error(ErrorKind::Domain, "point not in half-plane after transport");
  return std::asinh(std::abs(w.real()) / w.imag());
}

HopfCoordinates hopf_coords(const UnitTangent& v, const HPoint& o) {
  HopfCoordinates h;
  h.xi_minus = backward_endpoint(v);
  h.xi_plus = forward_endpoint(v);
  h.t = busemann_exact(h.xi_plus, o, v.base);
  return h;
}

UnitTangent hopf_inverse(const HopfCoordinates& h, const HPoint& o) {
  if (h.xi_minus == h.xi_plus)
    throw Error(ErrorKind::Domain, "Hopf coordinates need distinct endpoints");
  // Frame of the geodesic from xi_minus to xi_plus; Busemann time along it
  // is an exact additive parameter.
  MobiusMap f;
  if (h.xi_plus.infinite) {
    f = MobiusMap(1.0, h.xi_minus.xi, 0.0, 1.0);
  } else if (h.xi_minus.infinite) {
    f = MobiusMap(h.xi_plus.xi, -1.0, 1.0, 0.0);
  } else if (h.xi_plus.xi > h.xi_minus.xi) {
    f = MobiusMap(h.xi_plus.xi, h.xi_minus.xi, 1.0, 1.0);
  } else {
    f = MobiusMap(-h.xi_plus.xi, h.xi_minus.xi, -1.0, 1.0);
  }
  UnitTangent w0 = tangent_of(f);
  double t0 = busemann_exact(h.xi_plus, o, w0.base);
  return flow(w0, h.t - t0);
}

namespace {

// Position of angle t inside the ccw arc [alpha, alpha+span].
bool angle_in(double t, double alpha, double span, double tol = 0.0) {
  double pos = std::fmod(t - alpha, kTwoPi);
  if (pos < 0) pos += kTwoPi;
  return pos >= -tol && pos <= span + tol;
}

}  // namespace

bool arc_contains(const BoundaryArc& arc, const BoundaryPoint& p) {
  if (arc.full) return true;
  double alpha = boundary_angle(arc.a);
  double span = mod_2pi(boundary_angle(arc.b) - alpha);
  return angle_in(boundary_angle(p), alpha, span);
}

bool arc_contains_arc(const BoundaryArc& outer, const BoundaryArc& inner) {
  if (outer.full) return true;
  if (inner.full) return false;
  double ao = boundary_angle(outer.a);
  double so = mod_2pi(boundary_angle(outer.b) - ao);
  double ai = boundary_angle(inner.a);
  double si = mod_2pi(boundary_angle(inner.b) - ai);
  double off = mod_2pi(ai - ao);
  return off <= so && off + si <= so;
}

bool arcs_disjoint(const BoundaryArc& u, const BoundaryArc& v) {
  if (u.full || v.full) return false;
  double au = boundary_angle(u.a);
  double su = mod_2pi(boundary_angle(u.b) - au);
  double av = boundary_angle(v.a);
  double sv = mod_2pi(boundary_angle(v.b) - av);
  // Disjoint iff neither start lies in the other arc.
  return !angle_in(av, au, su) && !angle_in(au, av, sv);
}

double arc_angular_width(const BoundaryArc& arc) {
  if (arc.full) return kTwoPi;
  return mod_2pi(boundary_angle(arc.b) - boundary_angle(arc.a));
}

BoundaryArc arc_complement(const BoundaryArc& arc) {
  if (arc.full) throw Error(ErrorKind::Domain, "complement of the full boundary is empty");
  return BoundaryArc::ccw(arc.b, arc.a);
}

BoundaryArc apply_mobius(const MobiusMap& m, const BoundaryArc& arc) {
  if (arc.full) return arc;
  return BoundaryArc::ccw(m.apply(arc.a), m.apply(arc.b));
}

namespace {

// Inverse of the Cayley map based at o, evaluated on the unit circle.
BoundaryPoint cayley_at_inverse(const HPoint& o, std::complex<double> w) {
  // C_o(z) = (z - o)/(z - conj(o)); solve C_o(z) = w.
  std::complex<double> num = o.z() - std::conj(o.z()) * w;
  std::complex<double> den = 1.0 - w;
  if (std::abs(den) < 1e-15) return BoundaryPoint::infinity();
  std::complex<double> z = num / den;
  return BoundaryPoint::finite(z.real());
}

}  // namespace

BoundaryArc shadow_arc(const HPoint& o, const HPoint& center, double R) {
  if (R <= 0.0) throw Error(ErrorKind::Domain, "shadow radius must be positive");
  double d = hyp_distance(o, center);
  if (d <= R) return BoundaryArc::full_boundary();
  // Disk model at o: the ball becomes a Euclidean disk; the shadow is the
  // cone of tangent directions.
  std::complex<double> mz = (center.z() - o.z()) / (center.z() - std::conj(o.z()));
  double beta = std::atan2(mz.imag(), mz.real());
  double tp = std::tanh((d + R) / 2.0);
  double tm = std::tanh((d - R) / 2.0);
  double ce = (tp + tm) / 2.0;
  double re = (tp - tm) / 2.0;
  double alpha = std::asin(std::min(1.0, re / ce));
  BoundaryPoint lo = cayley_at_inverse(o, std::polar(1.0, beta - alpha));
  BoundaryPoint hi = cayley_at_inverse(o, std::polar(1.0, beta + alpha));
  return BoundaryArc::ccw(lo, hi);
}

BoundaryPoint direction_from(const HPoint& o, const HPoint& p) {
  return forward_endpoint(toward_point(o, p));
}

bool dynamical_ball_contains(const UnitTangent& v, const UnitTangent& w, double T, double eps,
                             double step) {
  if (T < 0.0 || eps <= 0.0 || step <= 0.0)
    throw Error(ErrorKind::Domain, "dynamical ball needs T >= 0, eps > 0, step > 0");
  MobiusMap fv = frame_of(v);
  MobiusMap fw = frame_of(w);
  long n = std::max(1L, static_cast<long>(std::ceil(T / step)));
  for (long k = 0; k <= n; ++k) {
    double t = std::min(T, k * step);
    double h = std::exp(t / 2.0);
    MobiusMap a_t;
    a_t.a = h;
    a_t.d = 1.0 / h;
    HPoint pv = HPoint::from((fv * a_t).apply(std::complex<double>(0.0, 1.0)));
    HPoint pw = HPoint::from((fw * a_t).apply(std::complex<double>(0.0, 1.0)));
    if (hyp_distance(pv, pw) > eps) return false;
  }
  return true;
}

}  // namespace sprlab
