#include "sprlab/group.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

namespace sprlab {

void Word::append(int32_t letter) {
  if (!letters.empty() && letters.back() == -letter) {
    letters.pop_back();
  } else {
    letters.push_back(letter);
  }
}

Word Word::inverse() const {
  Word r;
  r.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) r.letters.push_back(-*it);
  return r;
}

bool Word::cyclically_reduced() const {
  if (letters.size() < 2) return true;
  return letters.front() != -letters.back();
}

Word Word::canonical_rotation() const {
  size_t n = letters.size();
  if (n < 2) return *this;
  size_t best = 0;
  for (size_t s = 1; s < n; ++s) {
    for (size_t k = 0; k < n; ++k) {
      int32_t a = letters[(s + k) % n];
      int32_t b = letters[(best + k) % n];
      if (a != b) {
        if (a < b) best = s;
        break;
      }
    }
  }
  Word r;
  r.letters.reserve(n);
  for (size_t k = 0; k < n; ++k) r.letters.push_back(letters[(best + k) % n]);
  return r;
}

bool Word::is_primitive() const {
  size_t n = letters.size();
  if (n == 0) return false;
  for (size_t p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (size_t k = p; k < n && periodic; ++k) periodic = letters[k] == letters[k - p];
    if (periodic) return false;
  }
  return true;
}

std::string Word::str() const {
  if (letters.empty()) return "e";
  std::string s;
  char buf[16];
  for (size_t i = 0; i < letters.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d", letters[i]);
    if (i) s += '.';
    s += buf;
  }
  return s;
}

Word Word::parse(const std::string& s) {
  Word w;
  if (s == "e" || s.empty()) return w;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t dot = s.find('.', pos);
    if (dot == std::string::npos) dot = s.size();
    w.letters.push_back(std::stoi(s.substr(pos, dot - pos)));
    pos = dot + 1;
  }
  return w;
}

namespace {

bool is_parabolic(const MobiusMap& m, double tol = 1e-9) {
  return std::abs(std::abs(m.trace()) - 2.0) <= tol;
}

void hyperbolic_fixed_points(const MobiusMap& m, BoundaryPoint& attracting,
                             BoundaryPoint& repelling) {
  double tr = m.trace();
  double disc = tr * tr - 4.0;
  if (disc <= 0.0) throw Error(ErrorKind::Domain, "not a hyperbolic element");
  auto deriv_mag = [&](const BoundaryPoint& p) {
    if (p.infinite) return (m.d * m.d) / (m.a * m.a);
    double den = m.c * p.xi + m.d;
    return 1.0 / (den * den);
  };
  BoundaryPoint p1, p2;
  if (m.c != 0.0) {
    double r = std::sqrt(disc);
    p1 = BoundaryPoint::finite((m.a - m.d + r) / (2.0 * m.c));
    p2 = BoundaryPoint::finite((m.a - m.d - r) / (2.0 * m.c));
  } else {
    p1 = BoundaryPoint::infinity();
    p2 = BoundaryPoint::finite(m.b / (m.d - m.a));
  }
  if (deriv_mag(p1) < 1.0) {
    attracting = p1;
    repelling = p2;
  } else {
    attracting = p2;
    repelling = p1;
  }
}

MobiusMap frame_from_endpoints(const BoundaryPoint& to_zero, const BoundaryPoint& to_inf) {
  if (to_inf.infinite) return MobiusMap(1.0, to_zero.xi, 0.0, 1.0);
  if (to_zero.infinite) return MobiusMap(to_inf.xi, -1.0, 1.0, 0.0);
  if (to_inf.xi > to_zero.xi) return MobiusMap(to_inf.xi, to_zero.xi, 1.0, 1.0);
  return MobiusMap(-to_inf.xi, to_zero.xi, -1.0, 1.0);
}

}  // namespace

MobiusMap axis_frame(const MobiusMap& m) {
  BoundaryPoint att, rep;
  hyperbolic_fixed_points(m, att, rep);
  return frame_from_endpoints(rep, att);
}

GroupPresentation::GroupPresentation(GroupKind k, HPoint base, std::vector<GeneratorSpec> gens)
    : kind(k), basepoint(base), generators(std::move(gens)) {
  if (!valid(basepoint)) throw Error(ErrorKind::Config, "invalid basepoint");
  if (generators.empty()) throw Error(ErrorKind::Config, "group needs at least one generator");
  validate();
  build_standard_forms();
}

void GroupPresentation::validate() const {
  for (const auto& g : generators) {
    if (g.map.is_identity()) throw Error(ErrorKind::Config, "degenerate generator " + g.label);
    double atr = std::abs(g.map.trace());
    if (atr < 2.0 - 1e-9)
      throw Error(ErrorKind::Config, "elliptic generator " + g.label + " not allowed");
    if (kind == GroupKind::Schottky && is_parabolic(g.map))
      throw Error(ErrorKind::Config,
                  "Schottky groups take hyperbolic generators; " + g.label + " is parabolic");
  }
  for (const auto& g : generators) {
    BoundaryArc outside_neg = arc_complement(g.dom_neg);
    if (!arc_contains_arc(g.dom_pos, apply_mobius(g.map, outside_neg)))
      throw Error(ErrorKind::PingPongViolation, "generator " + g.label);
    BoundaryArc outside_pos = arc_complement(g.dom_pos);
    if (!arc_contains_arc(g.dom_neg, apply_mobius(g.map.inverse(), outside_pos)))
      throw Error(ErrorKind::PingPongViolation, "inverse of generator " + g.label);
  }
  std::vector<BoundaryArc> arcs;
  for (const auto& g : generators) {
    if (is_parabolic(g.map)) {
      arcs.push_back(g.dom_pos);
    } else {
      if (!arcs_disjoint(g.dom_pos, g.dom_neg))
        throw Error(ErrorKind::PingPongViolation,
                    "domains of " + g.label + " and its inverse overlap");
      arcs.push_back(g.dom_pos);
      arcs.push_back(g.dom_neg);
    }
  }
  for (size_t i = 0; i < arcs.size(); ++i)
    for (size_t j = i + 1; j < arcs.size(); ++j)
      if (!arcs_disjoint(arcs[i], arcs[j]))
        throw Error(ErrorKind::PingPongViolation, "ping-pong domains overlap");
}

void GroupPresentation::build_standard_forms() {
  standard.resize(generators.size());
  for (size_t i = 0; i < generators.size(); ++i) {
    const MobiusMap& m = generators[i].map;
    StandardForm& sf = standard[i];
    if (is_parabolic(m)) {
      sf.parabolic = true;
      if (std::abs(m.c) < 1e-14) {
        sf.conj = MobiusMap::identity();
      } else {
        double f = (m.a - m.d) / (2.0 * m.c);
        sf.conj = MobiusMap(f, -1.0, 1.0, 0.0);
      }
      MobiusMap t = sf.conj.inverse() * m * sf.conj;
      sf.param = t.b / t.a;
    } else {
      sf.parabolic = false;
      BoundaryPoint att, rep;
      hyperbolic_fixed_points(m, att, rep);
      sf.conj = frame_from_endpoints(rep, att);
      sf.param = 2.0 * std::acosh(std::abs(m.trace()) / 2.0);
    }
  }
}

MobiusMap GroupPresentation::letter_map(int32_t letter) const {
  size_t idx = static_cast<size_t>(std::abs(letter)) - 1;
  return letter > 0 ? generators[idx].map : generators[idx].map.inverse();
}

MobiusMap GroupPresentation::word_map(const Word& w) const {
  MobiusMap m;
  for (int32_t l : w.letters) m = m * letter_map(l);
  return m;
}

MobiusMap GroupPresentation::power(size_t i, long n) const {
  const StandardForm& sf = standard[i];
  MobiusMap core =
      sf.parabolic ? MobiusMap::translation(n * sf.param) : MobiusMap::dilation(n * sf.param);
  return sf.conj * core * sf.conj.inverse();
}

std::vector<double> GroupPresentation::generator_displacements() const {
  std::vector<double> r;
  r.reserve(generators.size());
  for (const auto& g : generators)
    r.push_back(hyp_distance(basepoint, apply_mobius(g.map, basepoint)));
  return r;
}

double GroupPresentation::max_displacement() const {
  double m = 0.0;
  for (double d : generator_displacements()) m = std::max(m, d);
  return m;
}

namespace {

struct MatrixKey {
  int64_t a, b, c, d;
  bool operator==(const MatrixKey& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
};

struct MatrixKeyHash {
  size_t operator()(const MatrixKey& k) const {
    uint64_t h = 1469598103934665603ull;
    for (int64_t v : {k.a, k.b, k.c, k.d}) {
      h ^= static_cast<uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

MatrixKey quantize(const MobiusMap& m, double tol) {
  return {static_cast<int64_t>(std::llround(m.a / tol)),
          static_cast<int64_t>(std::llround(m.b / tol)),
          static_cast<int64_t>(std::llround(m.c / tol)),
          static_cast<int64_t>(std::llround(m.d / tol))};
}

}  // namespace

OrbitSet enumerate_orbit(const GroupPresentation& group, double r_max, EnumerationOptions opts) {
  if (r_max <= 0.0) throw Error(ErrorKind::Domain, "r_max must be positive");
  double slack = opts.slack >= 0.0 ? opts.slack : 2.0 * group.max_displacement();
  double expand_bound = r_max + slack;
  const HPoint o = group.basepoint;
  const int k = static_cast<int>(group.rank());

  OrbitSet out;
  out.r_max_ = r_max;
  std::unordered_map<MatrixKey, int32_t, MatrixKeyHash> seen;

  struct Frame {
    MobiusMap m;
    int32_t node;
    int16_t last;
  };
  std::vector<Frame> stack;
  auto add_node = [&](int32_t parent, int16_t letter, const MobiusMap& m,
                      const HPoint& img) -> int32_t {
    int32_t id = static_cast<int32_t>(out.dist_.size());
    if (id >= opts.word_cap) throw Error(ErrorKind::BudgetExceeded, "orbit word cap exceeded");
    out.parent_.push_back(parent);
    out.letter_.push_back(letter);
    out.point_.push_back(img);
    out.dist_.push_back(hyp_distance(o, img));
    if (opts.collision_audit) {
      auto [it, fresh] = seen.emplace(quantize(m, 1e-8), id);
      (void)it;
      if (!fresh)
        throw Error(ErrorKind::PingPongViolation, "two distinct words reached one group element");
    }
    return id;
  };

  add_node(-1, 0, MobiusMap::identity(), o);
  stack.push_back({MobiusMap::identity(), 0, 0});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    for (int16_t l = static_cast<int16_t>(-k); l <= k; ++l) {
      if (l == 0 || l == -f.last) continue;
      MobiusMap child = f.m * group.letter_map(l);
      HPoint img = apply_mobius(child, o);
      double d = hyp_distance(o, img);
      if (d > expand_bound) continue;
      int32_t id = add_node(f.node, l, child, img);
      stack.push_back({child, id, l});
    }
  }

  // Deterministic order: ascending distance, creation index as tie break.
  std::vector<int32_t> order(out.dist_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int32_t a, int32_t b) { return out.dist_[a] < out.dist_[b]; });
  std::vector<int32_t> where(order.size());
  for (size_t i = 0; i < order.size(); ++i) where[order[i]] = static_cast<int32_t>(i);

  OrbitSet sorted;
  sorted.r_max_ = r_max;
  size_t n = order.size();
  sorted.parent_.resize(n);
  sorted.letter_.resize(n);
  sorted.dist_.resize(n);
  sorted.point_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    int32_t src = order[i];
    sorted.parent_[i] = out.parent_[src] < 0 ? -1 : where[out.parent_[src]];
    sorted.letter_[i] = out.letter_[src];
    sorted.dist_[i] = out.dist_[src];
    sorted.point_[i] = out.point_[src];
  }
  // Trim the pruned frontier beyond r_max, keeping the prefix tree closed
  // under parents.
  size_t keep = std::upper_bound(sorted.dist_.begin(), sorted.dist_.end(), r_max) -
                sorted.dist_.begin();
  for (size_t i = 0; i < keep; ++i)
    if (sorted.parent_[i] >= static_cast<int32_t>(keep))
      keep = static_cast<size_t>(sorted.parent_[i]) + 1;
  sorted.parent_.resize(keep);
  sorted.letter_.resize(keep);
  sorted.dist_.resize(keep);
  sorted.point_.resize(keep);
  sorted.parent_.shrink_to_fit();
  sorted.letter_.shrink_to_fit();
  sorted.dist_.shrink_to_fit();
  sorted.point_.shrink_to_fit();
  return sorted;
}

Word OrbitSet::word(size_t i) const {
  std::vector<int32_t> rev;
  int32_t cur = static_cast<int32_t>(i);
  while (cur >= 0 && letter_[cur] != 0) {
    rev.push_back(letter_[cur]);
    cur = parent_[cur];
  }
  Word w;
  w.letters.assign(rev.rbegin(), rev.rend());
  return w;
}

MobiusMap OrbitSet::matrix(const GroupPresentation& g, size_t i) const {
  return g.word_map(word(i));
}

namespace {

struct Fit {
  double slope = 0.0;
  double rms = 0.0;
  long n = 0;
};

Fit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  Fit f;
  f.n = static_cast<long>(xs.size());
  if (f.n < 2) return f;
  double mx = 0, my = 0;
  for (long i = 0; i < f.n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= f.n;
  my /= f.n;
  double sxx = 0, sxy = 0;
  for (long i = 0; i < f.n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  double b = my - f.slope * mx;
  double ss = 0;
  for (long i = 0; i < f.n; ++i) {
    double r = ys[i] - (f.slope * xs[i] + b);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / f.n);
  return f;
}

long count_below(const std::vector<double>& sorted, double x) {
  return std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
}

// Root of the balance between upper-band and lower-band partial sums of
// e^{-s d}; smooth in the data.
double balance_exponent(const std::vector<double>& sorted, double lo, double hi) {
  double mid = 0.5 * (lo + hi);
  auto f = [&](double s) {
    double up = 0, down = 0;
    for (double d : sorted) {
      if (d < lo) continue;
      if (d > hi) break;
      double w = std::exp(-s * (d - mid));
      if (d > mid)
        up += w;
      else
        down += w;
    }
    return up - down;
  };
  double a = 0.0, b = 2.0;
  if (f(a) <= 0.0) return 0.0;
  if (f(b) >= 0.0) return b;
  for (int it = 0; it < 80; ++it) {
    double m = 0.5 * (a + b);
    if (f(m) > 0)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

ExponentEstimate estimate_counting(const std::vector<double>& sorted, double r_min, double r_max,
                                   ExponentOptions opts, bool length_weighted) {
  if (r_min >= r_max) throw Error(ErrorKind::Domain, "empty exponent window");
  long in_window = count_below(sorted, r_max) - count_below(sorted, r_min - 1e-12);
  if (in_window < opts.min_points)
    throw Error(ErrorKind::InsufficientData,
                "only " + std::to_string(in_window) + " points in exponent window");
  std::vector<double> xs, ys;
  for (double r = r_min; r <= r_max + 1e-9; r += opts.grid_step) {
    long n = count_below(sorted, r);
    if (n <= 0) continue;
    xs.push_back(r);
    ys.push_back(length_weighted ? std::log(r * n) : std::log(static_cast<double>(n)));
  }
  Fit fit = linear_fit(xs, ys);
  ExponentEstimate e;
  e.value = fit.slope;
  e.window_lo = r_min;
  e.window_hi = r_max;
  e.residual = fit.rms;
  e.count = count_below(sorted, r_max);
  e.secondary = balance_exponent(sorted, r_min, r_max);
  size_t stride = std::max<size_t>(1, static_cast<size_t>(std::lround(1.0 / opts.grid_step)));
  double rmax = 0.0;
  for (size_t j = 0; j + stride < xs.size(); ++j) {
    double s = (ys[j + stride] - ys[j]) / (xs[j + stride] - xs[j]);
    rmax = std::max(rmax, s);
  }
  e.running_max = rmax;
  return e;
}

}  // namespace

ExponentEstimate estimate_exponent(const std::vector<double>& sorted_dists, double r_min,
                                   double r_max, ExponentOptions opts) {
  return estimate_counting(sorted_dists, r_min, r_max, opts, false);
}

ExponentEstimate estimate_length_exponent(const std::vector<double>& sorted_lengths, double l_min,
                                          double l_max, ExponentOptions opts) {
  ExponentEstimate e = estimate_counting(sorted_lengths, l_min, l_max, opts, true);
  // For primitive spectra the smooth balance estimate leads; the ln(L N(L))
  // regression keeps the secondary slot.
  std::swap(e.value, e.secondary);
  return e;
}

namespace {

struct PowerMove {
  long n = 0;
  double dist = 0.0;
  HPoint moved;
};

// Best power of one generator, via the closed-form optimum in standard
// coordinates plus the +-1 candidates.
PowerMove best_power(const GroupPresentation& g, size_t i, const HPoint& q, const HPoint& o) {
  const StandardForm& sf = g.standard[i];
  MobiusMap inv = sf.conj.inverse();
  HPoint qs = apply_mobius(inv, q);
  HPoint os = apply_mobius(inv, o);
  double nstar;
  if (sf.parabolic) {
    nstar = (qs.x - os.x) / sf.param;
  } else {
    nstar = (std::log(std::hypot(qs.x, qs.y)) - std::log(std::hypot(os.x, os.y))) / sf.param;
  }
  PowerMove best;
  best.n = 0;
  best.dist = hyp_distance(qs, os);
  best.moved = q;
  long cands[4] = {static_cast<long>(std::floor(nstar)), static_cast<long>(std::ceil(nstar)), 1,
                   -1};
  for (long n : cands) {
    if (n == 0) continue;
    HPoint moved_std;
    if (sf.parabolic) {
      moved_std = {qs.x - n * sf.param, qs.y};
    } else {
      double s = std::exp(-n * sf.param);
      moved_std = {qs.x * s, qs.y * s};
    }
    double d = hyp_distance(moved_std, os);
    if (d < best.dist - 1e-13) {
      best.n = n;
      best.dist = d;
      best.moved = apply_mobius(sf.conj, moved_std);
    }
  }
  return best;
}

}  // namespace

ReducedPoint reduce_to_domain(const GroupPresentation& group, const HPoint& p, bool with_word,
                              long max_steps) {
  ReducedPoint r;
  r.point = p;
  r.w = MobiusMap::identity();
  const HPoint o = group.basepoint;
  long steps = 0;
  while (true) {
    if (++steps > max_steps)
      throw Error(ErrorKind::NonTermination,
                  "Dirichlet reduction did not converge; group may be non-discrete");
    double cur = hyp_distance(r.point, o);
    size_t best_i = 0;
    PowerMove best;
    best.n = 0;
    best.dist = cur;
    for (size_t i = 0; i < group.rank(); ++i) {
      PowerMove m = best_power(group, i, r.point, o);
      if (m.n != 0 && m.dist < best.dist - 1e-13) {
        best = m;
        best_i = i;
      }
    }
    if (best.n == 0) break;
    r.point = best.moved;
    r.w = r.w * group.power(best_i, best.n);
    if (with_word) {
      int32_t letter = static_cast<int32_t>(best_i) + 1;
      int32_t signed_letter = best.n > 0 ? letter : -letter;
      for (long k = 0; k < std::labs(best.n); ++k) r.word.append(signed_letter);
    }
  }
  r.steps = steps;
  return r;
}

std::vector<ClosedGeodesic> closed_geodesics(const GroupPresentation& group, double l_max,
                                             ClosedGeodesicOptions opts) {
  if (l_max <= 0.0) throw Error(ErrorKind::Domain, "l_max must be positive");
  OrbitSet orbit = enumerate_orbit(group, l_max + opts.orbit_slack, opts.enumeration);
  struct Rec {
    Word rep;
    double len;
  };
  std::map<std::vector<int32_t>, Rec> classes;
  for (size_t i = 1; i < orbit.size(); ++i) {
    Word w = orbit.word(i);
    if (!w.cyclically_reduced()) continue;
    Word canon = w.canonical_rotation();
    if (!canon.is_primitive()) continue;
    std::vector<int32_t> key = canon.letters;
    if (opts.dedup_inversion) {
      Word invc = canon.inverse().canonical_rotation();
      if (invc.letters < key) key = invc.letters;
    }
    if (classes.count(key)) continue;
    MobiusMap m = group.word_map(canon);
    double atr = std::abs(m.trace());
    if (atr <= 2.0 + 1e-12) continue;  // parabolic classes carry no closed geodesic
    double len = 2.0 * std::acosh(atr / 2.0);
    if (len > l_max) continue;
    classes.emplace(std::move(key), Rec{canon, len});
    if (classes.size() > static_cast<size_t>(opts.class_cap))
      throw Error(ErrorKind::BudgetExceeded, "closed geodesic class cap exceeded");
  }
  std::vector<ClosedGeodesic> out;
  out.reserve(classes.size());
  for (auto& [key, rec] : classes) {
    ClosedGeodesic c;
    c.rep = rec.rep;
    c.length0 = rec.len;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const ClosedGeodesic& a, const ClosedGeodesic& b) {
    if (a.length0 != b.length0) return a.length0 < b.length0;
    return a.rep.letters < b.rep.letters;
  });
  return out;
}

double PattersonAtoms::total_weight() const {
  double t = 0.0;
  for (const auto& a : atoms) t += a.weight;
  return t;
}

PattersonAtoms patterson_atoms(const GroupPresentation& group, const OrbitSet& orbit, double s,
                               const HPoint& x, double delta_hat, double margin) {
  if (s < delta_hat + margin)
    throw Error(ErrorKind::Domain,
                "Patterson parameter must exceed the exponent estimate by the margin");
  PattersonAtoms out;
  out.s = s;
  out.basepoint = x;
  out.delta_hat = delta_hat;
  const HPoint o = group.basepoint;
  double z = 0.0;
  for (size_t i = 0; i < orbit.size(); ++i) z += std::exp(-s * orbit.dist(i));
  out.atoms.reserve(orbit.size());
  for (size_t i = 0; i < orbit.size(); ++i) {
    PattersonAtom a;
    a.orbit_index = static_cast<int32_t>(i);
    a.point = orbit.point(i);
    a.dist = orbit.dist(i);
    a.weight = std::exp(-s * hyp_distance(x, a.point)) / z;
    if (a.dist > 1e-12) {
      a.direction = direction_from(o, a.point);
      a.has_direction = true;
    }
    out.atoms.push_back(a);
  }
  return out;
}

double measure_arc(const PattersonAtoms& atoms, const BoundaryArc& arc, double r_far) {
  double tail = 0.0, inside = 0.0;
  for (const auto& a : atoms.atoms) {
    if (a.dist < r_far || !a.has_direction) continue;
    tail += a.weight;
    if (arc_contains(arc, a.direction)) inside += a.weight;
  }
  if (tail <= 0.0) throw Error(ErrorKind::EmptyTail, "no atoms beyond the tail radius");
  return inside / tail;
}

}  // namespace sprlab
