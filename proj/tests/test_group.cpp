#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "sprlab/group.hpp"
#include "test_support.hpp"

using namespace sprlab;
using namespace sprlab::testing;

namespace {
std::mt19937_64 grng(77001);
}

TEST_CASE("word reduction and canonical forms") {
  Word w;
  w.append(1);
  w.append(-1);
  CHECK(w.empty());
  w.append(2);
  w.append(1);
  w.append(-2);
  CHECK(w.str() == "2.1.-2");
  CHECK(!w.cyclically_reduced());
  Word v = Word::parse("2.1.1.-2");
  CHECK(v.letters == std::vector<int32_t>({2, 1, 1, -2}));
  CHECK(Word::parse(v.str()) == v);

  Word cyc = Word::parse("2.1.1");
  CHECK(cyc.canonical_rotation().str() == "1.1.2");
  CHECK(cyc.is_primitive());
  CHECK(!Word::parse("1.2.1.2").is_primitive());
  CHECK(Word::parse("1.2").inverse().str() == "-2.-1");
}

TEST_CASE("group validation rejects bad ping-pong data") {
  GeneratorSpec a;
  a.label = "a";
  a.map = MobiusMap::dilation(0.2);  // too short for these arcs
  a.dom_pos = BoundaryArc::ccw(BoundaryPoint::finite(2.0), BoundaryPoint::finite(-2.0));
  a.dom_neg = BoundaryArc::ccw(BoundaryPoint::finite(-0.5), BoundaryPoint::finite(0.5));
  CHECK_THROWS_AS(GroupPresentation(GroupKind::Schottky, HPoint{0.0, 1.0}, {a}), Error);

  CHECK_NOTHROW(cyclic_hyperbolic());
  CHECK_NOTHROW(cyclic_parabolic());
  CHECK_NOTHROW(schottky_cc());
  CHECK_NOTHROW(cusp2());
  CHECK_NOTHROW(cusp1());
}

TEST_CASE("orbit of the cyclic hyperbolic group") {
  GroupPresentation g = cyclic_hyperbolic();
  OrbitSet orbit = enumerate_orbit(g, 10.0);
  // Words a^n with displacement 2|n|: n in [-5,5], 11 points.
  CHECK(orbit.size() == 11);
  CHECK(orbit.dist(0) == doctest::Approx(0.0));
  CHECK(orbit.word(0).empty());
  std::multiset<long> expect, got;
  for (long n = -5; n <= 5; ++n) expect.insert(2 * std::labs(n));
  for (size_t i = 0; i < orbit.size(); ++i) got.insert(std::lround(orbit.dist(i)));
  CHECK(expect == got);
}

TEST_CASE("orbit matches brute-force unpruned enumeration") {
  GroupPresentation g = schottky_cc();
  const double R = 8.0;
  OrbitSet orbit = enumerate_orbit(g, R);

  // Oracle: breadth-first over all reduced words with no distance pruning,
  // until two consecutive levels contribute nothing below R.
  std::vector<std::pair<Word, MobiusMap>> level = {{Word{}, MobiusMap::identity()}};
  long count = 1;
  int quiet = 0;
  for (int depth = 1; depth <= 12 && quiet < 2; ++depth) {
    std::vector<std::pair<Word, MobiusMap>> next;
    long added = 0;
    for (const auto& [w, m] : level) {
      for (int32_t l = -2; l <= 2; ++l) {
        if (l == 0 || (!w.letters.empty() && w.letters.back() == -l)) continue;
        Word cw = w;
        cw.append(l);
        MobiusMap cm = m * g.letter_map(l);
        next.emplace_back(cw, cm);
        if (hyp_distance(g.basepoint, apply_mobius(cm, g.basepoint)) <= R) ++added;
      }
    }
    count += added;
    quiet = added == 0 ? quiet + 1 : 0;
    level = std::move(next);
  }
  CHECK(static_cast<long>(orbit.size()) == count);
}

TEST_CASE("orbit dists are sorted and words unique") {
  GroupPresentation g = schottky_cc();
  OrbitSet orbit = enumerate_orbit(g, 9.0);
  std::set<std::string> words;
  for (size_t i = 0; i < orbit.size(); ++i) {
    if (i) CHECK(orbit.dist(i) >= orbit.dist(i - 1));
    CHECK(words.insert(orbit.word(i).str()).second);
    CHECK(orbit.dist(i) ==
          doctest::Approx(hyp_distance(g.basepoint, orbit.point(i))).epsilon(1e-9));
  }
}

TEST_CASE("prefix overshoot stays within the pruning slack") {
  // Audit for the branch-pruning rule: along sampled orbit words, no prefix
  // exceeds the final displacement by more than the slack in use.
  for (const GroupPresentation& g : {schottky_cc(), cusp2()}) {
    double slack = 2.0 * g.max_displacement();
    OrbitSet orbit = enumerate_orbit(g, 9.0);
    std::uniform_int_distribution<size_t> pick(0, orbit.size() - 1);
    for (int k = 0; k < 200; ++k) {
      size_t i = pick(grng);
      Word w = orbit.word(i);
      MobiusMap m;
      double overshoot = 0.0;
      for (int32_t l : w.letters) {
        m = m * g.letter_map(l);
        double d = hyp_distance(g.basepoint, apply_mobius(m, g.basepoint));
        overshoot = std::max(overshoot, d - orbit.dist(i));
      }
      CHECK(overshoot <= slack);
    }
  }
}

TEST_CASE("exponent of elementary groups") {
  GroupPresentation hyp = cyclic_hyperbolic();
  OrbitSet oh = enumerate_orbit(hyp, 30.0);
  ExponentOptions lax;
  lax.min_points = 10;
  ExponentEstimate eh = estimate_exponent(oh.dists(), 4.0, 30.0, lax);
  CHECK(eh.value <= 0.02);
  CHECK(eh.value >= -0.02);

  GroupPresentation par = cyclic_parabolic();
  OrbitSet op = enumerate_orbit(par, 20.0);
  ExponentEstimate ep = estimate_exponent(op.dists(), 10.0, 20.0);
  CHECK(ep.value == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(ep.value - 0.5) <= 0.05);
  CHECK(ep.count >= 50);
}

TEST_CASE("exponent cross-method agreement on a Schottky group") {
  GroupPresentation g = schottky_cc();
  OrbitSet orbit = enumerate_orbit(g, 13.0);
  ExponentEstimate e = estimate_exponent(orbit.dists(), 5.0, 13.0);
  CHECK(std::abs(e.value - e.secondary) <= 0.02);
  CHECK(e.value > 0.3);
  CHECK(e.value < 0.8);
}

TEST_CASE("exponent estimate rescales with distances") {
  GroupPresentation g = schottky_cc();
  OrbitSet orbit = enumerate_orbit(g, 12.0);
  ExponentEstimate base = estimate_exponent(orbit.dists(), 5.0, 12.0);
  double eps = 0.2;
  double scale = std::exp(eps / 2.0);
  std::vector<double> scaled;
  scaled.reserve(orbit.size());
  for (double d : orbit.dists()) scaled.push_back(scale * d);
  ExponentEstimate es = estimate_exponent(scaled, 5.0 * scale, 12.0 * scale);
  CHECK(es.value == doctest::Approx(base.value / scale).epsilon(0.03));
}

TEST_CASE("insufficient data is reported") {
  GroupPresentation g = cyclic_hyperbolic();
  OrbitSet orbit = enumerate_orbit(g, 6.0);
  CHECK_THROWS_AS(estimate_exponent(orbit.dists(), 2.0, 6.0), Error);
}

TEST_CASE("dirichlet reduction") {
  GroupPresentation g = schottky_cc();
  const HPoint o = g.basepoint;

  ReducedPoint fixed = reduce_to_domain(g, HPoint{0.05, 1.1});
  CHECK(fixed.word.empty());
  CHECK(hyp_distance(fixed.point, HPoint{0.05, 1.1}) <= 1e-12);

  OrbitSet orbit = enumerate_orbit(g, 8.0);
  for (size_t i = 0; i < orbit.size(); i += 7) {
    ReducedPoint r = reduce_to_domain(g, orbit.point(i));
    CHECK(hyp_distance(r.point, o) <= 1e-9);
    CHECK(r.word == orbit.word(i));
    // Local Dirichlet minimality against every generator.
    for (size_t j = 0; j < g.rank(); ++j) {
      for (int sgn : {1, -1}) {
        HPoint moved = apply_mobius(sgn > 0 ? g.gen(j) : g.gen(j).inverse(), r.point);
        CHECK(hyp_distance(r.point, o) <= hyp_distance(moved, o) + 1e-9);
      }
    }
    // Idempotent.
    ReducedPoint again = reduce_to_domain(g, r.point);
    CHECK(again.word.empty());
  }
}

TEST_CASE("reduction distance matches brute-force nearest orbit point") {
  for (const GroupPresentation& g : {schottky_cc(), cusp2()}) {
    OrbitSet orbit = enumerate_orbit(g, 14.0);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    std::uniform_real_distribution<double> uy(-2.0, 2.0);
    for (int k = 0; k < 25; ++k) {
      HPoint p{g.basepoint.x + ux(grng), g.basepoint.y * std::exp(uy(grng))};
      if (hyp_distance(p, g.basepoint) > 6.0) continue;
      double brute = 1e300;
      for (size_t i = 0; i < orbit.size(); ++i)
        brute = std::min(brute, hyp_distance(p, orbit.point(i)));
      ReducedPoint r = reduce_to_domain(g, p, false);
      CHECK(hyp_distance(r.point, g.basepoint) == doctest::Approx(brute).epsilon(1e-6));
    }
  }
}

TEST_CASE("reduction with large parabolic offsets uses power jumps") {
  GroupPresentation g = cyclic_parabolic();
  ReducedPoint r = reduce_to_domain(g, HPoint{12345.4, 2.0});
  CHECK(std::abs(r.point.x) <= 0.5 + 1e-9);
  CHECK(r.steps <= 10);
  CHECK(r.word.size() == 12345);
}

TEST_CASE("closed geodesics of a cyclic group") {
  // Generator with trace 3: length from the trace identity.
  double t = 2.0 * std::acosh(1.5);
  GeneratorSpec a;
  a.label = "a";
  a.map = MobiusMap::dilation(t);
  a.dom_pos = BoundaryArc::ccw(BoundaryPoint::finite(2.0), BoundaryPoint::finite(-2.0));
  a.dom_neg = BoundaryArc::ccw(BoundaryPoint::finite(-0.5), BoundaryPoint::finite(0.5));
  GroupPresentation g(GroupKind::Schottky, HPoint{0.0, 1.0}, {a});
  CHECK(std::abs(g.gen(0).trace()) == doctest::Approx(3.0).epsilon(1e-12));

  std::vector<ClosedGeodesic> cls = closed_geodesics(g, 10.0);
  REQUIRE(!cls.empty());
  CHECK(cls[0].length0 == doctest::Approx(t).epsilon(1e-12));
  // Only primitive classes: a and a^-1 (cyclic dedup only by default).
  for (const auto& c : cls) CHECK(c.rep.size() == 1);
  CHECK(cls.size() == 2);

  ClosedGeodesicOptions dedup;
  dedup.dedup_inversion = true;
  CHECK(closed_geodesics(g, 10.0, dedup).size() == 1);
}

TEST_CASE("conjugate words give a single class record") {
  GroupPresentation g = schottky_cc();
  std::vector<ClosedGeodesic> cls = closed_geodesics(g, 7.0);
  // b a b^-1 is conjugate to a; check that no record repeats a length0 with
  // the same canonical representative, and that 'a' appears exactly once.
  long count_a = 0;
  for (const auto& c : cls)
    if (c.rep == Word::parse("1")) ++count_a;
  CHECK(count_a == 1);
  // Length is a class function: conjugating the representative keeps length0.
  MobiusMap conj = g.gen(1) * g.gen(0) * g.gen(1).inverse();
  CHECK(2.0 * std::acosh(std::abs(conj.trace()) / 2.0) ==
        doctest::Approx(2.0 * std::acosh(std::abs(g.gen(0).trace()) / 2.0)).epsilon(1e-10));
}

TEST_CASE("closed geodesic counting tracks the orbit exponent") {
  GroupPresentation g = schottky_cc();
  OrbitSet orbit = enumerate_orbit(g, 13.0);
  ExponentEstimate delta = estimate_exponent(orbit.dists(), 5.0, 13.0);
  double L = 12.0;
  std::vector<ClosedGeodesic> cls = closed_geodesics(g, L);
  long n = 0;
  for (const auto& c : cls)
    if (c.length0 <= L) ++n;
  double rate = std::log(static_cast<double>(n)) / L;
  CHECK(std::abs(rate - delta.value) <= 0.1);
}

TEST_CASE("patterson atoms") {
  GroupPresentation g = schottky_cc();
  OrbitSet orbit = enumerate_orbit(g, 12.0);
  ExponentEstimate delta = estimate_exponent(orbit.dists(), 5.0, 12.0);
  double s = delta.value + 0.3;

  CHECK_THROWS_AS(patterson_atoms(g, orbit, delta.value + 0.01, g.basepoint, delta.value), Error);

  PattersonAtoms nu_o = patterson_atoms(g, orbit, s, g.basepoint, delta.value);
  CHECK(nu_o.total_weight() == doctest::Approx(1.0).epsilon(1e-12));

  // Conformal ratio between basepoints is exact.
  HPoint x{0.3, 1.4};
  PattersonAtoms nu_x = patterson_atoms(g, orbit, s, x, delta.value);
  for (size_t i = 0; i < nu_o.atoms.size(); i += 17) {
    double expect = std::exp(-s * (hyp_distance(x, nu_o.atoms[i].point) -
                                   hyp_distance(g.basepoint, nu_o.atoms[i].point)));
    CHECK(nu_x.atoms[i].weight / nu_o.atoms[i].weight == doctest::Approx(expect).epsilon(1e-10));
  }

  // Equivariance: the gamma-pushforward of atoms for x matches atoms for
  // gamma x on the common truncation, exactly.
  MobiusMap gamma = g.gen(0);
  PattersonAtoms nu_gx = patterson_atoms(g, orbit, s, apply_mobius(gamma, x), delta.value);
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < orbit.size(); ++i) index[orbit.word(i).str()] = i;
  long matched = 0;
  for (size_t i = 0; i < orbit.size(); i += 5) {
    Word moved = orbit.word(i);
    Word target;
    target.append(1);
    for (int32_t l : moved.letters) target.append(l);
    auto it = index.find(target.str());
    if (it == index.end()) continue;
    ++matched;
    CHECK(nu_gx.atoms[it->second].weight ==
          doctest::Approx(nu_x.atoms[i].weight).epsilon(1e-10));
  }
  CHECK(matched >= 20);
}

TEST_CASE("patterson tail decay") {
  GroupPresentation g = schottky_cc();
  OrbitSet orbit = enumerate_orbit(g, 13.0);
  ExponentEstimate delta = estimate_exponent(orbit.dists(), 5.0, 13.0);
  double s = delta.value + 0.3;
  PattersonAtoms nu = patterson_atoms(g, orbit, s, g.basepoint, delta.value);
  std::vector<double> xs, ys;
  for (double R = 4.0; R <= 10.0; R += 1.0) {
    double m = 0.0;
    for (const auto& a : nu.atoms)
      if (a.dist >= R) m += a.weight;
    xs.push_back(R);
    ys.push_back(std::log(m));
  }
  double num = 0, den = 0, mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  for (size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  double slope = num / den;
  double predict = -(s - delta.value);
  CHECK(slope <= predict * 0.5);
  CHECK(slope >= predict * 1.8);
}

TEST_CASE("measure_arc") {
  GroupPresentation g = schottky_cc();
  OrbitSet orbit = enumerate_orbit(g, 11.0);
  ExponentEstimate delta = estimate_exponent(orbit.dists(), 5.0, 11.0);
  PattersonAtoms nu = patterson_atoms(g, orbit, delta.value + 0.2, g.basepoint, delta.value);

  CHECK(measure_arc(nu, BoundaryArc::full_boundary(), 6.0) == doctest::Approx(1.0));
  BoundaryArc arc = BoundaryArc::ccw(BoundaryPoint::finite(0.1), BoundaryPoint::finite(3.0));
  double m1 = measure_arc(nu, arc, 6.0);
  double m2 = measure_arc(nu, arc_complement(arc), 6.0);
  CHECK(m1 + m2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(measure_arc(nu, arc, 100.0), Error);
}
