#pragma once

// Discrete groups of hyperbolic isometries in ping-pong position:
// word enumeration, orbit counting, Dirichlet reduction, critical exponents,
// closed geodesics and Patterson-Sullivan atom approximations.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sprlab/geometry.hpp"

namespace sprlab {

// Reduced word in the free product; letter +i / -i is generator i-1 / its inverse.
struct Word {
  std::vector<int32_t> letters;

  void append(int32_t letter);  // free reduction on append
  Word inverse() const;
  bool empty() const { return letters.empty(); }
  size_t size() const { return letters.size(); }
  bool cyclically_reduced() const;
  Word canonical_rotation() const;  // lexicographically minimal rotation
  bool is_primitive() const;        // not a proper power of a shorter cyclic word
  std::string str() const;          // "1.-2.1", identity = "e"
  static Word parse(const std::string& s);
  bool operator==(const Word& o) const { return letters == o.letters; }
  bool operator<(const Word& o) const { return letters < o.letters; }
};

enum class GroupKind { Schottky, GeometricallyFiniteFree };

struct GeneratorSpec {
  std::string label;
  MobiusMap map;
  BoundaryArc dom_pos;  // attracting domain (images of positive powers)
  BoundaryArc dom_neg;  // domain of the inverse; parabolic factors use one arc
};

// Conjugation of a cyclic factor to its standard form (dilation or
// horizontal translation), used for closed-form power jumps.
struct StandardForm {
  bool parabolic = false;
  MobiusMap conj;      // S with S^-1 g S standard
  double param = 0.0;  // translation length (hyperbolic) or shift (parabolic)
};

struct GroupPresentation {
  GroupKind kind = GroupKind::Schottky;
  HPoint basepoint{0.0, 1.0};
  std::vector<GeneratorSpec> generators;
  std::vector<StandardForm> standard;

  GroupPresentation() = default;
  GroupPresentation(GroupKind k, HPoint base, std::vector<GeneratorSpec> gens);

  size_t rank() const { return generators.size(); }
  const MobiusMap& gen(int32_t letter_index) const { return generators[letter_index].map; }
  // Matrix of a signed letter or a whole word.
  MobiusMap letter_map(int32_t letter) const;
  MobiusMap word_map(const Word& w) const;
  // g_i^n via the standard form (exact for large n).
  MobiusMap power(size_t i, long n) const;

  std::vector<double> generator_displacements() const;
  double max_displacement() const;

 private:
  void validate() const;
  void build_standard_forms();
};

struct OrbitPoint {
  Word word;
  HPoint image;
  double dist = 0.0;
};

// Enumerated orbit stored as a prefix tree; nodes sorted by distance.
class OrbitSet {
 public:
  size_t size() const { return dist_.size(); }
  double dist(size_t i) const { return dist_[i]; }
  const HPoint& point(size_t i) const { return point_[i]; }
  Word word(size_t i) const;
  MobiusMap matrix(const GroupPresentation& g, size_t i) const;
  OrbitPoint orbit_point(size_t i) const { return {word(i), point_[i], dist_[i]}; }
  const std::vector<double>& dists() const { return dist_; }  // sorted ascending
  double r_max() const { return r_max_; }

 private:
  friend OrbitSet enumerate_orbit(const GroupPresentation&, double, struct EnumerationOptions);
  friend class OrbitCache;
  std::vector<int32_t> parent_;
  std::vector<int16_t> letter_;
  std::vector<double> dist_;
  std::vector<HPoint> point_;
  double r_max_ = 0.0;
};

struct EnumerationOptions {
  double slack = -1.0;  // < 0: use 2 * max generator displacement
  long word_cap = 4000000;
  bool collision_audit = true;
};

OrbitSet enumerate_orbit(const GroupPresentation& group, double r_max,
                         EnumerationOptions opts = {});

struct ExponentEstimate {
  double value = 0.0;  // least-squares slope on the window
  double window_lo = 0.0, window_hi = 0.0;
  double residual = 0.0;  // regression RMS
  long count = 0;         // population at window_hi
  double secondary = 0.0;  // partial-sum balance estimate
  double running_max = 0.0;
};

struct ExponentOptions {
  double grid_step = 0.25;
  long min_points = 50;
};

// Growth exponent of a sorted list of distances: slope of ln N(R) over the
// window, plus a partial-sum balance cross-estimate.
ExponentEstimate estimate_exponent(const std::vector<double>& sorted_dists, double r_min,
                                   double r_max, ExponentOptions opts = {});

// Growth exponent of a primitive length spectrum: the balance estimate is
// primary (smooth in the data), the regression of ln(L N(L)) secondary.
ExponentEstimate estimate_length_exponent(const std::vector<double>& sorted_lengths, double l_min,
                                          double l_max, ExponentOptions opts = {});

struct ReducedPoint {
  HPoint point;     // w^-1 p, locally Dirichlet-minimal
  MobiusMap w;      // recovered group element
  Word word;        // letters of w (filled when requested)
  long steps = 0;
};

ReducedPoint reduce_to_domain(const GroupPresentation& group, const HPoint& p,
                              bool with_word = true, long max_steps = 100000);

struct ClosedGeodesic {
  Word rep;        // cyclically reduced, primitive, canonical rotation
  double length0;  // trace-formula length in the background metric
  std::map<std::string, double> lengths;
};

struct ClosedGeodesicOptions {
  double orbit_slack = 4.0;  // orbit radius = L_max + orbit_slack
  bool dedup_inversion = false;
  long class_cap = 500000;
  EnumerationOptions enumeration;
};

std::vector<ClosedGeodesic> closed_geodesics(const GroupPresentation& group, double l_max,
                                             ClosedGeodesicOptions opts = {});

// Frame of the translation axis of a hyperbolic word: maps (0, oo) to
// (repelling, attracting) fixed points; axis points are F(i e^s).
MobiusMap axis_frame(const MobiusMap& m);

struct PattersonAtom {
  int32_t orbit_index = -1;
  HPoint point;
  double dist = 0.0;    // d(o, gamma o)
  double weight = 0.0;
  BoundaryPoint direction;  // direction-from-o; undefined for the identity atom
  bool has_direction = false;
};

struct PattersonAtoms {
  double s = 0.0;
  HPoint basepoint;
  double delta_hat = 0.0;
  std::vector<PattersonAtom> atoms;
  double total_weight() const;
};

PattersonAtoms patterson_atoms(const GroupPresentation& group, const OrbitSet& orbit, double s,
                               const HPoint& x, double delta_hat, double margin = 0.05);

double measure_arc(const PattersonAtoms& atoms, const BoundaryArc& arc, double r_far);

}  // namespace sprlab
