#pragma once

#include "fpp/group.hpp"

namespace fpp {

/// A point of the real Heisenberg group in matrix coordinates
/// [[1, u, w], [0, 1, v], [0, 0, 1]].
struct HeisenbergPoint {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;

  friend bool operator==(const HeisenbergPoint&, const HeisenbergPoint&) = default;
};

HeisenbergPoint heisenberg_product(const HeisenbergPoint& p, const HeisenbergPoint& q);
HeisenbergPoint heisenberg_inverse(const HeisenbergPoint& p);

/// delta_t(u, v, w) = (t u, t v, t^2 w). Throws InvalidArgument for t <= 0.
HeisenbergPoint dilate(double t, const HeisenbergPoint& p);

/// N(u, v, w) = max(|u| + |v|, sqrt|w|). Homogeneous: N(delta_t p) = t N(p).
double homogeneous_gauge(const HeisenbergPoint& p);

/// Left-invariant gauge distance N(p^-1 q). Not symmetric in general, but it
/// satisfies the triangle inequality and vanishes only at p = q.
double gauge_distance(const HeisenbergPoint& p, const HeisenbergPoint& q);

/// The standard embedding H(Z) -> H(R). Throws InvalidArgument for other kinds.
HeisenbergPoint embed_heisenberg(const Element& g);

}  // namespace fpp
