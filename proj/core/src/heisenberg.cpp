#include "fpp/heisenberg.hpp"

#include <cmath>

#include "fpp/error.hpp"

namespace fpp {

HeisenbergPoint heisenberg_product(const HeisenbergPoint& p, const HeisenbergPoint& q) {
  return {p.u + q.u, p.v + q.v, p.w + q.w + p.u * q.v};
}

HeisenbergPoint heisenberg_inverse(const HeisenbergPoint& p) {
  return {-p.u, -p.v, -p.w + p.u * p.v};
}

HeisenbergPoint dilate(double t, const HeisenbergPoint& p) {
  if (!(t > 0.0)) throw InvalidArgument("dilation factor must be positive");
  return {t * p.u, t * p.v, t * t * p.w};
}

double homogeneous_gauge(const HeisenbergPoint& p) {
  return std::max(std::abs(p.u) + std::abs(p.v), std::sqrt(std::abs(p.w)));
}

double gauge_distance(const HeisenbergPoint& p, const HeisenbergPoint& q) {
  // p^-1 q = (q.u - p.u, q.v - p.v, q.w - p.w - p.u (q.v - p.v))
  const double du = q.u - p.u;
  const double dv = q.v - p.v;
  const double dw = q.w - p.w - p.u * dv;
  return std::max(std::abs(du) + std::abs(dv), std::sqrt(std::abs(dw)));
}

HeisenbergPoint embed_heisenberg(const Element& g) {
  if (g.kind() != GroupKind::Heisenberg || g.size() != 3) {
    throw InvalidArgument("embed_heisenberg requires a Heisenberg element");
  }
  return {static_cast<double>(g[0]), static_cast<double>(g[1]), static_cast<double>(g[2])};
}

}  // namespace fpp
