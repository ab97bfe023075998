#include "fpp/distribution.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fpp/error.hpp"

namespace fpp {

DistributionSpec DistributionSpec::two_point(double a, double b, double p_a) {
  return {DistributionKind::TwoPoint, a, b, p_a, 0.0};
}

DistributionSpec DistributionSpec::uniform(double a, double b) {
  return {DistributionKind::Uniform, a, b, 0.0, 0.0};
}

DistributionSpec DistributionSpec::shifted_exponential(double shift, double rate) {
  return {DistributionKind::ShiftedExponential, shift, std::numeric_limits<double>::infinity(), 0.0, rate};
}

double DistributionSpec::support_max() const noexcept {
  if (kind_ == DistributionKind::ShiftedExponential) return std::numeric_limits<double>::infinity();
  if (kind_ == DistributionKind::TwoPoint && p_a_ >= 1.0) return a_;
  return b_;
}

bool DistributionSpec::is_deterministic() const noexcept {
  switch (kind_) {
    case DistributionKind::TwoPoint:
      return a_ == b_ || p_a_ == 1.0 || p_a_ == 0.0;
    case DistributionKind::Uniform:
      return a_ == b_;
    case DistributionKind::ShiftedExponential:
      return false;
  }
  return false;
}

double DistributionSpec::mean() const noexcept {
  switch (kind_) {
    case DistributionKind::TwoPoint:
      return p_a_ * a_ + (1.0 - p_a_) * b_;
    case DistributionKind::Uniform:
      return 0.5 * (a_ + b_);
    case DistributionKind::ShiftedExponential:
      return a_ + 1.0 / rate_;
  }
  return 0.0;
}

double DistributionSpec::variance() const noexcept {
  switch (kind_) {
    case DistributionKind::TwoPoint:
      return p_a_ * (1.0 - p_a_) * (b_ - a_) * (b_ - a_);
    case DistributionKind::Uniform:
      return (b_ - a_) * (b_ - a_) / 12.0;
    case DistributionKind::ShiftedExponential:
      return 1.0 / (rate_ * rate_);
  }
  return 0.0;
}

double DistributionSpec::atom(double x) const noexcept {
  switch (kind_) {
    case DistributionKind::TwoPoint: {
      double m = 0.0;
      if (x == a_) m += p_a_;
      if (x == b_) m += 1.0 - p_a_;
      return m;
    }
    case DistributionKind::Uniform:
      return a_ == b_ && x == a_ ? 1.0 : 0.0;
    case DistributionKind::ShiftedExponential:
      return 0.0;
  }
  return 0.0;
}

double DistributionSpec::mass_in(double lo, double hi) const noexcept {
  if (hi < lo) return 0.0;
  switch (kind_) {
    case DistributionKind::TwoPoint: {
      double m = 0.0;
      if (lo <= a_ && a_ <= hi) m += p_a_;
      if (a_ != b_ && lo <= b_ && b_ <= hi) m += 1.0 - p_a_;
      if (a_ == b_ && lo <= a_ && a_ <= hi) m = 1.0;
      return m;
    }
    case DistributionKind::Uniform: {
      if (a_ == b_) return lo <= a_ && a_ <= hi ? 1.0 : 0.0;
      const double l = std::max(lo, a_);
      const double h = std::min(hi, b_);
      return h > l ? (h - l) / (b_ - a_) : 0.0;
    }
    case DistributionKind::ShiftedExponential: {
      const double l = std::max(lo, a_);
      if (hi < l) return 0.0;
      return std::exp(-rate_ * (l - a_)) - std::exp(-rate_ * (hi - a_));
    }
  }
  return 0.0;
}

double DistributionSpec::quantile(double u) const noexcept {
  switch (kind_) {
    case DistributionKind::TwoPoint:
      return u < p_a_ ? a_ : b_;
    case DistributionKind::Uniform:
      return a_ + (b_ - a_) * u;
    case DistributionKind::ShiftedExponential:
      return a_ - std::log1p(-u) / rate_;
  }
  return 0.0;
}

std::string DistributionSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case DistributionKind::TwoPoint:
      os << "two-point(a=" << a_ << ",b=" << b_ << ",p=" << p_a_ << ")";
      break;
    case DistributionKind::Uniform:
      os << "uniform(a=" << a_ << ",b=" << b_ << ")";
      break;
    case DistributionKind::ShiftedExponential:
      os << "shifted-exponential(shift=" << a_ << ",rate=" << rate_ << ")";
      break;
  }
  return os.str();
}

DistributionCheck validate_distribution(const DistributionSpec& spec, int degree) {
  auto reject = [](std::string rule, std::string message) {
    return DistributionCheck{false, std::move(rule), std::move(message)};
  };
  if (degree < 2) return reject("degree >= 2", "graph degree must be at least 2");
  const double a = spec.support_min();
  if (!std::isfinite(a) || a < 0.0) return reject("a >= 0", "support minimum a must be finite and >= 0");
  switch (spec.kind()) {
    case DistributionKind::TwoPoint:
    case DistributionKind::Uniform: {
      const double b = spec.kind() == DistributionKind::TwoPoint && spec.p_a() >= 1.0
                           ? a
                           : spec.support_max();
      if (!std::isfinite(b) || b < a) return reject("a <= b", "support must satisfy a <= b < infinity");
      if (spec.kind() == DistributionKind::TwoPoint && !(spec.p_a() >= 0.0 && spec.p_a() <= 1.0)) {
        return reject("p_a in [0,1]", "two-point probability p_a must lie in [0, 1]");
      }
      break;
    }
    case DistributionKind::ShiftedExponential:
      if (!(spec.rate() > 0.0) || !std::isfinite(spec.rate())) {
        return reject("rate > 0", "exponential rate must be positive and finite");
      }
      break;
  }
  // A1 holds for every supported kind: bounded support, or an exponential tail.
  const double atom0 = spec.atom(0.0);
  if (atom0 >= 1.0 / degree) {
    std::ostringstream os;
    os << "nu({0}) >= 1/degree (" << atom0 << " >= 1/" << degree << ")";
    return reject("nu({0}) < 1/degree", os.str());
  }
  return {};
}

}  // namespace fpp
