#pragma once

#include <string>

namespace fpp {

enum class DistributionKind { TwoPoint, Uniform, ShiftedExponential };

/// The edge-length law nu. All three kinds have an exponential moment.
class DistributionSpec {
 public:
  /// Weight a with probability p_a, otherwise b.
  static DistributionSpec two_point(double a, double b, double p_a);
  static DistributionSpec uniform(double a, double b);
  /// shift + Exp(rate).
  static DistributionSpec shifted_exponential(double shift, double rate);
  /// Every edge has weight c; the same law as two_point(c, c, 1).
  static DistributionSpec deterministic(double c) { return two_point(c, c, 1.0); }

  DistributionKind kind() const noexcept { return kind_; }
  double support_min() const noexcept { return a_; }
  /// +infinity for the shifted exponential.
  double support_max() const noexcept;
  double p_a() const noexcept { return p_a_; }
  double rate() const noexcept { return rate_; }
  bool bounded() const noexcept { return kind_ != DistributionKind::ShiftedExponential; }
  bool is_deterministic() const noexcept;

  double mean() const noexcept;
  double variance() const noexcept;
  /// nu({x}).
  double atom(double x) const noexcept;
  /// nu([lo, hi]).
  double mass_in(double lo, double hi) const noexcept;
  /// Inverse CDF evaluated at u in (0, 1).
  double quantile(double u) const noexcept;

  std::string describe() const;

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;

 private:
  DistributionSpec(DistributionKind kind, double a, double b, double p_a, double rate)
      : kind_(kind), a_(a), b_(b), p_a_(p_a), rate_(rate) {}

  DistributionKind kind_;
  double a_;
  double b_;
  double p_a_;
  double rate_;
};

struct DistributionCheck {
  bool ok = true;
  /// Name of the violated rule, empty when ok.
  std::string rule;
  std::string message;
};

/// Accepts nu when its parameters are well formed, it has an exponential
/// moment (always true for the supported kinds) and nu({0}) < 1/degree.
DistributionCheck validate_distribution(const DistributionSpec& spec, int degree);

}  // namespace fpp
