#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "fpp/error.hpp"
#include "fpp/experiments.hpp"
#include "fpp/mix.hpp"
#include "fpp/passage.hpp"
#include "fpp/shape.hpp"
#include "fpp/word_metric.hpp"

#ifndef FPP_VERSION
#define FPP_VERSION "0.0.0"
#endif

namespace fpp::cli {

using json = nlohmann::ordered_json;

const char* tool_version() noexcept { return FPP_VERSION; }

namespace {

std::vector<std::string> coordinate_header(const GroupSpec& g, const std::string& prefix = "") {
  std::vector<std::string> h;
  if (g.kind() == GroupKind::Heisenberg) {
    for (const char* c : {"u", "v", "w"}) h.push_back(prefix + c);
  } else if (g.kind() == GroupKind::IntegerLattice) {
    for (int i = 1; i <= g.parameter(); ++i) h.push_back(prefix + "x" + std::to_string(i));
  } else {
    h.push_back(prefix + "element");
  }
  return h;
}

void add_coordinates(CsvTable::Row& row, const GroupSpec& g, const Element& e) {
  if (g.kind() == GroupKind::Heisenberg || g.kind() == GroupKind::IntegerLattice) {
    for (auto c : e.code()) row.add(static_cast<std::int64_t>(c));
  } else {
    row.add(format_element(g, e));
  }
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Ensemble make_ensemble(const ExperimentConfig& c) {
  return Ensemble(*c.group, *c.distribution, c.seed, c.workers, c.limits);
}

WeightAssignment single_environment(const ExperimentConfig& c) {
  return WeightAssignment(*c.group, *c.distribution, c.seed);
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

std::string fmt(const GroupSpec& g, const Element& e) { return format_element(g, e); }

// a * d <= t <= b * d, with slack for the rounding of summed weights.
bool within_sandwich(const DistributionSpec& d, double t, double word, double slack = 0.0) {
  const double tol = 1e-9 * std::max(1.0, std::fabs(t)) + slack;
  if (t < d.support_min() * word - tol) return false;
  if (d.bounded() && t > d.support_max() * word + tol) return false;
  return true;
}

ExperimentResult run_ball(const ExperimentConfig& c) {
  const GroupSpec& g = *c.group;
  const WeightAssignment omega = single_environment(c);
  const Element origin = c.has("origin") ? c.element("origin") : g.identity();
  ExperimentResult r;
  CsvTable t(concat(coordinate_header(g), {"word_distance", "time"}));
  std::vector<Element> members;
  std::vector<std::int64_t> words;
  std::vector<double> times;
  if (c.has("radius")) {
    const WordBall ball = word_ball(g, origin, static_cast<int>(c.integer("radius")));
    members = ball.members;
    words.assign(ball.distances.begin(), ball.distances.end());
    times = passage_times_from(omega, origin, members, c.limits);
    r.summary["radius"] = c.integer("radius");
  } else {
    const double horizon = c.real("horizon");
    const FppBall ball = fpp_ball(omega, origin, horizon, c.limits);
    members = ball.members;
    times = ball.times;
    const double a = omega.min_weight();
    if (a > 0.0) {
      const WordBall cover = word_ball(g, origin, static_cast<int>(std::ceil(horizon / a - 1e-12)));
      for (const auto& m : members) words.push_back(cover.distance_of(m));
    } else {
      for (const auto& m : members) words.push_back(word_distance(g, origin, m));
    }
    r.summary["horizon"] = horizon;
  }
  bool sandwich = true;
  double max_time = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto& row = t.row();
    add_coordinates(row, g, members[i]);
    row.add(words[i]).add(times[i]);
    sandwich = sandwich && within_sandwich(*c.distribution, times[i], static_cast<double>(words[i]));
    max_time = std::max(max_time, times[i]);
  }
  r.summary["origin"] = fmt(g, origin);
  r.summary["count"] = members.size();
  r.summary["max_time"] = max_time;
  r.tables.push_back({"", std::move(t)});
  r.assertions.push_back({"sandwich a*d_S <= time <= b*d_S", sandwich, ""});
  return r;
}

ExperimentResult run_distance(const ExperimentConfig& c) {
  const GroupSpec& g = *c.group;
  const WeightAssignment omega = single_environment(c);
  const Element x = c.element("x");
  const Element y = c.element("y");
  const PassageTimeResult res = passage_time(omega, x, y, c.limits);
  const std::int64_t d = word_distance(g, x, y);
  ExperimentResult r;
  CsvTable t(concat(concat({"step"}, coordinate_header(g)), {"time"}));
  double cumulative = 0.0;
  for (std::size_t i = 0; i < res.path.size(); ++i) {
    if (i > 0) cumulative += omega.edge_weight(res.path[i - 1], res.path[i]);
    auto& row = t.row();
    row.add(static_cast<std::int64_t>(i));
    add_coordinates(row, g, res.path[i]);
    row.add(cumulative);
  }
  r.summary["x"] = fmt(g, x);
  r.summary["y"] = fmt(g, y);
  r.summary["time"] = res.time;
  r.summary["word_distance"] = d;
  r.summary["path_length"] = res.path.empty() ? 0 : res.path.size() - 1;
  r.summary["settled"] = res.settled_count;
  r.tables.push_back({"", std::move(t)});
  const double rel = std::fabs(cumulative - res.time) / std::max(1.0, res.time);
  r.assertions.push_back({"path weight equals time", rel <= 1e-12, format_real(rel)});
  r.assertions.push_back({"sandwich a*d_S <= time <= b*d_S",
                          within_sandwich(*c.distribution, res.time, static_cast<double>(d)), ""});
  return r;
}

ExperimentResult run_mean(const ExperimentConfig& c) {
  const GroupSpec& g = *c.group;
  const Ensemble ens = make_ensemble(c);
  const MeanDistanceEstimate est =
      estimate_mean_distance(ens, c.element("x"), c.element("y"), static_cast<std::size_t>(c.integer("replicas")));
  ExperimentResult r;
  CsvTable t({"x", "y", "word_distance", "replicas", "mean", "std_error", "ci_lo", "ci_hi"});
  t.row()
      .add(fmt(g, est.x))
      .add(fmt(g, est.y))
      .add(est.word_distance)
      .add(static_cast<std::uint64_t>(est.replicas))
      .add(est.mean)
      .add(est.std_error)
      .add(est.mean - 1.96 * est.std_error)
      .add(est.mean + 1.96 * est.std_error);
  r.summary["mean"] = est.mean;
  r.summary["std_error"] = est.std_error;
  r.summary["word_distance"] = est.word_distance;
  r.tables.push_back({"", std::move(t)});
  const double d = static_cast<double>(est.word_distance);
  r.assertions.push_back({"sandwich a*d_S <= mean <= b*d_S within 3 std errors",
                          within_sandwich(*c.distribution, est.mean, d, 3.0 * est.std_error), ""});
  return r;
}

ExperimentResult run_tail(const ExperimentConfig& c) {
  const Ensemble ens = make_ensemble(c);
  std::vector<double> grid;
  if (c.has("u_grid")) {
    grid = c.reals("u_grid");
  } else {
    const double step = c.real("u_step");
    const double max = c.real("u_max");
    for (std::int64_t k = 0; static_cast<double>(k) * step <= max + 1e-12; ++k) grid.push_back(static_cast<double>(k) * step);
  }
  const ConcentrationFit fit = concentration_tail(ens, c.element("x"), c.element("y"),
                                                  static_cast<std::size_t>(c.integer("replicas")), grid);
  ExperimentResult r;
  CsvTable t({"u", "u2_over_d", "tail", "in_fit"});
  const double d = static_cast<double>(fit.estimate.word_distance);
  for (std::size_t k = 0; k < fit.u_grid.size(); ++k) {
    t.row().add(fit.u_grid[k]).add(fit.u_grid[k] * fit.u_grid[k] / d).add(fit.tail[k]).add(static_cast<bool>(fit.in_fit[k]));
  }
  r.summary["mean"] = fit.estimate.mean;
  r.summary["std_error"] = fit.estimate.std_error;
  r.summary["word_distance"] = fit.estimate.word_distance;
  r.summary["slope"] = fit.fit.slope;
  r.summary["intercept"] = fit.fit.intercept;
  r.summary["fit_points"] = fit.fit.points;
  r.tables.push_back({"", std::move(t)});
  r.assertions.push_back({"fitted slope < 0", fit.fit.slope < 0.0, format_real(fit.fit.slope)});
  return r;
}

ExperimentResult run_variance_scan(const ExperimentConfig& c) {
  const Ensemble ens = make_ensemble(c);
  const VarianceScan scan =
      variance_scan(ens, c.element("direction"), c.integers("n_grid"), static_cast<std::size_t>(c.integer("replicas")));
  ExperimentResult r;
  CsvTable t({"n", "word_distance", "mean", "variance", "variance_ci_lo", "variance_ci_hi", "var_log_over_n",
              "var_log_over_n_ci_lo", "var_log_over_n_ci_hi", "var_over_n", "var_over_n_ci_lo", "var_over_n_ci_hi"});
  for (const auto& p : scan.points) {
    t.row()
        .add(p.n)
        .add(p.word_distance)
        .add(p.mean)
        .add(p.variance)
        .add(p.variance_ci.lo)
        .add(p.variance_ci.hi)
        .add(p.normalized_log)
        .add(p.normalized_log_ci.lo)
        .add(p.normalized_log_ci.hi)
        .add(p.normalized_linear)
        .add(p.normalized_linear_ci.lo)
        .add(p.normalized_linear_ci.hi);
  }
  r.summary["direction"] = fmt(*c.group, scan.direction);
  r.summary["replicas"] = scan.replicas;
  if (scan.points.size() >= 2 && scan.points.front().n > 0) {
    const RatioEstimate ratio =
        variance_ratio(scan, 0, scan.points.size() - 1, ens.stream_seed(kBootstrapStream, 1000));
    r.summary["normalized_ratio_last_over_first"] = ratio.ratio;
    r.summary["normalized_ratio_ci"] = interval_json(ratio.ci);
    r.assertions.push_back({"var(1+log n)/n grows by at most 25% (bootstrap CI)", ratio.ci.lo <= 1.25,
                            format_real(ratio.ratio)});
  }
  r.tables.push_back({"", std::move(t)});
  return r;
}

ExperimentResult run_fluctuation_scan(const ExperimentConfig& c) {
  const Ensemble ens = make_ensemble(c);
  std::vector<int> grid;
  for (auto v : c.integers("r_grid")) grid.push_back(static_cast<int>(v));
  const FluctuationScan scan = fluctuation_scan(ens, grid, static_cast<std::size_t>(c.integer("pairs")),
                                                static_cast<std::size_t>(c.integer("replicas")));
  ExperimentResult r;
  CsvTable t({"r", "pairs", "sup", "normalizer", "normalized", "normalized_ci_lo", "normalized_ci_hi", "max_std_error"});
  for (const auto& row : scan.rows) {
    double se = 0.0;
    for (double s : row.std_error) se = std::max(se, s);
    t.row()
        .add(row.r)
        .add(static_cast<std::uint64_t>(row.pairs.size()))
        .add(row.sup)
        .add(row.normalizer)
        .add(row.normalized)
        .add(row.normalized_ci.lo)
        .add(row.normalized_ci.hi)
        .add(se);
  }
  if (scan.rows.size() >= 2) {
    const RatioEstimate ratio =
        fluctuation_ratio(scan, 0, scan.rows.size() - 1, ens.stream_seed(kBootstrapStream, 1000));
    r.summary["normalized_ratio_last_over_first"] = ratio.ratio;
    r.summary["normalized_ratio_ci"] = interval_json(ratio.ci);
    r.assertions.push_back({"normalized sup grows by at most 20% (bootstrap CI)", ratio.ci.lo <= 1.2,
                            format_real(ratio.ratio)});
  }
  r.tables.push_back({"", std::move(t)});
  return r;
}

ExperimentResult run_midpoint(const ExperimentConfig& c) {
  const GroupSpec& g = *c.group;
  const Ensemble ens = make_ensemble(c);
  const MidpointResult m = midpoint_search(ens, c.element("x"), c.element("y"), c.real("lambda"),
                                           static_cast<std::size_t>(c.integer("replicas")));
  ExperimentResult r;
  CsvTable t({"x", "y", "lambda", "z", "z_index", "path_length", "word_distance", "dbar_xy", "se_xy", "dbar_xz",
              "se_xz", "dbar_zy", "se_zy", "deviation", "normalized_deviation"});
  t.row()
      .add(fmt(g, m.x))
      .add(fmt(g, m.y))
      .add(m.lambda)
      .add(fmt(g, m.z))
      .add(static_cast<std::uint64_t>(m.z_index))
      .add(static_cast<std::uint64_t>(m.geodesic.empty() ? 0 : m.geodesic.size() - 1))
      .add(m.word_distance)
      .add(m.dbar_xy)
      .add(m.se_xy)
      .add(m.dbar_xz)
      .add(m.se_xz)
      .add(m.dbar_zy)
      .add(m.se_zy)
      .add(m.deviation)
      .add(m.normalized_deviation);
  r.summary["z"] = fmt(g, m.z);
  r.summary["deviation"] = m.deviation;
  r.summary["normalized_deviation"] = m.normalized_deviation;
  r.tables.push_back({"", std::move(t)});
  const double rr = static_cast<double>(m.word_distance);
  const double bound = rr > 1.0 ? 3.0 * std::sqrt(rr * std::log(rr)) : 2.0 * std::max(m.se_xz, m.se_zy);
  r.assertions.push_back({"deviation <= 3 (r log r)^(1/2)", m.deviation <= bound + 1e-12, format_real(m.deviation)});
  return r;
}

ExperimentResult run_subdivision(const ExperimentConfig& c) {
  const GroupSpec& g = *c.group;
  const Ensemble ens = make_ensemble(c);
  const SubdivisionReport s =
      dyadic_subdivision(ens, c.element("x"), c.element("y"), static_cast<int>(c.integer("k")),
                         static_cast<std::size_t>(c.integer("replicas")), c.real("alpha0", kDefaultAlpha0));
  ExperimentResult r;
  CsvTable t({"index", "from", "to", "word_distance", "gap_mean", "gap_std_error"});
  for (std::size_t i = 0; i < s.gap_mean.size(); ++i) {
    t.row()
        .add(static_cast<std::uint64_t>(i))
        .add(fmt(g, s.chain[i]))
        .add(fmt(g, s.chain[i + 1]))
        .add(word_distance(g, s.chain[i], s.chain[i + 1]))
        .add(s.gap_mean[i])
        .add(s.gap_std_error[i]);
  }
  r.summary["dbar_xy"] = s.dbar_xy;
  r.summary["se_xy"] = s.se_xy;
  r.summary["inflation"] = s.inflation;
  r.summary["max_gap"] = s.max_gap;
  r.summary["min_gap"] = s.min_gap;
  r.tables.push_back({"", std::move(t)});
  r.assertions.push_back({"inflation <= 1.15", s.inflation <= 1.15, format_real(s.inflation)});
  r.assertions.push_back({"max gap <= 2 min gap", s.max_gap <= 2.0 * s.min_gap, format_real(s.max_gap / s.min_gap)});
  return r;
}

ExperimentResult run_tree_search(const ExperimentConfig& c) {
  const GroupSpec& g = *c.group;
  const Ensemble ens = make_ensemble(c);
  const TreeSearchReport rep =
      tree_fluctuation_search(ens, static_cast<int>(c.integer("r")), static_cast<int>(c.integer("K")), c.real("eps"),
                              static_cast<std::uint64_t>(c.integer("max_scan", static_cast<std::int64_t>(kDefaultTreeScanCap))));
  ExperimentResult r;
  CsvTable t({"found", "x", "y", "d_omega", "d_word", "scanned", "center_count", "separation", "segment_length",
              "sphere_depth", "per_segment_probability", "success_probability"});
  t.row()
      .add(rep.found)
      .add(rep.found ? fmt(g, rep.x) : std::string())
      .add(rep.found ? fmt(g, rep.y) : std::string())
      .add(rep.d_omega)
      .add(rep.d_word)
      .add(rep.scanned)
      .add(rep.center_count)
      .add(rep.separation)
      .add(rep.segment_length)
      .add(rep.sphere_depth)
      .add(rep.per_segment_probability)
      .add(rep.success_probability);
  r.summary["found"] = rep.found;
  r.summary["scanned"] = rep.scanned;
  r.summary["success_probability"] = rep.success_probability;
  r.tables.push_back({"", std::move(t)});
  r.assertions.push_back({"pair found", rep.found, std::to_string(rep.scanned) + " scanned"});
  if (rep.found) {
    const double direct = passage_time(ens.held_out(0), rep.x, rep.y, ens.limits).time;
    r.assertions.push_back({"d_omega equals the path sum", direct == rep.d_omega, format_real(direct)});
  }
  return r;
}

ExperimentResult run_shape_scan(const ExperimentConfig& c) {
  const GroupSpec& g = *c.group;
  std::vector<int> grid;
  for (auto v : c.integers("n_grid")) grid.push_back(static_cast<int>(v));
  const auto repeat = static_cast<std::uint64_t>(c.integer("repeat", 1));
  const bool emit = c.boolean("emit_clouds", true);
  ExperimentResult r;
  CsvTable t({"seed", "n", "n_next", "size", "size_next", "hausdorff", "gauge"});
  bool monotone = true;
  json per_seed = json::array();
  for (std::uint64_t s = 0; s < repeat; ++s) {
    const std::uint64_t seed = c.seed + s;
    const ShapeCauchyScan scan = shape_cauchy_scan(g, *c.distribution, seed, c.real("r"), grid, c.workers, c.limits);
    json distances = json::array();
    for (std::size_t i = 0; i < scan.rows.size(); ++i) {
      const CauchyRow& row = scan.rows[i];
      t.row()
          .add(seed)
          .add(row.n)
          .add(row.n_next)
          .add(static_cast<std::uint64_t>(row.size))
          .add(static_cast<std::uint64_t>(row.size_next))
          .add(row.distance)
          .add(gauge_name(scan.clouds.front().gauge));
      distances.push_back(row.distance);
      if (i > 0 && row.distance > 1.1 * scan.rows[i - 1].distance) monotone = false;
    }
    per_seed.push_back(distances);
    if (emit) {
      for (const PointCloud& cloud : scan.clouds) {
        std::vector<std::string> header;
        if (cloud.gauge == Gauge::Heisenberg) {
          header = {"u", "v", "w"};
        } else {
          for (int i = 1; i <= cloud.dimension; ++i) header.push_back("x" + std::to_string(i));
        }
        header.push_back("time");
        CsvTable ct(header);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
          auto& row = ct.row();
          for (double x : cloud.point(i)) row.add(x);
          row.add(cloud.values[i]);
        }
        r.tables.push_back({".cloud-s" + std::to_string(seed) + "-n" + std::to_string(cloud.provenance.n), std::move(ct)});
      }
    }
  }
  r.summary["gauge"] = g.kind() == GroupKind::Heisenberg ? "HeisenbergGauge N(p^-1 q), N = max(|u|+|v|, sqrt|w|)" : "L1";
  r.summary["distances"] = per_seed;
  r.tables.insert(r.tables.begin(), {"", std::move(t)});
  r.assertions.push_back({"consecutive distances non-increasing within 10% slack", monotone, ""});
  return r;
}

ExperimentResult run_l1_compare(const ExperimentConfig& c) {
  const L1Comparison cmp = l1_ball_compare(c.group->parameter(), c.distribution->support_min(),
                                           static_cast<int>(c.integer("n")), c.workers);
  ExperimentResult r;
  CsvTable t({"d", "weight", "n", "hausdorff", "bound", "farthest_l1", "cloud_size", "sample_size"});
  t.row()
      .add(cmp.dimension)
      .add(cmp.weight)
      .add(cmp.n)
      .add(cmp.distance)
      .add(cmp.bound)
      .add(cmp.farthest)
      .add(static_cast<std::uint64_t>(cmp.cloud_size))
      .add(static_cast<std::uint64_t>(cmp.sample_size));
  r.summary["hausdorff"] = cmp.distance;
  r.summary["bound"] = cmp.bound;
  r.tables.push_back({"", std::move(t)});
  r.assertions.push_back({"hausdorff <= d/(c n)", cmp.distance <= cmp.bound, format_real(cmp.distance)});
  return r;
}

ExperimentResult run_gh_check(const ExperimentConfig& c) {
  const GroupSpec& g = *c.group;
  const Ensemble ens = make_ensemble(c);
  const GhCheck gh = gh_approximation_check(ens, static_cast<int>(c.integer("n")), c.real("eps"),
                                            static_cast<std::size_t>(c.integer("pairs")),
                                            static_cast<std::size_t>(c.integer("replicas")));
  ExperimentResult r;
  CsvTable t({"x", "y", "word_distance", "held_out", "mean", "std_error", "margin", "violation"});
  for (std::size_t i = 0; i < gh.pairs.size(); ++i) {
    t.row()
        .add(fmt(g, gh.pairs[i].x))
        .add(fmt(g, gh.pairs[i].y))
        .add(gh.pairs[i].word_distance)
        .add(gh.held_out[i])
        .add(gh.mean[i])
        .add(gh.std_error[i])
        .add(gh.margin[i])
        .add(gh.margin[i] > 0.0);
  }
  r.summary["pass"] = gh.pass;
  r.summary["failures"] = gh.failures;
  r.summary["failure_rate"] = gh.failure_rate;
  r.summary["worst_margin"] = gh.worst_margin;
  if (!gh.pairs.empty()) {
    r.summary["worst_pair"] = json::array({fmt(g, gh.pairs[gh.worst].x), fmt(g, gh.pairs[gh.worst].y)});
  }
  r.tables.push_back({"", std::move(t)});
  r.assertions.push_back({"all pairs within eps n + 3 std_error", gh.pass, format_real(gh.worst_margin)});
  return r;
}

ExperimentResult run_direction(const ExperimentConfig& c) {
  const Ensemble ens = make_ensemble(c);
  const DirectionalNormEstimate est = directional_norm(ens, c.element("direction"), c.integers("n_grid"),
                                                       static_cast<std::size_t>(c.integer("replicas")));
  ExperimentResult r;
  CsvTable t({"n", "word_distance", "mean_time", "time_std_error", "norm", "norm_std_error"});
  bool sandwich = true;
  for (std::size_t i = 0; i < est.n_grid.size(); ++i) {
    t.row()
        .add(est.n_grid[i])
        .add(est.word_distance[i])
        .add(est.mean_time[i])
        .add(est.time_std_error[i])
        .add(est.series[i])
        .add(est.std_error[i]);
    sandwich = sandwich && within_sandwich(*c.distribution, est.mean_time[i], static_cast<double>(est.word_distance[i]),
                                           3.0 * est.time_std_error[i]);
  }
  r.summary["direction"] = fmt(*c.group, est.direction);
  r.summary["trailing_mean"] = est.trailing_mean;
  r.summary["trailing_spread"] = est.trailing_spread;
  r.tables.push_back({"", std::move(t)});
  r.assertions.push_back({"series within the sandwich bounds (3 std errors)", sandwich, ""});
  return r;
}

ExperimentResult run_mean_ratio(const ExperimentConfig& c) {
  const GroupSpec& g = *c.group;
  const Ensemble ens = make_ensemble(c);
  const MeanRatioReport rep =
      mean_ratio_bound(ens, static_cast<std::size_t>(c.integer("pairs")), static_cast<int>(c.integer("radius", 8)));
  ExperimentResult r;
  CsvTable t({"x", "y", "word_distance", "dbar"});
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    t.row().add(fmt(g, rep.pairs[i].x)).add(fmt(g, rep.pairs[i].y)).add(rep.pairs[i].word_distance).add(rep.dbar[i]);
  }
  r.summary["ratio"] = rep.ratio;
  r.summary["a"] = rep.a;
  r.summary["atom_at_a"] = rep.atom_at_a;
  r.summary["inverse_degree"] = rep.inverse_degree;
  r.tables.push_back({"", std::move(t)});
  r.assertions.push_back({"dbar/d_S exceeds a", rep.exceeds_a, format_real(rep.ratio)});
  return r;
}

const std::map<std::string, std::function<ExperimentResult(const ExperimentConfig&)>>& dispatch() {
  static const std::map<std::string, std::function<ExperimentResult(const ExperimentConfig&)>> table = {
      {"ball", run_ball},
      {"distance", run_distance},
      {"mean", run_mean},
      {"tail", run_tail},
      {"variance-scan", run_variance_scan},
      {"fluctuation-scan", run_fluctuation_scan},
      {"midpoint", run_midpoint},
      {"subdivision", run_subdivision},
      {"tree-search", run_tree_search},
      {"shape-scan", run_shape_scan},
      {"l1-compare", run_l1_compare},
      {"gh-check", run_gh_check},
      {"direction", run_direction},
      {"mean-ratio", run_mean_ratio},
  };
  return table;
}

json value_json(const Value& v) {
  switch (v.type) {
    case Value::Type::Integer:
      if (!v.text.empty() && v.text[0] != '-') return json(std::stoull(v.text));
      return json(std::stoll(v.text));
    case Value::Type::Real:
      return json(std::strtod(v.text.c_str(), nullptr));
    case Value::Type::Boolean:
      return json(v.boolean);
    case Value::Type::String:
      return json(v.text);
    case Value::Type::List: {
      json arr = json::array();
      for (const auto& item : v.items) arr.push_back(value_json(item));
      return arr;
    }
  }
  return json();
}

// Output ordering and lines only depend on the canonical text.
std::string canonical_inputs(const ExperimentConfig& c) {
  std::string s = "tool=fpp\nversion=" + std::string(tool_version()) + "\nexperiment=" + c.experiment +
                  "\nseed=" + std::to_string(c.seed) + "\n";
  for (const auto& [key, entry] : c.raw.entries()) {
    if (key == "workers" || key == "out" || key == "assert" || key == "experiment" || key == "seed") continue;
    s += key + "=" + entry.value.canonical() + "\n";
  }
  return s;
}

}  // namespace

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = mix64(0x243F6A8885A308D3ULL ^ bytes.size());
  std::uint64_t word = 0;
  int fill = 0;
  for (unsigned char ch : bytes) {
    word |= static_cast<std::uint64_t>(ch) << (8 * fill);
    if (++fill == 8) {
      h = mix64(h ^ word);
      word = 0;
      fill = 0;
    }
  }
  h = mix64(h ^ word ^ (static_cast<std::uint64_t>(fill) << 60));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string inputs_hash(const ExperimentConfig& c) { return content_hash(canonical_inputs(c)); }

ExperimentResult execute(const ExperimentConfig& config) {
  auto it = dispatch().find(config.experiment);
  if (it == dispatch().end()) throw InvalidArgument("unknown experiment '" + config.experiment + "'");
  return it->second(config);
}

RunOutcome run(const ExperimentConfig& config, bool assert_mode) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result = execute(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunOutcome out;
  const std::filesystem::path prefix(config.out);
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());

  json outputs = json::array();
  for (const auto& table : result.tables) {
    const std::string path = config.out + table.suffix + ".csv";
    const std::string body = table.table.str();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write output file '" + path + "'");
    f << body;
    f.close();
    out.written.push_back(path);
    outputs.push_back({{"file", path}, {"rows", table.table.rows()}, {"content_hash", content_hash(body)}});
  }

  bool all_pass = true;
  json assertions = json::array();
  for (const auto& a : result.assertions) {
    all_pass = all_pass && a.pass;
    assertions.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  }

  json cfg = json::object();
  for (const auto& [key, entry] : config.raw.entries()) cfg[key] = value_json(entry.value);

  json& m = out.manifest;
  m["tool"] = "fpp";
  m["version"] = tool_version();
  m["experiment"] = config.experiment;
  m["config"] = cfg;
  m["seed"] = config.seed;
  m["workers"] = config.workers;
  m["seed_rule"] = seed_rule_description();
  m["inputs_hash"] = inputs_hash(config);
  m["wall_time_seconds"] = wall;
  m["summary"] = result.summary;
  m["outputs"] = outputs;
  m["assert_mode"] = assert_mode;
  m["assertions"] = assertions;
  m["status"] = assert_mode && !all_pass ? "assertion-failed" : "ok";

  const std::string manifest_path = config.out + ".manifest.json";
  std::ofstream f(manifest_path, std::ios::binary);
  if (!f) throw Error("cannot write manifest '" + manifest_path + "'");
  f << m.dump(2) << "\n";
  out.written.push_back(manifest_path);
  out.exit_code = assert_mode && !all_pass ? kExitAssertion : kExitOk;
  return out;
}

}  // namespace fpp::cli
