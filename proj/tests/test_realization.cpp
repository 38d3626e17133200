#include <gtest/gtest.h>

#include "support.hpp"

using namespace cactus;
using namespace testing_support;

namespace {

FiniteMetric<R> square() {
  return metric({{0, 1, 3, 2}, {1, 0, 2, 3}, {3, 2, 0, 1}, {2, 3, 1, 0}}, {"a", "b", "c", "d"});
}

FiniteMetric<R> star4() {
  return metric({{0, 2, 2, 2}, {2, 0, 2, 2}, {2, 2, 0, 2}, {2, 2, 2, 0}}, {"a", "b", "c", "d"});
}

FiniteMetric<R> k23() {
  auto g = build({{"a1", "b1", 1}, {"a1", "b2", 1}, {"a1", "b3", 1}, {"a2", "b1", 1}, {"a2", "b2", 1}, {"a2", "b3", 1}});
  return floyd_metric(g, {"a1", "a2", "b1", "b2", "b3"});
}

GraphError::Kind graph_error_of(const WeightedGraph<R>& g, const std::vector<std::string>& x) {
  try {
    compactify(g, x);
  } catch (const GraphError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return GraphError::Kind::Disconnected;
}

// Half the shortest closed tour through all points: no connected realization
// can weigh less, since doubling a spanning tree gives such a tour.
R tour_lower_bound(const FiniteMetric<R>& m) {
  std::vector<std::size_t> p(m.size());
  std::iota(p.begin(), p.end(), 0);
  std::optional<R> best;
  do {
    R len{};
    for (std::size_t i = 0; i < p.size(); ++i) len = len + m(p[i], p[(i + 1) % p.size()]);
    if (!best || len < *best) best = len;
  } while (std::next_permutation(p.begin() + 1, p.end()));
  return best->half();
}

}  // namespace

TEST(Realize, Square) {
  auto r = realize_cactus(square());
  ASSERT_TRUE(r.realized());
  EXPECT_TRUE(r.certificate.passed());
  EXPECT_EQ(r.graph->total_weight(), R(6));
  EXPECT_EQ(r.graph->vertex_count(), 4u);
  EXPECT_EQ(cycle_count(*r.graph), 1u);
  EXPECT_EQ(classify_realization(r, 4), MetricClass::Cyclelike);
}

TEST(Realize, Star) {
  auto r = realize_cactus(star4());
  ASSERT_TRUE(r.realized());
  EXPECT_EQ(r.graph->total_weight(), R(4));
  EXPECT_EQ(r.graph->vertex_count(), 5u);
  EXPECT_EQ(r.virtual_points, 1u);
  EXPECT_EQ(r.leaf_count, 4u);
  EXPECT_EQ(classify_metric(star4()), MetricClass::TreeMetric);
}

TEST(Realize, Path) {
  auto m = metric({{0, 3, 1}, {3, 0, 2}, {1, 2, 0}}, {"x", "y", "z"});
  auto r = realize_cactus(m);
  ASSERT_TRUE(r.realized());
  EXPECT_EQ(r.graph->total_weight(), R(3));
  EXPECT_EQ(r.graph->vertex_count(), 3u);
  EXPECT_EQ(optimal_weight(m), R(3));
}

TEST(Realize, CompleteBipartiteIsNotCactus) {
  auto r = realize_cactus(k23());
  EXPECT_FALSE(r.realized());
  ASSERT_TRUE(r.rejection.has_value());
  EXPECT_FALSE(r.rejection->reason.empty());
  EXPECT_EQ(classify_realization(r, 5), MetricClass::NotCactus);
  EXPECT_THROW(optimal_weight(k23()), NotCactusMetric);
}

TEST(Realize, SlackCycleCompactifies) {
  auto g = cycle_graph(names("v", 5), {1, 2, 2, 1, 1});
  auto m = floyd_metric(g, names("v", 5));
  auto r = realize_cactus(m);
  ASSERT_TRUE(r.realized());
  EXPECT_EQ(r.graph->total_weight(), R(13, 2));
  EXPECT_EQ(classify_realization(r, 5), MetricClass::CactusGeneral);
  EXPECT_TRUE(labeled_isomorphic(*r.graph, compactify(g, names("v", 5)).graph));
}

TEST(Realize, FloatSquare) {
  std::vector<std::vector<double>> rows{{0, 1, 3, 2}, {1, 0, 2, 3}, {3, 2, 0, 1}, {2, 3, 1, 0}};
  auto r = realize_cactus(validate_metric(rows, {"a", "b", "c", "d"}));
  ASSERT_TRUE(r.realized());
  EXPECT_NEAR(r.graph->total_weight(), 6.0, 1e-12);
}

TEST(Certify, ReportsMismatch) {
  auto wrong = cycle_graph({"a", "b", "c", "d"}, {1, 2, 1, 3});
  Rejection why;
  auto c = certify(wrong, square(), &why);
  EXPECT_FALSE(c.verified_metric_equality);
  EXPECT_FALSE(c.passed());
  EXPECT_EQ(why.reason, "RealizationMismatch");
  EXPECT_EQ(why.witness.size(), 2u);
}

TEST(Certify, ReportsSlack) {
  auto g = cycle_graph(names("v", 5), {1, 2, 2, 1, 1});
  Rejection why;
  auto c = certify(g, floyd_metric(g, names("v", 5)), &why);
  EXPECT_TRUE(c.verified_metric_equality);
  EXPECT_FALSE(c.per_cycle_no_slack);
  EXPECT_EQ(why.reason, "SlackVertex");
  EXPECT_EQ(why.witness, (std::vector<std::string>{"v3"}));
}

TEST(Compactify, OneSlackVertex) {
  auto g = cycle_graph(names("v", 5), {1, 2, 2, 1, 1});
  auto c = compactify(g, names("v", 5));
  ASSERT_EQ(c.steps.size(), 1u);
  const auto& s = c.steps[0];
  EXPECT_EQ(s.pivot_label, std::optional<std::string>("v3"));
  EXPECT_EQ(s.deltas, (std::array<R, 3>{R(3, 2), R(1, 2), R(3, 2)}));
  EXPECT_EQ(s.weight_before, R(7));
  EXPECT_EQ(s.weight_after, R(13, 2));
  EXPECT_EQ(s.slack_before, 1u);
  EXPECT_EQ(s.slack_after, 0u);
  EXPECT_EQ(c.graph.vertex_count(), 6u);
  EXPECT_TRUE(verify_realization(c.graph, floyd_metric(g, names("v", 5))));
}

TEST(Compactify, TwoAdjacentSlackVertices) {
  auto g = cycle_graph(names("v", 5), {1, 1, 3, 1, 1});
  auto m = floyd_metric(g, names("v", 5));
  auto c = compactify(g, names("v", 5));
  ASSERT_EQ(c.steps.size(), 2u);
  EXPECT_EQ(c.steps[0].slack_before, 2u);
  EXPECT_LT(c.steps[0].weight_after, c.steps[0].weight_before);
  EXPECT_LT(c.steps[1].weight_after, c.steps[1].weight_before);
  EXPECT_EQ(c.steps[1].weight_after, R(6));
  EXPECT_TRUE(graph_slack_vertices(c.graph).empty());
  EXPECT_TRUE(verify_realization(c.graph, m));
  EXPECT_TRUE(labeled_isomorphic(c.graph, *realize_cactus(m).graph));
}

TEST(Compactify, NoSlackMeansNoSteps) {
  auto g = cycle_graph({"a", "b", "c", "d"}, {1, 2, 1, 2});
  auto c = compactify(g, {"a", "b", "c", "d"});
  EXPECT_TRUE(c.steps.empty());
  EXPECT_TRUE(labeled_isomorphic(c.graph, g));
}

TEST(Compactify, Preconditions) {
  auto tri = build({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}, {"c", "d", 1}});
  EXPECT_EQ(graph_error_of(tri, {"a", "b", "c", "d"}), GraphError::Kind::PreconditionViolation);
  auto heavy = cycle_graph(names("v", 4), {1, 1, 1, 5});
  EXPECT_EQ(graph_error_of(heavy, names("v", 4)), GraphError::Kind::PreconditionViolation);
  auto missing = cycle_graph(names("v", 4), {1, 1, 1, 1});
  EXPECT_EQ(graph_error_of(missing, {"v1", "v2", "v3", "v4", "v5"}), GraphError::Kind::PreconditionViolation);
}

TEST(GraphSlack, MatchesCycleMetricSlack) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto inst = gen_cycle(CycleSpec{seed, 4 + seed % 8, 1, 10, SlackMode::Any});
    std::vector<R> w;
    const std::size_t n = inst.labels.size();
    for (std::size_t i = 0; i < n; ++i) w.push_back(inst.graph.weight(i, (i + 1) % n));
    std::vector<std::string> expected = slack_vertices(CyclicOrder<R>{inst.labels, w}, inst.metric);
    std::vector<std::string> got;
    for (const auto& s : graph_slack_vertices(inst.graph)) got.push_back(*inst.graph.label(s.vertex));
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, expected) << "seed " << seed;
  }
}

class RealizeGenerated : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RealizeGenerated, UniqueOptimalRealization) {
  GenSpec spec;
  spec.seed = GetParam();
  spec.n_labels = 4 + GetParam() % 15;
  auto inst = gen_cactus(spec);
  auto r = realize_cactus(inst.metric);
  ASSERT_TRUE(r.realized()) << r.rejection->stage << "/" << r.rejection->reason;
  EXPECT_EQ(floyd_metric(*r.graph, inst.labels), inst.metric);
  EXPECT_TRUE(graph_slack_vertices(*r.graph).empty());

  auto expected = compactify(normalize_triangles(inst.graph), inst.labels).graph;
  EXPECT_TRUE(labeled_isomorphic(*r.graph, expected));
  EXPECT_LE(r.graph->total_weight(), inst.graph.total_weight());

  // Realizing the realized metric again gives the same graph.
  auto again = realize_cactus(induced_metric(*r.graph, inst.labels));
  ASSERT_TRUE(again.realized());
  EXPECT_TRUE(labeled_isomorphic(*again.graph, *r.graph));
  EXPECT_TRUE(compactify(*r.graph, inst.labels).steps.empty());
}

TEST_P(RealizeGenerated, ScalesLinearly) {
  GenSpec spec;
  spec.seed = GetParam();
  spec.n_labels = 6;
  auto inst = gen_cactus(spec);
  const R k(3, 2);
  std::vector<R> flat;
  for (std::size_t i = 0; i < inst.metric.size(); ++i) {
    for (std::size_t j = 0; j < inst.metric.size(); ++j) flat.push_back(inst.metric(i, j) * k);
  }
  auto scaled = FiniteMetric<R>::trusted(labels_of(inst.metric), flat);
  EXPECT_EQ(optimal_weight(scaled), optimal_weight(inst.metric) * k);
}

TEST_P(RealizeGenerated, WeightBoundsOnSmallInstances) {
  GenSpec spec;
  spec.seed = GetParam();
  spec.n_labels = 4 + GetParam() % 3;
  auto inst = gen_cactus(spec);
  R w = optimal_weight(inst.metric);
  EXPECT_GE(w, tour_lower_bound(inst.metric));
  EXPECT_LE(w, inst.graph.total_weight());
}

INSTANTIATE_TEST_SUITE_P(Seeds, RealizeGenerated, ::testing::Range<std::uint64_t>(1, 41));
