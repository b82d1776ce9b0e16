#include "swarmkit/validation.h"

#include <gtest/gtest.h>

#include <algorithm>

namespace swarmkit {
namespace {

TEST(Validation, FixedArrivalsLabelEveryArrival) {
  const auto rep = run_validation({});
  ASSERT_FALSE(rep.points.empty());
  std::vector<double> arrivals;
  int last_label = 0;
  for (const auto& p : rep.points) {
    if (p.kind == LabelKind::Arrival && p.label != last_label) arrivals.push_back(p.start);
    last_label = p.label;
    EXPECT_LT(p.start, p.end);
    EXPECT_GE(p.relative_error, 0.0);
  }
  EXPECT_EQ(arrivals, (std::vector<double>{0, 30, 40, 50, 60}));
  EXPECT_TRUE(std::any_of(rep.points.begin(), rep.points.end(),
                          [](const auto& p) { return p.kind == LabelKind::Sync; }));
}

TEST(Validation, SynchronizedTailMatchesModel) {
  const auto rep = run_validation({});
  const int last = rep.points.back().label;
  for (const auto& p : rep.points) {
    if (p.label != last) continue;
    EXPECT_DOUBLE_EQ(p.model_rate, 64.0);
    EXPECT_LT(p.relative_error, 0.01);
  }
}

TEST(Validation, MaxErrorIsTheLargestPoint) {
  const auto rep = run_validation({});
  double m = 0.0;
  for (const auto& p : rep.points) m = std::max(m, p.relative_error);
  EXPECT_EQ(rep.max_relative_error, m);
}

TEST(Validation, ZeroToleranceFails) {
  ValidationOptions o;
  o.tolerance = 0.0;
  EXPECT_FALSE(run_validation(o).passed());
  o.tolerance = 10.0;
  EXPECT_TRUE(run_validation(o).passed());
}

TEST(Validation, RandomProtocolIsSeeded) {
  ValidationOptions o;
  o.protocol = ValidationProtocol::Random;
  o.random_runs = 4;
  const auto a = run_validation(o);
  const auto b = run_validation(o);
  ASSERT_EQ(a.points.size(), b.points.size());
  EXPECT_EQ(a.max_relative_error, b.max_relative_error);
  int runs = 0;
  for (const auto& p : a.points) runs = std::max(runs, p.run);
  EXPECT_EQ(runs, 4);
}

TEST(Validation, RejectsBadOptions) {
  ValidationOptions o;
  o.tolerance = -1.0;
  EXPECT_THROW(run_validation(o), std::invalid_argument);
  o = {};
  o.sync_gap = 0;
  EXPECT_THROW(run_validation(o), std::invalid_argument);
}

}  // namespace
}  // namespace swarmkit
