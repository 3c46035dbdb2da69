#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>
#include <variant>

#include "tune/error.hpp"
#include "tune/rng.hpp"
#include "tune/search_space.hpp"

using namespace tune;

namespace {

// Table-3-style range space shared by the sampling-based strategies.
SearchSpace range_space() {
  SearchSpace space;
  space.add("n_estimators", IntegerRange{50, 400});
  space.add("max_features", IntegerRange{4, 10});
  space.add("max_depth", IntegerRange{4, 10});
  space.add("criterion", Categorical{{"entropy", "gini"}});
  return space;
}

SearchSpace grid_space() {
  SearchSpace space;
  space.add("n_estimators", DiscreteValues{{50, 100, 150, 200, 250}});
  space.add("max_features", DiscreteValues{{1, 3, 5, 8}});
  space.add("max_depth", DiscreteValues{{1, 2, 4, 8}});
  space.add("criterion", Categorical{{"entropy", "gini"}});
  return space;
}

//! Random valid space over all four domain kinds, for property tests.
SearchSpace random_space(RandomStream& rng) {
  SearchSpace space;
  std::size_t n = 1 + rng.uniform_index(5);
  for (std::size_t i = 0; i < n; ++i) {
    std::string name = "p" + std::to_string(i);
    switch (rng.uniform_index(4)) {
      case 0: {
        std::size_t k = 1 + rng.uniform_index(5);
        std::vector<std::string> values;
        for (std::size_t j = 0; j < k; ++j) values.push_back("v" + std::to_string(j));
        space.add(name, Categorical{values});
        break;
      }
      case 1: {
        std::int64_t lo = rng.uniform_int(-20, 20);
        space.add(name, IntegerRange{lo, lo + rng.uniform_int(0, 30)});
        break;
      }
      case 2: {
        double lo = rng.uniform_real(-5.0, 5.0);
        space.add(name, ContinuousRange{lo, lo + rng.uniform_real(0.0, 10.0)});
        break;
      }
      default: {
        std::size_t k = 1 + rng.uniform_index(5);
        std::set<double> values;
        while (values.size() < k) values.insert(std::floor(rng.uniform_real(-50.0, 50.0)));
        space.add(name, DiscreteValues{{values.begin(), values.end()}});
        break;
      }
    }
  }
  return space;
}

} // namespace

TEST(Validate, DuplicateNameRejected) {
  SearchSpace space;
  space.add("max_depth", IntegerRange{1, 8});
  space.add("max_depth", IntegerRange{4, 10});
  try {
    space.validate();
    FAIL() << "expected duplicate_name";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::duplicate_name);
    EXPECT_NE(std::string(e.what()).find("max_depth"), std::string::npos);
  }
}

TEST(Validate, PaperIntegerRangeAccepted) {
  SearchSpace space;
  space.add("n_estimators", IntegerRange{50, 400});
  EXPECT_NO_THROW(space.validate());
}

TEST(Validate, DegenerateSinglePointRangeAccepted) {
  SearchSpace space;
  space.add("x", ContinuousRange{0.1, 0.1});
  EXPECT_NO_THROW(space.validate());
}

TEST(Validate, NamedErrors) {
  {
    SearchSpace s;
    s.add("c", Categorical{{}});
    EXPECT_THROW(s.validate(), Error);
  }
  {
    SearchSpace s;
    s.add("r", IntegerRange{10, 4});
    try {
      s.validate();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), errc::inverted_range);
    }
  }
  {
    SearchSpace s;
    s.add("lr", ContinuousRange{0.0, 1.0, Sampling::log_uniform});
    try {
      s.validate();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), errc::log_uniform_non_positive);
    }
  }
}

TEST(Sample, Table3RangeSpaceInBounds) {
  SearchSpace space = range_space();
  space.validate();
  RandomStream rng(99);
  for (int i = 0; i < 200; ++i) {
    Configuration c = space.sample(rng);
    EXPECT_GE(c.get_int("n_estimators"), 50);
    EXPECT_LE(c.get_int("n_estimators"), 400);
    EXPECT_GE(c.get_int("max_features"), 4);
    EXPECT_LE(c.get_int("max_features"), 10);
    EXPECT_GE(c.get_int("max_depth"), 4);
    EXPECT_LE(c.get_int("max_depth"), 10);
    std::string crit = c.get_string("criterion");
    EXPECT_TRUE(crit == "entropy" || crit == "gini");
  }
}

TEST(Sample, SingleValueCategoricalAlwaysThatValue) {
  SearchSpace space;
  space.add("criterion", Categorical{{"gini"}});
  RandomStream rng(1);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(space.sample(rng).get_string("criterion"), "gini");
}

TEST(Sample, FixedSeedReproducible) {
  SearchSpace space = range_space();
  RandomStream a(42), b(42);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(space.sample(a), space.sample(b));
}

TEST(Sample, BoundsPropertyOverRandomSpaces) {
  RandomStream meta(1234);
  for (int round = 0; round < 25; ++round) {
    SearchSpace space = random_space(meta);
    space.validate();
    RandomStream rng = meta.substream("sample", static_cast<std::uint64_t>(round));
    for (int i = 0; i < 400; ++i) {
      Configuration c = space.sample(rng);
      RealVector enc = space.encode(c);
      for (std::size_t d = 0; d < space.size(); ++d) {
        auto [lo, hi] = space.encoded_bounds(d);
        EXPECT_GE(enc[d], lo);
        EXPECT_LE(enc[d], hi);
      }
    }
  }
}

TEST(Sample, LogUniformStaysInBoundsAndSkewsLow) {
  SearchSpace space;
  space.add("lr", ContinuousRange{1e-4, 1.0, Sampling::log_uniform});
  RandomStream rng(5);
  int below_geometric_mean = 0;
  for (int i = 0; i < 4000; ++i) {
    double v = space.sample(rng).get_real("lr");
    ASSERT_GE(v, 1e-4);
    ASSERT_LE(v, 1.0);
    below_geometric_mean += v < 1e-2;
  }
  // log-uniform: half the mass below the geometric midpoint
  EXPECT_GT(below_geometric_mean, 1800);
  EXPECT_LT(below_geometric_mean, 2200);
}

TEST(EnumerateGrid, Table3GridHas160Configurations) {
  auto grid = grid_space().enumerate_grid();
  EXPECT_EQ(grid.size(), 160u);
  std::set<std::string> distinct;
  for (const auto& c : grid) {
    std::string key;
    for (const auto& [name, value] : c.items()) {
      if (std::holds_alternative<std::string>(value))
        key += std::get<std::string>(value) + "|";
      else if (std::holds_alternative<std::int64_t>(value))
        key += std::to_string(std::get<std::int64_t>(value)) + "|";
      else
        key += std::to_string(std::get<double>(value)) + "|";
    }
    distinct.insert(key);
  }
  EXPECT_EQ(distinct.size(), 160u);
}

TEST(EnumerateGrid, SingleParamKeepsListedOrder) {
  SearchSpace space;
  space.add("criterion", Categorical{{"entropy", "gini"}});
  auto grid = space.enumerate_grid();
  ASSERT_EQ(grid.size(), 2u);
  EXPECT_EQ(grid[0].get_string("criterion"), "entropy");
  EXPECT_EQ(grid[1].get_string("criterion"), "gini");
}

TEST(EnumerateGrid, LexicographicOrderLastAxisFastest) {
  SearchSpace space;
  space.add("a", DiscreteValues{{1, 2}});
  space.add("b", Categorical{{"x", "y"}});
  auto grid = space.enumerate_grid();
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_EQ(grid[0].get_int("a"), 1);
  EXPECT_EQ(grid[0].get_string("b"), "x");
  EXPECT_EQ(grid[1].get_int("a"), 1);
  EXPECT_EQ(grid[1].get_string("b"), "y");
  EXPECT_EQ(grid[2].get_int("a"), 2);
  EXPECT_EQ(grid[2].get_string("b"), "x");
}

TEST(EnumerateGrid, ContinuousRangeRejected) {
  SearchSpace space;
  space.add("x", ContinuousRange{0.0, 1.0});
  try {
    space.enumerate_grid();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::non_finite_domain);
  }
}

TEST(EncodeDecode, PaperExampleRoundTrip) {
  SearchSpace space = range_space();
  Configuration c({{"n_estimators", std::int64_t{50}},
                   {"max_features", std::int64_t{4}},
                   {"max_depth", std::int64_t{4}},
                   {"criterion", std::string("entropy")}});
  RealVector enc = space.encode(c);
  EXPECT_EQ(enc, (RealVector{50.0, 4.0, 4.0, 0.0}));
  EXPECT_EQ(space.decode(enc), c);
}

TEST(EncodeDecode, ClipsAtUpperBound) {
  SearchSpace space = range_space();
  Configuration c = space.decode({500.0, 4.0, 4.0, 0.0});
  EXPECT_EQ(c.get_int("n_estimators"), 400);
}

TEST(EncodeDecode, CategoricalRoundsToNearestIndex) {
  SearchSpace space = range_space();
  Configuration c = space.decode({50.0, 4.0, 4.0, 0.6});
  EXPECT_EQ(c.get_string("criterion"), "gini");
}

TEST(EncodeDecode, RoundTripPropertyOverRandomSpaces) {
  RandomStream meta(777);
  for (int round = 0; round < 50; ++round) {
    SearchSpace space = random_space(meta);
    space.validate();
    RandomStream rng = meta.substream("roundtrip", static_cast<std::uint64_t>(round));
    for (int i = 0; i < 200; ++i) {
      Configuration c = space.sample(rng);
      EXPECT_EQ(space.decode(space.encode(c)), c);
    }
  }
}

TEST(EncodeDecode, ArbitraryVectorsDecodeInDomain) {
  RandomStream meta(888);
  for (int round = 0; round < 50; ++round) {
    SearchSpace space = random_space(meta);
    space.validate();
    RandomStream rng = meta.substream("clip", static_cast<std::uint64_t>(round));
    for (int i = 0; i < 200; ++i) {
      RealVector v(space.size());
      for (double& x : v) x = rng.uniform_real(-1000.0, 1000.0);
      Configuration c = space.decode(v);
      // decode then encode must land inside the encoded box
      RealVector enc = space.encode(c);
      for (std::size_t d = 0; d < space.size(); ++d) {
        auto [lo, hi] = space.encoded_bounds(d);
        EXPECT_GE(enc[d], lo);
        EXPECT_LE(enc[d], hi);
      }
    }
  }
}

TEST(EncodeDecode, DimensionMismatchRejected) {
  SearchSpace space = range_space();
  EXPECT_THROW(space.decode({1.0, 2.0}), Error);
}

TEST(EncodeDecode, DiscreteValuesSnapToNearest) {
  SearchSpace space;
  space.add("n", DiscreteValues{{50, 100, 150, 200, 250}});
  EXPECT_EQ(space.decode({51.0}).get_int("n"), 50);
  EXPECT_EQ(space.decode({80.0}).get_int("n"), 100);
  EXPECT_EQ(space.decode({75.0}).get_int("n"), 50); // midpoint tie -> smaller value
  EXPECT_EQ(space.decode({1000.0}).get_int("n"), 250);
  EXPECT_EQ(space.decode({-3.0}).get_int("n"), 50);
}
