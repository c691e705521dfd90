#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "secretgame/cost_ingest.hpp"

using namespace secretgame;

TEST_CASE("frequency ingest, count/multiplicity form") {
  // 3 secrets appearing 5 times each, 4 secrets appearing once
  const PartitionProfile p = from_frequency_text("5\t3\n1\t4\n");
  REQUIRE(p.num_partitions() == 2);
  CHECK(p.partition(0).size == 3);
  CHECK(p.partition(0).cost == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(p.partition(1).size == 4);
  CHECK(p.partition(1).cost == 1.0);

  // permutation invariance in line order
  const PartitionProfile q = from_frequency_text("1\t4\n5\t3\n");
  CHECK(q.to_json_text() == p.to_json_text());

  const PartitionProfile single = from_frequency_text("9\t12\n");
  REQUIRE(single.num_partitions() == 1);
  CHECK(single.partition(0).cost == 1.0);
  CHECK(single.partition(0).size == 12);
}

TEST_CASE("frequency ingest, raw secret/count form") {
  const std::string raw = "hunter2\t5\nqwerty\t5\nderp\t1\n";
  const PartitionProfile p = from_frequency_text(raw);
  REQUIRE(p.num_partitions() == 2);
  CHECK(p.partition(0).size == 2);   // the two five-count secrets
  CHECK(p.partition(0).cost == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(p.partition(1).size == 1);

  // numeric-looking secrets need the explicit format override
  const PartitionProfile forced =
      from_frequency_text("123456\t290729\n777\t290729\nrare\t1\n",
                          FreqFormat::SecretCount);
  CHECK(forced.partition(0).size == 2);
  CHECK(forced.partition(0).cost ==
        doctest::Approx(1.0 / 290729).epsilon(1e-12));
  CHECK(forced.partition(1).cost == 1.0);

  CHECK_THROWS_AS(from_frequency_text("dup\t2\ndup\t3\n"), model_error);
  CHECK_THROWS_AS(from_frequency_text("x\t0\n"), model_error);
  CHECK_THROWS_AS(from_frequency_text(""), model_error);
  CHECK_THROWS_AS(from_frequency_text("no-tab-here\n"), model_error);
}

TEST_CASE("synthetic key model") {
  {
    const PartitionProfile p = synthetic_key_model(2, KeyCostShape::Linear);
    REQUIRE(p.num_partitions() == 3);
    CHECK(p.partition(0).size == 1);
    CHECK(p.partition(0).cost == 0.0);
    CHECK(p.partition(1).size == 2);
    CHECK(p.partition(1).cost == 0.5);
    CHECK(p.partition(2).size == 4);
    CHECK(p.partition(2).cost == 1.0);
  }
  {
    const PartitionProfile p = synthetic_key_model(2, KeyCostShape::Cubic);
    CHECK(p.partition(1).cost == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(p.partition(2).cost == 1.0);
  }
  {
    const PartitionProfile p = synthetic_key_model(64, KeyCostShape::Linear);
    REQUIRE(p.num_partitions() == 65);
    CHECK(p.total_size() == (count_t{1} << 65) - 1);
  }
  CHECK_THROWS_AS(synthetic_key_model(0, KeyCostShape::Linear), model_error);
  CHECK_THROWS_AS(synthetic_key_model(65, KeyCostShape::Linear), model_error);
}

TEST_CASE("prune merges near-duplicate cost classes") {
  {
    const PartitionProfile p({{3, 0.2}, {4, 0.2 + 1e-12}});
    const PartitionProfile merged = prune(p, 1e-9);
    REQUIRE(merged.num_partitions() == 1);
    CHECK(merged.partition(0).size == 7);
    CHECK(merged.partition(0).cost == doctest::Approx(0.2).epsilon(1e-9));
  }
  {
    const PartitionProfile p({{1, 0.0}, {1, 0.5}, {1, 1.0}});
    const PartitionProfile merged = prune(p, 0.6);
    REQUIRE(merged.num_partitions() == 2);
    CHECK(merged.partition(0).size == 2);
    CHECK(merged.partition(0).cost == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(merged.partition(1).cost == 1.0);
  }
  {
    const PartitionProfile p({{1, 0.0}, {1, 0.5}, {1, 1.0}});
    const PartitionProfile same = prune(p, 0.0);
    CHECK(same.to_json_text() == p.to_json_text());
  }
}

TEST_CASE("rockyou-shaped fixture has the expected cost range") {
  // synthetic Zipf-flavored input: 2040 distinct counts, top count 290729
  std::string text;
  text += "290729\t1\n";
  for (int c = 2039; c >= 1; --c)
    text += std::to_string(c) + "\t" + std::to_string(3 + c % 17) + "\n";
  const PartitionProfile p = from_frequency_text(text);
  REQUIRE(p.num_partitions() == 2040);
  CHECK(p.partition(0).cost == doctest::Approx(1.0 / 290729).epsilon(1e-12));
  CHECK(p.partition(2039).cost == 1.0);
  for (std::size_t i = 0; i + 1 < p.num_partitions(); ++i)
    REQUIRE(p.partition(i).cost < p.partition(i + 1).cost);
}
