// Copyright (c) 2026 voiceprint contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "voiceprint/csv.hpp"
#include "voiceprint/rng.hpp"

using namespace voiceprint;

TEST_CASE("derived seeds are deterministic and path-sensitive") {
  CHECK(derive_seed(7, "eval/rep/417") == derive_seed(7, "eval/rep/417"));
  CHECK(derive_seed(7, "eval/rep/417") != derive_seed(7, "eval/rep/418"));
  CHECK(derive_seed(7, "eval/rep/417") != derive_seed(8, "eval/rep/417"));
}

TEST_CASE("rng streams replay exactly") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 stays in [0,1) and has a sane mean") {
  Rng rng(5);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 20000.0 - 0.5) < 0.01);
}

TEST_CASE("normal draws have near-standard moments") {
  Rng rng(11);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.03);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v1 = {0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<int> v2 = v1;
  Rng a(99), b(99);
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
  std::vector<int> sorted = v1;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 1e-300, 3.141592653589793, 146.25}) {
    CHECK(parse_double(format_double(v), "test") == v);
  }
}

TEST_CASE("csv io") {
  test::TempDir dir("csv");
  CsvTable table;
  table.header = {"a", "b"};
  table.rows = {{"1", "x"}, {"2", "y"}};
  write_csv(dir / "t.csv", table);
  const CsvTable back = read_csv(dir / "t.csv");
  CHECK(back.header == table.header);
  CHECK(back.rows == table.rows);

  test::spit(dir / "ragged.csv", "a,b\n1\n");
  CHECK_THROWS_WITH_AS(read_csv(dir / "ragged.csv"), doctest::Contains("malformed row"),
                       std::runtime_error);
  CHECK_THROWS(read_csv(dir / "missing.csv"));
}
