#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>

#include "support/encode_oracle.hpp"
#include "trajcast/errors.hpp"
#include "trajcast/geo.hpp"
#include "trajcast/rng.hpp"

using namespace trajcast;

namespace {
const BoundingBox kUnitBox{0.0, 1.0, 0.0, 1.0};
}

TEST_CASE("normalize_point maps bbox corners and midpoint") {
  auto [u0, v0] = normalize_point({-8.7, 41.1}, kPortoBBox);
  CHECK(u0 == doctest::Approx(0.0));
  CHECK(v0 == doctest::Approx(0.0));

  auto [u1, v1] = normalize_point({-8.6, 41.2}, kPortoBBox);
  CHECK(u1 == doctest::Approx(1.0));
  CHECK(v1 == doctest::Approx(1.0));

  auto [um, vm] = normalize_point({-8.65, 41.15}, kPortoBBox);
  CHECK(um == doctest::Approx(0.5));
  CHECK(vm == doctest::Approx(0.5));
}

TEST_CASE("normalize_point rejects points outside the bbox") {
  CHECK_THROWS_WITH_AS(normalize_point({-8.71, 41.15}, kPortoBBox),
                       doctest::Contains("longitude"), DataError);
  CHECK_THROWS_WITH_AS(normalize_point({-8.65, 41.25}, kPortoBBox),
                       doctest::Contains("latitude"), DataError);
}

TEST_CASE("point_to_cell floors and clamps") {
  CHECK(point_to_cell(0.0, 0.0, 40) == CellIndex{0, 0});
  CHECK(point_to_cell(1.0, 1.0, 40) == CellIndex{39, 39});
  CHECK(point_to_cell(0.5, 0.5, 40) == CellIndex{20, 20});
  // row comes from the second (latitude) coordinate
  CHECK(point_to_cell(0.9, 0.1, 40) == CellIndex{4, 36});
  CHECK_THROWS_AS(point_to_cell(-0.1, 0.5, 40), DataError);
  CHECK_THROWS_AS(point_to_cell(0.5, 1.1, 40), DataError);
}

TEST_CASE("trajectory_to_cells preserves order and duplicates") {
  Trajectory one{{{0.0, 0.0}}};
  CHECK(trajectory_to_cells(one, kUnitBox, 40) ==
        std::vector<CellIndex>{{0, 0}});

  Trajectory dup{{{0.3, 0.3}, {0.3, 0.3}}};
  auto cells = trajectory_to_cells(dup, kUnitBox, 40);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0] == cells[1]);

  Trajectory span{{{0.0, 0.0}, {0.5, 0.5}, {1.0, 1.0}}};
  CHECK(trajectory_to_cells(span, kUnitBox, 40) ==
        std::vector<CellIndex>{{0, 0}, {20, 20}, {39, 39}});
}

TEST_CASE("encode_binary marks visited cells with 1") {
  auto g1 = encode_binary({{0, 0}}, 2);
  CHECK(g1.values == std::vector<float>{1, 0, 0, 0});

  auto g2 = encode_binary({{0, 0}, {0, 0}, {0, 0}}, 2);
  CHECK(g2.values == std::vector<float>{1, 0, 0, 0});

  auto g3 = encode_binary({{0, 0}, {1, 1}}, 2);
  CHECK(g3.values == std::vector<float>{1, 0, 0, 1});

  CHECK_THROWS_AS(encode_binary({}, 2), DataError);
}

TEST_CASE("encode_linear assigns k/N with last visit winning") {
  auto g = encode_linear({{0, 0}, {1, 1}, {1, 0}}, 2);
  CHECK(g.at(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(g.at(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(g.at(1, 0) == 1.0f);
  CHECK(g.at(0, 1) == 0.0f);

  auto single = encode_linear({{0, 0}}, 2);
  CHECK(single.at(0, 0) == 1.0f);

  // revisit: k_last = 3 for cell (0,0)
  auto revisit = encode_linear({{0, 0}, {1, 1}, {0, 0}}, 2);
  CHECK(revisit.at(0, 0) == 1.0f);
  CHECK(revisit.at(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(revisit == testing::brute_force_encode({{0, 0}, {1, 1}, {0, 0}}, 2,
                                               Encoder::kLinear));
}

TEST_CASE("encode_quadratic squares the linear values") {
  auto g = encode_quadratic({{0, 0}, {1, 1}}, 2);
  CHECK(g.at(0, 0) == 0.25f);
  CHECK(g.at(1, 1) == 1.0f);

  auto single = encode_quadratic({{0, 0}}, 2);
  CHECK(single.at(0, 0) == 1.0f);
}

TEST_CASE("encoders match the brute-force oracle on random sequences") {
  Rng rng(2024);
  const std::array<std::size_t, 4> resolutions{2, 4, 8, 40};
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t res = resolutions[rng.uniform_index(resolutions.size())];
    const std::size_t len = 1 + rng.uniform_index(50);
    const auto cells = testing::random_cells(rng, len, res);
    for (Encoder e :
         {Encoder::kBinary, Encoder::kLinear, Encoder::kQuadratic}) {
      const auto got = encode_cells(cells, res, e);
      const auto want = testing::brute_force_encode(cells, res, e);
      REQUIRE(got.values == want.values);
    }
  }
}

TEST_CASE("encoder invariants: range, support, algebraic identities") {
  Rng rng(7);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t res = 2 + rng.uniform_index(10);
    const std::size_t len = 1 + rng.uniform_index(30);
    const auto cells = testing::random_cells(rng, len, res);
    const auto bin = encode_binary(cells, res);
    const auto lin = encode_linear(cells, res);
    const auto qua = encode_quadratic(cells, res);

    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < lin.values.size(); ++i) {
      CHECK(lin.values[i] >= 0.0f);
      CHECK(lin.values[i] <= 1.0f);
      CHECK(qua.values[i] == lin.values[i] * lin.values[i]);
      CHECK(bin.values[i] == (lin.values[i] > 0.0f ? 1.0f : 0.0f));
      if (lin.values[i] > 0.0f) ++nonzero;
    }
    CHECK(nonzero <= cells.size());
    CHECK(lin.at(cells.back().m, cells.back().n) == 1.0f);
  }
}

TEST_CASE("encoding is deterministic") {
  Rng rng(99);
  const auto cells = testing::random_cells(rng, 25, 8);
  CHECK(encode_linear(cells, 8) == encode_linear(cells, 8));
}

TEST_CASE("make_sample withholds the destination point") {
  SUBCASE("two points: grid holds only the first, value 1") {
    Trajectory t{{{0.1, 0.1}, {0.9, 0.9}}};
    Sample s = make_sample(t, kUnitBox, 4, Encoder::kLinear);
    CHECK(s.grid.at(0, 0) == 1.0f);
    CHECK(s.target_m == 3.0f);
    CHECK(s.target_n == 3.0f);
    std::size_t nonzero = 0;
    for (float v : s.grid.values) nonzero += v > 0.0f;
    CHECK(nonzero == 1);
  }

  SUBCASE("three points, linear: prefix normalizer is 2") {
    Trajectory t{{{0.1, 0.1}, {0.6, 0.6}, {0.9, 0.9}}};
    Sample s = make_sample(t, kUnitBox, 4, Encoder::kLinear);
    CHECK(s.grid.at(0, 0) == 0.5f);
    CHECK(s.grid.at(2, 2) == 1.0f);
    CHECK(s.target_m == 3.0f);
    CHECK(s.target_n == 3.0f);
  }

  SUBCASE("one point is rejected") {
    Trajectory t{{{0.1, 0.1}}};
    CHECK_THROWS_AS(make_sample(t, kUnitBox, 4, Encoder::kLinear), DataError);
  }
}
