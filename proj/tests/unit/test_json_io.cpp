#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "binmargin/errors.hpp"
#include "binmargin/json_io.hpp"
#include "oracles.hpp"

namespace bm = binmargin;
namespace bt = binmargin::testing;

using V = std::vector<std::int64_t>;

TEST(JsonIo, MarginRoundTrip) {
  for (const auto& mp : bt::margin_corpus(3, 50, 6, 4, 1)) {
    const bm::Json j = mp;
    const auto back = j.get<bm::MarginPair>();
    EXPECT_EQ(back.rows(), mp.rows());
    EXPECT_EQ(back.cols(), mp.cols());
    EXPECT_EQ(bm::Json::parse(j.dump()).get<bm::MarginPair>().rows(), mp.rows());
  }
}

TEST(JsonIo, MarginRejectsBadInput) {
  EXPECT_THROW(bm::Json::parse(R"({"r":[1]})").get<bm::MarginPair>(), bm::InvalidArgument);
  EXPECT_THROW(bm::Json::parse(R"({"r":[1],"c":[1],"x":0})").get<bm::MarginPair>(), bm::InvalidArgument);
  EXPECT_THROW(bm::Json::parse(R"({"r":["a"],"c":[1]})").get<bm::MarginPair>(), bm::InvalidArgument);
  EXPECT_THROW(bm::Json::parse(R"({"r":[2],"c":[1]})").get<bm::MarginPair>(), bm::InvalidArgument);
}

TEST(JsonIo, ParamsRoundTrip) {
  const bm::BlockParams p{24, 0.5, 1.2, 0.5};
  const bm::Json j = p;
  EXPECT_EQ(j.dump(), R"({"n":24,"delta":0.5,"b":1.2,"c":0.5})");
  const auto back = j.get<bm::BlockParams>();
  EXPECT_EQ(back.n, 24);
  EXPECT_DOUBLE_EQ(back.b, 1.2);
  EXPECT_THROW(bm::Json::parse(R"({"n":0,"delta":0.5,"b":1,"c":0.5})").get<bm::BlockParams>(), bm::InvalidArgument);
}

TEST(JsonIo, TableIsArrayOfRows) {
  const auto t = bm::BinaryTable::from_rows({{1, 0, 1}, {0, 1, 0}});
  EXPECT_EQ(bm::Json(t).dump(), "[[1,0,1],[0,1,0]]");
}

TEST(JsonIo, RegimeAndTypical) {
  const bm::Json r = bm::classify_regime({24, 0.5, 3, 0.5});
  EXPECT_TRUE(r["regimes"].empty());
  const auto t = bm::solve_typical(bm::MarginPair(V{1, 1}, V{1, 1}));
  const bm::Json j = t;
  EXPECT_NEAR(j["z"][0][1].get<double>(), 0.5, 1e-9);
  EXPECT_EQ(j["row_duals"].size(), 2u);
}

TEST(JsonIo, BigCountIsDecimalString) {
  bm::BigInt x = 1;
  for (int i = 0; i < 30; ++i) x *= 10;
  EXPECT_EQ(bm::to_decimal(x), "1" + std::string(30, '0'));
}

TEST(JsonIo, ReadMarginsFile) {
  const auto path = std::filesystem::temp_directory_path() / "binmargin_json_io_margins.json";
  {
    std::ofstream f(path);
    f << R"({"r":[2,1,1],"c":[2,1,1]})";
  }
  const auto mp = bm::read_margins_file(path.string());
  EXPECT_EQ(mp.rows(), (V{2, 1, 1}));
  std::filesystem::remove(path);
  EXPECT_THROW(bm::read_margins_file(path.string()), bm::InvalidArgument);
}

TEST(JsonIo, MarginalCsvShape) {
  bm::SamplerOptions s;
  s.kind = bm::SamplerKind::kExact;
  const auto rep = bm::marginal_experiment({4, 0.5, 1.5, 0.5}, s, 200, 5);
  const std::string rows = bm::marginal_csv_rows(rep);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 3);
  const std::string header = bm::marginal_csv_header();
  const auto commas = std::count(header.begin(), header.end(), ',');
  std::size_t start = 0;
  while (start < rows.size()) {
    const auto end = rows.find('\n', start);
    EXPECT_EQ(std::count(rows.begin() + static_cast<std::ptrdiff_t>(start), rows.begin() + static_cast<std::ptrdiff_t>(end), ','),
              commas);
    start = end + 1;
  }
  const bm::Json j = rep;
  EXPECT_EQ(j["blocks"].size(), 3u);
  EXPECT_EQ(j["blocks"][2]["block"], "BR");
  EXPECT_FALSE(j["blocks"][2]["exact"].is_null());
}
