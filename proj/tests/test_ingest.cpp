#include "aqicast/csv.hpp"
#include "aqicast/error.hpp"
#include "aqicast/ingest.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace aqicast;

namespace {

const char* kHeader =
    "City,Date,PM2.5,PM10,NO,NO2,NOx,NH3,CO,SO2,O3,Benzene,Toluene,Xylene\n";

ParseResult parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

SeriesFrame column_frame(std::vector<double> values) {
  std::vector<Timestamp> ts;
  Eigen::MatrixXd data(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    ts.push_back({static_cast<std::int64_t>(i) * 86400, false});
    data(static_cast<Eigen::Index>(i), 0) = values[i];
  }
  return SeriesFrame("X", ts, {"PM2.5"}, data);
}

const double NaN = std::nan("");

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("csv reader handles quotes, CRLF and BOM") {
  std::istringstream in("\xEF\xBB\xBF" "a,\"b,c\",\"d\"\"e\"\r\n\r\n1,\"x\ny\",3\n");
  csv::Reader reader(in);
  auto r1 = reader.next();
  REQUIRE(r1);
  CHECK(*r1 == csv::Record{"a", "b,c", "d\"e"});
  auto r2 = reader.next();
  REQUIRE(r2);
  CHECK(*r2 == csv::Record{"1", "x\ny", "3"});
  CHECK(reader.line() == 3);
  CHECK_FALSE(reader.next());
}

TEST_CASE("csv escape and number formatting round trip") {
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("q\"") == "\"q\"\"\"");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(std::stod(csv::format_number(v)) == v);
  }
  CHECK(csv::format_number(NaN).empty());
}

TEST_CASE("timestamp parse and format") {
  auto d = Timestamp::parse("2015-01-02");
  REQUIRE(d);
  CHECK(d->seconds == 1420156800);
  CHECK(d->to_string() == "2015-01-02");
  auto h = Timestamp::parse("2015-01-02 13:00:00");
  REQUIRE(h);
  CHECK(h->seconds == 1420156800 + 13 * 3600);
  CHECK(h->to_string() == "2015-01-02 13:00:00");
  CHECK_FALSE(Timestamp::parse("2015-02-30"));
  CHECK_FALSE(Timestamp::parse("02/01/2015"));
  CHECK_FALSE(Timestamp::parse("2015-01-02 25:00:00"));
}

TEST_CASE("three-row file gives one frame with 12 columns") {
  std::string text = kHeader;
  for (int d = 1; d <= 3; ++d) {
    text += "Delhi,2015-01-0" + std::to_string(d) + ",1,2,3,4,5,6,7,8,9,10,11,12\n";
  }
  auto result = parse_text(text);
  REQUIRE(result.frames.size() == 1);
  CHECK(result.frames[0].rows() == 3);
  CHECK(result.frames[0].cols() == 12);
  CHECK(result.frames[0].data()(2, 11) == 12.0);
}

TEST_CASE("interleaved cities are grouped and sorted") {
  std::string text = kHeader;
  text += "Mumbai,2015-01-03,3,,,,,,,,,,,\n";
  text += "Delhi,2015-01-02,2,,,,,,,,,,,\n";
  text += "Mumbai,2015-01-01,1,,,,,,,,,,,\n";
  text += "Delhi,2015-01-03,3,,,,,,,,,,,\n";
  text += "Mumbai,2015-01-02,2,,,,,,,,,,,\n";
  text += "Delhi,2015-01-01,1,,,,,,,,,,,\n";
  auto result = parse_text(text);
  REQUIRE(result.frames.size() == 2);
  CHECK(result.frames[0].city() == "Delhi");
  CHECK(result.frames[1].city() == "Mumbai");
  for (const auto& f : result.frames) {
    REQUIRE(f.rows() == 3);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(f.data()(i, 0) == static_cast<double>(i + 1));
  }
}

TEST_CASE("NA sentinel becomes a missing cell and the row is kept") {
  std::string text = kHeader;
  text += "Delhi,2015-01-01,NA,2,3,4,5,6,7,8,9,10,11,12\n";
  text += "Delhi,2015-01-02,1,nan,3,4,5,6,7,8,9,10,11,\n";
  auto result = parse_text(text);
  REQUIRE(result.frames.size() == 1);
  const auto& f = result.frames[0];
  CHECK(f.rows() == 2);
  CHECK(std::isnan(f.data()(0, 0)));
  CHECK(std::isnan(f.data()(1, 1)));
  CHECK(std::isnan(f.data()(1, 11)));
  CHECK(f.missing_count() == 3);
}

TEST_CASE("header and key errors") {
  CHECK_THROWS_AS(parse_text(""), Error);
  try {
    parse_text("Date,PM2.5\n2015-01-01,1\n");
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::schema);
  }
  try {
    parse_text(std::string(kHeader) + "Delhi,2015-01-01,1,,,,,,,,,,,\nDelhi,2015-01-01,2,,,,,,,,,,,\n");
    FAIL("expected duplicate key error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::duplicate_key);
    CHECK(std::string(e.what()).find("Delhi") != std::string::npos);
    CHECK(std::string(e.what()).find("2015-01-01") != std::string::npos);
  }
}

TEST_CASE("extra columns, bad cells, negatives and rejected rows are counted") {
  std::string text = "City,Date,PM2.5,AQI,O3\n";
  text += "Delhi,2015-01-01,-4,99,abc\n";
  text += "Delhi,not-a-date,1,2,3\n";
  text += ",2015-01-02,1,2,3\n";
  text += "Delhi,2015-01-03,1,2\n";
  text += "Delhi,2015-01-04,\"5\",7,8\n";
  auto result = parse_text(text);
  CHECK(result.stats.data_rows == 5);
  CHECK(result.stats.rejected_rows == 3);
  CHECK(result.stats.extra_columns == 1);
  CHECK(result.stats.missing_schema_columns == 10);
  CHECK(result.stats.unparseable_cells == 1);
  CHECK(result.stats.clamped_negatives == 1);
  REQUIRE(result.frames.size() == 1);
  const auto& f = result.frames[0];
  CHECK(f.columns() == std::vector<std::string>{"PM2.5", "O3"});
  CHECK(f.data()(0, 0) == 0.0);
  CHECK(std::isnan(f.data()(0, 1)));
  CHECK(f.data()(1, 1) == 8.0);
}

TEST_CASE("row multiset is preserved by grouping") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> city(0, 3), bad(0, 9);
  std::string text = kHeader;
  std::size_t good = 0;
  for (int day = 0; day < 200; ++day) {
    const bool reject = bad(rng) == 0;
    const auto ts = Timestamp{1420070400 + day * 86400, false}.to_string();
    text += (reject ? "" : "C" + std::to_string(city(rng))) + "," + ts + ",1,2,3,4,5,6,7,8,9,10,11,12\n";
    if (!reject) ++good;
  }
  auto result = parse_text(text);
  std::size_t total = 0;
  for (const auto& f : result.frames) total += static_cast<std::size_t>(f.rows());
  CHECK(total == good);
  CHECK(total == result.stats.data_rows - result.stats.rejected_rows);
}

TEST_CASE("parse is total on arbitrary bytes") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> byte(0, 255), len(0, 400);
  const std::string alphabet = "City,Date,PM2.5,O3\n\"\r-.0123456789NA ";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const bool structured = trial % 2 == 0;
    if (structured) text = "City,Date,PM2.5,O3\n";
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      text += structured ? alphabet[static_cast<std::size_t>(byte(rng)) % alphabet.size()]
                         : static_cast<char>(byte(rng));
    }
    try {
      auto result = parse_text(text);
      for (const auto& f : result.frames) {
        for (Eigen::Index i = 0; i < f.rows(); ++i) {
          for (Eigen::Index j = 0; j < f.cols(); ++j) {
            const double v = f.data()(i, j);
            CHECK((std::isnan(v) || (std::isfinite(v) && v >= 0.0)));
          }
        }
      }
    } catch (const Error&) {
    }
  }
}

TEST_CASE("write_csv then parse_csv reproduces frames exactly") {
  const auto frame = generate_synthetic(4, 50);
  std::ostringstream out;
  write_csv(out, {frame});
  auto back = parse_text(out.str());
  REQUIRE(back.frames.size() == 1);
  CHECK(back.frames[0].timestamps() == frame.timestamps());
  CHECK(back.frames[0].columns() == frame.columns());
  CHECK(back.frames[0].data() == frame.data());
}

TEST_CASE("frame constructor validates shape and order") {
  Eigen::MatrixXd data(2, 1);
  data << 1, 2;
  CHECK_THROWS_AS(SeriesFrame("X", {{0, false}}, {"PM2.5"}, data), Error);
  CHECK_THROWS_AS(SeriesFrame("X", {{1, false}, {1, false}}, {"PM2.5"}, data), Error);
  CHECK_THROWS_AS(SeriesFrame("X", {{2, false}, {1, false}}, {"PM2.5"}, data), Error);
  SeriesFrame ok("X", {{1, false}, {2, false}}, {"PM2.5"}, data);
  CHECK_THROWS_AS(ok.column("O3"), Error);
}

TEST_CASE("impute with no missing cells is the identity") {
  const auto frame = column_frame({1, 2, 3});
  for (auto mode : {ImputeMode::forward_fill, ImputeMode::drop_row, ImputeMode::column_mean}) {
    const auto out = impute(frame, {mode, 3});
    CHECK(out.data() == frame.data());
    CHECK(out.timestamps() == frame.timestamps());
  }
}

TEST_CASE("impute examples") {
  const auto frame = column_frame({1, NaN, 3});
  const auto ff = impute(frame, {ImputeMode::forward_fill, 1});
  REQUIRE(ff.rows() == 3);
  CHECK(ff.data()(1, 0) == 1.0);
  CHECK(ff.data()(2, 0) == 3.0);
  const auto mean = impute(frame, {ImputeMode::column_mean, 0});
  CHECK(mean.data()(1, 0) == 2.0);
  const auto drop = impute(frame, {ImputeMode::drop_row, 0});
  CHECK(drop.rows() == 2);
  CHECK(drop.missing_count() == 0);
}

TEST_CASE("forward fill drops long gaps and leading gaps") {
  const auto frame = column_frame({NaN, 1, NaN, NaN, NaN, 5, NaN, 7});
  const auto out = impute(frame, {ImputeMode::forward_fill, 2});
  CHECK(out.missing_count() == 0);
  std::vector<double> values(out.data().data(), out.data().data() + out.rows());
  CHECK(values == std::vector<double>{1, 5, 5, 7});
}

TEST_CASE("entirely missing column is unimputable") {
  const auto frame = column_frame({NaN, NaN});
  for (auto mode : {ImputeMode::forward_fill, ImputeMode::column_mean}) {
    try {
      impute(frame, {mode, 3});
      FAIL("expected unimputable column");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::unimputable_column);
      CHECK(std::string(e.what()).find("PM2.5") != std::string::npos);
    }
  }
}

TEST_CASE("parse then drop_row gives finite non-negative cells") {
  std::string text = kHeader;
  text += "A,2015-01-01,-1,NA,3,4,5,6,7,8,9,10,11,12\n";
  text += "A,2015-01-02,1,2,3,4,5,6,7,8,9,10,11,12\n";
  text += "A,2015-01-03,1,2,3,4,5,6,7,8,x,10,11,12\n";
  for (const auto& f : parse_text(text).frames) {
    const auto out = impute(f, {});
    CHECK(out.rows() == 1);
    CHECK(out.data().allFinite());
    CHECK(out.data().minCoeff() >= 0.0);
  }
}

TEST_CASE("impute mode names") {
  for (auto mode : {ImputeMode::forward_fill, ImputeMode::drop_row, ImputeMode::column_mean}) {
    CHECK(parse_impute_mode(to_string(mode)) == mode);
  }
  CHECK_THROWS_AS(parse_impute_mode("median"), Error);
}

TEST_CASE("synthetic generator determinism and shape") {
  const auto a = generate_synthetic(1, 100);
  const auto b = generate_synthetic(1, 100);
  const auto c = generate_synthetic(2, 100);
  CHECK(a.data() == b.data());
  CHECK(a.data() != c.data());
  CHECK(a.cols() == 12);
  CHECK(a.columns() == default_schema());
  CHECK(a.data().minCoeff() >= 0.0);
  CHECK_THROWS_AS(generate_synthetic(1, 0), Error);
}

TEST_CASE("zero noise gives exact clipped sinusoids") {
  SyntheticParams params;
  for (auto p : kPollutants) params.waves[std::string(p)] = {1.0, 3.0, 10.0, 0.0};
  const auto f = generate_synthetic(9, 40, params);
  for (Eigen::Index t = 0; t < 40; ++t) {
    const double expected = std::max(0.0, 1.0 + 3.0 * std::sin(2.0 * M_PI * static_cast<double>(t) / 10.0));
    for (Eigen::Index j = 0; j < f.cols(); ++j) CHECK(f.data()(t, j) == expected);
  }
}

}  // TEST_SUITE
