#include "aqicast/error.hpp"
#include "aqicast/evaluate.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace aqicast;

namespace {

std::vector<BucketLabel> truth_of(int n) {
  return std::vector<BucketLabel>(static_cast<std::size_t>(n), BucketLabel::Moderate);
}

std::vector<BucketLabel> predictions_with_hits(int n, int hits) {
  std::vector<BucketLabel> pred(static_cast<std::size_t>(n), BucketLabel::Poor);
  std::fill(pred.begin(), pred.begin() + hits, BucketLabel::Moderate);
  return pred;
}

}  // namespace

TEST_SUITE("evaluate") {

TEST_CASE("accuracy and error examples") {
  CHECK(accuracy(predictions_with_hits(2000, 1845), truth_of(2000)) == doctest::Approx(92.25).epsilon(1e-12));
  CHECK(accuracy(predictions_with_hits(20000, 16000), truth_of(20000)) == doctest::Approx(80.0).epsilon(1e-12));
  CHECK(error_rate(predictions_with_hits(2000, 1915), truth_of(2000)) == doctest::Approx(4.25).epsilon(1e-12));
  const auto all = truth_of(10);
  CHECK(accuracy(all, all) == 100.0);
  CHECK(error_rate(all, all) == 0.0);
  const auto p = predictions_with_hits(2000, 1845);
  const auto t = truth_of(2000);
  CHECK(error_rate(p, t) == doctest::Approx(7.75).epsilon(1e-12));
}

TEST_CASE("metric errors") {
  const auto a = truth_of(3);
  const auto b = truth_of(4);
  try {
    accuracy(a, b);
    FAIL("expected shape error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape);
  }
  try {
    error_rate(std::vector<BucketLabel>{}, std::vector<BucketLabel>{});
    FAIL("expected empty input error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_input);
  }
  CHECK_THROWS_AS(confusion_matrix(a, b), Error);
  CHECK_THROWS_AS(forecast_time(-1, 1.0), Error);
  CHECK_THROWS_AS(forecast_time(1, -1.0), Error);
}

TEST_CASE("forecast time examples") {
  CHECK(forecast_time(2000, 0.48) == doctest::Approx(960.0).epsilon(1e-12));
  CHECK(forecast_time(0, 0.48) == 0.0);
  CHECK(forecast_time(4000, 0.48) == doctest::Approx(2.0 * forecast_time(2000, 0.48)).epsilon(1e-12));
  double prev = -1.0;
  for (long long n = 0; n <= 20000; n += 500) {
    const double t = forecast_time(n, 0.3);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("confusion examples") {
  const std::vector<BucketLabel> good{BucketLabel::Good};
  const std::vector<BucketLabel> severe{BucketLabel::Severe};
  const auto one = confusion_matrix(severe, good);
  CHECK(one(0, 5) == 1);
  CHECK(one.sum() == 1);
  std::vector<BucketLabel> all(kAllBuckets.begin(), kAllBuckets.end());
  const auto diag = confusion_matrix(all, all);
  CHECK(diag == ConfusionMatrix::Identity());

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> k(0, 5);
  std::vector<BucketLabel> p, t;
  std::array<long long, 6> counts{};
  for (int i = 0; i < 30; ++i) {
    p.push_back(kAllBuckets[static_cast<std::size_t>(k(rng))]);
    t.push_back(kAllBuckets[static_cast<std::size_t>(k(rng))]);
    ++counts[static_cast<std::size_t>(ordinal(t.back()))];
  }
  const auto m = confusion_matrix(p, t);
  for (int r = 0; r < 6; ++r) CHECK(m.row(r).sum() == counts[static_cast<std::size_t>(r)]);
}

TEST_CASE("report invariants and permutation invariance") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> k(0, 5), len(1, 300);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = len(rng);
    std::vector<BucketLabel> p, t;
    for (int i = 0; i < n; ++i) {
      p.push_back(kAllBuckets[static_cast<std::size_t>(k(rng))]);
      t.push_back(kAllBuckets[static_cast<std::size_t>(k(rng) < 3 ? ordinal(p.back()) : k(rng))]);
    }
    const auto r = make_report(p, t, 0.25);
    CHECK(r.n_correct + r.n_wrong == r.n_samples);
    CHECK(std::abs(r.accuracy_pct + r.error_pct - 100.0) < 1e-9);
    CHECK(r.confusion.sum() == r.n_samples);
    CHECK(r.confusion.trace() == r.n_correct);
    CHECK(r.forecast_time_ms == doctest::Approx(0.25 * n));

    std::vector<std::size_t> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<BucketLabel> ps, ts;
    for (auto i : idx) {
      ps.push_back(p[i]);
      ts.push_back(t[i]);
    }
    CHECK(accuracy(ps, ts) == accuracy(p, t));
    CHECK(error_rate(ps, ts) == error_rate(p, t));
  }
}

}  // TEST_SUITE
