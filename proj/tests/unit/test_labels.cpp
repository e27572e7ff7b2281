#include <doctest.h>

#include <algorithm>

#include "../support/oracles.hpp"
#include "physioemo/error.hpp"
#include "physioemo/labels.hpp"
#include "physioemo/rng.hpp"

using namespace physioemo;

namespace {

const char* kHeader =
    "timestamp,Joy,Anger,Surprise,Fear,Contempt,Disgust,Sadness,Neutral,Positive,Negative,"
    "Confusion,Frustration\n";

EmotionTimeSeries series_at(const std::vector<double>& t) {
  EmotionTimeSeries s;
  s.timestamps = t;
  s.intensities.resize(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(kEmotionCount));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t e = 0; e < kEmotionCount; ++e)
      s.intensities(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e)) = t[i] * 10 + e;
  return s;
}

}  // namespace

TEST_SUITE("labels") {
  TEST_CASE("two-row export parses") {
    const std::string csv = std::string(kHeader) + "0,0.1,0,0,0,0,0,0,0,0,0,0,0\n" +
                            "1,0.2,0,0,0,0,0,0,0,0,0,0,0\n";
    const auto r = parse_fea_export(csv);
    REQUIRE(r.series.size() == 2);
    CHECK(r.series.channel(Emotion::Joy)[1] == 0.2);
    CHECK(r.dropped_rows == 0);
  }

  TEST_CASE("missing column and blank cell") {
    std::string header = kHeader;
    header.replace(header.find(",Contempt"), 9, "");
    try {
      parse_fea_export(header + "0,1,1,1,1,1,1,1,1,1,1,1\n");
      FAIL("expected MissingChannelColumn");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingChannelColumn);
      CHECK(e.subject() == "Contempt");
    }
    const auto r = parse_fea_export(std::string(kHeader) + "0,1,1,1,1,1,1,1,1,1,1,1,1\n" +
                                    "1,1,1,1,,1,1,1,1,1,1,1,1\n2,1,1,1,1,1,1,1,1,1,1,1,1\n");
    CHECK(r.dropped_rows == 1);
    CHECK(r.series.size() == 2);
    try {
      parse_fea_export(std::string(kHeader));
      FAIL("expected EmptyStream");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyStream);
    }
  }

  TEST_CASE("nearest-label pairing within tolerance") {
    const auto id = align_labels(series_at({0, 1, 2}), {0, 1, 2}, 0.5);
    CHECK(id.kept_rows == std::vector<std::size_t>{0, 1, 2});
    CHECK(id.intensities(2, 0) == 20.0);

    const auto near = align_labels(series_at({1, 2}), {1.4}, 0.5);
    REQUIRE(near.kept_rows.size() == 1);
    CHECK(near.intensities(0, 0) == 10.0);

    const auto dropped = align_labels(series_at({0, 1, 2}), {1, 10}, 0.5);
    CHECK(dropped.kept_rows == std::vector<std::size_t>{0});
    CHECK(dropped.intensities.rows() == 1);

    // Equidistant: the earlier label wins.
    const auto tie = align_labels(series_at({1, 2}), {1.5}, 0.5);
    CHECK(tie.intensities(0, 0) == 10.0);
    CHECK_THROWS_AS(align_labels(series_at({0, 1}), {50, 60}, 0.5), Error);
  }

  TEST_CASE("paired lengths always agree") {
    oracle::Lcg rng(2);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> lt, ft;
      double t = rng.uniform(0, 3);
      for (int i = 0; i < 50; ++i) lt.push_back(t += rng.uniform(0.05, 1.0));
      t = rng.uniform(0, 3);
      for (int i = 0; i < 70; ++i) ft.push_back(t += rng.uniform(0.05, 1.0));
      try {
        const auto a = align_labels(series_at(lt), ft, 0.3);
        CHECK(a.intensities.rows() == static_cast<Eigen::Index>(a.kept_rows.size()));
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoOverlap);
      }
    }
  }

  TEST_CASE("baseline statistics by hand") {
    const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(4);
    const auto z = baseline_of(Emotion::Joy, zeros);
    CHECK(z.baseline == 0.0);
    CHECK(z.pct_outside_1std == 0.0);
    Eigen::VectorXd alt(4);
    alt << -1, 1, -1, 1;
    const auto a = baseline_of(Emotion::Joy, alt);
    CHECK(a.baseline == 0.0);
    CHECK(a.stddev == 1.0);
    CHECK(a.pct_outside_1std == 0.0);
    Eigen::VectorXd one(1);
    one << 3;
    CHECK_THROWS_AS(baseline_of(Emotion::Joy, one), Error);
  }

  TEST_CASE("baseline statistics ignore channel order and time shifts") {
    auto s = series_at({0, 1, 2, 3, 4, 5, 6});
    s.intensities(3, 4) = 100;
    const auto base = baseline_stats(s);
    auto shifted = s;
    for (auto& t : shifted.timestamps) t += 1234.5;
    const auto b2 = baseline_stats(shifted);
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      CHECK(b2[e].baseline == base[e].baseline);
      CHECK(b2[e].pct_outside_1std == base[e].pct_outside_1std);
    }
    // Permuting rows of one channel leaves its statistics unchanged.
    auto perm = s;
    perm.intensities.col(4).reverseInPlace();
    CHECK(baseline_stats(perm)[4].pct_outside_1std == base[4].pct_outside_1std);
    CHECK(baseline_stats(perm)[4].baseline == doctest::Approx(base[4].baseline).epsilon(1e-15));
  }

  TEST_CASE("Gaussian channel: about 31.7% outside one std") {
    Rng rng(17);
    Eigen::VectorXd v(100000);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal(-0.66, 2.0);
    const double pct = baseline_of(Emotion::Joy, v).pct_outside_1std;
    CHECK(pct > 29.7);
    CHECK(pct < 33.7);
  }

  TEST_CASE("baseline table layout: two groups of six") {
    EmotionBaselineTable t{};
    for (std::size_t e = 0; e < kEmotionCount; ++e)
      t[e] = EmotionBaseline{static_cast<Emotion>(e), -0.6629763, 1.0, 24.28};
    const auto text = format_baseline_table(t);
    CHECK(text.find("Emotion") != std::string::npos);
    CHECK(text.find("% outside 1st std") != std::string::npos);
    CHECK(text.find("-0.6629763") != std::string::npos);
    CHECK(text.find("24.28") != std::string::npos);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines >= 7);
    // Rows pair emotion i with emotion i + 6.
    const auto row_of = [&](const char* name) {
      return std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(text.find(name)), '\n');
    };
    CHECK(row_of("Joy") == row_of("Sadness"));
    CHECK(row_of("Anger") == row_of("Neutral"));
    CHECK(row_of("Disgust") == row_of("Frustration"));
    CHECK(row_of("Joy") + 1 == row_of("Anger"));
  }

  TEST_CASE("target scaling: hand values, clipping, degenerate range") {
    Eigen::MatrixXd train(3, 1);
    train << 0, 5, 10;
    const auto s = fit_target_scaling(train, {Emotion::Neutral});
    const auto scaled = s.apply(train);
    CHECK(scaled(0, 0) == 0.0);
    CHECK(scaled(1, 0) == 0.5);
    CHECK(scaled(2, 0) == 1.0);
    CHECK(s.apply(0, 12.0) == 1.0);
    CHECK(s.apply(0, -3.0) == 0.0);
    try {
      fit_target_scaling(Eigen::MatrixXd::Constant(3, 1, 2.0), {Emotion::Neutral});
      FAIL("expected DegenerateRange");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateRange);
    }
  }

  TEST_CASE("select_targets fits on training rows only") {
    Eigen::MatrixXd inten = Eigen::MatrixXd::Zero(4, static_cast<Eigen::Index>(kEmotionCount));
    const auto neutral = static_cast<Eigen::Index>(Emotion::Neutral);
    inten.col(neutral) << 0, 10, 5, 20;
    for (const auto e : {Emotion::Positive, Emotion::Negative})
      inten.col(static_cast<Eigen::Index>(e)) << 1, 2, 3, 4;
    const auto t = select_targets(inten, {true, true, false, false});
    CHECK(t.values.cols() == 3);
    CHECK(t.values(2, 0) == 0.5);
    CHECK(t.values(3, 0) == 1.0);  // clipped test value
    CHECK(t.scaling.max[0] == 10.0);
    CHECK(t.values(2, 1) == 1.0);
  }
}
