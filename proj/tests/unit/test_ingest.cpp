#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "physioemo/error.hpp"
#include "physioemo/ingest.hpp"
#include "physioemo/text.hpp"

using namespace physioemo;

namespace {

std::vector<SensorStream> all_channels(const std::vector<double>& t,
                                       const std::function<double(std::size_t, double)>& f) {
  std::vector<SensorStream> out;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    std::vector<Sample> s;
    for (double ti : t) s.push_back({ti, f(c, ti)});
    out.emplace_back(kAllChannels[c], std::move(s));
  }
  return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("three-row file parses with inferred 4 Hz rate") {
    const auto s = parse_sensor_csv("timestamp,HeartRate\n0,1.0\n0.25,2.0\n0.5,3.0\n",
                                    ChannelSchema(Channel::HeartRate));
    REQUIRE(s.samples().size() == 3);
    CHECK(s.samples()[2] == Sample{0.5, 3.0});
    REQUIRE(s.native_rate());
    CHECK(*s.native_rate() == doctest::Approx(4.0));
  }

  TEST_CASE("duplicate timestamps keep the last value") {
    const auto s = parse_sensor_csv("timestamp,HeartRate\n0,1\n0.25,2.0\n0.25,2.5\n0.5,3\n",
                                    ChannelSchema(Channel::HeartRate));
    REQUIRE(s.samples().size() == 3);
    CHECK(s.samples()[1] == Sample{0.25, 2.5});
  }

  TEST_CASE("malformed cell reports the physical line") {
    try {
      parse_sensor_csv("timestamp,HeartRate\n0,1\n0.25,2\n0.75, abc\n",
                       ChannelSchema(Channel::HeartRate));
      FAIL("expected MalformedRow");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MalformedRow);
      CHECK(e.line() == 4);
    }
  }

  TEST_CASE("empty, decreasing and missing-column inputs") {
    const ChannelSchema hr(Channel::HeartRate);
    CHECK(kind_of([&] { parse_sensor_csv("timestamp,HeartRate\n", hr); }) == ErrorKind::EmptyStream);
    CHECK(kind_of([&] { parse_sensor_csv("timestamp,HeartRate\n1,1\n0.5,2\n", hr); }) ==
          ErrorKind::NonMonotonicTime);
    CHECK(kind_of([&] { parse_sensor_csv("timestamp,Yaw\n1,1\n", hr); }) ==
          ErrorKind::MissingChannelColumn);
  }

  TEST_CASE("wide file column selection") {
    const std::string csv = "timestamp,Yaw,Pitch\n0,1,10\n1,2,20\n";
    const auto p = parse_sensor_csv(csv, ChannelSchema(Channel::Pitch));
    CHECK(p.samples()[1].value == 20.0);
    const auto y = parse_sensor_csv(csv, ChannelSchema(Channel::Roll, "Yaw"));
    CHECK(y.channel() == Channel::Roll);
    CHECK(y.samples()[1].value == 2.0);
  }

  TEST_CASE("serialize and re-parse round-trips samples exactly") {
    std::vector<Sample> samples;
    double t = 0.0;
    for (int i = 0; i < 200; ++i) {
      t += 0.1 + 0.37 * ((i * 7919) % 13) / 13.0;
      samples.push_back({t, std::sin(i * 0.731) * 1e3 / 3.0});
    }
    const SensorStream s(Channel::GSRConductance, samples);
    std::ostringstream out;
    write_sensor_csv(out, s);
    const auto back = parse_sensor_csv(out.str(), ChannelSchema(Channel::GSRConductance));
    CHECK(back.samples() == s.samples());
    CHECK_FALSE(back.native_rate());
  }

  TEST_CASE("linear channel resampled to 2 Hz stays equal to time") {
    std::vector<double> t;
    for (int i = 0; i <= 40; ++i) t.push_back(i * 0.25);
    const auto a = align_streams(all_channels(t, [](std::size_t, double ti) { return ti; }), 2.0);
    REQUIRE(a.timestamps.size() == 21);
    for (std::size_t i = 0; i < a.timestamps.size(); ++i)
      for (Eigen::Index c = 0; c < a.values.cols(); ++c)
        CHECK(a.values(static_cast<Eigen::Index>(i), c) == doctest::Approx(a.timestamps[i]).epsilon(1e-12));
  }

  TEST_CASE("overlap [1,3] at 1 Hz gives rows at 1,2,3") {
    auto streams = all_channels({0, 1, 2, 3, 4}, [](std::size_t c, double t) { return c + t; });
    streams[0] = SensorStream(kAllChannels[0], {{1, 0}, {2, 0}, {3, 0}});
    streams[1] = SensorStream(kAllChannels[1], {{0.5, 0}, {3, 0}, {5, 0}});
    const auto a = align_streams(streams, 1.0);
    CHECK(a.timestamps == std::vector<double>{1, 2, 3});
  }

  TEST_CASE("native timestamps are reproduced exactly when rates divide") {
    std::vector<double> t;
    for (int i = 0; i <= 80; ++i) t.push_back(i / 8.0);
    auto f = [](std::size_t c, double ti) { return std::cos(ti * (c + 1)) * 17.0 + c; };
    const auto streams = all_channels(t, f);
    for (double rate : {8.0, 4.0, 2.0, 1.0}) {
      const auto a = align_streams(streams, rate);
      for (std::size_t i = 0; i < a.timestamps.size(); ++i)
        for (std::size_t c = 0; c < kChannelCount; ++c)
          CHECK(std::abs(a.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) -
                         f(c, a.timestamps[i])) <= 1e-12);
    }
  }

  TEST_CASE("disjoint spans and absent channels") {
    auto streams = all_channels({0, 5, 10}, [](std::size_t, double) { return 1.0; });
    streams[3] = SensorStream(kAllChannels[3], {{20, 1}, {30, 1}});
    CHECK(kind_of([&] { align_streams(streams, 1.0); }) == ErrorKind::NoOverlap);
    streams.erase(streams.begin() + 3);
    try {
      align_streams(streams, 1.0);
      FAIL("expected MissingChannel");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingChannel);
      CHECK(e.subject() == "Temperature");
    }
  }

  TEST_CASE("phase markers validate ordering") {
    CHECK_NOTHROW(PhaseMarkers({0, 1200, 2400, 3600, 4800}));
    CHECK(kind_of([] { PhaseMarkers({0, 1200, 1200, 3600, 4800}); }) == ErrorKind::InvalidMarkers);
    CHECK(kind_of([] {
            PhaseMarkers({0, 1200, 2400, 3600, 4800}, PhaseMarkers::SubSegments{1300, 1250});
          }) == ErrorKind::InvalidMarkers);
    const auto m = parse_phase_markers("T1=0\nT2=1200\nT3=2400\nT4=3600\nT5=4800\nAS=1200\nM=1800\n");
    REQUIRE(m.sub_segments());
    CHECK(m.sub_segments()->task_start == 1800.0);
    CHECK(parse_phase_markers(format_phase_markers(m)).boundaries() == m.boundaries());
  }

  TEST_CASE("stress covers rows 1200..2399 at 1 Hz") {
    std::vector<double> t;
    for (int i = 0; i <= 4800; ++i) t.push_back(i);
    const auto seg = segment_phases(t, PhaseMarkers({0, 1200, 2400, 3600, 4800}));
    CHECK(seg.phases.at(Phase::Stress) == RowRange{1200, 2400});
    CHECK(seg.phases.at(Phase::PreStress) == RowRange{0, 1200});
    CHECK(seg.phases.at(Phase::Recovery) == RowRange{2400, 4801});
  }

  TEST_CASE("phase assignment is a partition") {
    std::vector<double> t;
    for (int i = 0; i < 1000; ++i) t.push_back(3.0 + i * 0.5);
    const auto seg = segment_phases(t, PhaseMarkers({10, 100, 200.25, 300, 400},
                                                    PhaseMarkers::SubSegments{120, 150}));
    REQUIRE(seg.row_phase.size() == t.size());
    std::size_t total = 0;
    for (const auto& [phase, range] : seg.phases) {
      total += range.size();
      for (std::size_t r = range.begin; r < range.end; ++r) CHECK(seg.row_phase[r] == phase);
    }
    CHECK(total == t.size());
    REQUIRE(seg.task);
    CHECK(t[seg.task->begin] >= 150.0);
  }

  TEST_CASE("marker past the recording is out of range") {
    CHECK(kind_of([] { segment_phases({0, 1, 2, 3}, PhaseMarkers({0, 1, 2, 3, 9})); }) ==
          ErrorKind::MarkerOutOfRange);
  }

  TEST_CASE("manifest round-trip and session loading") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "physioemo_ingest_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::string wide = "timestamp,Yaw,Pitch,Roll,Temperature,InternalADCVoltage,GSRResistance,GSRConductance\n";
    std::string hr = "timestamp,HeartRate\n";
    for (int i = 0; i <= 40; ++i) {
      wide += std::to_string(i * 0.25) + ",1,2,3,4,5,6,7\n";
      hr += std::to_string(i * 0.25) + "," + std::to_string(60 + i) + "\n";
    }
    text::write_file((dir / "dev.csv").string(), wide);
    text::write_file((dir / "hr.csv").string(), hr);
    text::write_file((dir / "markers.txt").string(), "T1=0\nT2=2\nT3=4\nT4=6\nT5=8\n");
    SessionManifest m;
    m.participant_id = "X1";
    m.markers_path = "markers.txt";
    m.labels_path = "fea.csv";
    for (auto c : kAllChannels) m.channel_sources[c] = {"dev.csv", std::string(channel_name(c))};
    m.channel_sources[Channel::HeartRate] = {"hr.csv", "HeartRate"};
    const auto json = format_manifest(m);
    const auto back = parse_manifest(json);
    CHECK(back.participant_id == "X1");
    CHECK(back.channel_sources == m.channel_sources);
    text::write_file((dir / kManifestFileName).string(), json);

    const auto s = load_session(dir.string(), 4.0);
    CHECK(s.participant_id == "X1");
    CHECK(s.aligned.values.rows() == 41);
    CHECK(s.aligned.values(40, static_cast<Eigen::Index>(Channel::HeartRate)) == 100.0);

    text::write_file((dir / "hr.csv").string(), "timestamp,HeartRate\n0,1\n0.5,zz\n");
    try {
      load_session(dir.string(), 4.0);
      FAIL("expected failure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MalformedRow);
      CHECK(std::string(e.what()).find("X1/hr.csv") != std::string::npos);
    }
    fs::remove_all(dir);
  }
}
