#include <doctest.h>

#include <fstream>
#include <sstream>

#include "causal/errors.hpp"
#include "causal/experiment.hpp"
#include "causal/record.hpp"

using namespace causal;

namespace {

std::string bytes(const EpisodeRecord& r) {
  std::ostringstream out(std::ios::binary);
  write_record(out, r);
  return out.str();
}

EpisodeRecord small_record() {
  EpisodeRecord r(RecordHeader{1, 1, 300, 42});
  const std::vector<Channel> a{0, 5, 299};
  const std::vector<Channel> b{};
  const std::vector<Channel> c{128, 200};
  r.append_frame(a);
  r.append_frame(b);
  r.append_frame(c);
  r.add_event({EventKind::Reward, 0});
  r.add_event({EventKind::Punishment, 2});
  return r;
}

}  // namespace

TEST_CASE("record accessors") {
  const auto r = small_record();
  CHECK(r.duration() == 3);
  CHECK(r.channels() == 300);
  CHECK(r.frame(0).size() == 3);
  CHECK(r.frame(1).empty());
  CHECK(r.frame(2)[1] == 200);
  CHECK(r.reward_steps() == std::vector<Step>{0});
  CHECK(r.punishment_steps() == std::vector<Step>{2});
  CHECK(r.spike_count() == 5);
}

TEST_CASE("record byte layout") {
  const auto b = bytes(small_record());
  CHECK(b.substr(0, 4) == "SPKC");
  // Header: magic, version, step_ms, channels, seed, steps.
  CHECK(static_cast<unsigned char>(b[4]) == 1);
  CHECK(static_cast<unsigned char>(b[12]) == 300 % 256);
  CHECK(static_cast<unsigned char>(b[13]) == 300 / 256);
  CHECK(static_cast<unsigned char>(b[16]) == 42);
  CHECK(static_cast<unsigned char>(b[24]) == 3);
  // First frame: count 3, then 0, 5, 299 (varint 0xAB 0x02).
  CHECK(static_cast<unsigned char>(b[32]) == 3);
  CHECK(static_cast<unsigned char>(b[35]) == 0xAB);
  CHECK(static_cast<unsigned char>(b[36]) == 0x02);
}

TEST_CASE("record round trip is byte identical") {
  const auto r = small_record();
  const auto b = bytes(r);
  std::istringstream in(b, std::ios::binary);
  const auto back = read_record(in);
  CHECK(back == r);
  CHECK(bytes(back) == b);
}

TEST_CASE("pong record round trip through a file") {
  PongRecordOptions o;
  o.duration_steps = 20000;
  o.seed = 3;
  const auto r = record_pong(o);
  CHECK(r.header().channels == 133);
  const auto path = std::filesystem::temp_directory_path() / "causal_test_record.spkc";
  save_record(path, r);
  const auto back = load_record(path);
  CHECK(back == r);
  save_record(path, back);
  std::ifstream f(path, std::ios::binary);
  const std::string on_disk((std::istreambuf_iterator<char>(f)), {});
  CHECK(on_disk == bytes(r));
  std::filesystem::remove(path);
}

TEST_CASE("corrupt records are rejected") {
  const auto b = bytes(small_record());
  const auto reject = [](const std::string& data) {
    std::istringstream in(data, std::ios::binary);
    CHECK_THROWS_AS(read_record(in), IoError);
  };
  reject("");
  reject("SPKD" + b.substr(4));
  reject(b.substr(0, b.size() - 1));
  reject(b + "x");
  auto bad_version = b;
  bad_version[4] = 2;
  reject(bad_version);
  auto descending = b;
  descending[33] = 9;  // frame 0 becomes 9, 5, 299
  reject(descending);
  auto bad_kind = b;
  bad_kind[b.size() - 9] = 7;
  reject(bad_kind);
}

TEST_CASE("record construction rules") {
  EpisodeRecord r(RecordHeader{1, 1, 4, 0});
  const std::vector<Channel> out_of_range{4};
  const std::vector<Channel> unsorted{2, 1};
  CHECK_THROWS_AS(r.append_frame(out_of_range), StructuralError);
  CHECK_THROWS_AS(r.append_frame(unsorted), StructuralError);
  r.append_frame({});
  r.append_frame({});
  r.add_event({EventKind::Reward, 1});
  CHECK_THROWS(r.add_event({EventKind::Punishment, 1}));
  CHECK_THROWS(r.add_event({EventKind::Reward, 0}));
}

TEST_CASE("CSV export") {
  std::ostringstream out;
  export_record_csv(out, small_record());
  CHECK(out.str() ==
        "step,kind,channel\n0,spike,0\n0,spike,5\n0,spike,299\n0,reward,\n2,spike,128\n"
        "2,spike,200\n2,punishment,\n");
}

TEST_CASE("missing record file is an I/O error") {
  CHECK_THROWS_AS(load_record("/nonexistent/record.spkc"), IoError);
}
