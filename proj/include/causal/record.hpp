#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "causal/neuron.hpp"
#include "causal/pong.hpp"

namespace causal {

struct RecordHeader {
  std::uint32_t version = 1;
  std::uint32_t step_ms = 1;
  std::uint32_t channels = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const RecordHeader&, const RecordHeader&) = default;
};

// Replayable episode: sparse per-step spike frames plus the reward and
// punishment event table. Reward steps drive the dopamine line.
//
// File layout (little-endian):
//   "SPKC"  u32 version  u32 step_ms  u32 channels  u64 seed  u64 steps
//   per step: varint k, then k varint channel indices (ascending)
//   u64 event count, then per event: u8 kind (1 reward, 2 punishment), u64 step
class EpisodeRecord {
 public:
  EpisodeRecord() = default;
  explicit EpisodeRecord(RecordHeader header);

  void append_frame(std::span<const Channel> active);
  // Events must arrive in strictly increasing step order, at most one per step.
  void add_event(const EnvEvent& event);

  const RecordHeader& header() const { return header_; }
  std::size_t channels() const { return header_.channels; }
  Step duration() const { return static_cast<Step>(offsets_.size()) - 1; }
  std::span<const Channel> frame(Step t) const;
  const std::vector<EnvEvent>& events() const { return events_; }
  std::vector<Step> reward_steps() const;
  std::vector<Step> punishment_steps() const;
  std::uint64_t spike_count() const { return indices_.size(); }

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;

 private:
  RecordHeader header_;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<Channel> indices_;
  std::vector<EnvEvent> events_;
};

void write_record(std::ostream& out, const EpisodeRecord& record);
EpisodeRecord read_record(std::istream& in);
void save_record(const std::filesystem::path& path, const EpisodeRecord& record);
EpisodeRecord load_record(const std::filesystem::path& path);

// Human-readable dump: `step,kind,channel` with kind spike|reward|punishment.
void export_record_csv(std::ostream& out, const EpisodeRecord& record);

}  // namespace causal
