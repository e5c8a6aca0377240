#include "causal/record.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "causal/errors.hpp"

namespace causal {
namespace {

constexpr std::array<char, 4> kMagic{'S', 'P', 'K', 'C'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void fixed(T v) {
    std::array<char, sizeof(T)> buf;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    }
    out_.write(buf.data(), buf.size());
  }

  void varint(std::uint64_t v) {
    char buf[10];
    std::size_t n = 0;
    do {
      auto byte = static_cast<std::uint8_t>(v & 0x7f);
      v >>= 7;
      if (v) byte |= 0x80;
      buf[n++] = static_cast<char>(byte);
    } while (v);
    out_.write(buf, static_cast<std::streamsize>(n));
  }

  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T fixed() {
    std::array<char, sizeof(T)> buf;
    read(buf.data(), buf.size());
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf[i])) << (8 * i);
    }
    return static_cast<T>(v);
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      char c;
      read(&c, 1);
      const auto byte = static_cast<std::uint8_t>(c);
      v |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
      if (!(byte & 0x80)) return v;
    }
    throw IoError("record: varint too long");
  }

  void read(char* p, std::size_t n) {
    if (!in_.read(p, static_cast<std::streamsize>(n))) throw IoError("record: unexpected end of file");
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

}  // namespace

EpisodeRecord::EpisodeRecord(RecordHeader header) : header_(header) {
  if (header_.channels == 0 || header_.channels > 65536) {
    throw ConfigError("record channel count must be in [1, 65536]");
  }
}

void EpisodeRecord::append_frame(std::span<const Channel> active) {
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (active[k] >= header_.channels || (k > 0 && active[k] <= active[k - 1])) {
      throw StructuralError("frame channels must be ascending and below the channel count");
    }
  }
  indices_.insert(indices_.end(), active.begin(), active.end());
  offsets_.push_back(indices_.size());
}

void EpisodeRecord::add_event(const EnvEvent& event) {
  if (!events_.empty() && event.step <= events_.back().step) {
    throw StructuralError("record events must be in strictly increasing step order");
  }
  if (event.step < 0) throw StructuralError("negative event step");
  events_.push_back(event);
}

std::span<const Channel> EpisodeRecord::frame(Step t) const {
  const auto i = static_cast<std::size_t>(t);
  return std::span<const Channel>(indices_.data() + offsets_.at(i),
                                  indices_.data() + offsets_.at(i + 1));
}

std::vector<Step> EpisodeRecord::reward_steps() const {
  std::vector<Step> out;
  for (const auto& e : events_) {
    if (e.kind == EventKind::Reward) out.push_back(e.step);
  }
  return out;
}

std::vector<Step> EpisodeRecord::punishment_steps() const {
  std::vector<Step> out;
  for (const auto& e : events_) {
    if (e.kind == EventKind::Punishment) out.push_back(e.step);
  }
  return out;
}

void write_record(std::ostream& out, const EpisodeRecord& record) {
  Writer w(out);
  w.bytes(kMagic.data(), kMagic.size());
  w.fixed<std::uint32_t>(kVersion);
  w.fixed<std::uint32_t>(record.header().step_ms);
  w.fixed<std::uint32_t>(record.header().channels);
  w.fixed<std::uint64_t>(record.header().seed);
  w.fixed<std::uint64_t>(static_cast<std::uint64_t>(record.duration()));
  for (Step t = 0; t < record.duration(); ++t) {
    const auto frame = record.frame(t);
    w.varint(frame.size());
    for (const Channel c : frame) w.varint(c);
  }
  w.fixed<std::uint64_t>(record.events().size());
  for (const auto& e : record.events()) {
    w.fixed<std::uint8_t>(static_cast<std::uint8_t>(e.kind));
    w.fixed<std::uint64_t>(static_cast<std::uint64_t>(e.step));
  }
}

EpisodeRecord read_record(std::istream& in) {
  Reader r(in);
  std::array<char, 4> magic;
  r.read(magic.data(), magic.size());
  if (magic != kMagic) throw IoError("not a spike record (bad magic)");
  RecordHeader h;
  h.version = r.fixed<std::uint32_t>();
  if (h.version != kVersion) throw IoError("unsupported record version " + std::to_string(h.version));
  h.step_ms = r.fixed<std::uint32_t>();
  h.channels = r.fixed<std::uint32_t>();
  h.seed = r.fixed<std::uint64_t>();
  const auto steps = r.fixed<std::uint64_t>();
  if (h.channels == 0 || h.channels > 65536) throw IoError("record: bad channel count");

  EpisodeRecord record(h);
  std::vector<Channel> frame;
  for (std::uint64_t t = 0; t < steps; ++t) {
    const auto k = r.varint();
    if (k > h.channels) throw IoError("record: frame larger than channel count");
    frame.clear();
    for (std::uint64_t j = 0; j < k; ++j) {
      const auto c = r.varint();
      if (c >= h.channels) throw IoError("record: channel index out of range");
      frame.push_back(static_cast<Channel>(c));
    }
    try {
      record.append_frame(frame);
    } catch (const StructuralError& e) {
      throw IoError(std::string("record: ") + e.what());
    }
  }
  const auto n_events = r.fixed<std::uint64_t>();
  for (std::uint64_t i = 0; i < n_events; ++i) {
    const auto kind = r.fixed<std::uint8_t>();
    const auto step = r.fixed<std::uint64_t>();
    if (kind != 1 && kind != 2) throw IoError("record: bad event kind");
    if (step >= steps) throw IoError("record: event beyond the recorded duration");
    try {
      record.add_event({static_cast<EventKind>(kind), static_cast<Step>(step)});
    } catch (const StructuralError& e) {
      throw IoError(std::string("record: ") + e.what());
    }
  }
  if (!r.at_end()) throw IoError("record: trailing bytes");
  return record;
}

void save_record(const std::filesystem::path& path, const EpisodeRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_record(out, record);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

EpisodeRecord load_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_record(in);
}

void export_record_csv(std::ostream& out, const EpisodeRecord& record) {
  out << "step,kind,channel\n";
  auto ev = record.events().begin();
  for (Step t = 0; t < record.duration(); ++t) {
    for (const Channel c : record.frame(t)) out << t << ",spike," << c << '\n';
    if (ev != record.events().end() && ev->step == t) {
      out << t << ',' << (ev->kind == EventKind::Reward ? "reward" : "punishment") << ",\n";
      ++ev;
    }
  }
}

}  // namespace causal
