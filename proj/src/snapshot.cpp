#include "causal/snapshot.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "causal/errors.hpp"

namespace causal {
namespace {

constexpr const char* kMagic = "causal-detector-snapshot";
constexpr int kVersion = 1;

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string opt(const std::optional<Step>& v) {
  return v ? std::to_string(*v) : std::string("-");
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream expect(const std::string& key) {
    std::string line;
    if (!std::getline(in_, line)) throw IoError("snapshot truncated before '" + key + "'");
    std::istringstream ss(line);
    std::string got;
    ss >> got;
    if (got != key) throw IoError("snapshot: expected '" + key + "', found '" + got + "'");
    return ss;
  }

 private:
  std::istream& in_;
};

std::string token(std::istringstream& ss) {
  std::string tok;
  if (!(ss >> tok)) throw IoError("snapshot: missing value");
  return tok;
}

double parse_hex(std::istringstream& ss) {
  const std::string tok = token(ss);
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) throw IoError("snapshot: bad float '" + tok + "'");
  return v;
}

long long parse_int(const std::string& tok) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw IoError("snapshot: bad integer '" + tok + "'");
  }
  return v;
}

long long parse_int(std::istringstream& ss) { return parse_int(token(ss)); }

std::optional<Step> parse_opt(std::istringstream& ss) {
  const std::string tok = token(ss);
  if (tok == "-") return std::nullopt;
  return parse_int(tok);
}

}  // namespace

void SnapshotCodec::write(std::ostream& out, const Detector& detector) {
  const auto& cfg = detector.config();
  const auto& st = detector.state();
  out << kMagic << ' ' << kVersion << '\n';
  out << "d_H_bar " << hex(cfg.d_bar) << '\n';
  out << "w_min " << hex(cfg.w_min) << '\n';
  out << "w_max " << hex(cfg.w_max) << '\n';
  out << "d_s " << hex(cfg.d_s) << '\n';
  out << "T_P " << cfg.t_p << '\n';
  out << "channels " << st.synapses.size() << '\n';
  out << "stability " << hex(st.stability) << '\n';
  out << "current_step " << st.current_step << '\n';
  out << "tss_phase " << (st.tss.active() ? "active" : "inactive") << '\n';
  out << "tss_onset " << opt(st.tss.onset_) << '\n';
  out << "tss_last_post " << opt(st.tss.last_post_) << '\n';
  out << "tss_recent_onset " << opt(st.tss.recent_onset_) << '\n';
  out << "tss_count " << st.tss_count << '\n';
  out << "fire_count " << st.fire_count << '\n';
  out << "abs_weight_change " << hex(st.abs_weight_change) << '\n';
  for (std::size_t i = 0; i < st.synapses.size(); ++i) {
    const auto& s = st.synapses[i];
    out << "synapse " << i << ' ' << hex(s.resource) << ' ' << opt(s.last_presyn_spike_step)
        << ' ' << (s.depressed_in_current_tss ? 1 : 0) << ' '
        << opt(s.pending_depression_step) << '\n';
  }
  out << "end\n";
}

Detector SnapshotCodec::read(std::istream& in) {
  LineReader r(in);
  {
    auto ss = r.expect(kMagic);
    if (parse_int(ss) != kVersion) throw IoError("snapshot: unsupported version");
  }
  PlasticityConfig cfg;
  { auto ss = r.expect("d_H_bar"); cfg.d_bar = parse_hex(ss); }
  { auto ss = r.expect("w_min"); cfg.w_min = parse_hex(ss); }
  { auto ss = r.expect("w_max"); cfg.w_max = parse_hex(ss); }
  { auto ss = r.expect("d_s"); cfg.d_s = parse_hex(ss); }
  { auto ss = r.expect("T_P"); cfg.t_p = parse_int(ss); }
  std::size_t channels = 0;
  {
    auto ss = r.expect("channels");
    const auto n = parse_int(ss);
    if (n < 0 || n > 65536) throw IoError("snapshot: bad channel count");
    channels = static_cast<std::size_t>(n);
  }
  DetectorState st;
  st.tss = TssTracker(cfg.t_p);
  { auto ss = r.expect("stability"); st.stability = parse_hex(ss); }
  { auto ss = r.expect("current_step"); st.current_step = parse_int(ss); }
  {
    auto ss = r.expect("tss_phase");
    const auto phase = token(ss);
    if (phase != "active" && phase != "inactive") throw IoError("snapshot: bad tss_phase");
    st.tss.phase_ = phase == "active" ? TssTracker::Phase::Active : TssTracker::Phase::Inactive;
  }
  { auto ss = r.expect("tss_onset"); st.tss.onset_ = parse_opt(ss); }
  { auto ss = r.expect("tss_last_post"); st.tss.last_post_ = parse_opt(ss); }
  { auto ss = r.expect("tss_recent_onset"); st.tss.recent_onset_ = parse_opt(ss); }
  if (st.tss.active() && (!st.tss.onset_ || !st.tss.last_post_)) {
    throw IoError("snapshot: active TSS without onset");
  }
  { auto ss = r.expect("tss_count"); st.tss_count = static_cast<std::uint64_t>(parse_int(ss)); }
  { auto ss = r.expect("fire_count"); st.fire_count = static_cast<std::uint64_t>(parse_int(ss)); }
  { auto ss = r.expect("abs_weight_change"); st.abs_weight_change = parse_hex(ss); }
  st.synapses.resize(channels);
  for (std::size_t i = 0; i < channels; ++i) {
    auto ss = r.expect("synapse");
    if (static_cast<std::size_t>(parse_int(ss)) != i) throw IoError("snapshot: synapse out of order");
    auto& s = st.synapses[i];
    s.resource = parse_hex(ss);
    s.last_presyn_spike_step = parse_opt(ss);
    s.depressed_in_current_tss = parse_int(ss) != 0;
    s.pending_depression_step = parse_opt(ss);
  }
  r.expect("end");
  try {
    return Detector(cfg, std::move(st));
  } catch (const ConfigError& e) {
    throw IoError(std::string("snapshot: ") + e.what());
  }
}

void save_snapshot(const std::filesystem::path& path, const Detector& detector) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  SnapshotCodec::write(out, detector);
  if (!out) throw IoError("failed writing " + path.string());
}

Detector load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return SnapshotCodec::read(in);
}

}  // namespace causal
