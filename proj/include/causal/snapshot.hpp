#pragma once

#include <filesystem>
#include <iosfwd>

#include "causal/neuron.hpp"

namespace causal {

// Full detector checkpoint as versioned text. Floats are written as C99 hex
// literals so every bit survives the round trip; reloading a snapshot and
// continuing the replay reproduces an uninterrupted run exactly.
class SnapshotCodec {
 public:
  static void write(std::ostream& out, const Detector& detector);
  static Detector read(std::istream& in);
};

void save_snapshot(const std::filesystem::path& path, const Detector& detector);
Detector load_snapshot(const std::filesystem::path& path);

}  // namespace causal
