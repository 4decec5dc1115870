#pragma once

#include <map>
#include <string>

#include "adaptnet/mlp.hpp"

namespace adaptnet {

/// Named networks plus the training rng state. Serialized as JSON with a
/// format version; doubles round-trip exactly.
struct Checkpoint {
  static constexpr int kVersion = 1;

  std::map<std::string, Mlp> networks;
  std::string rng_state;
  long long episode = 0;

  std::string to_json() const;
  static Checkpoint from_json(const std::string& text);
  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace adaptnet
