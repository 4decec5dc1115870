#include "adaptnet/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adaptnet/error.hpp"

namespace adaptnet {

using nlohmann::ordered_json;

std::string Checkpoint::to_json() const {
  ordered_json doc;
  doc["format"] = "adaptnet-checkpoint";
  doc["version"] = kVersion;
  doc["episode"] = episode;
  doc["rng_state"] = rng_state;
  ordered_json nets = ordered_json::object();
  for (const auto& [name, net] : networks) {
    ordered_json n;
    n["layers"] = net.layer_sizes();
    n["output"] = net.output_activation() == OutputActivation::Tanh ? "tanh" : "linear";
    n["parameters"] = net.flat_parameters();
    nets[name] = std::move(n);
  }
  doc["networks"] = std::move(nets);
  return doc.dump();
}

Checkpoint Checkpoint::from_json(const std::string& text) {
  Checkpoint cp;
  try {
    const auto doc = ordered_json::parse(text);
    if (doc.at("format").get<std::string>() != "adaptnet-checkpoint") throw InvalidInput("checkpoint: unknown format");
    if (doc.at("version").get<int>() != kVersion) throw InvalidInput("checkpoint: unsupported version");
    cp.episode = doc.at("episode").get<long long>();
    cp.rng_state = doc.at("rng_state").get<std::string>();
    for (const auto& [name, n] : doc.at("networks").items()) {
      const auto out = n.at("output").get<std::string>();
      if (out != "tanh" && out != "linear") throw InvalidInput("checkpoint: unknown output activation " + out);
      Mlp net(n.at("layers").get<std::vector<std::size_t>>(),
              out == "tanh" ? OutputActivation::Tanh : OutputActivation::Linear);
      net.set_flat_parameters(n.at("parameters").get<std::vector<double>>());
      cp.networks.emplace(name, std::move(net));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("checkpoint: ") + e.what());
  }
  return cp;
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path);
  out << to_json() << '\n';
  if (!out) throw IoError("failed writing checkpoint " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace adaptnet
