#pragma once

// Run manifests: enough to re-execute a command and check that its inputs are
// unchanged. No wall-clock data, so identical runs write identical manifests.

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ventsim/errors.hpp"
#include "ventsim/hash.hpp"

#ifndef VENTSIM_VERSION
#define VENTSIM_VERSION "0.0.0"
#endif

namespace ventsim {

inline constexpr const char* kToolVersion = VENTSIM_VERSION;

struct ManifestInput {
  std::string role;  // scenario, weather, coeffs, ...
  std::string path;
  std::string hash;  // fnv1a64 hex of the file contents
};

struct RunManifest {
  std::string command;
  std::vector<std::string> args;  // argv after the program name
  std::string version = kToolVersion;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::string models;
  std::string coeffs_source;
  std::vector<ManifestInput> inputs;
  std::vector<std::string> outputs;  // file names relative to out_dir

  void add_input(const std::string& role, const std::string& path) { inputs.push_back({role, path, hex64(hash_file(path))}); }
};

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "ventsim";
  j["version"] = m.version;
  j["command"] = m.command;
  j["args"] = m.args;
  j["out_dir"] = m.out_dir;
  if (m.seed) j["seed"] = *m.seed;
  if (m.samples) j["samples"] = *m.samples;
  if (!m.models.empty()) j["models"] = m.models;
  if (!m.coeffs_source.empty()) j["coeffs_source"] = m.coeffs_source;
  auto& in = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& i : m.inputs) in.push_back({{"role", i.role}, {"path", i.path}, {"fnv1a64", i.hash}});
  j["outputs"] = m.outputs;
  return j;
}

inline RunManifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError(path, 0, "cannot open manifest");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    m.version = j.at("version").get<std::string>();
    m.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("samples")) m.samples = j["samples"].get<std::size_t>();
    m.models = j.value("models", "");
    m.coeffs_source = j.value("coeffs_source", "");
    for (const auto& i : j.at("inputs")) {
      m.inputs.push_back({i.at("role").get<std::string>(), i.at("path").get<std::string>(),
                          i.at("fnv1a64").get<std::string>()});
    }
    m.outputs = j.value("outputs", std::vector<std::string>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path, 0, std::string("malformed manifest: ") + e.what());
  }
}

/// Inputs whose current content hash differs from the recorded one.
inline std::vector<std::string> changed_inputs(const RunManifest& m) {
  std::vector<std::string> out;
  for (const auto& i : m.inputs) {
    if (hex64(hash_file(i.path)) != i.hash) out.push_back(i.path);
  }
  return out;
}

}  // namespace ventsim
