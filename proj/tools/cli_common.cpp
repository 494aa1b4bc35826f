#include "cli_common.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "CLI11.hpp"
#include "snowtrend/dataset.hpp"

namespace snowtrend::cli {

namespace {

// Parses a --set value as JSON when possible (numbers, bools, arrays),
// falling back to a plain string.
nlohmann::json parse_set_value(const std::string& text) {
  const nlohmann::json parsed =
      nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) return text;
  return parsed;
}

}  // namespace

void GlobalOptions::load() {
  config = nlohmann::json::object();
  if (!config_path.empty()) {
    const std::string text = read_text_file(config_path);
    config = nlohmann::json::parse(text, nullptr, false);
    if (config.is_discarded() || !config.is_object())
      throw std::runtime_error("config file " + config_path +
                               " is not a JSON object");
  }
  for (const std::string& entry : set_overrides) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("--set expects key=value, got '" + entry + "'");
    const std::string path = entry.substr(0, eq);
    nlohmann::json* node = &config;
    std::size_t pos = 0;
    while (true) {
      const std::size_t dot = path.find('.', pos);
      const std::string key = path.substr(pos, dot - pos);
      if (key.empty())
        throw std::runtime_error("--set has an empty key segment in '" +
                                 entry + "'");
      if (dot == std::string::npos) {
        (*node)[key] = parse_set_value(entry.substr(eq + 1));
        break;
      }
      node = &(*node)[key];
      if (!node->is_object()) *node = nlohmann::json::object();
      pos = dot + 1;
    }
  }
}

nlohmann::json GlobalOptions::section(const std::string& command) const {
  const auto it = config.find(command);
  if (it != config.end() && it->is_object()) return *it;
  return nlohmann::json::object();
}

bool option_given(const CLI::Option* opt) {
  return opt != nullptr && opt->count() > 0;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Manifest::Manifest(const std::string& out_dir, const std::string& command,
                   const GlobalOptions& global) {
  std::filesystem::create_directories(out_dir);
  path_ = (std::filesystem::path(out_dir) / "run_manifest.json").string();
  char hash[32];
  std::snprintf(hash, sizeof(hash), "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a64(global.config.dump())));
  doc_ = {{"command", command},
          {"version", kVersion},
          {"seed", global.seed},
          {"threads", global.threads},
          {"config", global.config},
          {"config_hash", hash},
          {"outputs", nlohmann::json::array()},
          {"completed", false}};
  write();
}

void Manifest::add_output(const std::string& name) {
  doc_["outputs"].push_back(name);
}

void Manifest::finish() {
  doc_["completed"] = true;
  write();
}

void Manifest::write() const { atomic_write_text(path_, doc_.dump(2) + "\n"); }

RegionSelector make_selector(const std::string& hemisphere,
                             const std::string& surface_type,
                             const std::string& region) {
  RegionSelector sel;
  if (hemisphere == "north") sel.hemisphere = HemisphereFilter::north;
  else if (hemisphere == "south") sel.hemisphere = HemisphereFilter::south;
  else if (hemisphere == "global") sel.hemisphere = HemisphereFilter::global;
  else
    throw std::runtime_error("hemisphere must be global, north or south, got '" +
                             hemisphere + "'");
  if (surface_type == "land") sel.surface = SurfaceFilter::land;
  else if (surface_type == "ocean") sel.surface = SurfaceFilter::ocean;
  else if (surface_type == "any") sel.surface = SurfaceFilter::any;
  else
    throw std::runtime_error("surface type must be any, land or ocean, got '" +
                             surface_type + "'");
  sel.region = region;
  return sel;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("expected an integer, got '" + s + "'");
  return v;
}

}  // namespace snowtrend::cli
