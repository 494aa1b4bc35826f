#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "snowtrend/grid.hpp"

namespace CLI {
class App;
class Option;
}  // namespace CLI

namespace snowtrend::cli {

inline constexpr const char* kVersion = "0.1.0";

// Options shared by every subcommand. The config file is a JSON object with
// one section per command ({"synth": {"nlat": 24}, ...}); --set key=value
// overrides apply dotted paths on top of it. Command-line flags win over both.
struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> set_overrides;
  std::uint64_t seed = 0;
  int threads = 1;
  nlohmann::json config = nlohmann::json::object();

  // (Re)builds `config` from the file plus the --set overrides.
  void load();
  nlohmann::json section(const std::string& command) const;
};

bool option_given(const CLI::Option* opt);

// Config fills in options the command line left at their defaults.
template <typename T>
void cfg(const CLI::Option* opt, const nlohmann::json& section,
         const std::string& key, T& var) {
  if (option_given(opt)) return;
  const auto it = section.find(key);
  if (it == section.end()) return;
  var = it->template get<T>();
}

std::uint64_t fnv1a64(const std::string& bytes);

// Run ledger written into the output directory: opened with completed=false,
// atomically rewritten with the output list on finish. Contains no
// timestamps, so repeated runs produce identical bytes.
class Manifest {
public:
  Manifest(const std::string& out_dir, const std::string& command,
           const GlobalOptions& global);
  void add_output(const std::string& name);
  void finish();

private:
  void write() const;
  std::string path_;
  nlohmann::json doc_;
};

RegionSelector make_selector(const std::string& hemisphere,
                             const std::string& surface_type,
                             const std::string& region);

// Strict integer parse for CSV cells like the year column.
int parse_int(const std::string& s);

void register_synth(CLI::App& app, GlobalOptions& global);
void register_wetbulb(CLI::App& app, GlobalOptions& global);
void register_fuse(CLI::App& app, GlobalOptions& global);
void register_snowmask(CLI::App& app, GlobalOptions& global);
void register_spr(CLI::App& app, GlobalOptions& global);
void register_trend(CLI::App& app, GlobalOptions& global);
void register_validate(CLI::App& app, GlobalOptions& global);

}  // namespace snowtrend::cli
