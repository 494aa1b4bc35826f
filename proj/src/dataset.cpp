#include "snowtrend/dataset.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace snowtrend {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559,
              "binary32 storage requires IEEE-754 floats");

std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0);
  std::vector<char> buf(static_cast<std::size_t>(size));
  if (!in.read(buf.data(), size))
    throw std::runtime_error("short read on " + path);
  return buf;
}

json parse_header(const std::string& dir) {
  const std::string path = dir + "/header.json";
  json h;
  try {
    h = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed header " + path + ": " + e.what());
  }
  return h;
}

GeoGrid grid_from_json(const json& j) {
  GeoGrid g;
  try {
    g.lat_start = j.at("lat_start").get<double>();
    g.lon_start = j.at("lon_start").get<double>();
    g.dlat = j.at("dlat").get<double>();
    g.dlon = j.at("dlon").get<double>();
    g.nlat = j.at("nlat").get<int>();
    g.nlon = j.at("nlon").get<int>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed grid header: ") + e.what());
  }
  validate_grid(g);
  return g;
}

json grid_to_json(const GeoGrid& g) {
  return json{{"lat_start", g.lat_start}, {"lon_start", g.lon_start},
              {"dlat", g.dlat},           {"dlon", g.dlon},
              {"nlat", g.nlat},           {"nlon", g.nlon}};
}

// data.f32 is little-endian on disk; byteswap on big-endian hosts.
void decode_f32(const std::vector<char>& bytes, std::vector<float>& out) {
  out.resize(bytes.size() / 4);
  std::memcpy(out.data(), bytes.data(), bytes.size());
  if constexpr (std::endian::native == std::endian::big) {
    for (float& v : out) {
      std::uint32_t u;
      std::memcpy(&u, &v, 4);
      u = __builtin_bswap32(u);
      std::memcpy(&v, &u, 4);
    }
  }
}

std::vector<char> encode_f32(const std::vector<float>& values) {
  std::vector<char> bytes(values.size() * 4);
  std::memcpy(bytes.data(), values.data(), bytes.size());
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < bytes.size(); i += 4)
      std::swap(bytes[i], bytes[i + 3]), std::swap(bytes[i + 1], bytes[i + 2]);
  }
  return bytes;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void atomic_write_bytes(const std::string& path, const void* data,
                        std::size_t size) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create " + tmp);
    out.write(static_cast<const char*>(data),
              static_cast<std::streamsize>(size));
    if (!out) throw std::runtime_error("write failed on " + tmp);
  }
  fs::rename(tmp, path);
}

void atomic_write_text(const std::string& path, const std::string& text) {
  atomic_write_bytes(path, text.data(), text.size());
}

GridField read_dataset(const std::string& dir) {
  const json h = parse_header(dir);
  GridField f;
  try {
    f.grid = grid_from_json(h.at("grid"));
    f.units = h.at("units").get<std::string>();
    f.variable = h.at("variable").get<std::string>();
    for (const auto& t : h.at("times"))
      f.times.push_back(Date::parse(t.get<std::string>()));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed header in " + dir + ": " + e.what());
  }

  const std::string data_path = dir + "/data.f32";
  const auto bytes = read_bytes(data_path);
  const std::size_t expected = f.times.size() * f.grid.size() * 4;
  if (bytes.size() != expected)
    throw std::runtime_error("extent mismatch in " + data_path + ": " +
                             std::to_string(bytes.size()) + " bytes, expected " +
                             std::to_string(expected));
  decode_f32(bytes, f.values);
  validate_field(f);
  return f;
}

void write_dataset(const GridField& field, const std::string& dir) {
  validate_field(field);
  fs::create_directories(dir);
  json h;
  h["grid"] = grid_to_json(field.grid);
  h["units"] = field.units;
  h["variable"] = field.variable;
  h["times"] = json::array();
  for (const Date& d : field.times) h["times"].push_back(d.to_string());
  atomic_write_text(dir + "/header.json", h.dump(2) + "\n");
  const auto bytes = encode_f32(field.values);
  atomic_write_bytes(dir + "/data.f32", bytes.data(), bytes.size());
}

SurfaceMask read_surface_mask(const std::string& dir) {
  const json h = parse_header(dir);
  SurfaceMask m;
  try {
    m.grid = grid_from_json(h.at("grid"));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed header in " + dir + ": " + e.what());
  }

  const auto bytes = read_bytes(dir + "/data.u8");
  if (bytes.size() != m.grid.size())
    throw std::runtime_error("extent mismatch in " + dir + "/data.u8");
  m.surface.assign(bytes.begin(), bytes.end());

  if (fs::exists(dir + "/regions.u8")) {
    const auto rbytes = read_bytes(dir + "/regions.u8");
    if (rbytes.size() != m.grid.size())
      throw std::runtime_error("extent mismatch in " + dir + "/regions.u8");
    m.region.assign(rbytes.begin(), rbytes.end());
    json labels;
    try {
      labels = json::parse(read_text_file(dir + "/regions.json")).at("labels");
    } catch (const json::exception& e) {
      throw std::runtime_error("malformed regions.json in " + dir + ": " +
                               e.what());
    }
    std::size_t max_code = 0;
    for (const auto& [code, name] : labels.items())
      max_code = std::max(max_code, std::size_t(std::stoul(code)));
    m.region_names.assign(max_code + 1, "");
    for (const auto& [code, name] : labels.items())
      m.region_names[std::stoul(code)] = name.get<std::string>();
  }
  validate_mask(m);
  return m;
}

void write_surface_mask(const SurfaceMask& mask, const std::string& dir) {
  validate_mask(mask);
  fs::create_directories(dir);
  json h;
  h["grid"] = grid_to_json(mask.grid);
  h["units"] = "flag";
  h["variable"] = "surface";
  h["times"] = json::array();
  atomic_write_text(dir + "/header.json", h.dump(2) + "\n");
  atomic_write_bytes(dir + "/data.u8", mask.surface.data(),
                     mask.surface.size());
  if (mask.has_regions()) {
    atomic_write_bytes(dir + "/regions.u8", mask.region.data(),
                       mask.region.size());
    json labels = json::object();
    for (std::size_t c = 1; c < mask.region_names.size(); ++c)
      if (!mask.region_names[c].empty())
        labels[std::to_string(c)] = mask.region_names[c];
    atomic_write_text(dir + "/regions.json",
                      json{{"labels", labels}}.dump(2) + "\n");
  }
}

}  // namespace snowtrend
