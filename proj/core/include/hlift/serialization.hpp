#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "hlift/bevpool.hpp"
#include "hlift/binning.hpp"
#include "hlift/geometry.hpp"
#include "hlift/lifting.hpp"
#include "hlift/robustness.hpp"
#include "hlift/scene.hpp"

namespace hlift {

using nlohmann::json;

// JSON mappings. Parsers throw Error(Config) on missing or mistyped fields.

void to_json(json& j, const Intrinsics& k);
void from_json(const json& j, Intrinsics& k);
void to_json(json& j, const Extrinsics& e);
void from_json(const json& j, Extrinsics& e);
void to_json(json& j, const BinSpec& s);
void from_json(const json& j, BinSpec& s);
void to_json(json& j, const GridSpec& s);
void from_json(const json& j, GridSpec& s);
void to_json(json& j, const NoiseModel& n);
void from_json(const json& j, NoiseModel& n);
void to_json(json& j, const DisturbanceSpec& d);
void from_json(const json& j, DisturbanceSpec& d);
void to_json(json& j, const Box3D& b);
void from_json(const json& j, Box3D& b);
void to_json(json& j, const Scene& s);
void from_json(const json& j, Scene& s);

/// Rig document: {"id", "intrinsics", "extrinsics"} where extrinsics holds a
/// row-major ego->camera "rotation" (9 numbers) and "translation" (3, meters).
/// A "pose" block {position, yaw_deg, pitch_deg, roll_deg} may replace
/// "extrinsics".
json rig_to_json(const CameraRig& rig);
CameraRig rig_from_json(const json& j);

/// Calls from_json and converts library exceptions into Error(Config).
template <typename T>
T parse_json(const json& j, const char* what);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

CameraRig load_rig(const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

/// Shortest decimal form that round-trips the double; "nan" for NaN.
std::string format_number(double x);

/// Optional first line of every CSV artifact, e.g. "# config_hash=... seed=7".
struct CsvProvenance {
  std::string line;
};

void write_edges_csv(std::ostream& out, const BinSpec& spec, const CsvProvenance& prov = {});
void write_wedge_csv(std::ostream& out, const WedgeCloud& cloud, const CsvProvenance& prov = {});
void write_grid_csv(std::ostream& out, const BevGrid& grid, const CsvProvenance& prov = {});
void write_pixelmaps_csv(std::ostream& out, const PixelMaps& maps, const CsvProvenance& prov = {});
void write_histogram_csv(std::ostream& out, const Histogram& h, const CsvProvenance& prov = {});

}  // namespace hlift
