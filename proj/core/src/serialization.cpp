#include "hlift/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "hlift/error.hpp"

namespace hlift {

namespace {

Mat3 mat3_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 9) throw Error(ErrorCode::kConfig, "expected 9 numbers for a row-major 3x3 matrix");
  Mat3 m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return m;
}

Vec3 vec3_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw Error(ErrorCode::kConfig, "expected 3 numbers for a vector");
  return {v[0], v[1], v[2]};
}

json mat3_to(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

json vec3_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void write_provenance(std::ostream& out, const CsvProvenance& prov) {
  if (!prov.line.empty()) out << "# " << prov.line << '\n';
}

}  // namespace

template <typename T>
T parse_json(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string(what) + ": " + e.what());
  }
}

template BinSpec parse_json<BinSpec>(const json&, const char*);
template GridSpec parse_json<GridSpec>(const json&, const char*);
template NoiseModel parse_json<NoiseModel>(const json&, const char*);
template DisturbanceSpec parse_json<DisturbanceSpec>(const json&, const char*);
template Scene parse_json<Scene>(const json&, const char*);
template Intrinsics parse_json<Intrinsics>(const json&, const char*);
template Extrinsics parse_json<Extrinsics>(const json&, const char*);

void to_json(json& j, const Intrinsics& k) {
  j = json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"image_w", k.image_w}, {"image_h", k.image_h}};
}

void from_json(const json& j, Intrinsics& k) {
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.image_w = j.at("image_w").get<int>();
  k.image_h = j.at("image_h").get<int>();
}

void to_json(json& j, const Extrinsics& e) {
  j = json{{"rotation", mat3_to(e.rotation)}, {"translation", vec3_to(e.translation)}};
}

void from_json(const json& j, Extrinsics& e) {
  e.rotation = mat3_from(j.at("rotation"));
  e.translation = vec3_from(j.at("translation"));
}

void to_json(json& j, const BinSpec& s) {
  j = json{{"strategy", std::string(strategy_name(s.strategy))},
           {"n_bins", s.n_bins},
           {"range_min", s.range_min},
           {"range_max", s.range_max},
           {"alpha", s.alpha}};
}

void from_json(const json& j, BinSpec& s) {
  s.strategy = parse_strategy(j.at("strategy").get<std::string>());
  s.n_bins = j.at("n_bins").get<int>();
  s.range_min = j.at("range_min").get<double>();
  s.range_max = j.at("range_max").get<double>();
  s.alpha = j.value("alpha", 1.0);
}

void to_json(json& j, const GridSpec& s) {
  j = json{{"x_min", s.x_min}, {"x_max", s.x_max}, {"y_min", s.y_min}, {"y_max", s.y_max},
           {"res_x", s.res_x}, {"res_y", s.res_y}, {"channels", s.channels}};
}

void from_json(const json& j, GridSpec& s) {
  const GridSpec d;
  s.x_min = j.value("x_min", d.x_min);
  s.x_max = j.value("x_max", d.x_max);
  s.y_min = j.value("y_min", d.y_min);
  s.y_max = j.value("y_max", d.y_max);
  s.res_x = j.value("res_x", d.res_x);
  s.res_y = j.value("res_y", d.res_y);
  s.channels = j.value("channels", d.channels);
}

void to_json(json& j, const NoiseModel& n) {
  j = json{{"kind", std::string(noise_kind_name(n.kind))},
           {"sigma_bins", n.sigma_bins},
           {"bias_m", n.bias_m},
           {"seed", n.seed}};
}

void from_json(const json& j, NoiseModel& n) {
  n.kind = parse_noise_kind(j.at("kind").get<std::string>());
  n.sigma_bins = j.value("sigma_bins", 0.0);
  n.bias_m = j.value("bias_m", 0.0);
  n.seed = j.value("seed", std::uint64_t{0});
}

void to_json(json& j, const DisturbanceSpec& d) {
  j = json{{"sigma_roll_deg", d.sigma_roll_deg},
           {"sigma_pitch_deg", d.sigma_pitch_deg},
           {"seed", d.seed},
           {"n_trials", d.n_trials}};
}

void from_json(const json& j, DisturbanceSpec& d) {
  d.sigma_roll_deg = j.value("sigma_roll_deg", kDefaultDisturbanceSigmaDeg);
  d.sigma_pitch_deg = j.value("sigma_pitch_deg", kDefaultDisturbanceSigmaDeg);
  d.seed = j.value("seed", std::uint64_t{0});
  d.n_trials = j.value("n_trials", 1);
}

void to_json(json& j, const Box3D& b) {
  j = json{{"x", b.x}, {"y", b.y}, {"z", b.z}, {"l", b.l}, {"w", b.w}, {"h", b.h}, {"theta", b.theta}};
}

void from_json(const json& j, Box3D& b) {
  b.x = j.at("x").get<double>();
  b.y = j.at("y").get<double>();
  b.z = j.at("z").get<double>();
  b.l = j.at("l").get<double>();
  b.w = j.at("w").get<double>();
  b.h = j.at("h").get<double>();
  b.theta = j.at("theta").get<double>();
}

void to_json(json& j, const Scene& s) {
  json objects = json::array();
  for (const auto& o : s.objects) {
    json box = o.box;
    box["class"] = std::string(class_name(o.cls));
    objects.push_back(box);
  }
  j = json{{"objects", objects},
           {"extent", {{"x_min", s.extent.x_min}, {"x_max", s.extent.x_max},
                       {"y_min", s.extent.y_min}, {"y_max", s.extent.y_max}}},
           {"rng_seed", s.rng_seed}};
}

void from_json(const json& j, Scene& s) {
  s.objects.clear();
  for (const auto& o : j.at("objects")) {
    SceneObject so;
    so.cls = parse_class(o.value("class", std::string("car")));
    so.box = o.get<Box3D>();
    s.objects.push_back(so);
  }
  const auto& e = j.at("extent");
  s.extent = {e.at("x_min").get<double>(), e.at("x_max").get<double>(), e.at("y_min").get<double>(),
              e.at("y_max").get<double>()};
  s.rng_seed = j.value("rng_seed", std::uint64_t{0});
}

json rig_to_json(const CameraRig& rig) {
  return json{{"id", rig.id()}, {"intrinsics", rig.intrinsics()}, {"extrinsics", rig.extrinsics()}};
}

CameraRig rig_from_json(const json& j) {
  try {
    const auto k = j.at("intrinsics").get<Intrinsics>();
    Extrinsics e;
    if (j.contains("extrinsics")) {
      e = j.at("extrinsics").get<Extrinsics>();
    } else if (j.contains("pose")) {
      const auto& p = j.at("pose");
      CameraPose pose;
      pose.position = vec3_from(p.at("position"));
      pose.yaw = deg_to_rad(p.value("yaw_deg", 0.0));
      pose.pitch_down = deg_to_rad(p.value("pitch_deg", 0.0));
      pose.roll = deg_to_rad(p.value("roll_deg", 0.0));
      e = extrinsics_from_pose(pose);
    } else {
      throw Error(ErrorCode::kConfig, "rig: need an \"extrinsics\" or \"pose\" block");
    }
    return CameraRig(k, e, j.value("id", std::string{}));
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kConfig, std::string("rig: ") + ex.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

CameraRig load_rig(const std::filesystem::path& path) { return rig_from_json(read_json_file(path)); }

Scene load_scene(const std::filesystem::path& path) {
  Scene s = parse_json<Scene>(read_json_file(path), "scene");
  s.validate();
  return s;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_edges_csv(std::ostream& out, const BinSpec& spec, const CsvProvenance& prov) {
  write_provenance(out, prov);
  out << "index,edge\n";
  const auto edges = bin_edges(spec);
  for (std::size_t i = 0; i < edges.size(); ++i) out << i << ',' << format_number(edges[i]) << '\n';
}

void write_wedge_csv(std::ostream& out, const WedgeCloud& cloud, const CsvProvenance& prov) {
  write_provenance(out, prov);
  out << "x,y,z,weight";
  for (int c = 0; c < cloud.channels; ++c) out << ",f" << c;
  out << '\n';
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const Vec3& q = cloud.positions[p];
    out << format_number(q.x()) << ',' << format_number(q.y()) << ',' << format_number(q.z()) << ','
        << format_number(cloud.weights[p]);
    for (double f : cloud.feature(p)) out << ',' << format_number(f);
    out << '\n';
  }
}

void write_grid_csv(std::ostream& out, const BevGrid& grid, const CsvProvenance& prov) {
  write_provenance(out, prov);
  out << "ix,iy,hits";
  for (int c = 0; c < grid.spec.channels; ++c) out << ",c" << c;
  out << '\n';
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const std::size_t m = static_cast<std::size_t>(iy) * grid.nx + ix;
      if (grid.hit_count[m] == 0) continue;
      out << ix << ',' << iy << ',' << grid.hit_count[m];
      for (double v : grid.cell(ix, iy)) out << ',' << format_number(v);
      out << '\n';
    }
  }
}

void write_pixelmaps_csv(std::ostream& out, const PixelMaps& maps, const CsvProvenance& prov) {
  write_provenance(out, prov);
  out << "row,col,u,v,kind,object,depth,height\n";
  for (std::size_t m = 0; m < maps.size(); ++m) {
    const Vec2 px = maps.pixel(m);
    const char* kind = maps.kind[m] == HitKind::kSky ? "sky" : maps.kind[m] == HitKind::kGround ? "ground" : "box";
    out << m / maps.width << ',' << m % maps.width << ',' << format_number(px.x()) << ','
        << format_number(px.y()) << ',' << kind << ',' << maps.object[m] << ','
        << format_number(maps.depth[m]) << ',' << format_number(maps.height_above_ground[m]) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const Histogram& h, const CsvProvenance& prov) {
  write_provenance(out, prov);
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double lo = h.origin + static_cast<double>(i) * h.bin_width;
    out << format_number(lo) << ',' << format_number(lo + h.bin_width) << ',' << h.counts[i] << '\n';
  }
}

}  // namespace hlift
