#include "twotime/lattice.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "twotime/version.hpp"

namespace twotime {

const char* to_string(Mode m) {
  return m == Mode::euclidean ? "euclidean" : "minkowski";
}

const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "open";
}

int LatticeGeometry::sites_per_slice() const {
  int n = 1;
  for (int d = 0; d < spatial_dims; ++d) n *= spatial_extent[d];
  return n;
}

int LatticeGeometry::total_sites() const { return sites_per_slice() * time_extent; }

double LatticeGeometry::cell_volume() const {
  double v = time_spacing;
  for (int d = 0; d < spatial_dims; ++d) v *= spatial_spacing;
  return v;
}

void LatticeGeometry::validate() const {
  if (spatial_dims < 0 || spatial_dims > 3)
    throw std::invalid_argument("geometry: spatial_dims must be in 0..3");
  for (int d = 0; d < spatial_dims; ++d)
    if (spatial_extent[d] < 1)
      throw std::invalid_argument("geometry: spatial_extent must be positive");
  if (time_extent < 1)
    throw std::invalid_argument("geometry: time_extent must be positive");
  if (!(spatial_spacing > 0.0) || !(time_spacing > 0.0))
    throw std::invalid_argument("geometry: spacings must be positive");
}

int spatial_index(const LatticeGeometry& g, const std::array<int, 3>& x) {
  int idx = 0;
  for (int d = g.spatial_dims - 1; d >= 0; --d) {
    if (x[d] < 0 || x[d] >= g.spatial_extent[d])
      throw std::out_of_range("spatial coordinate out of range");
    idx = idx * g.spatial_extent[d] + x[d];
  }
  return idx;
}

int site_index(const LatticeGeometry& g, int slice, int spatial) {
  if (slice < 0 || slice >= g.time_extent)
    throw std::out_of_range("slice index out of range");
  int sps = g.sites_per_slice();
  if (spatial < 0 || spatial >= sps)
    throw std::out_of_range("spatial index out of range");
  return slice * sps + spatial;
}

int slice_of_site(const LatticeGeometry& g, int site) {
  return site / g.sites_per_slice();
}

std::vector<NeighborLink> site_neighbors(const LatticeGeometry& g, int site) {
  g.validate();
  if (site < 0 || site >= g.total_sites())
    throw std::out_of_range("site index out of range");
  int sps = g.sites_per_slice();
  int slice = site / sps;
  int sp = site % sps;
  std::array<int, 3> x{0, 0, 0};
  int rem = sp;
  for (int d = 0; d < g.spatial_dims; ++d) {
    x[d] = rem % g.spatial_extent[d];
    rem /= g.spatial_extent[d];
  }

  std::vector<NeighborLink> out;
  out.reserve(2 * (g.spatial_dims + 1));
  for (int dir : {+1, -1}) {
    int s2 = slice + dir;
    if (s2 < 0 || s2 >= g.time_extent) {
      if (g.time_boundary == Boundary::periodic)
        s2 = (s2 + g.time_extent) % g.time_extent;
      else
        continue;
    }
    out.push_back({s2 * sps + sp, 0, dir});
  }
  for (int d = 0; d < g.spatial_dims; ++d) {
    int L = g.spatial_extent[d];
    for (int dir : {+1, -1}) {
      std::array<int, 3> y = x;
      y[d] += dir;
      if (y[d] < 0 || y[d] >= L) {
        if (g.spatial_boundary[d] == Boundary::periodic)
          y[d] = (y[d] + L) % L;
        else
          continue;
      }
      out.push_back({slice * sps + spatial_index(g, y), d + 1, dir});
    }
  }
  return out;
}

const cplx& LangevinState::at(int slice, int spatial) const {
  if (slice > present) throw std::out_of_range("slice beyond the present");
  return values[site_index(geo, slice, spatial)];
}

cplx& LangevinState::at(int slice, int spatial) {
  if (slice > present) throw std::out_of_range("slice beyond the present");
  return values[site_index(geo, slice, spatial)];
}

bool LangevinState::pinned(int slice) const {
  if (slice < 0 || slice >= geo.time_extent)
    throw std::out_of_range("slice index out of range");
  return slice_pinned[slice] != 0;
}

void LangevinState::pin_slice(int slice) {
  if (slice < 0 || slice > present)
    throw std::out_of_range("cannot pin a slice beyond the present");
  slice_pinned[slice] = 1;
}

LangevinState new_state(const LatticeGeometry& g, Mode mode, int initial_present) {
  g.validate();
  if (initial_present < 0 || initial_present >= g.time_extent)
    throw std::invalid_argument("initial_present must lie inside the time extent");
  LangevinState s;
  s.geo = g;
  s.mode = mode;
  s.values.assign(static_cast<std::size_t>(g.total_sites()), cplx{0.0, 0.0});
  s.slice_pinned.assign(static_cast<std::size_t>(g.time_extent), 0);
  s.present = initial_present;
  s.clock = initial_present * g.time_spacing;
  return s;
}

void grow_present(LangevinState& s, const SliceInitPolicy& policy,
                  const CounterRng& rng) {
  if (s.present + 1 >= s.geo.time_extent)
    throw std::out_of_range("grow_present: no slice left beyond the present");
  int sps = s.geo.sites_per_slice();
  int fresh = s.present + 1;
  std::uint64_t epoch = s.noise_epoch++;
  for (int sp = 0; sp < sps; ++sp) {
    cplx v{0.0, 0.0};
    switch (policy.kind) {
      case SliceInit::zero:
        break;
      case SliceInit::copy_previous_plus_noise:
        v = s.values[site_index(s.geo, s.present, sp)] +
            policy.noise_scale * rng.gaussian(epoch, static_cast<std::uint64_t>(sp));
        break;
      case SliceInit::gaussian_free_field:
        v = policy.noise_scale * rng.gaussian(epoch, static_cast<std::uint64_t>(sp));
        break;
    }
    s.values[site_index(s.geo, fresh, sp)] = v;
  }
  s.present = fresh;
  // With interleaved integration the clock already reached present*a_t, so
  // growth only reconciles; in pure growth sequences this advances by a_t.
  s.clock = std::max(s.clock, s.present * s.geo.time_spacing);
}

namespace {

nlohmann::json geometry_to_json(const LatticeGeometry& g) {
  nlohmann::json j;
  j["spatial_dims"] = g.spatial_dims;
  j["spatial_extent"] = g.spatial_extent;
  j["spatial_spacing"] = g.spatial_spacing;
  j["time_extent"] = g.time_extent;
  j["time_spacing"] = g.time_spacing;
  std::array<std::string, 3> sb;
  for (int d = 0; d < 3; ++d) sb[d] = to_string(g.spatial_boundary[d]);
  j["spatial_boundary"] = sb;
  j["time_boundary"] = to_string(g.time_boundary);
  return j;
}

Boundary boundary_from(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw std::invalid_argument("unknown boundary kind: " + s);
}

LatticeGeometry geometry_from_json(const nlohmann::json& j) {
  LatticeGeometry g;
  g.spatial_dims = j.at("spatial_dims").get<int>();
  g.spatial_extent = j.at("spatial_extent").get<std::array<int, 3>>();
  g.spatial_spacing = j.at("spatial_spacing").get<double>();
  g.time_extent = j.at("time_extent").get<int>();
  g.time_spacing = j.at("time_spacing").get<double>();
  auto sb = j.at("spatial_boundary").get<std::array<std::string, 3>>();
  for (int d = 0; d < 3; ++d) g.spatial_boundary[d] = boundary_from(sb[d]);
  g.time_boundary = boundary_from(j.at("time_boundary").get<std::string>());
  g.validate();
  return g;
}

}  // namespace

std::string checkpoint_to_json(const LangevinState& s, const CheckpointExtra& x) {
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["geometry"] = geometry_to_json(s.geo);
  j["mode"] = to_string(s.mode);
  j["clock"] = s.clock;
  j["present"] = s.present;
  j["noise_epoch"] = s.noise_epoch;
  j["pinned"] = s.slice_pinned;
  std::vector<double> re(s.values.size()), im(s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    re[i] = s.values[i].real();
    im[i] = s.values[i].imag();
  }
  j["values_re"] = re;
  j["values_im"] = im;
  j["master_seed"] = x.master_seed;
  j["replica"] = x.replica;
  j["step_index"] = x.step_index;
  j["config_hash"] = x.config_hash;
  return j.dump();
}

void checkpoint_from_json(const std::string& text, LangevinState& s,
                          CheckpointExtra& x) {
  nlohmann::json j = nlohmann::json::parse(text);
  int version = j.at("version").get<int>();
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint version mismatch");
  LatticeGeometry g = geometry_from_json(j.at("geometry"));
  std::string mode = j.at("mode").get<std::string>();
  s = new_state(g, mode == "euclidean" ? Mode::euclidean : Mode::minkowski);
  s.clock = j.at("clock").get<double>();
  s.present = j.at("present").get<int>();
  s.noise_epoch = j.at("noise_epoch").get<std::uint64_t>();
  s.slice_pinned = j.at("pinned").get<std::vector<std::uint8_t>>();
  auto re = j.at("values_re").get<std::vector<double>>();
  auto im = j.at("values_im").get<std::vector<double>>();
  if (re.size() != s.values.size() || im.size() != s.values.size())
    throw std::runtime_error("checkpoint value count mismatch");
  for (std::size_t i = 0; i < re.size(); ++i) s.values[i] = cplx{re[i], im[i]};
  if (s.present < 0 || s.present >= g.time_extent)
    throw std::runtime_error("checkpoint present index out of range");
  x.master_seed = j.at("master_seed").get<std::uint64_t>();
  x.replica = j.at("replica").get<std::uint32_t>();
  x.step_index = j.at("step_index").get<std::uint64_t>();
  x.config_hash = j.at("config_hash").get<std::string>();
}

void write_checkpoint_file(const std::string& path, const LangevinState& s,
                           const CheckpointExtra& x) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
  f << checkpoint_to_json(s, x);
}

bool read_checkpoint_file(const std::string& path, LangevinState& s,
                          CheckpointExtra& x) {
  std::ifstream f(path);
  if (!f) return false;
  std::stringstream buf;
  buf << f.rdbuf();
  checkpoint_from_json(buf.str(), s, x);
  return true;
}

}  // namespace twotime
