#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <set>
#include <tuple>

#include "twotime/lattice.hpp"

using namespace twotime;

namespace {

LatticeGeometry square(int L) {
  LatticeGeometry g;
  g.spatial_dims = 1;
  g.spatial_extent = {L, 1, 1};
  g.time_extent = L;
  g.time_boundary = Boundary::periodic;
  return g;
}

std::uint64_t bits_of(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  return u;
}

}  // namespace

TEST_CASE("geometry counts and volume element") {
  LatticeGeometry g = square(8);
  g.spatial_spacing = 0.5;
  g.time_spacing = 0.25;
  g.validate();
  CHECK(g.sites_per_slice() == 8);
  CHECK(g.total_sites() == 64);
  CHECK(g.cell_volume() == doctest::Approx(0.5 * 0.25));

  LatticeGeometry wl;  // worldline: no spatial axes at all
  wl.spatial_dims = 0;
  wl.time_extent = 16;
  wl.validate();
  CHECK(wl.sites_per_slice() == 1);
  CHECK(wl.cell_volume() == doctest::Approx(1.0));
}

TEST_CASE("geometry validation rejects bad inputs") {
  LatticeGeometry g = square(4);
  g.spatial_dims = 4;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = square(4);
  g.time_extent = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = square(4);
  g.spatial_extent = {0, 1, 1};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = square(4);
  g.time_spacing = 0.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = square(4);
  g.spatial_spacing = -1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("site indexing round trip") {
  LatticeGeometry g;
  g.spatial_dims = 2;
  g.spatial_extent = {3, 4, 1};
  g.time_extent = 5;
  g.validate();
  for (int t = 0; t < g.time_extent; ++t)
    for (int x1 = 0; x1 < 4; ++x1)
      for (int x0 = 0; x0 < 3; ++x0) {
        int sp = spatial_index(g, {x0, x1, 0});
        CHECK(sp == x0 + 3 * x1);
        int site = site_index(g, t, sp);
        CHECK(site == t * g.sites_per_slice() + sp);
        CHECK(slice_of_site(g, site) == t);
      }
}

TEST_CASE("neighbors on a periodic square") {
  LatticeGeometry g = square(4);
  int site = site_index(g, 1, 2);
  auto nb = site_neighbors(g, site);
  REQUIRE(nb.size() == 4);
  std::set<std::tuple<int, int, int>> got;
  for (const auto& l : nb) got.insert({l.site, l.axis, l.dir});
  std::set<std::tuple<int, int, int>> want = {
      {site_index(g, 2, 2), 0, +1},
      {site_index(g, 0, 2), 0, -1},
      {site_index(g, 1, 3), 1, +1},
      {site_index(g, 1, 1), 1, -1},
  };
  CHECK(got == want);
}

TEST_CASE("open time boundary drops the outward links") {
  LatticeGeometry g = square(4);
  g.time_boundary = Boundary::open;
  auto first = site_neighbors(g, site_index(g, 0, 1));
  auto last = site_neighbors(g, site_index(g, 3, 1));
  for (const auto& l : first) CHECK_FALSE((l.axis == 0 && l.dir == -1));
  for (const auto& l : last) CHECK_FALSE((l.axis == 0 && l.dir == +1));
  CHECK(first.size() == 3);
  CHECK(last.size() == 3);
}

TEST_CASE("periodic extent-1 axis yields self links") {
  LatticeGeometry g;
  g.spatial_dims = 0;
  g.time_extent = 1;
  g.time_boundary = Boundary::periodic;
  auto nb = site_neighbors(g, 0);
  for (const auto& l : nb) CHECK(l.site == 0);
}

TEST_CASE("state accessors respect the present frontier") {
  LatticeGeometry g = square(4);
  g.time_boundary = Boundary::open;
  LangevinState s = new_state(g, Mode::euclidean, 1);
  CHECK(s.present == 1);
  CHECK(s.stored_sites() == 8);
  s.at(1, 3) = 2.5;
  CHECK(s.at(1, 3) == cplx{2.5, 0.0});
  CHECK_THROWS_AS(s.at(2, 0), std::out_of_range);
  CHECK_THROWS_AS(s.at(1, 4), std::out_of_range);
  CHECK_FALSE(s.pinned(0));
  s.pin_slice(0);
  CHECK(s.pinned(0));
}

TEST_CASE("growth fills only the revealed slice") {
  LatticeGeometry g = square(4);
  g.time_boundary = Boundary::open;
  LangevinState s = new_state(g, Mode::euclidean, 1);
  for (int x = 0; x < 4; ++x) {
    s.at(0, x) = 0.25 * x;
    s.at(1, x) = 1.0 + 0.25 * x;
  }
  auto history = s.values;
  auto rng = CounterRng::make(11, 0, StreamPurpose::slice_init);

  SUBCASE("zero fill") {
    grow_present(s, {SliceInit::zero, 0.0}, rng);
    CHECK(s.present == 2);
    for (int x = 0; x < 4; ++x) CHECK(s.at(2, x) == cplx{0.0, 0.0});
  }
  SUBCASE("copy previous with zero kick copies exactly") {
    grow_present(s, {SliceInit::copy_previous_plus_noise, 0.0}, rng);
    for (int x = 0; x < 4; ++x)
      CHECK(bits_of(s.at(2, x).real()) == bits_of(s.at(1, x).real()));
  }
  // either way the history slices stay bit-identical
  for (int k = 0; k < 8; ++k)
    CHECK(bits_of(s.values[k].real()) == bits_of(history[k].real()));
}

TEST_CASE("growth past the block end throws") {
  LatticeGeometry g = square(4);
  LangevinState s = new_state(g, Mode::euclidean, 3);
  auto rng = CounterRng::make(1, 0, StreamPurpose::slice_init);
  CHECK_THROWS_AS(grow_present(s, {SliceInit::zero, 0.0}, rng),
                  std::out_of_range);
}

TEST_CASE("growth is a pure function of the rng stream") {
  LatticeGeometry g = square(4);
  LangevinState a = new_state(g, Mode::euclidean, 0);
  LangevinState b = new_state(g, Mode::euclidean, 0);
  auto rng = CounterRng::make(99, 3, StreamPurpose::slice_init);
  SliceInitPolicy pol{SliceInit::copy_previous_plus_noise, 0.7};
  grow_present(a, pol, rng);
  grow_present(b, pol, rng);
  REQUIRE(a.values.size() == b.values.size());
  for (size_t k = 0; k < a.values.size(); ++k) CHECK(a.values[k] == b.values[k]);
  CHECK(a.noise_epoch == b.noise_epoch);
}

TEST_CASE("free-field fill draws at the requested scale") {
  LatticeGeometry g;
  g.spatial_dims = 1;
  g.spatial_extent = {4096, 1, 1};
  g.time_extent = 2;
  g.time_boundary = Boundary::open;
  LangevinState s = new_state(g, Mode::euclidean, 0);
  auto rng = CounterRng::make(5, 0, StreamPurpose::slice_init);
  const double sd = 2.0;
  grow_present(s, {SliceInit::gaussian_free_field, sd}, rng);
  double sum = 0.0, sum2 = 0.0;
  for (int x = 0; x < 4096; ++x) {
    double v = s.at(1, x).real();
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / 4096.0;
  double var = sum2 / 4096.0 - mean * mean;
  CHECK(std::abs(mean) < 4.0 * sd / 64.0);            // 4 sigma of the mean
  CHECK(std::abs(var / (sd * sd) - 1.0) < 4.0 * std::sqrt(2.0 / 4096.0));
}

TEST_CASE("checkpoint round trip is bit exact") {
  LatticeGeometry g = square(3);
  LangevinState s = new_state(g, Mode::minkowski, 2);
  for (int t = 0; t <= 2; ++t)
    for (int x = 0; x < 3; ++x)
      s.at(t, x) = cplx{1.0 / 3.0 + t, std::sqrt(2.0) * x - 1.0};
  s.pin_slice(1);
  s.clock = 0.737;
  s.noise_epoch = 42;
  CheckpointExtra x;
  x.master_seed = 0xDEADBEEFCAFEF00DULL;
  x.replica = 7;
  x.step_index = 1234567;
  x.config_hash = "00ff00ff00ff00ff";

  std::string text = checkpoint_to_json(s, x);
  LangevinState r = new_state(g, Mode::euclidean, 0);
  CheckpointExtra rx;
  checkpoint_from_json(text, r, rx);

  CHECK(r.mode == Mode::minkowski);
  CHECK(r.present == 2);
  CHECK(bits_of(r.clock) == bits_of(s.clock));
  CHECK(r.noise_epoch == 42);
  CHECK(r.pinned(1));
  CHECK_FALSE(r.pinned(0));
  REQUIRE(r.values.size() == s.values.size());
  for (size_t k = 0; k < s.values.size(); ++k) {
    CHECK(bits_of(r.values[k].real()) == bits_of(s.values[k].real()));
    CHECK(bits_of(r.values[k].imag()) == bits_of(s.values[k].imag()));
  }
  CHECK(rx.master_seed == x.master_seed);
  CHECK(rx.replica == 7);
  CHECK(rx.step_index == 1234567);
  CHECK(rx.config_hash == x.config_hash);

  CHECK_THROWS(checkpoint_from_json("{\"not\": \"a checkpoint\"}", r, rx));
}

TEST_CASE("checkpoint file round trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "twotime_ckpt_test";
  fs::create_directories(dir);
  std::string path = (dir / "state.json").string();

  LatticeGeometry g = square(3);
  LangevinState s = new_state(g, Mode::euclidean, 1);
  s.at(0, 0) = 0.1;
  CheckpointExtra x;
  x.step_index = 9;
  write_checkpoint_file(path, s, x);

  LangevinState r = new_state(g, Mode::euclidean, 0);
  CheckpointExtra rx;
  REQUIRE(read_checkpoint_file(path, r, rx));
  CHECK(r.at(0, 0) == cplx{0.1, 0.0});
  CHECK(rx.step_index == 9);

  CHECK_FALSE(read_checkpoint_file((dir / "missing.json").string(), r, rx));
  fs::remove_all(dir);
}
