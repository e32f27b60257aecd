#include <doctest.h>

#include <cmath>
#include <numbers>
#include <filesystem>
#include <random>
#include <vector>

#include "vortexlab/empirical_measure.hpp"
#include "vortexlab/io.hpp"

using namespace vlab;

namespace {
ScalarField random_field(NodeGrid g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  ScalarField f(g);
  for (double& v : f.values) v = n(rng);
  return f;
}

std::vector<NormSpec> all_specs() {
  return {NormSpec::sup_norm(), NormSpec::lp_norm(1), NormSpec::lp_norm(2), NormSpec::lp_norm(3.5),
          NormSpec::sobolev_norm(-1, 0.1), NormSpec::sobolev_norm(0.5, 0.1)};
}
}  // namespace

TEST_CASE("norm examples") {
  const NodeGrid g(17);
  const ScalarField two = ScalarField::sample(g, [](double, double) { return -2.0; });
  CHECK(norm(two, NormSpec::sup_norm()) == 2.0);
  CHECK(norm(two, NormSpec::lp_norm(1)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(norm(two, NormSpec::lp_norm(2)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(norm(two, NormSpec::lp_norm(4)) == doctest::Approx(2.0).epsilon(1e-14));
  // constants are eigenfunctions with eigenvalue zero
  CHECK(norm(two, NormSpec::sobolev_norm(-1, 0.3)) == doctest::Approx(2.0).epsilon(1e-13));

  const ScalarField x = ScalarField::sample(g, [](double a, double) { return a; });
  CHECK(norm(x, NormSpec::lp_norm(1)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(norm(x, NormSpec::lp_norm(2)) == doctest::Approx(std::sqrt(1.0 / 3)).epsilon(1e-3));
  CHECK(norm(x, NormSpec::sup_norm()) == 1.0);

  ScalarField spike(g);
  spike.at(3, 5) = -3.0;
  CHECK(norm(spike, NormSpec::sup_norm()) == 3.0);
  CHECK(norm(spike, NormSpec::lp_norm(1)) == doctest::Approx(3.0 / 256));
  CHECK(norm(ScalarField(g), NormSpec::lp_norm(2)) == 0.0);
}

TEST_CASE("norm parsing") {
  CHECK(NormSpec::parse("sup", 1).kind == NormSpec::Kind::sup);
  CHECK(NormSpec::parse("l2", 1).p == 2.0);
  CHECK(NormSpec::parse("l1.5", 1).p == 1.5);
  const NormSpec h = NormSpec::parse("h-1", 0.25);
  CHECK(h.kind == NormSpec::Kind::sobolev);
  CHECK(h.alpha == -1.0);
  CHECK(h.nu == 0.25);
  CHECK(h.label() == "h-1");
  CHECK(NormSpec::parse("l2", 1).label() == "l2");
  CHECK_THROWS(NormSpec::parse("l0.5", 1));
  CHECK_THROWS(NormSpec::parse("lx", 1));
  CHECK_THROWS(NormSpec::parse("w2", 1));
  CHECK_THROWS(norm(ScalarField(NodeGrid(5)), NormSpec::lp_norm(0.5)));
}

TEST_CASE("sobolev norm of a single mode") {
  const ScalarField f = ScalarField::sample(NodeGrid(33), [](double x, double) { return std::cos(std::numbers::pi * x); });
  const double nu = 0.3;
  for (double alpha : {-1.0, 0.0, 0.5, 2.0}) {
    const double want = std::sqrt(0.5) * std::pow(1 + nu * std::numbers::pi * std::numbers::pi, alpha / 2);
    CHECK(norm(f, NormSpec::sobolev_norm(alpha, nu)) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("h0 equals l2") {
  const ScalarField f = random_field(NodeGrid(33), 1);
  CHECK(norm(f, NormSpec::sobolev_norm(0, 0.7)) == doctest::Approx(norm(f, NormSpec::lp_norm(2))).epsilon(1e-13));
}

TEST_CASE("norm axioms") {
  const NodeGrid g(33);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const ScalarField f = random_field(g, 2 * s), h = random_field(g, 2 * s + 1);
    for (const auto& spec : all_specs()) {
      CHECK(norm(f + h, spec) <= (norm(f, spec) + norm(h, spec)) * (1 + 1e-13));
      CHECK(norm(-2.5 * f, spec) == doctest::Approx(2.5 * norm(f, spec)).epsilon(1e-13));
    }
  }
}

TEST_CASE("sobolev norms increase with alpha") {
  const ScalarField f = random_field(NodeGrid(33), 9);
  double last = 0.0;
  for (double alpha : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0}) {
    const double v = norm(f, NormSpec::sobolev_norm(alpha, 0.1));
    CHECK(v > last);
    last = v;
  }
}

TEST_CASE("the heat semigroup contracts l2 and sobolev norms") {
  KernelParams p;
  p.nu = 0.2;
  const ScalarField f = random_field(NodeGrid(33), 4);
  for (double t : {1e-4, 1e-2, 0.5}) {
    const ScalarField g = apply_semigroup(f, t, p);
    for (const auto& spec : {NormSpec::lp_norm(2), NormSpec::sobolev_norm(-1, 0.2), NormSpec::sobolev_norm(1, 0.2)}) {
      CHECK(norm(g, spec) <= norm(f, spec) * (1 + 1e-13));
    }
  }
}

TEST_CASE("trajectory errors") {
  const NodeGrid g(9);
  std::vector<ScalarField> ref, part;
  for (int k = 0; k < 4; ++k) {
    ref.push_back(random_field(g, k));
    part.push_back(ref.back() + ScalarField::sample(g, [k](double, double) { return 0.1 * k; }));
  }
  const TrajectoryError e = trajectory_error(part, ref, NormSpec::lp_norm(2));
  REQUIRE(e.per_time.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(e.per_time[k] == doctest::Approx(0.1 * k).epsilon(1e-12));
  CHECK(e.sup_over_time == e.per_time[3]);
  const TrajectoryError zero = trajectory_error(ref, ref, NormSpec::sup_norm());
  CHECK(zero.sup_over_time == 0.0);

  std::vector<ScalarField> short_run(ref.begin(), ref.begin() + 2);
  CHECK_THROWS(trajectory_error(short_run, ref, NormSpec::lp_norm(2)));
  std::vector<ScalarField> other = ref;
  other[2] = ScalarField(NodeGrid(17));
  CHECK_THROWS(trajectory_error(other, ref, NormSpec::lp_norm(2)));
}

TEST_CASE("norms survive a snapshot file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "vortexlab_test_empirical";
  std::filesystem::create_directories(dir);
  const ScalarField f = random_field(NodeGrid(17), 12);
  SnapshotHeader h;
  h.time = 0.3;
  h.n = 16;
  h.grid = 17;
  h.epsilon = 0.125;
  h.nu = 0.1;
  h.speed_bound = 2.0;
  h.seed = 5;
  write_snapshot(dir / snapshot_name(3), h, f);
  const Snapshot s = read_snapshot(dir / "t_3.snap");
  CHECK(s.field.values == f.values);
  CHECK(s.header.seed == 5);
  for (const auto& spec : all_specs()) CHECK(norm(s.field, spec) == norm(f, spec));
  std::filesystem::remove_all(dir);
}
