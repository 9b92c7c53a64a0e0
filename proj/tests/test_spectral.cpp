#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "oracles.hpp"
#include "specwalk/errors.hpp"
#include "specwalk/graph.hpp"
#include "specwalk/rng.hpp"
#include "specwalk/spectral.hpp"
#include "specwalk/synthetic.hpp"
#include "specwalk/wasserstein.hpp"

using namespace specwalk;

namespace {

Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

SymMatrix sym_from(std::initializer_list<double> vals, int n) {
  SymMatrix m;
  m.n = n;
  m.a.assign(vals);
  return m;
}

}  // namespace

TEST_CASE("normalized laplacian of tiny graphs") {
  SUBCASE("single vertex is the 1x1 zero matrix") {
    const Graph g(1, {});
    const SymMatrix l = normalized_laplacian(g, {0});
    CHECK(l.n == 1);
    CHECK(l.at(0, 0) == 0.0);
  }
  SUBCASE("one edge gives [[1,-1],[-1,1]]") {
    const Graph g(2, {{0, 1}});
    const SymMatrix l = normalized_laplacian(g, {0, 1});
    CHECK(l.at(0, 0) == doctest::Approx(1.0));
    CHECK(l.at(0, 1) == doctest::Approx(-1.0));
    CHECK(l.at(1, 0) == doctest::Approx(-1.0));
    CHECK(l.at(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("vertex isolated inside the member set has a zero row") {
    const Graph g(3, {{0, 1}});
    const SymMatrix l = normalized_laplacian(g, {0, 1, 2});
    CHECK(l.at(2, 2) == 0.0);
    CHECK(l.at(2, 0) == 0.0);
    CHECK(l.at(0, 0) == 1.0);
  }
}

TEST_CASE("jacobi eigenvalues on known matrices") {
  SUBCASE("identity") {
    const SymMatrix m = sym_from({1, 0, 0, 0, 1, 0, 0, 0, 1}, 3);
    for (double e : symmetric_eigenvalues(m)) CHECK(e == doctest::Approx(1.0));
  }
  SUBCASE("diagonal sorts ascending") {
    const SymMatrix m = sym_from({0, 0, 0, 0, 2, 0, 0, 0, 1}, 3);
    const auto eig = symmetric_eigenvalues(m);
    CHECK(eig[0] == doctest::Approx(0.0));
    CHECK(eig[1] == doctest::Approx(1.0));
    CHECK(eig[2] == doctest::Approx(2.0));
  }
  SUBCASE("triangle laplacian has spectrum {0, 1.5, 1.5}") {
    const SymMatrix l = normalized_laplacian(triangle(), {0, 1, 2});
    const auto eig = symmetric_eigenvalues(l);
    const auto expect = oracle::charpoly_eigenvalues(l);
    REQUIRE(eig.size() == 3);
    CHECK(eig[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(eig[1] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(eig[2] == doctest::Approx(1.5).epsilon(1e-9));
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(std::fabs(eig[i] - expect[i]) < 1e-8);
  }
  SUBCASE("asymmetric input is rejected") {
    SymMatrix m = sym_from({1, 0.5, 0, 1}, 2);
    CHECK_THROWS_AS(static_cast<void>(symmetric_eigenvalues(m, 1e-9)),
                    data_error);
  }
}

TEST_CASE("jacobi matches the characteristic-polynomial oracle on random "
          "symmetric matrices up to 5x5") {
  Rng rng(1234);
  for (int n = 2; n <= 5; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      SymMatrix m;
      m.n = n;
      m.a.assign(static_cast<std::size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const double v = 2.0 * rng.u01() - 1.0;
          m.at(i, j) = v;
          m.at(j, i) = v;
        }
      const auto fast = symmetric_eigenvalues(m);
      const auto ref = oracle::charpoly_eigenvalues(m);
      REQUIRE(fast.size() == ref.size());
      for (std::size_t i = 0; i < fast.size(); ++i)
        CHECK(std::fabs(fast[i] - ref[i]) < 1e-8);
    }
  }
}

TEST_CASE("node spectra satisfy the measure invariants") {
  SUBCASE("isolated vertex is the Dirac mass at 0") {
    const Graph g(2, {});
    const SpectrumMeasure mu = node_spectrum(g, 0, 2, 10);
    REQUIRE(mu.atoms.size() == 1);
    CHECK(mu.atoms[0] == doctest::Approx(0.0));
  }
  SUBCASE("triangle member sees {0, 1.5, 1.5}") {
    const SpectrumMeasure mu = node_spectrum(triangle(), 0, 2, 10);
    REQUIRE(mu.atoms.size() == 3);
    CHECK(mu.atoms[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(mu.atoms[1] == doctest::Approx(1.5));
    CHECK(mu.atoms[2] == doctest::Approx(1.5));
  }
  SUBCASE("path leaf with hops=1 sees the single-edge spectrum {0,2}") {
    const Graph g(3, {{0, 1}, {1, 2}});
    const SpectrumMeasure mu = node_spectrum(g, 0, 1, 10);
    REQUIRE(mu.atoms.size() == 2);
    CHECK(mu.atoms[0] == doctest::Approx(0.0));
    CHECK(mu.atoms[1] == doctest::Approx(2.0));
  }
  SUBCASE("range, zero-atom and trace identities on a real-sized graph") {
    const SynthDataset ds = generate_synthetic(celegans_like());
    const SpectraCache cache = build_spectra_cache(ds.graph, 2, 30, 2);
    for (Vertex v = 0; v < ds.graph.num_vertices(); ++v) {
      const auto& atoms = cache.at(v).atoms;
      REQUIRE(!atoms.empty());
      CHECK(atoms.front() >= -1e-8);
      CHECK(atoms.front() <= 1e-8);  // connected neighborhood: lambda_min = 0
      CHECK(atoms.back() <= 2.0 + 1e-8);
      const auto members = khop_vertices(ds.graph, v, 2, 30);
      const SymMatrix l = normalized_laplacian(ds.graph, members);
      int non_isolated = 0;
      for (int i = 0; i < l.n; ++i) non_isolated += l.at(i, i) > 0.5;
      double sum = 0.0;
      for (double a : atoms) sum += a;
      CHECK(std::fabs(sum - non_isolated) < 1e-6);
    }
  }
}

TEST_CASE("closed-form 1-D wasserstein against the transport LP oracle") {
  SUBCASE("identity of indiscernibles") {
    const std::vector<double> mu{0.3, 0.7, 1.1};
    for (double p : {1.0, 1.5, 2.0, 3.0})
      CHECK(wasserstein_1d_uniform(mu, mu, p) == doctest::Approx(0.0));
  }
  SUBCASE("two-atom example") {
    const std::vector<double> mu{0.0, 1.0}, nu{0.0, 2.0};
    CHECK(wasserstein_1d_uniform(mu, nu, 1.0) == doctest::Approx(0.5));
    CHECK(oracle::transport_lp_uniform(mu, nu, 1.0) == doctest::Approx(0.5));
  }
  SUBCASE("unequal sizes move half the mass") {
    const std::vector<double> mu{0.0}, nu{0.0, 2.0};
    CHECK(wasserstein_1d_uniform(mu, nu, 1.0) == doctest::Approx(1.0));
    CHECK(oracle::transport_lp_uniform(mu, nu, 1.0) == doctest::Approx(1.0));
  }
  SUBCASE("p < 1 is rejected") {
    const std::vector<double> mu{0.0}, nu{1.0};
    CHECK_THROWS_AS(static_cast<void>(wasserstein_1d_uniform(mu, nu, 0.5)),
                    usage_error);
  }
  SUBCASE("random mixed-size measures, three orders") {
    Rng rng(777);
    for (int rep = 0; rep < 300; ++rep) {
      const int na = 1 + static_cast<int>(rng.bounded(6));
      const int nb = 1 + static_cast<int>(rng.bounded(6));
      std::vector<double> mu, nu;
      for (int i = 0; i < na; ++i) mu.push_back(2.0 * rng.u01());
      for (int i = 0; i < nb; ++i) nu.push_back(2.0 * rng.u01());
      std::sort(mu.begin(), mu.end());
      std::sort(nu.begin(), nu.end());
      for (double p : {1.0, 2.0, 3.0}) {
        const double fast = wasserstein_1d_uniform(mu, nu, p);
        const double ref = oracle::transport_lp_uniform(mu, nu, p);
        CHECK(std::fabs(fast - ref) < 1e-9);
      }
    }
  }
  SUBCASE("equal-count shortcut agrees with the merge to 1e-12") {
    Rng rng(778);
    for (int rep = 0; rep < 100; ++rep) {
      const int kk = 2 + static_cast<int>(rng.bounded(5));
      std::vector<double> mu, nu;
      for (int i = 0; i < kk; ++i) mu.push_back(2.0 * rng.u01());
      for (int i = 0; i < kk; ++i) nu.push_back(2.0 * rng.u01());
      std::sort(mu.begin(), mu.end());
      std::sort(nu.begin(), nu.end());
      for (double p : {1.0, 2.0}) {
        double direct = 0.0;  // (1/k) sum_i |x_(i) - y_(i)|^p, sorted pairing
        for (int i = 0; i < kk; ++i)
          direct += std::pow(std::fabs(mu[static_cast<std::size_t>(i)] -
                                       nu[static_cast<std::size_t>(i)]),
                             p) /
                    kk;
        direct = std::pow(direct, 1.0 / p);
        CHECK(wasserstein_1d_uniform(mu, nu, p) ==
              doctest::Approx(direct).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("wasserstein metric axioms on sampled triples") {
  Rng rng(4242);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> a, b, c;
    const auto fill = [&](std::vector<double>& v) {
      const int kk = 1 + static_cast<int>(rng.bounded(5));
      for (int i = 0; i < kk; ++i) v.push_back(2.0 * rng.u01());
      std::sort(v.begin(), v.end());
    };
    fill(a);
    fill(b);
    fill(c);
    const double p = 1.0 + rng.u01() * 2.0;
    const double ab = wasserstein_1d_uniform(a, b, p);
    const double ba = wasserstein_1d_uniform(b, a, p);
    const double ac = wasserstein_1d_uniform(a, c, p);
    const double cb = wasserstein_1d_uniform(c, b, p);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= ac + cb + 1e-9);
  }
  // W_p = 0 iff equal sorted atom lists (uniform equal-count case).
  const std::vector<double> x{0.1, 0.5}, y{0.1, 0.5001};
  CHECK(wasserstein_1d_uniform(x, x, 2.0) == 0.0);
  CHECK(wasserstein_1d_uniform(x, y, 2.0) > 0.0);
}

TEST_CASE("spectral distance: symmetric, zero on isomorphic neighborhoods") {
  const Graph star(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const SpectraCache cache = build_spectra_cache(star, 2, 10, 1);
  CHECK(spectral_distance(cache, 1, 2, 2.0) == doctest::Approx(0.0));
  CHECK(spectral_distance(cache, 1, 0, 2.0) ==
        doctest::Approx(spectral_distance(cache, 0, 1, 2.0)));
  CHECK_THROWS_AS(static_cast<void>(spectral_distance(cache, 0, 99, 2.0)),
                  data_error);
}

TEST_CASE("wasserstein balls are monotone and anchored at v") {
  const SynthDataset ds = generate_synthetic(usair_like());
  const SpectraCache cache = build_spectra_cache(ds.graph, 2, 30, 2);
  const Vertex v = 17;

  std::vector<double> dists;
  for (Vertex u = 0; u < ds.graph.num_vertices(); ++u)
    dists.push_back(spectral_distance(cache, u, v, 2.0));
  std::sort(dists.begin(), dists.end());

  const auto b0 = wasserstein_ball(cache, v, 0.0, 2.0);
  CHECK(std::find(b0.begin(), b0.end(), v) != b0.end());
  const auto ball_all =
      wasserstein_ball(cache, v, std::numeric_limits<double>::infinity(), 2.0);
  CHECK(ball_all.size() == static_cast<std::size_t>(ds.graph.num_vertices()));

  std::size_t prev = 0;
  for (double c : {dists[5], dists[50], dists[150], dists[300]}) {
    const auto ball = wasserstein_ball(cache, v, c, 2.0);
    CHECK(ball.size() >= prev);
    prev = ball.size();
  }
  // Crossing one shell admits exactly the vertices at that distance.
  const double mid = dists[100];
  const auto below =
      wasserstein_ball(cache, v, std::nexttoward(mid, 0.0), 2.0);
  const auto at = wasserstein_ball(cache, v, mid, 2.0);
  std::size_t at_shell = 0;
  for (double d : dists) at_shell += (d == mid);
  CHECK(at.size() - below.size() == at_shell);
}

TEST_CASE("spectra cache round-trips in text and binary form") {
  const SynthDataset ds = generate_synthetic(infect_hyper_like());
  const SpectraCache cache = build_spectra_cache(ds.graph, 2, 20, 2);
  const auto tmp = std::filesystem::temp_directory_path();

  for (bool binary : {false, true}) {
    const std::string path =
        (tmp / (binary ? "sw_cache.bin" : "sw_cache.txt")).string();
    save_spectra_cache(cache, path, binary);
    const SpectraCache back = load_spectra_cache(path);
    CHECK(back.graph_digest == cache.graph_digest);
    CHECK(back.hops == cache.hops);
    CHECK(back.cap == cache.cap);
    REQUIRE(back.spectra.size() == cache.spectra.size());
    for (std::size_t v = 0; v < cache.spectra.size(); ++v) {
      REQUIRE(back.spectra[v].atoms.size() == cache.spectra[v].atoms.size());
      for (std::size_t i = 0; i < cache.spectra[v].atoms.size(); ++i)
        CHECK(back.spectra[v].atoms[i] ==
              doctest::Approx(cache.spectra[v].atoms[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("threaded and serial cache builds agree bitwise") {
  const SynthDataset ds = generate_synthetic(infect_hyper_like());
  const SpectraCache serial = build_spectra_cache(ds.graph, 2, 30, 1);
  const SpectraCache threaded = build_spectra_cache(ds.graph, 2, 30, 4);
  REQUIRE(serial.spectra.size() == threaded.spectra.size());
  for (std::size_t v = 0; v < serial.spectra.size(); ++v)
    CHECK(serial.spectra[v].atoms == threaded.spectra[v].atoms);
}
