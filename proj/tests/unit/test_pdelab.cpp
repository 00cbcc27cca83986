#include "grasspod/error.hpp"
#include "grasspod/pdelab.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace grasspod;

TEST_SUITE("pdelab") {
  TEST_CASE("burgers with zero amplitude stays at rest") {
    BurgersSpec s;
    s.a = 0.0;
    CHECK(run_burgers(s).data.cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("burgers conserves the spatial mean") {
    BurgersSpec s;
    s.a = 2.2;
    s.nu = 0.003;
    const Matrix d = run_burgers(s).data;
    CHECK(d.rows() == 256);
    CHECK(d.cols() == 101);
    const double m0 = d.col(0).mean();
    for (Index k = 0; k < d.cols(); ++k) CHECK(std::abs(d.col(k).mean() - m0) < 1e-10);
  }

  TEST_CASE("burgers self-convergence at (1.0, 0.02)") {
    BurgersSpec coarse;
    coarse.nu = 0.02;
    BurgersSpec fine = coarse;
    fine.nx = 512;
    const Vector uc = run_burgers(coarse).data.rightCols(1);
    const Vector uf_all = run_burgers(fine).data.rightCols(1);
    Vector uf(256);
    for (Index j = 0; j < 256; ++j) uf(j) = uf_all(2 * j);
    CHECK((uc - uf).norm() / uf.norm() < 0.01);
  }

  TEST_CASE("burgers validation") {
    BurgersSpec s;
    s.nu = 0.0;
    CHECK_THROWS_AS(run_burgers(s), InvalidArgument);
  }

  TEST_CASE("beam at rest without loads") {
    BeamSpec s;
    s.nx = 60;
    s.load1_scale = 0.0;
    s.load2_scale = 0.0;
    CHECK(run_beam(s).data.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("beam superposition") {
    BeamSpec both;
    both.nx = 60;
    both.mu1 = 3.0;
    both.mu2 = 5.0;
    BeamSpec one = both, two = both;
    one.load2_scale = 0.0;
    two.load1_scale = 0.0;
    const Matrix d = run_beam(both).data;
    const Matrix sum = run_beam(one).data + run_beam(two).data;
    CHECK((d - sum).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, d.cwiseAbs().maxCoeff()));
  }

  TEST_CASE("beam energy decays once the loads stop") {
    BeamSpec s;
    s.nx = 60;
    s.mu1 = 2.0;
    s.mu2 = 7.0;
    s.forcing_cutoff = 4.0;
    std::vector<double> e;
    run_beam(s, &e);
    const double dt = s.t_final / (s.nt * s.steps_per_snapshot);
    const auto first = static_cast<std::size_t>(std::ceil(s.forcing_cutoff / dt)) + 1;
    REQUIRE(e.size() == static_cast<std::size_t>(s.nt * s.steps_per_snapshot) + 1);
    CHECK(e[first] > 0.0);
    for (std::size_t k = first + 1; k < e.size(); ++k) CHECK(e[k] <= e[k - 1] * (1.0 + 1e-12));
    CHECK(e.back() < e[first]);
  }

  TEST_CASE("beam shape") {
    BeamSpec s;
    const SnapshotMatrix d = run_beam(s);
    CHECK(d.data.rows() == 200);
    CHECK(d.data.cols() == 100);
    CHECK(d.label == "beam_mu1_1");
  }

  TEST_CASE("wave starts at rest and is mirror symmetric") {
    WaveSpec s;
    s.nt = 300;
    const Matrix d = run_wave(s).data;
    CHECK(d.rows() == 64 * 64);
    CHECK(d.col(0).cwiseAbs().maxCoeff() == 0.0);
    double asym = 0.0;
    for (Index k = 0; k < d.cols(); ++k) {
      for (int j = 0; j < 64; ++j) {
        for (int i = 0; i < 64; ++i) {
          asym = std::max(asym, std::abs(d(wave_index(i, j, 64), k) - d(wave_index(i, 63 - j, 64), k)));
        }
      }
    }
    CHECK(asym < 1e-10);
    CHECK(d.cwiseAbs().maxCoeff() > 1.0);
  }

  TEST_CASE("wave probe at x = 0.9 is silent through t = 0.5") {
    WaveSpec s;
    const Matrix d = run_wave(s).data;
    const int probe = static_cast<int>(std::ceil(0.9 / s.spacing()));
    double peak = 0.0;
    for (int k = 0; k * s.dt <= 0.5; ++k) {
      for (int j = 0; j < s.grid; ++j) peak = std::max(peak, std::abs(d(wave_index(probe, j, s.grid), k)));
    }
    CHECK(peak < 1e-8);
  }

  TEST_CASE("wave CFL guard") {
    WaveSpec s;
    s.dt = 0.05;
    CHECK_THROWS_AS(run_wave(s), InvalidArgument);
  }

  TEST_CASE("experiment grids") {
    const auto count = [](const std::vector<GridPoint>& g, const char* split) {
      std::size_t c = 0;
      for (const auto& p : g) c += p.split == split;
      return c;
    };
    const auto b = burgers_grid();
    CHECK(b.size() == 30);
    CHECK(count(b, "train") == 10);
    const auto beam = beam_grid();
    CHECK(beam.size() == 25);
    CHECK(count(beam, "train") == 16);
    CHECK(count(beam, "test") == 9);
    const auto w = wave_grid();
    CHECK(w.size() == 36);
    CHECK(count(w, "train") == 12);
    std::set<double> amps, freqs;
    for (const auto& p : w) {
      if (p.split == "train") {
        amps.insert(p.theta(0));
        freqs.insert(p.theta(1));
      }
    }
    CHECK(amps.size() == 6);
    CHECK(freqs.size() == 6);
  }
}
