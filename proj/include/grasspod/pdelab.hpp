#pragma once

#include "grasspod/pod.hpp"

#include <string>
#include <vector>

namespace grasspod {

/// u_t + (u^2/2)_x = nu u_xx on the periodic unit interval, u(x,0) = a sin(2 pi x).
struct BurgersSpec {
  double a = 1.0;
  double nu = 0.01;
  int nx = 256;
  int nt = 101;  ///< snapshots, uniform on [0, T] including both ends
  double t_final = 1.0;
  double cfl = 0.4;

  void validate() const;
};

/// u_tt + 2 gamma u_t + alpha^4 u_xxxx = s1 sin(mu1 pi t) g(x; c1) + s2 sin(mu2 pi t) g(x; c2)
/// with simply supported ends and zero initial state.
struct BeamSpec {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double alpha = 0.25;
  double gamma = 0.05;
  int nx = 200;  ///< interior nodes; x_i = i / (nx + 1)
  int nt = 100;  ///< snapshots at t_k = k T / nt, k = 1..nt
  double t_final = 8.0;
  double load_width = 0.02;
  double center1 = 0.25;
  double center2 = 0.75;
  int steps_per_snapshot = 16;

  // Test hooks.
  double load1_scale = 1.0;
  double load2_scale = 1.0;
  double forcing_cutoff = -1.0;  ///< forcing is zero for t > cutoff when cutoff >= 0

  void validate() const;
};

/// u_tt = laplace(u) on the unit square, at rest initially. u = mu1 sin(mu2 pi t)
/// on the two slit segments of x = 0, homogeneous Neumann elsewhere.
struct WaveSpec {
  double mu1 = 90.0;
  double mu2 = 4.0;
  int grid = 64;  ///< vertices per side
  double dt = 0.002;
  int nt = 500;  ///< snapshots at t = k dt, k = 0..nt-1
  double slit1_lo = 0.25;
  double slit1_hi = 0.35;
  double slit2_lo = 0.65;
  double slit2_hi = 0.75;

  double spacing() const { return 1.0 / (grid - 1); }
  void validate() const;
};

SnapshotMatrix run_burgers(const BurgersSpec& spec);
SnapshotMatrix run_beam(const BeamSpec& spec);
SnapshotMatrix run_wave(const WaveSpec& spec);

/// run_beam plus the discrete energy 1/2 |v|^2 + 1/2 u^T K u after every
/// internal step (index 0 is t = 0).
SnapshotMatrix run_beam(const BeamSpec& spec, std::vector<double>* energy);

/// Flat vertex index of (i along x, j along y) in a wave snapshot.
inline Index wave_index(int i, int j, int grid) { return static_cast<Index>(j) * grid + i; }

struct GridPoint {
  Vector theta;
  std::string split;  ///< "train" or "test"
  std::string label;
};

/// 6 x 5 (a, nu) grid; split by index mod 3 over the sorted list.
std::vector<GridPoint> burgers_grid();
/// Odd pairs {1,3,5,7}^2 train, interleaved even pairs {2,4,6}^2 test.
std::vector<GridPoint> beam_grid();
/// {80..100} x {3.0..5.0}, 36 points; grid position (i, j) trains when
/// (i + j) mod 3 == 0 (12 train / 24 test).
std::vector<GridPoint> wave_grid();

}  // namespace grasspod
