#include <omp.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "plumesr/kernels.hpp"

namespace plumesr::kernels {

namespace {

// Neighbour offsets along one periodic axis, for shifts -2..+2.
struct Wrap {
  std::vector<int> m2, m1, p1, p2;
  explicit Wrap(int n) : m2(n), m1(n), p1(n), p2(n) {
    for (int i = 0; i < n; ++i) {
      m2[i] = (i - 2 + 2 * n) % n;
      m1[i] = (i - 1 + n) % n;
      p1[i] = (i + 1) % n;
      p2[i] = (i + 2) % n;
    }
  }
};

inline const double* row(std::span<const double> v, int w, int y) {
  return v.data() + static_cast<std::size_t>(y) * w;
}

}  // namespace

namespace omp {

void transport_rhs(std::span<const double> c, GridShape g, TransportCoeffs k, std::span<double> out) {
  const Wrap wx(g.width), wy(g.height);
  const double adv = 1.0 / (12.0 * g.dx);
  const double dif = k.kappa / (12.0 * g.dx * g.dx);
  const int w = g.width;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < g.height; ++y) {
    const double* r0 = row(c, w, y);
    const double* rm2 = row(c, w, wy.m2[y]);
    const double* rm1 = row(c, w, wy.m1[y]);
    const double* rp1 = row(c, w, wy.p1[y]);
    const double* rp2 = row(c, w, wy.p2[y]);
    double* o = out.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const double xm2 = r0[wx.m2[x]], xm1 = r0[wx.m1[x]], xp1 = r0[wx.p1[x]], xp2 = r0[wx.p2[x]];
      const double d1x = (xm2 - xp2) + 8.0 * (xp1 - xm1);
      const double d1y = (rm2[x] - rp2[x]) + 8.0 * (rp1[x] - rm1[x]);
      const double d2x = 16.0 * (xm1 + xp1) - (xm2 + xp2) - 30.0 * r0[x];
      const double d2y = 16.0 * (rm1[x] + rp1[x]) - (rm2[x] + rp2[x]) - 30.0 * r0[x];
      const double a = -(k.ux * d1x + k.uy * d1y) * adv;
      const double d = (d2x + d2y) * dif;
      o[x] = a + d;
    }
  }
}

void transport_terms(std::span<const double> c, GridShape g, TransportCoeffs k,
                     std::span<double> advection, std::span<double> diffusion) {
  const Wrap wx(g.width), wy(g.height);
  const double adv = 1.0 / (12.0 * g.dx);
  const double dif = k.kappa / (12.0 * g.dx * g.dx);
  const int w = g.width;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < g.height; ++y) {
    const double* r0 = row(c, w, y);
    const double* rm2 = row(c, w, wy.m2[y]);
    const double* rm1 = row(c, w, wy.m1[y]);
    const double* rp1 = row(c, w, wy.p1[y]);
    const double* rp2 = row(c, w, wy.p2[y]);
    const std::size_t base = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const double xm2 = r0[wx.m2[x]], xm1 = r0[wx.m1[x]], xp1 = r0[wx.p1[x]], xp2 = r0[wx.p2[x]];
      const double d1x = (xm2 - xp2) + 8.0 * (xp1 - xm1);
      const double d1y = (rm2[x] - rp2[x]) + 8.0 * (rp1[x] - rm1[x]);
      const double d2x = 16.0 * (xm1 + xp1) - (xm2 + xp2) - 30.0 * r0[x];
      const double d2y = 16.0 * (rm1[x] + rp1[x]) - (rm2[x] + rp2[x]) - 30.0 * r0[x];
      advection[base + x] = -(k.ux * d1x + k.uy * d1y) * adv;
      diffusion[base + x] = (d2x + d2y) * dif;
    }
  }
}

void residual_operator(std::span<const double> prev, std::span<const double> mid,
                       std::span<const double> next, GridShape g, TransportCoeffs k, double dt,
                       std::span<double> out) {
  const Wrap wx(g.width), wy(g.height);
  const double inv_2dt = 1.0 / (2.0 * dt);
  const double inv_2dx = 1.0 / (2.0 * g.dx);
  const double lap = k.kappa / (g.dx * g.dx);
  const int w = g.width;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < g.height; ++y) {
    const double* r0 = row(mid, w, y);
    const double* rm1 = row(mid, w, wy.m1[y]);
    const double* rp1 = row(mid, w, wy.p1[y]);
    const std::size_t base = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const std::size_t i = base + x;
      const double xm1 = r0[wx.m1[x]], xp1 = r0[wx.p1[x]];
      const double dcdt = (next[i] - prev[i]) * inv_2dt;
      const double div = (k.ux * (xp1 - xm1) + k.uy * (rp1[x] - rm1[x])) * inv_2dx;
      const double l5 = ((xp1 + xm1) + (rp1[x] + rm1[x])) - 4.0 * r0[x];
      out[i] = dcdt + div - lap * l5;
    }
  }
}

void axpy(std::span<const double> x, double a, std::span<const double> k, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] + a * k[i];
}

void rk4_combine(std::span<const double> x, double h, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, std::span<double> y) {
  const double w = h / 6.0;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    y[i] = x[i] + w * ((k1[i] + k4[i]) + 2.0 * (k2[i] + k3[i]));
  }
}

}  // namespace omp

void configure_threads_from_env() {
  if (const char* env = std::getenv("PLUMESR_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (const std::exception&) {
      // Non-numeric values leave the OpenMP default in place.
    }
  }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace plumesr::kernels
