#include "plumesr/kernels.hpp"

namespace plumesr::kernels::serial {

namespace {

struct Periodic {
  std::span<const double> v;
  GridShape g;
  double operator()(int x, int y) const {
    x %= g.width;
    y %= g.height;
    if (x < 0) x += g.width;
    if (y < 0) y += g.height;
    return v[static_cast<std::size_t>(y) * g.width + x];
  }
};

double d1_x(const Periodic& c, int x, int y) {
  return (c(x - 2, y) - c(x + 2, y)) + 8.0 * (c(x + 1, y) - c(x - 1, y));
}
double d1_y(const Periodic& c, int x, int y) {
  return (c(x, y - 2) - c(x, y + 2)) + 8.0 * (c(x, y + 1) - c(x, y - 1));
}
double d2_x(const Periodic& c, int x, int y) {
  return 16.0 * (c(x - 1, y) + c(x + 1, y)) - (c(x - 2, y) + c(x + 2, y)) - 30.0 * c(x, y);
}
double d2_y(const Periodic& c, int x, int y) {
  return 16.0 * (c(x, y - 1) + c(x, y + 1)) - (c(x, y - 2) + c(x, y + 2)) - 30.0 * c(x, y);
}

}  // namespace

void transport_rhs(std::span<const double> c, GridShape g, TransportCoeffs k, std::span<double> out) {
  const Periodic p{c, g};
  const double adv = 1.0 / (12.0 * g.dx);
  const double dif = k.kappa / (12.0 * g.dx * g.dx);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const double a = -(k.ux * d1_x(p, x, y) + k.uy * d1_y(p, x, y)) * adv;
      const double d = (d2_x(p, x, y) + d2_y(p, x, y)) * dif;
      out[static_cast<std::size_t>(y) * g.width + x] = a + d;
    }
  }
}

void transport_terms(std::span<const double> c, GridShape g, TransportCoeffs k,
                     std::span<double> advection, std::span<double> diffusion) {
  const Periodic p{c, g};
  const double adv = 1.0 / (12.0 * g.dx);
  const double dif = k.kappa / (12.0 * g.dx * g.dx);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * g.width + x;
      advection[i] = -(k.ux * d1_x(p, x, y) + k.uy * d1_y(p, x, y)) * adv;
      diffusion[i] = (d2_x(p, x, y) + d2_y(p, x, y)) * dif;
    }
  }
}

void residual_operator(std::span<const double> prev, std::span<const double> mid,
                       std::span<const double> next, GridShape g, TransportCoeffs k, double dt,
                       std::span<double> out) {
  const Periodic m{mid, g};
  const double inv_2dt = 1.0 / (2.0 * dt);
  const double inv_2dx = 1.0 / (2.0 * g.dx);
  const double lap = k.kappa / (g.dx * g.dx);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * g.width + x;
      const double dcdt = (next[i] - prev[i]) * inv_2dt;
      const double div = (k.ux * (m(x + 1, y) - m(x - 1, y)) + k.uy * (m(x, y + 1) - m(x, y - 1))) * inv_2dx;
      const double l5 = ((m(x + 1, y) + m(x - 1, y)) + (m(x, y + 1) + m(x, y - 1))) - 4.0 * m(x, y);
      out[i] = dcdt + div - lap * l5;
    }
  }
}

}  // namespace plumesr::kernels::serial
