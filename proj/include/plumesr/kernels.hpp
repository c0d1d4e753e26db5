#pragma once

// Stencil kernels on a periodic W x H grid (row-major, index = y*W + x).
//
// Two implementations with identical arithmetic per cell:
//   kernels::omp     row-parallel, neighbour tables, used by the library
//   kernels::serial  straightforward modulo indexing, kept as the test oracle
// Results agree bit-for-bit because each output cell is evaluated with the
// same expression in the same order; only the traversal differs.

#include <span>

namespace plumesr::kernels {

struct GridShape {
  int width = 0;
  int height = 0;
  double dx = 1.0;
};

/// Constant-coefficient advection-diffusion operator.
struct TransportCoeffs {
  double ux = 0.0;
  double uy = 0.0;
  double kappa = 0.0;
};

// 4th-order centered first derivative: (1, -8, 0, 8, -1)/12 and second
// derivative: (-1, 16, -30, 16, -1)/12.

namespace serial {

/// out = -div(c*u) + kappa*lap(c), 4th-order stencils.
void transport_rhs(std::span<const double> c, GridShape g, TransportCoeffs k, std::span<double> out);

/// Split form of transport_rhs: advection = -div(c*u), diffusion = kappa*lap(c).
void transport_terms(std::span<const double> c, GridShape g, TransportCoeffs k,
                     std::span<double> advection, std::span<double> diffusion);

/// Linear part of the second-order space-time residual:
///   (next - prev)/(2*dt) + div(mid*u) - kappa*lap5(mid)
/// with 2-point centered first derivatives and the 5-point Laplacian.
void residual_operator(std::span<const double> prev, std::span<const double> mid,
                       std::span<const double> next, GridShape g, TransportCoeffs k, double dt,
                       std::span<double> out);

}  // namespace serial

namespace omp {

void transport_rhs(std::span<const double> c, GridShape g, TransportCoeffs k, std::span<double> out);
void transport_terms(std::span<const double> c, GridShape g, TransportCoeffs k,
                     std::span<double> advection, std::span<double> diffusion);
void residual_operator(std::span<const double> prev, std::span<const double> mid,
                       std::span<const double> next, GridShape g, TransportCoeffs k, double dt,
                       std::span<double> out);

/// y[i] = x[i] + a*k[i]
void axpy(std::span<const double> x, double a, std::span<const double> k, std::span<double> y);

/// y[i] = x[i] + h/6*(k1 + 2*k2 + 2*k3 + k4)
void rk4_combine(std::span<const double> x, double h, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, std::span<double> y);

}  // namespace omp

/// Applies the PLUMESR_THREADS cap (0 or unset = OpenMP default). Idempotent.
void configure_threads_from_env();
int max_threads();

}  // namespace plumesr::kernels
