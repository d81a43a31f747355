#include "dsm/kernels.hpp"

#include <cmath>

// Reference implementations. These define the semantics; the SIMD variants
// must agree with them elementwise exactly and on reductions to rounding.

namespace dsm::kernels::scalar {
namespace {

double clamped_energy_cost_impl(const double* load, const double* pv,
                                const double* price, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double net = load[i] - pv[i];
    if (net > 0.0) acc += net * price[i];
  }
  return acc;
}

void net_and_surplus_impl(const double* load, const double* pv, double* net,
                          double* surplus, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double d = load[i] - pv[i];
    net[i] = d > 0.0 ? d : 0.0;
    surplus[i] = d < 0.0 ? -d : 0.0;
  }
}

void placement_marginals_impl(const double* others, const double* pv,
                              const double* price, double rating, double* out,
                              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double with = others[i] + rating - pv[i];
    double without = others[i] - pv[i];
    if (with < 0.0) with = 0.0;
    if (without < 0.0) without = 0.0;
    out[i] = price[i] * (with - without);
  }
}

double weighted_sum_sq_impl(const double* re, const double* im,
                            const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += (re[i] * re[i] + im[i] * im[i]) * w[i];
  return acc;
}

double abs_deviation_sum_impl(const double* v, double ref, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(v[i] - ref);
  return acc;
}

double dot_impl(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_impl(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

}  // namespace

const Ops ops = {
    clamped_energy_cost_impl, net_and_surplus_impl, placement_marginals_impl,
    weighted_sum_sq_impl,     abs_deviation_sum_impl,
    dot_impl,                 sum_impl,
};

}  // namespace dsm::kernels::scalar
