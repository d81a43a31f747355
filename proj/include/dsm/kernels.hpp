#pragma once

#include <cstddef>
#include <string>

// Slot-vector arithmetic shared by the cost, optimizer, and load-flow code.
// Every kernel exists as a scalar reference implementation and, on x86-64,
// an AVX2 variant. The top-level functions dispatch once, at first use, to
// the widest ISA the CPU supports; tests compare the variants directly.

namespace dsm::kernels {

enum class Backend { Scalar, Avx2 };

// Kernel signatures. `n` is the element count; arrays may alias only where
// noted. All results are in the caller's units.
struct Ops {
  // sum_i max(load[i] - pv[i], 0) * price[i]
  double (*clamped_energy_cost)(const double* load, const double* pv,
                                const double* price, std::size_t n);
  // net[i] = max(load[i] - pv[i], 0); surplus[i] = max(pv[i] - load[i], 0)
  void (*net_and_surplus)(const double* load, const double* pv, double* net,
                          double* surplus, std::size_t n);
  // out[i] = price[i] * (max(others[i] + rating - pv[i], 0)
  //                      - max(others[i] - pv[i], 0))
  void (*placement_marginals)(const double* others, const double* pv,
                              const double* price, double rating, double* out,
                              std::size_t n);
  // sum_i (re[i]^2 + im[i]^2) * w[i]
  double (*weighted_sum_sq)(const double* re, const double* im,
                            const double* w, std::size_t n);
  // sum_i |v[i] - ref|
  double (*abs_deviation_sum)(const double* v, double ref, std::size_t n);
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
};

namespace scalar {
extern const Ops ops;
}

// Present only when compiled for x86-64; check avx2_available() before use.
bool avx2_available();
const Ops& avx2_ops();

// The active backend. Resolved from CPUID on first call; force_backend()
// overrides it (tests and the CLI's --kernel flag).
Backend active_backend();
void force_backend(Backend b);
std::string backend_name(Backend b);

// Dispatched entry points used by the rest of the code base.
double clamped_energy_cost(const double* load, const double* pv,
                           const double* price, std::size_t n);
void net_and_surplus(const double* load, const double* pv, double* net,
                     double* surplus, std::size_t n);
void placement_marginals(const double* others, const double* pv,
                         const double* price, double rating, double* out,
                         std::size_t n);
double weighted_sum_sq(const double* re, const double* im, const double* w,
                       std::size_t n);
double abs_deviation_sum(const double* v, double ref, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);

}  // namespace dsm::kernels
