#include "dsm/kernels.hpp"

namespace dsm::kernels {
namespace {

Backend g_backend = avx2_available() ? Backend::Avx2 : Backend::Scalar;

const Ops& active_ops() {
  return g_backend == Backend::Avx2 ? avx2_ops() : scalar::ops;
}

}  // namespace

Backend active_backend() { return g_backend; }

void force_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) b = Backend::Scalar;
  g_backend = b;
}

std::string backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

double clamped_energy_cost(const double* load, const double* pv,
                           const double* price, std::size_t n) {
  return active_ops().clamped_energy_cost(load, pv, price, n);
}

void net_and_surplus(const double* load, const double* pv, double* net,
                     double* surplus, std::size_t n) {
  active_ops().net_and_surplus(load, pv, net, surplus, n);
}

void placement_marginals(const double* others, const double* pv,
                         const double* price, double rating, double* out,
                         std::size_t n) {
  active_ops().placement_marginals(others, pv, price, rating, out, n);
}

double weighted_sum_sq(const double* re, const double* im, const double* w,
                       std::size_t n) {
  return active_ops().weighted_sum_sq(re, im, w, n);
}

double abs_deviation_sum(const double* v, double ref, std::size_t n) {
  return active_ops().abs_deviation_sum(v, ref, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  return active_ops().dot(a, b, n);
}

double sum(const double* a, std::size_t n) { return active_ops().sum(a, n); }

}  // namespace dsm::kernels
