//
// Project moltext - Copyright 2026 The moltext Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moltext/kernels.h"

#include <atomic>

#include "kernels_internal.h"

namespace moltext {
namespace {

constexpr KernelTable kScalarTable = {
    KernelIsa::kScalar,         internal::dot_scalar,
    internal::axpy_scalar,      internal::gemm_nn_scalar,
    internal::gemm_nt_scalar,   internal::gemm_tn_scalar,
};

#ifdef MOLTEXT_HAVE_AVX2
constexpr KernelTable kAvx2Table = {
    KernelIsa::kAvx2,         internal::dot_avx2,
    internal::axpy_avx2,      internal::gemm_nn_avx2,
    internal::gemm_nt_avx2,   internal::gemm_tn_avx2,
};

bool host_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable *table_for(KernelIsa isa) {
  switch (isa) {
  case KernelIsa::kScalar:
    return &kScalarTable;
  case KernelIsa::kAvx2:
    return avx2_kernels();
  }
  return nullptr;
}

std::atomic<const KernelTable *> &active_table() {
  static std::atomic<const KernelTable *> table{
      table_for(best_supported_isa())};
  return table;
}

}  // namespace

std::string_view isa_name(KernelIsa isa) {
  switch (isa) {
  case KernelIsa::kScalar:
    return "scalar";
  case KernelIsa::kAvx2:
    return "avx2";
  }
  return "unknown";
}

const KernelTable &scalar_kernels() {
  return kScalarTable;
}

const KernelTable *avx2_kernels() {
#ifdef MOLTEXT_HAVE_AVX2
  static const bool available = host_has_avx2();
  return available ? &kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

KernelIsa best_supported_isa() {
  return avx2_kernels() != nullptr ? KernelIsa::kAvx2 : KernelIsa::kScalar;
}

const KernelTable &kernels() {
  return *active_table().load(std::memory_order_relaxed);
}

bool select_kernels(KernelIsa isa) {
  const KernelTable *table = table_for(isa);
  if (table == nullptr)
    return false;
  active_table().store(table, std::memory_order_relaxed);
  return true;
}

}  // namespace moltext
