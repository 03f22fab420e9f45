#pragma once

#include "mgcc/kernels.hpp"

namespace mgcc::kernels::detail {

extern const KernelTable scalar_table;
#if defined(MGCC_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(MGCC_HAVE_NEON)
extern const KernelTable neon_table;
#endif

}  // namespace mgcc::kernels::detail
