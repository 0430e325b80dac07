#pragma once

#include "epimob/kernels.hpp"

namespace epimob::kernels {

namespace scalar {
const KernelTable& table();
}

#if defined(EPIMOB_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

}  // namespace epimob::kernels
