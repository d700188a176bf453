#pragma once

#include "tvprox/kernels.hpp"

namespace tvprox::kernels::detail {

const Table& scalar_table();
#if defined(TVPROX_HAVE_AVX2)
const Table& avx2_table();
#endif

}  // namespace tvprox::kernels::detail
