#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace ekrylov {

/// 50 significant decimal digits; used for moments, Hankel determinants and
/// large-argument Laguerre values.
using Extended = boost::multiprecision::cpp_bin_float_50;

}  // namespace ekrylov
