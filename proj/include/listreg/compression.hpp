#pragma once

#include "listreg/json_io.hpp"
#include "listreg/learner.hpp"

namespace listreg {

// Generalization bound of a size-bounded compression scheme:
//   e_full + c*sqrt(e_off*(size*ln n + ln(1/delta))/n) + c*(size*ln n + ln(1/delta))/n
// The hidden constants are unspecified upstream, so `c` is explicit and the
// result is a diagnostic curve, not a certified guarantee.
double generalization_bound(std::int64_t n, std::int64_t size, double delta, double emp_err_full,
                            double emp_err_off_compression, double constant_c = 1.0);

Json record_to_json(const CompressionRecord& rec);
CompressionRecord record_from_json(const Json& j);

}  // namespace listreg
