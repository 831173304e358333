#include "mdiqkd/yield_table.hpp"

#include "mdiqkd/errors.hpp"

namespace mdiqkd {

YieldTable::YieldTable(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 0) throw DomainError("yield table cutoff must be non-negative");
    const std::size_t side = static_cast<std::size_t>(cutoff) + 1;
    data_.assign(4 * side * side, 0.0);
}

} // namespace mdiqkd
