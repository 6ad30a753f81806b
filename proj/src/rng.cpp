#include "kgp/rng.hpp"

#include "kgp/error.hpp"

namespace kgp {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw UsageError("Rng::below requires n > 0");
    // Rejection sampling keeps the result exactly uniform.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

}  // namespace kgp
