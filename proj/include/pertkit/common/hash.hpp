#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace pertkit {

// FNV-1a, 64 bit. Used for request hashing and seed derivation; must stay
// stable across platforms and runs.
class Fnv64 {
public:
    static constexpr uint64_t kOffset = 1469598103934665603ull;
    static constexpr uint64_t kPrime = 1099511628211ull;

    Fnv64() = default;
    explicit Fnv64(uint64_t state) : state_(state) {}

    Fnv64& update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= kPrime;
        }
        return *this;
    }

    Fnv64& update_u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (v >> (8 * i)) & 0xff;
            state_ *= kPrime;
        }
        return *this;
    }

    uint64_t value() const { return state_; }

private:
    uint64_t state_ = kOffset;
};

uint64_t fnv64(std::string_view bytes);

// Hex rendering used wherever a hash appears in a file format.
std::string to_hex64(uint64_t v);

// Derives a child seed from a root seed and a list of labels. All randomness
// in a run flows from the root seed through this function, so request
// streams do not depend on scheduling order.
uint64_t derive_seed(uint64_t root, std::initializer_list<std::string_view> parts);

}  // namespace pertkit
