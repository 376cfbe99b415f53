#include "pertkit/common/hash.hpp"

#include <cstdio>

namespace pertkit {

uint64_t fnv64(std::string_view bytes) {
    return Fnv64().update(bytes).value();
}

std::string to_hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf, 16);
}

uint64_t derive_seed(uint64_t root, std::initializer_list<std::string_view> parts) {
    Fnv64 h;
    h.update_u64(root);
    for (const auto& p : parts) {
        h.update(p);
        h.update("\x1f");  // separator so ("ab","c") != ("a","bc")
    }
    return h.value();
}

}  // namespace pertkit
