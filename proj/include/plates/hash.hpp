#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace plates {

// 64-bit FNV-1a, used to tag outputs with the inputs that produced them
class Fnv1a {
public:
    void update(const void* data, std::size_t n);
    void update(std::string_view s) { update(s.data(), s.size()); }
    void update_double(double v) { update(&v, sizeof v); }
    void update_int(std::int64_t v) { update(&v, sizeof v); }
    std::uint64_t digest() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string hex64(std::uint64_t v);

}  // namespace plates
