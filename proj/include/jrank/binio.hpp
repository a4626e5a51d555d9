#pragma once

#include "jrank/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

namespace jrank::binio {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
    static_assert(std::is_arithmetic_v<T>);
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(buf, sizeof(T));
}

inline void put_string(std::ostream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in, const std::string& source) {
    static_assert(std::is_arithmetic_v<T>);
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T))) throw FormatError(source, 0, "truncated file");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

inline std::string get_string(std::istream& in, const std::string& source) {
    const auto n = get<std::uint32_t>(in, source);
    if (n > (1u << 26)) throw FormatError(source, 0, "implausible string length");
    std::string s(n, '\0');
    if (n && !in.read(s.data(), n)) throw FormatError(source, 0, "truncated file");
    return s;
}

} // namespace jrank::binio
