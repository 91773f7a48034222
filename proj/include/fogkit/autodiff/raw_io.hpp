#pragma once

#include "fogkit/autodiff/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <istream>
#include <ostream>

namespace fogkit::ad {

// Debug dump: u32 rank, u32 dims[rank], then float64 data, all little-endian.
void save_raw(const std::filesystem::path& path, const Tensor& tensor);
Tensor load_raw(const std::filesystem::path& path);

void write_tensor(std::ostream& out, const Tensor& tensor);
Tensor read_tensor(std::istream& in);

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace fogkit::ad
