#include "fogkit/autodiff/raw_io.hpp"

#include "fogkit/errors.hpp"

#include <fstream>

namespace fogkit::ad {

void write_tensor(std::ostream& out, const Tensor& tensor) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.rank()));
    for (Index d : tensor.shape()) write_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (Index i = 0; i < tensor.size(); ++i) write_le<double>(out, tensor.data()[i]);
}

Tensor read_tensor(std::istream& in) {
    const auto rank = read_le<std::uint32_t>(in);
    if (!in || rank == 0 || rank > 16) throw DataError("tensor blob: bad rank");
    Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(static_cast<Index>(read_le<std::uint32_t>(in)));
    if (!in) throw DataError("tensor blob: truncated shape");
    Vector data(element_count(shape));
    for (Index i = 0; i < data.size(); ++i) data[i] = read_le<double>(in);
    if (!in) throw DataError("tensor blob: truncated data for shape " + to_string(shape));
    return Tensor(std::move(shape), std::move(data));
}

void save_raw(const std::filesystem::path& path, const Tensor& tensor) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    write_tensor(out, tensor);
    if (!out) throw DataError("failed writing " + path.string());
}

Tensor load_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return read_tensor(in);
}

}  // namespace fogkit::ad
