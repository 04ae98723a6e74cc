#include "mcslam/nn/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace mcslam::nn {

namespace {

constexpr char kMagic[8] = {'M', 'C', 'N', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

void put_bytes(std::FILE* f, const void* p, std::size_t len) {
    if (std::fwrite(p, 1, len, f) != len) throw std::runtime_error("checkpoint write failed");
}

void put_u32(std::FILE* f, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (unsigned char)(v >> (8 * i));
    put_bytes(f, b, 4);
}

void put_u64(std::FILE* f, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(v >> (8 * i));
    put_bytes(f, b, 8);
}

void put_f64(std::FILE* f, double v) { put_u64(f, std::bit_cast<std::uint64_t>(v)); }

void get_bytes(std::FILE* f, void* p, std::size_t len) {
    if (std::fread(p, 1, len, f) != len)
        throw std::runtime_error("checkpoint truncated or unreadable");
}

std::uint32_t get_u32(std::FILE* f) {
    unsigned char b[4];
    get_bytes(f, b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::FILE* f) {
    unsigned char b[8];
    get_bytes(f, b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

double get_f64(std::FILE* f) { return std::bit_cast<double>(get_u64(f)); }

std::size_t shape_product(const std::vector<std::uint32_t>& shape) {
    std::size_t p = 1;
    for (auto d : shape) p *= d;
    return p;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void save_checkpoint(const std::string& path, std::uint64_t arch_hash, std::uint64_t step,
                     const std::vector<ParamRef>& refs) {
    for (const auto& r : refs)
        if (!r.data || shape_product(r.shape) != r.data->size())
            throw std::invalid_argument("checkpoint block '" + r.name + "' shape mismatch");
    File f(std::fopen(path.c_str(), "wb"));
    if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    put_bytes(f.get(), kMagic, 8);
    put_u32(f.get(), kVersion);
    put_u64(f.get(), arch_hash);
    put_u64(f.get(), step);
    put_u32(f.get(), std::uint32_t(refs.size()));
    for (const auto& r : refs) {
        put_u32(f.get(), std::uint32_t(r.name.size()));
        put_bytes(f.get(), r.name.data(), r.name.size());
        put_u32(f.get(), std::uint32_t(r.shape.size()));
        for (auto d : r.shape) put_u32(f.get(), d);
        for (double v : *r.data) put_f64(f.get(), v);
    }
    if (std::fflush(f.get()) != 0) throw std::runtime_error("checkpoint write failed");
}

std::uint64_t load_checkpoint(const std::string& path, std::uint64_t arch_hash,
                              const std::vector<ParamRef>& refs) {
    File f(std::fopen(path.c_str(), "rb"));
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    get_bytes(f.get(), magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    if (get_u32(f.get()) != kVersion)
        throw std::runtime_error("unsupported checkpoint version in " + path);
    const std::uint64_t stored_hash = get_u64(f.get());
    if (stored_hash != arch_hash)
        throw std::runtime_error("checkpoint architecture mismatch: " + path);
    const std::uint64_t step = get_u64(f.get());
    const std::uint32_t count = get_u32(f.get());
    if (count != refs.size())
        throw std::runtime_error("checkpoint block count mismatch: " + path);
    for (const auto& r : refs) {
        const std::uint32_t name_len = get_u32(f.get());
        std::string name(name_len, '\0');
        get_bytes(f.get(), name.data(), name_len);
        if (name != r.name)
            throw std::runtime_error("checkpoint block '" + name + "' does not match expected '" +
                                     r.name + "'");
        const std::uint32_t ndims = get_u32(f.get());
        std::vector<std::uint32_t> shape(ndims);
        for (auto& d : shape) d = get_u32(f.get());
        if (shape != r.shape)
            throw std::runtime_error("checkpoint block '" + name + "' shape mismatch");
        if (!r.data || r.data->size() != shape_product(shape))
            throw std::invalid_argument("checkpoint ref '" + name + "' not sized for its shape");
        for (double& v : *r.data) v = get_f64(f.get());
    }
    return step;
}

}  // namespace mcslam::nn
