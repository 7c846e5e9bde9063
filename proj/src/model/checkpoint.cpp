#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "qg/model.hpp"

namespace qg {

namespace {

constexpr char kMagic[4] = {'Q', 'G', '2', 'L'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::vector<unsigned char>& out, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<unsigned char>& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw std::runtime_error("checkpoint: truncated file");
    unsigned char b[sizeof(T)];
    std::memcpy(b, in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

std::vector<unsigned char> encode_checkpoint(const SpectralField2L& q, double t) {
    const Grid& g = *q.grid;
    std::vector<unsigned char> out(kMagic, kMagic + 4);
    put(out, kVersion);
    put(out, g.L());
    put(out, static_cast<std::uint32_t>(g.N()));
    put(out, std::uint32_t{2});
    put(out, t);
    for (const auto& v : q.layer)
        for (const cplx& c : v) {
            put(out, c.real());
            put(out, c.imag());
        }
    return out;
}

Checkpoint decode_checkpoint(const std::vector<unsigned char>& in) {
    if (in.size() < 4 || std::memcmp(in.data(), kMagic, 4) != 0)
        throw std::runtime_error("checkpoint: bad magic");
    std::size_t pos = 4;
    const auto version = get<std::uint32_t>(in, pos);
    if (version != kVersion)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    const double L = get<double>(in, pos);
    const auto N = get<std::uint32_t>(in, pos);
    const auto layers = get<std::uint32_t>(in, pos);
    if (layers != 2) throw std::runtime_error("checkpoint: expected 2 layers");
    const double t = get<double>(in, pos);
    Checkpoint ck{SpectralField2L::zeros(make_grid(L, static_cast<int>(N))), t};
    for (auto& v : ck.q.layer)
        for (cplx& c : v) {
            const double re = get<double>(in, pos);
            const double im = get<double>(in, pos);
            c = cplx(re, im);
        }
    if (pos != in.size()) throw std::runtime_error("checkpoint: trailing bytes");
    return ck;
}

void write_checkpoint(const std::string& path, const SpectralField2L& q, double t) {
    const auto bytes = encode_checkpoint(q, t);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace qg
