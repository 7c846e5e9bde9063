#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "qg/kernels.hpp"

namespace qg::kernels {
namespace {

const KernelTable& select() {
    const char* env = std::getenv("QG2_KERNELS");
    if (env && *env) {
        if (std::strcmp(env, "scalar") == 0) return scalar_table();
        if (std::strcmp(env, "avx2") == 0) {
            if (const KernelTable* t = avx2_table()) return *t;
            throw std::runtime_error("QG2_KERNELS=avx2 but AVX2 is unavailable");
        }
        throw std::runtime_error(std::string("unknown QG2_KERNELS value: ") + env);
    }
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& t = select();
    return t;
}

std::string active_name() { return active().name; }

}  // namespace qg::kernels
