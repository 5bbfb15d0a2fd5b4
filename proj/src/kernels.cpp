#include "fwm/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "fwm/error.hpp"

namespace fwm::kernels {
namespace {

std::atomic<const KernelOps*> g_active{nullptr};

const KernelOps* by_name(const char* name) {
    if (std::strcmp(name, "scalar") == 0) return &scalar_ops();
    if (std::strcmp(name, "avx2") == 0) return avx2_ops();
    if (std::strcmp(name, "neon") == 0) return neon_ops();
    return nullptr;
}

const KernelOps* pick() {
    if (const char* env = std::getenv("FWM_KERNELS")) {
        const KernelOps* t = by_name(env);
        if (!t)
            throw config_error(std::string("FWM_KERNELS names an unknown or "
                                           "unsupported kernel variant: ") +
                               env);
        return t;
    }
    if (const KernelOps* t = avx2_ops()) return t;
    if (const KernelOps* t = neon_ops()) return t;
    return &scalar_ops();
}

} // namespace

const KernelOps& active() {
    const KernelOps* p = g_active.load(std::memory_order_acquire);
    if (!p) {
        p = pick();
        g_active.store(p, std::memory_order_release);
    }
    return *p;
}

const char* active_name() { return active().name; }

void force(const char* name) {
    const KernelOps* t = by_name(name);
    if (!t)
        throw config_error(std::string("unknown or unsupported kernel variant: ") + name);
    g_active.store(t, std::memory_order_release);
}

} // namespace fwm::kernels
