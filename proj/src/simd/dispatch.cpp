#include "lcm/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace lcm::simd {
namespace {

bool cpu_has_avx2() {
#if defined(LCM_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Level detect_level() {
    if (const char* env = std::getenv("LCM_SIMD_LEVEL")) {
        std::string value(env);
        if (value == "scalar") return Level::scalar;
        if (value == "avx2") {
            if (!cpu_has_avx2()) throw std::runtime_error("LCM_SIMD_LEVEL=avx2 but AVX2 is unavailable");
            return Level::avx2;
        }
        throw std::runtime_error("LCM_SIMD_LEVEL " + value + " unknown");
    }
    return cpu_has_avx2() ? Level::avx2 : Level::scalar;
}

std::atomic<Level>& current() {
    static std::atomic<Level> level{detect_level()};
    return level;
}

}  // namespace

bool level_available(Level level) {
    switch (level) {
        case Level::scalar: return true;
        case Level::avx2: return cpu_has_avx2();
    }
    return false;
}

const KernelTable& kernels() {
#if defined(LCM_HAVE_AVX2)
    if (current().load(std::memory_order_relaxed) == Level::avx2) return avx2_kernels();
#endif
    return scalar_kernels();
}

Level active_level() { return current().load(); }

void set_level(Level level) {
    if (!level_available(level)) {
        throw std::runtime_error("SIMD level " + std::string(level_name(level)) + " is not available");
    }
    current().store(level);
}

std::string_view level_name(Level level) {
    switch (level) {
        case Level::scalar: return "scalar";
        case Level::avx2: return "avx2";
    }
    return "unknown";
}

}  // namespace lcm::simd
