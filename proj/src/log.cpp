#include "hnp3/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace hnp3::log {

namespace {

Level parse_env() {
    const char* raw = std::getenv("HNP3_LOG");
    if (raw == nullptr) return Level::warn;
    std::string v(raw);
    for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (v == "debug") return Level::debug;
    if (v == "info") return Level::info;
    if (v == "warn" || v == "warning") return Level::warn;
    if (v == "error") return Level::error;
    if (v == "off" || v == "none") return Level::off;
    return Level::warn;
}

std::atomic<Level> g_threshold{parse_env()};
std::mutex g_mutex;

const char* name(Level level) {
    switch (level) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
        default: return "off";
    }
}

}  // namespace

Level threshold() { return g_threshold.load(std::memory_order_relaxed); }

void set_threshold(Level level) { g_threshold.store(level, std::memory_order_relaxed); }

bool enabled(Level level) { return level >= threshold() && threshold() != Level::off; }

void write(Level level, const std::string& message) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << "[hnp3:" << name(level) << "] " << message << '\n';
}

}  // namespace hnp3::log
