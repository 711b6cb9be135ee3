#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace vitalsig::logg {

enum class Level { error = 0, info = 1, debug = 2 };

inline Level level() {
    static Level lv = [] {
        const char* env = std::getenv("VITALSIG_LOG");
        if (env == nullptr) return Level::error;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        if (std::strcmp(env, "info") == 0) return Level::info;
        return Level::error;
    }();
    return lv;
}

template <typename... Args>
void emit(Level lv, const char* fmt, Args... args) {
    if (lv > level()) return;
    const char* tag = lv == Level::error ? "error" : (lv == Level::info ? "info" : "debug");
    std::fprintf(stderr, "[vitalsig %s] ", tag);
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
}

template <typename... Args>
void info(const char* fmt, Args... args) { emit(Level::info, fmt, args...); }
template <typename... Args>
void debug(const char* fmt, Args... args) { emit(Level::debug, fmt, args...); }
template <typename... Args>
void error(const char* fmt, Args... args) { emit(Level::error, fmt, args...); }

}  // namespace vitalsig::logg
