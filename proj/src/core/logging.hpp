#pragma once

#include <functional>
#include <string_view>

namespace madp::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3 };

using Sink = std::function<void(Level, std::string_view)>;

// Replaces the process-wide sink; an empty sink restores stderr output.
void set_sink(Sink sink);

void write(Level level, std::string_view message);

inline void info(std::string_view m) { write(Level::Info, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void error(std::string_view m) { write(Level::Error, m); }

}  // namespace madp::log
