// Append-only file helpers for the response and event stores.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>

namespace affect {

/// Appends `data` with a single write and fsyncs before returning. When the
/// file is new (or empty) `header` is written first in the same write.
void append_durable(const std::filesystem::path& path, std::string_view data,
                    std::string_view header = {});

/// Cuts a trailing partial line (no terminating newline) left by an
/// interrupted write. Returns the number of bytes removed.
std::size_t truncate_torn_tail(const std::filesystem::path& path);

}  // namespace affect
