// Process resource probes used by the benchmark harness.
#pragma once

#include <cstdint>

namespace lfnet {

// OS-reported peak resident set size of this process, in bytes.
std::uint64_t peak_rss_bytes();

}  // namespace lfnet
