#include "lfnet/resource.hpp"

#include <sys/resource.h>

namespace lfnet {

std::uint64_t peak_rss_bytes() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  // ru_maxrss is reported in kilobytes on Linux.
  return static_cast<std::uint64_t>(ru.ru_maxrss) * 1024u;
}

}  // namespace lfnet
