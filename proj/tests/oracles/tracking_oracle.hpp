#pragma once

// Run-length decomposition of per-key presence bitstrings, the reference the
// tracker is checked against.

#include <optional>
#include <vector>

namespace oracle {

struct Run {
  std::size_t key = 0;
  std::size_t first = 0;
  std::size_t last = 0;
  std::optional<std::size_t> end;  ///< First absent version after the run.
};

/// Runs of 1s in `bits`, merging runs separated by at most `gap` zeros.
inline std::vector<Run> runs_of(std::size_t key, const std::vector<bool>& bits, std::size_t gap) {
  std::vector<Run> runs;
  const std::size_t n = bits.size();
  std::size_t i = 0;
  while (i < n) {
    if (!bits[i]) {
      ++i;
      continue;
    }
    Run r{key, i, i, std::nullopt};
    std::size_t j = i;
    for (;;) {
      std::size_t next = j + 1;
      while (next < n && next <= j + 1 + gap && !bits[next]) ++next;
      if (next < n && next <= j + 1 + gap && bits[next]) {
        j = next;
      } else {
        break;
      }
    }
    r.last = j;
    if (j + 1 < n) r.end = j + 1;
    runs.push_back(r);
    i = j + 1;
  }
  return runs;
}

}  // namespace oracle
