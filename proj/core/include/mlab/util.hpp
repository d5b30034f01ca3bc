#ifndef MLAB_UTIL_HPP
#define MLAB_UTIL_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mlab {

// FNV-1a, used for stable content digests of canonical byte streams.
class Fnv1a64 {
public:
  void update(std::string_view bytes) {
    for (const unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return state_; }
  std::string hex() const;

private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Shortest round-trippable-enough decimal form; deterministic across runs.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

}  // namespace mlab

#endif  // MLAB_UTIL_HPP
