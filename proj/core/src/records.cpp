#include "mlab/records.hpp"

#include <cctype>

#include "mlab/error.hpp"

namespace mlab {

ProjectId ProjectId::parse(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == s.size() ||
      s.find('/', slash + 1) != std::string_view::npos)
    throw Error("invalid project id '" + std::string(s) + "' (expected owner/name)");
  return ProjectId{std::string(s.substr(0, slash)), std::string(s.substr(slash + 1))};
}

std::string_view to_string(ThreadKind k) {
  return k == ThreadKind::issue ? "issue" : "pull_request";
}

std::optional<ThreadKind> thread_kind_from_string(std::string_view s) {
  if (s == "issue") return ThreadKind::issue;
  if (s == "pull_request") return ThreadKind::pull_request;
  return std::nullopt;
}

std::string lower_login(std::string_view login) {
  if (!login.empty() && login.front() == '@') login.remove_prefix(1);
  std::string out;
  out.reserve(login.size());
  for (const char c : login) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

bool same_login(std::string_view a, std::string_view b) {
  return lower_login(a) == lower_login(b);
}

bool is_hex_sha(std::string_view sha) {
  if (sha.size() != 40) return false;
  for (const char c : sha)
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace mlab
