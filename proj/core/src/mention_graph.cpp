#include "mlab/mention_graph.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "mlab/error.hpp"
#include "mlab/util.hpp"

namespace mlab {

namespace {

constexpr std::size_t kMaxLoginLen = 39;

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_login_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-';
}

bool is_fence_line(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return line.substr(i).rfind("```", 0) == 0 || line.substr(i).rfind("~~~", 0) == 0;
}

bool is_quote_line(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return i < line.size() && line[i] == '>';
}

// Marks bytes covered by inline code spans within one line. A span opens
// with a backtick run and closes at the next run of the same length
// (CommonMark rule); an unclosed run is literal text.
void mark_code_spans(std::string_view line, std::vector<bool>& excluded, std::size_t base) {
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] != '`') {
      ++i;
      continue;
    }
    std::size_t open_len = 0;
    while (i + open_len < line.size() && line[i + open_len] == '`') ++open_len;
    std::size_t j = i + open_len;
    std::size_t close_start = std::string_view::npos;
    while (j < line.size()) {
      if (line[j] == '`') {
        std::size_t run = 0;
        while (j + run < line.size() && line[j + run] == '`') ++run;
        if (run == open_len) {
          close_start = j;
          break;
        }
        j += run;
      } else {
        ++j;
      }
    }
    if (close_start == std::string_view::npos) {
      i += open_len;  // no closer; leave the rest of the line as text
      continue;
    }
    for (std::size_t k = i; k < close_start + open_len; ++k) excluded[base + k] = true;
    i = close_start + open_len;
  }
}

}  // namespace

std::string_view to_string(MentionKind k) { return k == MentionKind::reply ? "reply" : "call"; }

std::vector<RawMention> extract_mentions(std::string_view body) {
  std::vector<RawMention> out;
  if (body.empty()) return out;

  std::vector<bool> excluded(body.size(), false);

  // Line-structured pass: fences and quotes.
  bool in_fence = false;
  std::size_t line_start = 0;
  while (line_start <= body.size()) {
    const std::size_t nl = body.find('\n', line_start);
    const std::size_t line_end = (nl == std::string_view::npos) ? body.size() : nl;
    const std::string_view line = body.substr(line_start, line_end - line_start);

    if (is_fence_line(line)) {
      // The fence delimiter lines themselves carry no mentions either.
      for (std::size_t k = line_start; k < line_end; ++k) excluded[k] = true;
      in_fence = !in_fence;
    } else if (in_fence || is_quote_line(line)) {
      for (std::size_t k = line_start; k < line_end; ++k) excluded[k] = true;
    } else {
      mark_code_spans(line, excluded, line_start);
    }

    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }

  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '@' || excluded[i]) continue;
    if (i > 0 && is_word_char(body[i - 1])) continue;
    std::size_t len = 0;
    while (i + 1 + len < body.size() && is_login_char(body[i + 1 + len])) ++len;
    if (len == 0 || len > kMaxLoginLen) {
      i += len;  // skip the run; an over-long token is not a valid login
      continue;
    }
    out.push_back(RawMention{std::string(body.substr(i + 1, len)), i});
    i += len;
  }
  return out;
}

std::vector<MentionEdge> classify_thread(const ThreadRecord& thread) {
  std::vector<MentionEdge> edges;
  // first_posted[login] = earliest event timestamp authored by login.
  std::map<std::string, UtcTime> first_posted;
  for (const auto& e : thread.events) {
    const std::string author = lower_login(e.author);
    const auto it = first_posted.find(author);
    if (it == first_posted.end() || e.timestamp < it->second) first_posted[author] = e.timestamp;
  }

  for (std::size_t i = 0; i < thread.events.size(); ++i) {
    const CommentEvent& e = thread.events[i];
    const std::string mentioner = lower_login(e.author);
    for (const RawMention& m : extract_mentions(e.body)) {
      const std::string mentionee = lower_login(m.username);
      if (mentionee == mentioner) continue;  // self-mentions dropped
      const auto it = first_posted.find(mentionee);
      const bool has_posted_before = it != first_posted.end() && it->second < e.timestamp;
      MentionEdge edge;
      edge.mentioner = mentioner;
      edge.mentionee = mentionee;
      edge.thread = thread.number;
      edge.timestamp = e.timestamp;
      edge.kind = has_posted_before ? MentionKind::reply : MentionKind::call;
      edge.event_index = static_cast<std::int32_t>(i);
      edge.offset = static_cast<std::int64_t>(m.offset);
      edges.push_back(std::move(edge));
    }
  }
  return edges;
}

MentionGraph build_graph(const ProjectStore& store, const TimeWindow& window) {
  MentionGraph g;
  g.project = store.project();
  g.window = window;
  for (const auto& t : store.threads()) {
    for (auto& e : classify_thread(t))
      if (window.contains(e.timestamp)) g.edges.push_back(std::move(e));
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const MentionEdge& a, const MentionEdge& b) {
    return std::tie(a.thread, a.timestamp, a.event_index, a.offset) <
           std::tie(b.thread, b.timestamp, b.event_index, b.offset);
  });
  return g;
}

std::uint64_t graph_digest(const MentionGraph& graph) {
  Fnv1a64 h;
  for (const auto& e : graph.edges) {
    h.update(e.mentioner);
    h.update("\x1f");
    h.update(e.mentionee);
    h.update("\x1f");
    h.update(std::to_string(e.thread));
    h.update("\x1f");
    h.update(format_iso8601(e.timestamp));
    h.update("\x1f");
    h.update(to_string(e.kind));
    h.update("\n");
  }
  return h.value();
}

std::int64_t InteractionMatrix::row_total(std::size_t r) const {
  std::int64_t s = 0;
  for (std::size_t c = 0; c < cols.size(); ++c) s += at(r, c);
  return s;
}

std::int64_t InteractionMatrix::col_total(std::size_t c) const {
  std::int64_t s = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) s += at(r, c);
  return s;
}

std::int64_t InteractionMatrix::grand_total() const {
  std::int64_t s = 0;
  for (const auto v : cells) s += v;
  return s;
}

std::optional<std::size_t> InteractionMatrix::row_index(std::string_view name) const {
  const auto it = std::lower_bound(rows.begin(), rows.end(), name);
  if (it == rows.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - rows.begin());
}

std::optional<std::size_t> InteractionMatrix::col_index(std::string_view name) const {
  const auto it = std::lower_bound(cols.begin(), cols.end(), name);
  if (it == cols.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - cols.begin());
}

InteractionMatrix interaction_matrix(const MentionGraph& graph, MentionKind kind) {
  std::set<std::string> names;
  for (const auto& e : graph.edges)
    if (e.kind == kind) {
      names.insert(e.mentioner);
      names.insert(e.mentionee);
    }
  InteractionMatrix m;
  m.rows.assign(names.begin(), names.end());
  m.cols = m.rows;
  m.cells.assign(m.rows.size() * m.cols.size(), 0);
  for (const auto& e : graph.edges) {
    if (e.kind != kind) continue;
    const auto r = m.row_index(e.mentioner);
    const auto c = m.col_index(e.mentionee);
    ++m.at(*r, *c);
  }
  return m;
}

void write_edges_jsonl(const std::filesystem::path& path, const MentionGraph& graph) {
  std::string out;
  for (const auto& e : graph.edges) {
    nlohmann::json j{{"mentioner", e.mentioner},
                     {"mentionee", e.mentionee},
                     {"thread", e.thread},
                     {"timestamp", format_iso8601(e.timestamp)},
                     {"kind", std::string(to_string(e.kind))}};
    out += jsonio::to_jsonl_line(j);
  }
  write_file(path, out);
}

}  // namespace mlab
