#ifndef MLAB_MENTION_GRAPH_HPP
#define MLAB_MENTION_GRAPH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mlab/records.hpp"
#include "mlab/store.hpp"

namespace mlab {

enum class MentionKind { reply, call };

std::string_view to_string(MentionKind k);

struct RawMention {
  std::string username;    // as written, without the '@'
  std::size_t offset = 0;  // byte offset of the '@' within the body
};

// Scans raw markdown for "@" + [A-Za-z0-9-]{1,39} tokens not preceded by a
// word character. Skips fenced code blocks, inline code spans and quote
// lines (first non-blank character '>').
std::vector<RawMention> extract_mentions(std::string_view body);

struct MentionEdge {
  std::string mentioner;  // canonical (lowercased) logins
  std::string mentionee;
  std::int64_t thread = 0;
  UtcTime timestamp;
  MentionKind kind = MentionKind::call;
  // Deterministic ordering within a thread; not part of the wire schema.
  std::int32_t event_index = 0;
  std::int64_t offset = 0;
};

// One edge per extracted non-self mention. A mention is a reply when the
// mentionee authored any event strictly earlier than the mentioning event,
// and a call otherwise.
std::vector<MentionEdge> classify_thread(const ThreadRecord& thread);

struct MentionGraph {
  ProjectId project;
  TimeWindow window;
  std::vector<MentionEdge> edges;  // ordered by (thread, timestamp, event, offset)
};

MentionGraph build_graph(const ProjectStore& store, const TimeWindow& window);

std::uint64_t graph_digest(const MentionGraph& graph);

// Square nonnegative count matrix, rows/cols indexed by the same ordered
// username (or label) list unless constructed otherwise.
struct InteractionMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::int64_t> cells;  // row-major, rows.size() * cols.size()

  std::int64_t at(std::size_t r, std::size_t c) const { return cells[r * cols.size() + c]; }
  std::int64_t& at(std::size_t r, std::size_t c) { return cells[r * cols.size() + c]; }
  std::int64_t row_total(std::size_t r) const;
  std::int64_t col_total(std::size_t c) const;
  std::int64_t grand_total() const;
  std::optional<std::size_t> row_index(std::string_view name) const;
  std::optional<std::size_t> col_index(std::string_view name) const;
};

// Cell (u,v) counts kind-edges u->v inside the graph window. Index covers
// every username appearing in any edge of that kind; empty graph -> 0x0.
InteractionMatrix interaction_matrix(const MentionGraph& graph, MentionKind kind);

void write_edges_jsonl(const std::filesystem::path& path, const MentionGraph& graph);

}  // namespace mlab

#endif  // MLAB_MENTION_GRAPH_HPP
