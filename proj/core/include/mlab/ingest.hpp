#ifndef MLAB_INGEST_HPP
#define MLAB_INGEST_HPP

#include <filesystem>
#include <string>

#include "mlab/records.hpp"
#include "mlab/store.hpp"

namespace mlab {

enum class IngestSource { api, fixtures };

struct IngestOptions {
  IngestSource source = IngestSource::fixtures;
  std::filesystem::path fixtures_dir;  // directory holding the three jsonl files
  std::string api_base = "https://api.github.com";
  std::string token;                   // read from MENTION_LAB_TOKEN when empty
  int max_retries = 5;
};

// Acquires one project and replaces its canonical store under store_dir.
// Re-ingesting identical input produces a byte-identical store (same digest).
StoreManifest ingest_project(const IngestOptions& options, const ProjectId& project,
                             const std::filesystem::path& store_dir);

// Unified-diff fragment (GitHub's `files[].patch`) -> contiguous edit hunks.
// Context lines split hunks so every DiffHunk is a minimal edit run.
std::vector<DiffHunk> parse_unified_patch(std::string_view patch);

}  // namespace mlab

#endif  // MLAB_INGEST_HPP
