#include <doctest.h>

#include <filesystem>
#include <set>

#include "mlab/ingest.hpp"
#include "mlab/szz.hpp"

using namespace mlab;

namespace {

const std::filesystem::path kFixtures = MLAB_FIXTURES_DIR;

std::string sha_of(char c) { return std::string(40, c); }

ProjectStore open_szz_fixture() {
  static const std::filesystem::path store = [] {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "mlab_test_szz_fixture";
    std::filesystem::remove_all(dir);
    IngestOptions opts;
    opts.source = IngestSource::fixtures;
    opts.fixtures_dir = kFixtures / "szz_case";
    ingest_project(opts, ProjectId{"octo", "szz-case"}, dir);
    return dir;
  }();
  return ProjectStore::open(store, ProjectId{"octo", "szz-case"});
}

constexpr TimeWindow kAll{{0}, {4102444800}};

}  // namespace

TEST_CASE("fix link scanning finds commit and PR links") {
  const ProjectStore store = open_szz_fixture();
  const FixScan scan = find_fix_links(store);
  REQUIRE(scan.links.size() == 3);
  CHECK(scan.dangling.empty());

  CHECK(scan.links[0].issue_number == 7);
  CHECK(scan.links[0].fixer_kind == FixerKind::pull_request);
  CHECK(scan.links[0].pr_number == 102);
  REQUIRE(scan.links[0].fixing_shas.size() == 1);
  CHECK(scan.links[0].fixing_shas[0] == sha_of('8'));  // the merge commit
  CHECK(scan.links[0].evidence.keyword == "fixes");

  CHECK(scan.links[1].issue_number == 9);
  CHECK(scan.links[1].fixer_kind == FixerKind::commit);
  CHECK(scan.links[1].commit_sha == sha_of('a'));
  CHECK(scan.links[1].evidence.keyword == "closes");

  CHECK(scan.links[2].issue_number == 101);
  CHECK(scan.links[2].commit_sha == sha_of('5'));
}

TEST_CASE("messages without an issue reference produce no link") {
  std::vector<CommitRecord> commits;
  CommitRecord c;
  c.sha = sha_of('1');
  c.author_login = "ann";
  c.author_date = parse_iso8601_or_throw("2017-01-01T00:00:00Z");
  c.message = "this fixes nothing";
  commits.push_back(c);
  const ProjectStore store =
      ProjectStore::from_records(ProjectId{"octo", "nolinks"}, {}, commits, {});
  CHECK(find_fix_links(store).links.empty());
  CHECK(find_fix_links(store).dangling.empty());
}

TEST_CASE("dangling issue references are recorded but excluded") {
  std::vector<CommitRecord> commits;
  CommitRecord c;
  c.sha = sha_of('2');
  c.author_login = "ann";
  c.author_date = parse_iso8601_or_throw("2017-01-01T00:00:00Z");
  c.message = "fixes #999";
  commits.push_back(c);
  const ProjectStore store =
      ProjectStore::from_records(ProjectId{"octo", "dangle"}, {}, commits, {});
  const FixScan scan = find_fix_links(store);
  CHECK(scan.links.empty());
  REQUIRE(scan.dangling.size() == 1);
  CHECK(scan.dangling[0].issue_number == 999);
}

TEST_CASE("url-form references match only the same project") {
  const auto mk = [](char sha, const std::string& message) {
    CommitRecord c;
    c.sha = std::string(40, sha);
    c.author_login = "ann";
    c.author_date = parse_iso8601_or_throw("2017-01-01T00:00:00Z");
    c.message = message;
    return c;
  };
  ThreadRecord t;
  t.project = ProjectId{"octo", "urls"};
  t.number = 3;
  t.created_at = parse_iso8601_or_throw("2016-12-01T00:00:00Z");
  t.author = "ann";
  t.events.push_back({"ann", t.created_at, "bug"});

  const ProjectStore store = ProjectStore::from_records(
      ProjectId{"octo", "urls"}, {t},
      {mk('3', "resolves https://github.com/octo/urls/issues/3"),
       mk('4', "fixes https://github.com/other/repo/issues/3")},
      {});
  const FixScan scan = find_fix_links(store);
  REQUIRE(scan.links.size() == 1);
  CHECK(scan.links[0].commit_sha == std::string(40, '3'));
  CHECK(scan.links[0].evidence.keyword == "resolves");
}

TEST_CASE("attribution matches the hand trace on the 12-commit fixture") {
  const ProjectStore store = open_szz_fixture();
  const AttributionResult all = attribute_all(store);
  CHECK(all.unresolved_lines == 0);

  // fix C5 (issue 101): whitespace-only C4 skipped, offset through the
  // 2-line header insertion handled -> blame C3.
  // fix C8 (PR 102): line 2 -> C7; line 5 traced through the rename -> C2.
  // fix C10 (issue 9): pure addition -> nothing.
  std::set<std::pair<std::string, std::string>> got;  // (fixing, buggy)
  for (const auto& a : all.attributions) got.insert({a.fixing_sha, a.buggy_sha});
  const std::set<std::pair<std::string, std::string>> expected{
      {sha_of('5'), sha_of('3')},
      {sha_of('8'), sha_of('7')},
      {sha_of('8'), sha_of('2')},
  };
  CHECK(got == expected);

  for (const auto& a : all.attributions) {
    const CommitRecord* buggy = store.find_commit(a.buggy_sha);
    const CommitRecord* fixing = store.find_commit(a.fixing_sha);
    REQUIRE(buggy != nullptr);
    REQUIRE(fixing != nullptr);
    CHECK(buggy->author_date < fixing->author_date);
    CHECK_FALSE(a.lines.empty());
  }

  // The traced lines are the parent-side positions of the fixes.
  for (const auto& a : all.attributions) {
    if (a.buggy_sha == sha_of('3'))
      CHECK(a.lines == std::vector<std::pair<std::string, std::int64_t>>{{"src/a.c", 6}});
    if (a.buggy_sha == sha_of('7'))
      CHECK(a.lines == std::vector<std::pair<std::string, std::int64_t>>{{"src/b2.c", 2}});
    if (a.buggy_sha == sha_of('2'))
      CHECK(a.lines == std::vector<std::pair<std::string, std::int64_t>>{{"src/b2.c", 5}});
  }
}

TEST_CASE("whitespace filter can be disabled") {
  const ProjectStore store = open_szz_fixture();
  SzzOptions opts;
  opts.skip_whitespace_only = false;
  const CommitHistory history(store.commits());
  const FixScan scan = find_fix_links(store);
  for (const auto& link : scan.links) {
    if (link.issue_number != 101) continue;
    const AttributionResult r = attribute_buggy(link, history, opts);
    REQUIRE(r.attributions.size() == 1);
    CHECK(r.attributions[0].buggy_sha == sha_of('4'));  // the cosmetic rewrite now takes the blame
  }
}

TEST_CASE("buggy commit counts are distinct per developer and windowed") {
  const ProjectStore store = open_szz_fixture();
  const auto counts = buggy_commit_counts(store, kAll);
  REQUIRE(counts.size() == 3);
  CHECK(counts.at("mallory") == 1);  // C3
  CHECK(counts.at("pete") == 1);     // C7
  CHECK(counts.at("quinn") == 1);    // C2

  // A window excluding 2016 excludes everything.
  const TimeWindow late{parse_iso8601_or_throw("2017-01-01"), parse_iso8601_or_throw("2018-01-01")};
  CHECK(buggy_commit_counts(store, late).empty());

  const auto fixing = fixing_commit_counts(store, kAll);
  CHECK(fixing.at("fiona") == 2);   // C5 and C10
  CHECK(fixing.at("merger") == 1);  // C8
}

TEST_CASE("two fixes blaming the same commit count it once") {
  // C1 adds two lines; C2 fixes #1 deleting line 1; C3 fixes #2 deleting line 2.
  const auto t0 = parse_iso8601_or_throw("2017-01-01T00:00:00Z");
  const auto mk_thread = [&](std::int64_t n) {
    ThreadRecord t;
    t.project = ProjectId{"octo", "dup"};
    t.number = n;
    t.created_at = UtcTime{t0.secs - 86400};
    t.author = "uma";
    t.events.push_back({"uma", t.created_at, "bug " + std::to_string(n)});
    return t;
  };
  CommitRecord c1;
  c1.sha = sha_of('1');
  c1.author_login = "mallory";
  c1.author_date = t0;
  c1.message = "add";
  c1.file_changes.push_back({"f.c", std::nullopt, {DiffHunk{0, {}, 1, {"one", "two"}}}});
  CommitRecord c2;
  c2.sha = sha_of('2');
  c2.author_login = "fiona";
  c2.author_date = UtcTime{t0.secs + 86400};
  c2.message = "fixes #1";
  c2.parents = {c1.sha};
  c2.file_changes.push_back({"f.c", std::nullopt, {DiffHunk{1, {"one"}, 1, {"one fixed"}}}});
  CommitRecord c3;
  c3.sha = sha_of('3');
  c3.author_login = "fiona";
  c3.author_date = UtcTime{t0.secs + 2 * 86400};
  c3.message = "fixes #2";
  c3.parents = {c2.sha};
  c3.file_changes.push_back({"f.c", std::nullopt, {DiffHunk{2, {"two"}, 2, {"two fixed"}}}});

  const ProjectStore store = ProjectStore::from_records(
      ProjectId{"octo", "dup"}, {mk_thread(1), mk_thread(2)}, {c1, c2, c3}, {});
  const auto counts = buggy_commit_counts(store, kAll);
  REQUIRE(counts.size() == 1);
  CHECK(counts.at("mallory") == 1);
}
