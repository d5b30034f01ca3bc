#include <doctest.h>

#include <map>
#include <set>

#include "mlab/ingest.hpp"
#include "mlab/mention_graph.hpp"
#include "mlab/store.hpp"
#include "support/synth.hpp"

using namespace mlab;

namespace {

const std::filesystem::path kFixtures = MLAB_FIXTURES_DIR;

ThreadRecord make_thread(const std::vector<std::tuple<std::string, int, std::string>>& events) {
  ThreadRecord t;
  t.project = ProjectId{"octo", "t"};
  t.number = 1;
  t.created_at = parse_iso8601_or_throw("2017-01-01T00:00:00Z");
  t.author = std::get<0>(events.front());
  for (const auto& [author, minute, body] : events) {
    CommentEvent e;
    e.author = author;
    e.timestamp = UtcTime{t.created_at.secs + minute * 60};
    e.body = body;
    t.events.push_back(std::move(e));
  }
  return t;
}

// Independent replay oracle: a mention is a reply iff some event authored by
// the mentionee (any case) has a strictly earlier timestamp. Quadratic scan,
// no incremental state.
std::vector<MentionKind> oracle_labels(const ThreadRecord& t) {
  std::vector<MentionKind> labels;
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    for (const RawMention& m : extract_mentions(t.events[i].body)) {
      if (lower_login(m.username) == lower_login(t.events[i].author)) continue;
      bool posted_before = false;
      for (const auto& other : t.events)
        if (lower_login(other.author) == lower_login(m.username) &&
            other.timestamp < t.events[i].timestamp)
          posted_before = true;
      labels.push_back(posted_before ? MentionKind::reply : MentionKind::call);
    }
  }
  return labels;
}

std::size_t count_non_self_mentions(const ThreadRecord& t) {
  std::size_t n = 0;
  for (const auto& e : t.events)
    for (const RawMention& m : extract_mentions(e.body))
      if (lower_login(m.username) != lower_login(e.author)) ++n;
  return n;
}

}  // namespace

TEST_CASE("mention extraction basics") {
  const auto simple = extract_mentions("can you take a look @kamipo?");
  REQUIRE(simple.size() == 1);
  CHECK(simple[0].username == "kamipo");
  CHECK(simple[0].offset == 20);

  CHECK(extract_mentions("email me at a@b.com").empty());
  CHECK(extract_mentions("").empty());

  const auto code = extract_mentions("`@foo` in code, @foo in prose");
  REQUIRE(code.size() == 1);
  CHECK(code[0].username == "foo");
  CHECK(code[0].offset == 16);
}

TEST_CASE("mention extraction markdown exclusions") {
  CHECK(extract_mentions("```\n@hidden\n```").empty());
  CHECK(extract_mentions("> @quoted reply line").empty());
  CHECK(extract_mentions("  > @quoted with leading spaces").empty());
  REQUIRE(extract_mentions("> quoted @a\nreal @b here").size() == 1);
  CHECK(extract_mentions("> quoted @a\nreal @b here")[0].username == "b");

  // Unclosed code span stays literal text.
  REQUIRE(extract_mentions("`unclosed @x").size() == 1);

  // Double-backtick spans.
  CHECK(extract_mentions("``@y``").empty());
}

TEST_CASE("mention extraction token rules") {
  CHECK(extract_mentions("-@eve ok")[0].username == "eve");   // '-' is not a word char
  CHECK(extract_mentions("see @frank-dev")[0].username == "frank-dev");
  CHECK(extract_mentions("foo_@bar").empty());                // '_' is a word char
  CHECK(extract_mentions("@ alone").empty());
  const std::string overlong = "@" + std::string(40, 'a');
  CHECK(extract_mentions(overlong).empty());
  const std::string max_len = "@" + std::string(39, 'a');
  CHECK(extract_mentions(max_len).size() == 1);
  CHECK(extract_mentions("twice @dup and @dup").size() == 2);  // duplicates kept
}

TEST_CASE("thread classification definition cases") {
  // B replies to A after A opened.
  const auto edges1 = classify_thread(make_thread({{"A", 0, "opening text"},
                                                   {"B", 10, "@A thanks"}}));
  REQUIRE(edges1.size() == 1);
  CHECK(edges1[0].mentioner == "b");
  CHECK(edges1[0].mentionee == "a");
  CHECK(edges1[0].kind == MentionKind::reply);

  // A opens with a call to D who never posts.
  const auto edges2 = classify_thread(make_thread({{"A", 0, "ping @D"}}));
  REQUIRE(edges2.size() == 1);
  CHECK(edges2[0].kind == MentionKind::call);

  // C calls D, D posts, C mentions D again: call then reply.
  const auto edges3 = classify_thread(make_thread({{"A", 0, "opening"},
                                                   {"C", 5, "@D look"},
                                                   {"D", 10, "here"},
                                                   {"C", 15, "@D again"}}));
  REQUIRE(edges3.size() == 2);
  CHECK(edges3[0].kind == MentionKind::call);
  CHECK(edges3[1].kind == MentionKind::reply);

  // Self-mentions are dropped.
  CHECK(classify_thread(make_thread({{"A", 0, "@A myself"}})).empty());
}

TEST_CASE("fixture classification matches the replay oracle, 40 mentions") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "mlab_test_mention_fixture";
  std::filesystem::remove_all(dir);
  IngestOptions opts;
  opts.source = IngestSource::fixtures;
  opts.fixtures_dir = kFixtures / "mention_basic";
  ingest_project(opts, ProjectId{"octo", "mention-basic"}, dir);
  const ProjectStore store = ProjectStore::open(dir, ProjectId{"octo", "mention-basic"});

  std::size_t total_edges = 0;
  for (const auto& t : store.threads()) {
    const auto edges = classify_thread(t);
    const auto labels = oracle_labels(t);
    REQUIRE(edges.size() == labels.size());
    for (std::size_t i = 0; i < edges.size(); ++i) CHECK(edges[i].kind == labels[i]);
    total_edges += edges.size();
  }
  CHECK(total_edges == 40);
}

TEST_CASE("partition property on random synthetic threads") {
  synth::Rng rng(401);
  for (int trial = 0; trial < 300; ++trial) {
    const ThreadRecord t = synth::random_thread(rng, trial + 1);
    const auto edges = classify_thread(t);
    std::size_t replies = 0, calls = 0;
    for (const auto& e : edges) (e.kind == MentionKind::reply ? replies : calls)++;
    CHECK(replies + calls == count_non_self_mentions(t));
  }
}

TEST_CASE("truncating a thread never turns an earlier call into a reply") {
  synth::Rng rng(402);
  for (int trial = 0; trial < 120; ++trial) {
    const ThreadRecord t = synth::random_thread(rng, trial + 1);
    const auto full = classify_thread(t);
    for (std::size_t cut = 1; cut <= t.events.size(); ++cut) {
      ThreadRecord truncated = t;
      truncated.events.resize(cut);
      const auto part = classify_thread(truncated);
      REQUIRE(part.size() <= full.size());
      // Labels depend only on strictly earlier events, so the surviving
      // prefix must be identical; in particular no call can become a reply.
      for (std::size_t i = 0; i < part.size(); ++i) {
        CHECK(part[i].mentionee == full[i].mentionee);
        CHECK(part[i].kind == full[i].kind);
      }
    }
  }
}

TEST_CASE("graph building filters by window and is deterministic") {
  std::vector<ThreadRecord> threads;
  threads.push_back(make_thread({{"A", 0, "call @X"}}));
  ThreadRecord second = make_thread({{"B", 0, "call @Y"}});
  second.number = 2;
  second.created_at.secs += 3600;
  second.events[0].timestamp.secs += 3600;
  threads.push_back(second);
  const ProjectStore store =
      ProjectStore::from_records(ProjectId{"octo", "t"}, threads, {}, {});

  const TimeWindow all{parse_iso8601_or_throw("2016-12-01"), parse_iso8601_or_throw("2017-02-01")};
  const MentionGraph g = build_graph(store, all);
  CHECK(g.edges.size() == 2);
  CHECK(g.edges[0].thread == 1);
  CHECK(g.edges[1].thread == 2);

  const TimeWindow none{parse_iso8601_or_throw("2018-01-01"), parse_iso8601_or_throw("2018-02-01")};
  CHECK(build_graph(store, none).edges.empty());

  CHECK(graph_digest(build_graph(store, all)) == graph_digest(build_graph(store, all)));
}

TEST_CASE("interaction matrix counts parallel edges") {
  ThreadRecord t = make_thread({{"A", 0, "opening"},
                                {"B", 5, "@A thanks @A again"}});
  const ProjectStore store = ProjectStore::from_records(ProjectId{"octo", "t"}, {t}, {}, {});
  const TimeWindow all{parse_iso8601_or_throw("2016-12-01"), parse_iso8601_or_throw("2017-02-01")};
  const MentionGraph g = build_graph(store, all);

  const InteractionMatrix reply = interaction_matrix(g, MentionKind::reply);
  REQUIRE(reply.rows.size() == 2);
  CHECK(reply.at(*reply.row_index("b"), *reply.col_index("a")) == 2);

  const InteractionMatrix call = interaction_matrix(g, MentionKind::call);
  CHECK(call.rows.empty());
  CHECK(call.cells.empty());
}

TEST_CASE("call column sums over multiple callers") {
  ThreadRecord t1 = make_thread({{"C", 0, "ping @D"}});
  ThreadRecord t2 = make_thread({{"E", 0, "ping @D"}});
  t2.number = 2;
  const ProjectStore store = ProjectStore::from_records(ProjectId{"octo", "t"}, {t1, t2}, {}, {});
  const TimeWindow all{parse_iso8601_or_throw("2016-12-01"), parse_iso8601_or_throw("2017-02-01")};
  const InteractionMatrix call = interaction_matrix(build_graph(store, all), MentionKind::call);
  CHECK(call.col_total(*call.col_index("d")) == 2);
}

TEST_CASE("multigraph weights survive collapse and expansion") {
  synth::Rng rng(403);
  for (int trial = 0; trial < 50; ++trial) {
    const ThreadRecord t = synth::random_thread(rng, trial + 1);
    const auto edges = classify_thread(t);
    std::map<std::pair<std::string, std::string>, int> weights;
    for (const auto& e : edges)
      if (e.kind == MentionKind::reply) ++weights[{e.mentioner, e.mentionee}];
    // Expanding the weight map reproduces the per-pair edge counts.
    std::map<std::pair<std::string, std::string>, int> recount;
    for (const auto& [pair, w] : weights)
      for (int i = 0; i < w; ++i) ++recount[pair];
    CHECK(recount == weights);
  }
}
