#include "hoikit/error.h"
#include "hoikit/geometry/knn.h"
#include "hoikit/geometry/mesh_ops.h"
#include "hoikit/refine/candidates.h"
#include "hoikit/refine/mock_server.h"
#include "hoikit/refine/refine.h"
#include "hoikit/refine/selectors.h"
#include "hoikit/refine/tournament.h"
#include "hoikit/refine/vlm.h"
#include "hoikit/render/png.h"
#include "scenes.h"
#include "oracles.h"
#include "support.h"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <set>

using namespace hoikit;
using namespace hoikit::refine;

namespace {

std::vector<Candidate> plain_candidates(std::size_t n) {
  std::vector<Candidate> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].id = i;
  return out;
}

// Small fake images so the VLM selector has something to encode.
std::vector<Candidate> imaged_candidates(std::size_t n) {
  auto out = plain_candidates(n);
  for (auto& c : out) {
    render::Image img = render::Image::white(2, 2);
    img.pixels[0] = static_cast<std::uint8_t>(c.id);
    c.png = render::encode_png(img);
  }
  return out;
}

class EnvGuard {
 public:
  EnvGuard(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    if (value)
      ::setenv(name, value, 1);
    else
      ::unsetenv(name);
  }
  ~EnvGuard() {
    if (old_)
      ::setenv(name_, old_->c_str(), 1);
    else
      ::unsetenv(name_);
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

VlmConfig mock_config(const MockVlmServer& server) {
  VlmConfig c;
  c.base_url = server.base_url();
  c.model = "mock-model";
  c.timeout_s = 2.0;
  c.backoff_s = 0.0;
  c.description = "a hand holding a ball";
  return c;
}

nlohmann::json content_step(const std::string& text) { return {{"content", text}}; }

}  // namespace

TEST_SUITE("candidate_grid") {
  TEST_CASE("125 unique candidates in lexicographic offset order") {
    const Vec3 base(0.1, -0.2, 0.3);
    const auto set = candidate_grid(base);
    REQUIRE(set.size() == kGridSize);
    std::size_t id = 0;
    for (int x = -2; x <= 2; ++x)
      for (int y = -2; y <= 2; ++y)
        for (int z = -2; z <= 2; ++z, ++id) {
          CHECK(set.offsets[id] == std::array<int, 3>{x, y, z});
          CHECK(set.translations[id] == base + 0.01 * Vec3(x, y, z));
        }
    std::set<std::array<double, 3>> unique;
    for (const auto& t : set.translations) unique.insert({t.x(), t.y(), t.z()});
    CHECK(unique.size() == kGridSize);
    CHECK(set.translations[CandidateSet::base_id()] == base);
  }

  TEST_CASE("per-axis extremes are two steps") {
    const auto set = candidate_grid(Vec3::Zero());
    for (int k = 0; k < 3; ++k) {
      double lo = 0.0, hi = 0.0;
      for (const auto& t : set.translations) {
        lo = std::min(lo, t[k]);
        hi = std::max(hi, t[k]);
      }
      CHECK(lo == -0.02);
      CHECK(hi == 0.02);
    }
  }

  TEST_CASE("grid is bit-identical across runs and rejects bad eta") {
    const auto a = candidate_grid(Vec3(0.3, 0.1, -0.7), 0.013);
    const auto b = candidate_grid(Vec3(0.3, 0.1, -0.7), 0.013);
    CHECK(a.translations == b.translations);
    CHECK_THROWS_AS(candidate_grid(Vec3::Zero(), 0.0), InvalidArgument);
    CHECK_THROWS_AS(candidate_grid(Vec3::Zero(), -1.0), InvalidArgument);
  }
}

TEST_SUITE("prefilter") {
  TEST_CASE("identical candidates keep the first 9") {
    const std::vector<double> pene(125, 0.7);
    const auto top = rank_candidates(pene, {}, 9);
    REQUIRE(top.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(top[i].id == i);
  }

  TEST_CASE("score combines normalized penetration and the scorer") {
    const std::vector<double> pene{4.0, 0.0, 2.0, 4.0};
    const std::vector<double> sem{0.0, 0.0, 0.0, 1.5};
    const auto top = rank_candidates(pene, sem, 4);
    CHECK(top[0].id == 3);
    CHECK(top[0].score == 0.5);
    CHECK(top[1].id == 1);
    CHECK(top[1].score == 0.0);
    CHECK(top[2].id == 2);
    CHECK(top[2].score == -0.5);
    CHECK(top[3].id == 0);
  }

  TEST_CASE("keep larger than the set is rejected") {
    const std::vector<double> pene(5, 0.0);
    CHECK_THROWS_AS(rank_candidates(pene, {}, 6), InvalidArgument);
    const auto scene = test::sphere_scene();
    CHECK_THROWS_AS(prefilter(candidate_grid(Vec3::Zero()), scene, scene.init, {}, 126), InvalidArgument);
  }

  TEST_CASE("raising a score never drops a candidate from the top k") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> pene(40), sem(40);
      for (auto& p : pene) p = u(rng);
      for (auto& s : sem) s = u(rng);
      const auto top = rank_candidates(pene, sem, 9);
      const std::size_t pick = top[static_cast<std::size_t>(trial) % 9].id;
      sem[pick] += u(rng);
      const auto again = rank_candidates(pene, sem, 9);
      CHECK(std::any_of(again.begin(), again.end(), [&](const RankedCandidate& c) { return c.id == pick; }));
    }
  }

  TEST_CASE("ranking agrees with a brute-force penetration oracle") {
    const auto scene = test::slab_scene();
    const auto set = candidate_grid(scene.init.translation);
    const auto top = prefilter(set, scene, scene.init);
    REQUIRE(top.size() == 9);
    std::vector<double> oracle;
    for (const auto& t : set.translations) {
      hoiopt::HoiParams p = scene.init;
      p.translation = t;
      oracle.push_back(test::brute_force_penetration(scene, p));
    }
    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return oracle[a] < oracle[b]; });
    for (std::size_t i = 0; i < top.size(); ++i) {
      CHECK(top[i].id == order[i]);
      CHECK(top[i].penetration == doctest::Approx(oracle[top[i].id]).epsilon(1e-12));
    }
    // Only lifting the slab by two steps clears everything.
    CHECK(set.offsets[top[0].id] == std::array<int, 3>{0, 0, 2});
    CHECK(top[0].penetration == 0.0);
    CHECK(top[1].penetration > 0.0);
  }
}

TEST_SUITE("tournament") {
  TEST_CASE("single candidate needs no selector call") {
    OrderSelector sel([](std::size_t a, std::size_t b) { return a < b; });
    const auto c = plain_candidates(1);
    const auto r = tournament_select(c, sel);
    CHECK(r.winner == 0);
    CHECK(r.transcript.groups.empty());
    CHECK(sel.calls() == 0);
  }

  TEST_CASE("nine candidates take four selector calls") {
    OrderSelector sel([](std::size_t a, std::size_t b) { return a < b; });
    const auto r = tournament_select(plain_candidates(9), sel);
    CHECK(sel.calls() == 4);
    CHECK(r.winner == 8);
    REQUIRE(r.transcript.groups.size() == 4);
    CHECK(r.transcript.groups[0].members == std::vector<std::size_t>{0, 1, 2});
    CHECK(r.transcript.groups[3].members == std::vector<std::size_t>{2, 5, 8});
  }

  TEST_CASE("groups never exceed the batch and every survivor plays once per round") {
    for (std::size_t n : {2u, 4u, 5u, 7u, 10u, 28u}) {
      FirstSelector sel;
      const auto r = tournament_select(plain_candidates(n), sel);
      std::vector<std::size_t> alive(n);
      std::iota(alive.begin(), alive.end(), 0);
      std::size_t g = 0;
      for (std::size_t round = 0; alive.size() > 1; ++round) {
        std::vector<std::size_t> seen, next;
        for (std::size_t b = 0; b < alive.size(); b += 3) {
          if (alive.size() - b == 1) {
            seen.push_back(alive[b]);
            next.push_back(alive[b]);
            continue;
          }
          const auto& rec = r.transcript.groups[g++];
          CHECK(rec.round == round);
          CHECK(rec.members.size() <= 3);
          seen.insert(seen.end(), rec.members.begin(), rec.members.end());
          next.push_back(rec.winner);
        }
        CHECK(seen == alive);
        alive = next;
      }
      CHECK(g == r.transcript.groups.size());
      CHECK(replay(r.transcript) == r.winner);
    }
  }

  TEST_CASE("winner is the order maximum for every permutation of 9") {
    std::vector<std::size_t> rank{5, 1, 8, 3, 0, 7, 2, 6, 4};
    OrderSelector sel([&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
    std::vector<std::size_t> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    const std::size_t best = static_cast<std::size_t>(std::max_element(rank.begin(), rank.end()) - rank.begin());
    std::size_t count = 0, wrong = 0;
    do {
      std::vector<Candidate> c(9);
      for (std::size_t i = 0; i < 9; ++i) c[i].id = perm[i];
      if (tournament_select(c, sel).winner != best) ++wrong;
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(count == 362880);
    CHECK(wrong == 0);
  }

  TEST_CASE("winner is the order maximum for rotations and shuffles of 27") {
    std::mt19937_64 rng(27);
    for (int order = 0; order < 20; ++order) {
      std::vector<double> key(27);
      for (auto& k : key) k = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      OrderSelector sel([&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
      const std::size_t best = static_cast<std::size_t>(std::max_element(key.begin(), key.end()) - key.begin());
      std::vector<std::size_t> ids(27);
      std::iota(ids.begin(), ids.end(), 0);
      std::shuffle(ids.begin(), ids.end(), rng);
      for (std::size_t start = 0; start < 27; ++start) {
        std::vector<Candidate> c(27);
        for (std::size_t i = 0; i < 27; ++i) c[i].id = ids[(start + i) % 27];
        const auto r = tournament_select(c, sel);
        CHECK(r.winner == best);
        CHECK(r.transcript.groups.size() == 13);
      }
    }
  }

  TEST_CASE("failing selector surfaces the transcript") {
    class Failing : public Selector {
     public:
      SelectorReply select(std::span<const Candidate> group) override {
        if (group.front().id >= 3) throw SelectorError("down", {"attempt 1: HTTP 503"});
        return {0, "{\"selection\": 1}", {}};
      }
      std::string name() const override { return "failing"; }
    } sel;
    try {
      tournament_select(plain_candidates(9), sel);
      FAIL("expected a TournamentError");
    } catch (const TournamentError& e) {
      REQUIRE(e.transcript.groups.size() == 2);
      CHECK(e.transcript.groups[1].selection == 0);
      CHECK(e.transcript.groups[1].log.front() == "attempt 1: HTTP 503");
    }
  }

  TEST_CASE("transcript json round trip and tamper detection") {
    OrderSelector sel([](std::size_t a, std::size_t b) { return a > b; });
    const auto r = tournament_select(plain_candidates(10), sel);
    const auto back = transcript_from_json(nlohmann::json::parse(to_json(r.transcript).dump()));
    CHECK(replay(back) == r.winner);
    CHECK(to_json(back) == to_json(r.transcript));
    auto bad = back;
    bad.groups[0].selection = 2;
    CHECK_THROWS_AS(replay(bad), InvalidArgument);
    bad = back;
    bad.winner = 9;
    CHECK_THROWS_AS(replay(bad), InvalidArgument);
    bad = back;
    bad.groups.pop_back();
    CHECK_THROWS_AS(replay(bad), InvalidArgument);
    CHECK_THROWS_AS(transcript_from_json(nlohmann::json::object()), ParseError);
  }
}

TEST_SUITE("selectors") {
  TEST_CASE("mock selectors") {
    std::vector<Candidate> g(3);
    g[0] = {7, Vec3(0.02, 0, 0), 0.5, {}};
    g[1] = {3, Vec3(0.01, 0, 0), 0.1, {}};
    g[2] = {9, Vec3(0.0, 0.01, 0), 0.1, {}};
    CHECK(PenetrationSelector().select(g).choice == 1);
    CHECK(ClosestSelector(Vec3::Zero()).select(g).choice == 1);
    CHECK(FirstSelector().select(g).choice == 0);
    CHECK(make_mock_selector("mock:closest", Vec3(0.0, 0.01, 0.0))->select(g).choice == 2);
    CHECK_THROWS_AS(make_mock_selector("vlm", Vec3::Zero()), InvalidArgument);
  }
}

TEST_SUITE("vlm") {
  TEST_CASE("selection parsing") {
    CHECK(parse_selection("<think>x</think>{\"selection\": 2}") == 2);
    CHECK(parse_selection("{\"selection\": 1}") == 1);
    CHECK(parse_selection("<think>maybe {\"selection\": 3}</think>\n```json\n{\"selection\": 1}\n```") == 1);
    CHECK(parse_selection("{\"selection\": 2.0}") == 2);
    CHECK_FALSE(parse_selection("image 2").has_value());
    CHECK_FALSE(parse_selection("{\"choice\": 2}").has_value());
    CHECK_FALSE(parse_selection("{\"selection\": \"2\"}").has_value());
    CHECK_FALSE(parse_selection("{\"selection\": 1.5}").has_value());
    CHECK(parse_selection("{\"selection\": 4}") == 4);
  }

  TEST_CASE("prompt names the group size and the answer format") {
    const auto p = selection_prompt("a hand holding a mug", 3);
    CHECK(p.find("1 to 3") != std::string::npos);
    CHECK(p.find("a hand holding a mug") != std::string::npos);
    CHECK(p.find("{\"selection\": n}") != std::string::npos);
  }

  TEST_CASE("missing token or url is a configuration error") {
    EnvGuard env(kApiKeyEnv, nullptr);
    VlmConfig c;
    c.base_url = "http://127.0.0.1:9/v1";
    CHECK_THROWS_AS(VlmSelector{c}, ConfigError);
    EnvGuard env2(kApiKeyEnv, "secret");
    c.base_url.clear();
    CHECK_THROWS_AS(VlmSelector{c}, ConfigError);
    c.base_url = "127.0.0.1:9";
    CHECK_THROWS_AS(VlmSelector{c}, ConfigError);
  }

  TEST_CASE("think-tagged and plain replies") {
    EnvGuard env(kApiKeyEnv, "secret");
    MockVlmServer server(nlohmann::json{{"default", {content_step("<think>the second looks right</think>{\"selection\": 2}")}}});
    VlmSelector sel(mock_config(server));
    const auto group = imaged_candidates(3);
    const auto r = sel.select(group);
    CHECK(r.choice == 1);
    CHECK(r.raw.find("</think>") != std::string::npos);

    MockVlmServer plain(nlohmann::json{{"default", {content_step("{\"selection\": 1}")}}});
    VlmSelector sel2(mock_config(plain));
    CHECK(sel2.select(group).choice == 0);
  }

  TEST_CASE("request carries the prompt, images and bearer token") {
    EnvGuard env(kApiKeyEnv, "secret");
    MockVlmServer server(nlohmann::json{{"default", {content_step("{\"selection\": 1}")}}});
    VlmSelector sel(mock_config(server));
    const auto group = imaged_candidates(2);
    sel.select(group);
    const auto reqs = server.requests();
    REQUIRE(reqs.size() == 1);
    const auto body = nlohmann::json::parse(reqs[0]);
    CHECK(body["model"] == "mock-model");
    const auto& content = body["messages"][0]["content"];
    REQUIRE(content.size() == 3);
    CHECK(content[0]["type"] == "text");
    CHECK(content[1]["image_url"]["url"].get<std::string>().rfind("data:image/png;base64,", 0) == 0);
    // The body is deterministic, so scripts can key on its hash.
    const auto expected = sel.request_body(nlohmann::json::array({VlmSelector::first_message("a hand holding a ball", group)}));
    CHECK(reqs[0] == expected.dump());
  }

  TEST_CASE("out-of-range reply is re-prompted once") {
    EnvGuard env(kApiKeyEnv, "secret");
    const auto group = imaged_candidates(3);
    const nlohmann::json first = nlohmann::json::array({VlmSelector::first_message("a hand holding a ball", group)});
    // The body does not depend on the endpoint, so any url gives the hash.
    VlmConfig probe;
    probe.base_url = "http://127.0.0.1:9/v1";
    probe.model = "mock-model";
    const std::string hash = MockVlmServer::request_hash(VlmSelector(probe).request_body(first).dump());
    {
      // The first request is keyed by hash; the re-prompt falls through to default.
      MockVlmServer server(nlohmann::json{{"responses", {{hash, {content_step("{\"selection\": 4}")}}}},
                            {"default", {content_step("<think>ok</think>{\"selection\": 3}")}}});
      VlmSelector sel(mock_config(server));
      const auto r = sel.select(group);
      CHECK(r.choice == 2);
      const auto reqs = server.requests();
      REQUIRE(reqs.size() == 2);
      CHECK(MockVlmServer::request_hash(reqs[0]) == hash);
      const auto second = nlohmann::json::parse(reqs[1]);
      CHECK(second["messages"].size() == 3);
      CHECK(second["messages"][1]["role"] == "assistant");
      CHECK(second["messages"][2]["content"].get<std::string>().find("{\"selection\": n}") != std::string::npos);
    }
    MockVlmServer always_bad(nlohmann::json{{"default", {content_step("{\"selection\": 4}")}}});
    VlmSelector sel(mock_config(always_bad));
    CHECK_THROWS_AS(sel.select(group), SelectorError);
    CHECK(always_bad.requests().size() == 2);
  }

  TEST_CASE("transport failures are retried three times") {
    EnvGuard env(kApiKeyEnv, "secret");
    const auto group = imaged_candidates(2);
    SUBCASE("recovers on the fourth attempt") {
      MockVlmServer server(nlohmann::json
          {{"default", {{{"status", 503}}, {{"status", 500}}, {{"status", 429}}, content_step("{\"selection\": 2}")}}});
      VlmSelector sel(mock_config(server));
      const auto r = sel.select(group);
      CHECK(r.choice == 1);
      CHECK(server.requests().size() == 4);
      CHECK(r.log.size() == 4);
    }
    SUBCASE("gives up after four attempts") {
      MockVlmServer server(nlohmann::json{{"default", {{{"status", 503}}}}});
      VlmSelector sel(mock_config(server));
      try {
        sel.select(group);
        FAIL("expected SelectorError");
      } catch (const SelectorError& e) {
        CHECK(e.log.size() == 4);
      }
      CHECK(server.requests().size() == 4);
    }
    SUBCASE("timeouts count as transport failures") {
      MockVlmServer server(nlohmann::json{{"default", {{{"delay_ms", 600}, {"content", "{\"selection\": 1}"}},
                                         content_step("{\"selection\": 2}")}}});
      VlmConfig c = mock_config(server);
      c.timeout_s = 0.2;
      VlmSelector sel(c);
      const auto r = sel.select(group);
      CHECK(r.choice == 1);
      CHECK(r.log.front().find("transport error") != std::string::npos);
    }
    SUBCASE("connection refused") {
      std::string url;
      {
        MockVlmServer closed(nlohmann::json::object());
        url = closed.base_url();
      }
      VlmConfig c;
      c.base_url = url;
      c.timeout_s = 0.5;
      c.backoff_s = 0.0;
      VlmSelector sel(c);
      try {
        sel.select(group);
        FAIL("expected SelectorError");
      } catch (const SelectorError& e) {
        CHECK(e.log.size() == 4);
      }
    }
    SUBCASE("client errors are not retried") {
      MockVlmServer server(nlohmann::json{{"default", {{{"status", 400}}}}});
      VlmSelector sel(mock_config(server));
      CHECK_THROWS_AS(sel.select(group), SelectorError);
      CHECK(server.requests().size() == 1);
    }
  }

  TEST_CASE("tournament over the mock endpoint replays to the same winner") {
    EnvGuard env(kApiKeyEnv, "secret");
    MockVlmServer server(nlohmann::json{{"default", {content_step("<think>hmm</think>{\"selection\": 2}")}}});
    VlmSelector sel(mock_config(server));
    const auto r = tournament_select(imaged_candidates(9), sel);
    CHECK(r.winner == 4);
    CHECK(server.requests().size() == 4);
    CHECK(replay(transcript_from_json(to_json(r.transcript))) == r.winner);
  }

  TEST_CASE("script file loading") {
    test::TempDir dir("mock");
    {
      std::ofstream(dir / "s.json") << R"({"default": [{"content": "{\"selection\": 1}"}]})";
    }
    auto server = MockVlmServer::from_file(dir / "s.json");
    CHECK(server.port() > 0);
    CHECK_THROWS_AS(MockVlmServer::from_file(dir / "missing.json"), IoError);
  }
}

TEST_SUITE("refine_translation") {
  TEST_CASE("closest-to-base selector returns the base") {
    const auto scene = test::sphere_scene();
    ClosestSelector sel(scene.init.translation);
    const auto r = refine_translation(scene, scene.init, sel);
    // The base survives the prefilter only if it ranks in the top 9; the
    // closest survivor must then be the base or the nearest grid point.
    const bool base_kept = std::any_of(r.survivors.begin(), r.survivors.end(),
                                       [](const RankedCandidate& c) { return c.id == CandidateSet::base_id(); });
    if (base_kept) CHECK(r.translation == scene.init.translation);
    CHECK(r.shown.size() == 9);
    CHECK(r.shown.front().png.empty());
  }

  TEST_CASE("without penetration the prefilter keeps grid order") {
    auto scene = test::sphere_scene();
    scene.init.translation.y() -= 0.2;
    ClosestSelector sel(scene.init.translation);
    const auto r = refine_translation(scene, scene.init, sel);
    for (std::size_t i = 0; i < r.survivors.size(); ++i) CHECK(r.survivors[i].id == i);
    // Closest of ids 0..8 to the base is offset (-2, -1, 0).
    CHECK(r.tournament.winner == 7);
  }

  TEST_CASE("penetration selector finds the brute-force minimum") {
    const auto scene = test::slab_scene();
    PenetrationSelector sel;
    const auto r = refine_translation(scene, scene.init, sel);
    std::size_t best = 0;
    double best_value = 1e300;
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      hoiopt::HoiParams p = scene.init;
      p.translation = r.candidates.translations[i];
      const double v = test::brute_force_penetration(scene, p);
      if (v < best_value) {
        best_value = v;
        best = i;
      }
    }
    CHECK(r.tournament.winner == best);
    CHECK(r.translation == scene.init.translation + Vec3(0.0, 0.0, 0.02));
    CHECK(replay(r.tournament.transcript) == best);
  }

  TEST_CASE("images are rendered on request") {
    const auto scene = test::sphere_scene();
    FirstSelector sel;
    RefineOptions o;
    o.render = true;
    o.image_size = 48;
    const auto r = refine_translation(scene, scene.init, sel, o);
    for (const auto& c : r.shown) {
      const auto img = render::decode_png(c.png);
      CHECK(img.width == 48);
    }
  }
}
