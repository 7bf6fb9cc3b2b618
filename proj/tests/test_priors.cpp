#include <beltamp/priors/factory.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace beltamp;
using namespace beltamp::priors;

namespace {

std::string data_dir() { return std::string(BELTAMP_TEST_DIR) + "/../data"; }

std::string temp_file(const std::string& name) {
  const auto p = std::filesystem::path(::testing::TempDir()) / name;
  std::filesystem::remove(p);
  return p.string();
}

// Reference softmax written without the max shift.
std::vector<double> plain_softmax(const std::vector<double>& x) {
  std::vector<double> e;
  double s = 0.0;
  for (double v : x) {
    e.push_back(std::exp(v));
    s += e.back();
  }
  for (double& v : e) v /= s;
  return e;
}

std::shared_ptr<MockProvider> fixed_mock(std::vector<double> logprobs) {
  auto m = std::make_shared<MockProvider>();
  m->on_chat = [logprobs](const ChatRequest&) { return mcqa_reply(logprobs); };
  return m;
}

}  // namespace

TEST(Mcqa, ToasterPromptVerbatim) {
  const std::string want =
      "Predict the location of a toaster.\n"
      "(A) Kitchen\n"
      "(B) Bathroom\n"
      "(C) Livingroom\n"
      "(D) Garage\n"
      "Return the letter that represents the location:";
  EXPECT_EQ(build_mcqa_prompt({"toaster", {"Kitchen", "Bathroom", "Livingroom", "Garage"}}), want);
}

TEST(Mcqa, PromptBounds) {
  const auto two = build_mcqa_prompt({"cup", {"a", "b"}});
  EXPECT_EQ(std::count(two.begin(), two.end(), '\n'), 3);
  std::vector<std::string> many;
  for (int i = 0; i < 26; ++i) many.push_back("l" + std::to_string(i));
  const auto z = build_mcqa_prompt({"cup", many});
  EXPECT_NE(z.find("(Z) l25"), std::string::npos);
  many.push_back("extra");
  EXPECT_THROW(build_mcqa_prompt({"cup", many}), ContractViolation);
  EXPECT_THROW(build_mcqa_prompt({"cup", {"a"}}), ContractViolation);
}

TEST(Softmax, Examples) {
  EXPECT_EQ(logprobs_to_prior({-1.0, -1.0, -1.0, -1.0}), std::vector<double>(4, 0.25));
  const auto p = logprobs_to_prior({0.0, -std::log(3.0)});
  EXPECT_NEAR(p[0], 0.75, 1e-15);
  EXPECT_NEAR(p[1], 0.25, 1e-15);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(logprobs_to_prior({-inf, -inf}), ProviderError);
  EXPECT_EQ(logprobs_to_prior({-inf, 0.0})[1], 1.0);
  EXPECT_THROW(logprobs_to_prior({std::nan(""), 0.0}), ContractViolation);
}

TEST(Softmax, MatchesReferenceAndIsShiftInvariant) {
  Rng rng(31);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> x(2 + rng.index(8));
    for (double& v : x) v = rng.uniform(-20.0, 0.0);
    const auto p = logprobs_to_prior(x);
    const auto ref = plain_softmax(x);
    const double c = rng.uniform(-500.0, 500.0);
    auto shifted = x;
    for (double& v : shifted) v += c;
    const auto q = logprobs_to_prior(shifted);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(p[i], ref[i], 1e-12);
      EXPECT_NEAR(p[i], q[i], 1e-12);
    }
  }
}

TEST(Mcqa, OptionLogprobsFromFirstToken) {
  const auto lp = option_logprobs({{"A", -0.1}, {" B", -2.0}, {"B", -3.0}, {"x", -0.01}}, 3);
  EXPECT_EQ(lp, (std::vector<double>{-0.1, -2.0, kMissingLetterLogprob}));
}

TEST(Mcqa, MockPeakedOnKitchen) {
  auto m = fixed_mock({-0.05, -4.0, -5.0, -6.0});
  const auto rec = generate_room_prior("toaster", {"Kitchen", "Bathroom", "Livingroom", "Garage"}, *m);
  EXPECT_EQ(std::max_element(rec.prior.begin(), rec.prior.end()) - rec.prior.begin(), 0);
  EXPECT_EQ(rec.provider_id, "mock");
  const auto single = generate_surface_prior("toaster", {"counter"}, "Kitchen", *m);
  EXPECT_EQ(single.prior, std::vector<double>{1.0});
  EXPECT_EQ(m->chat_calls, 1);
}

TEST(Cache, RecordThenReplayIsBitIdentical) {
  const std::string path = temp_file("replay.jsonl");
  auto inner = fixed_mock({-0.3, -1.7, -2.2});
  ProviderConfig cfg;
  const McqaQuery q{"mug", {"kitchen", "office", "garage"}};
  std::vector<double> recorded;
  {
    CachingProvider live(inner, std::make_shared<PromptCache>(path));
    recorded = run_mcqa(q, live).prior;
    // A second identical request is served from the cache.
    EXPECT_EQ(run_mcqa(q, live).prior, recorded);
    EXPECT_EQ(inner->chat_calls, 1);
  }
  cfg.mode = ProviderMode::replay;
  cfg.cache_path = path;
  auto replay = make_provider(cfg);
  EXPECT_EQ(replay->id(), "mock");
  EXPECT_EQ(run_mcqa(q, *replay).prior, recorded);
  EXPECT_THROW(run_mcqa({"mug", {"kitchen", "office"}}, *replay), MissingPrior);
}

TEST(Cache, ReplayNeedsAFile) {
  ProviderConfig cfg;
  cfg.mode = ProviderMode::replay;
  EXPECT_THROW(make_provider(cfg), ConfigurationError);
  cfg.mode = ProviderMode::mock;
  EXPECT_THROW(make_provider(cfg), ConfigurationError);
}

TEST(Cache, KeysSeparateKindAndModel) {
  EXPECT_NE(cache_key(RequestKind::mcqa, "m", "p"), cache_key(RequestKind::lgbu, "m", "p"));
  EXPECT_NE(cache_key(RequestKind::mcqa, "m", "p"), cache_key(RequestKind::mcqa, "n", "p"));
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cache, CorruptLineIsReported) {
  const std::string path = temp_file("corrupt.jsonl");
  std::ofstream(path) << "{\"key_hash\": 1}\n";
  EXPECT_THROW(PromptCache{path}, ProviderError);
}

TEST(Describe, ToasterReplayFromFixture) {
  ProviderConfig cfg;
  cfg.mode = ProviderMode::replay;
  cfg.cache_path = std::string(BELTAMP_TEST_DIR) + "/fixtures/toaster_describe.jsonl";
  cfg.replay_id = "gpt-4o";
  auto p = make_provider(cfg);
  const auto text = describe_object_uses("toaster", *p);
  EXPECT_EQ(text.rfind("A toaster browns sliced bread", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '.'), 3);
}

TEST(Describe, MockTextAndEmptyReply) {
  auto m = std::make_shared<MockProvider>();
  m->on_chat = [](const ChatRequest& r) -> ChatResponse {
    if (r.meta.at("object") == "cup") return {"It holds drinks.", {}};
    return {"  \n ", {}};
  };
  EXPECT_EQ(describe_object_uses("cup", *m), "It holds drinks.");
  EXPECT_THROW(describe_object_uses("void", *m), ProviderError);
}

TEST(Similarity, CosineExamples) {
  EXPECT_DOUBLE_EQ(cosine({1, 1, 0}, {1, 0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(cosine({1, 0}, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(cosine({0.3, 0.4}, {0.3, 0.4}), 1.0);
  EXPECT_THROW(cosine({0, 0}, {1, 0}), ProviderError);
  EXPECT_THROW(cosine({1}, {1, 0}), ProviderError);

  auto m = std::make_shared<MockProvider>();
  m->on_chat = [](const ChatRequest&) { return ChatResponse{"Same text for all.", {}}; };
  m->on_embed = [](const std::string& t) { return bag_of_words_embedding(t); };
  EXPECT_NEAR(similarity("a", "b", *m), 1.0, 1e-12);
}

TEST(Toggle, ParsesReplies) {
  auto m = std::make_shared<MockProvider>();
  m->on_chat = [](const ChatRequest& r) -> ChatResponse {
    const auto o = r.meta.at("object").get<std::string>();
    if (o == "light switch") return {"True", {}};
    if (o == "banana") return {" false.", {}};
    return {"maybe", {}};
  };
  EXPECT_FALSE(colocation_toggle("light switch", *m));
  EXPECT_TRUE(colocation_toggle("banana", *m));
  std::vector<std::string> warnings;
  auto saved = warning_sink();
  warning_sink() = [&](const std::string& w) { warnings.push_back(w); };
  EXPECT_TRUE(colocation_toggle("gizmo", *m));
  warning_sink() = saved;
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Lgbu, ReplacementBelief) {
  const std::vector<std::string> opts{"kitchen", "bedroom", "garage"};
  auto peaked = fixed_mock({-5.0, -0.01, -6.0});
  const auto b = lgbu_update("apple", opts, {0.6, 0.2, 0.2}, {"kitchen", 1.0, false, {}}, *peaked);
  EXPECT_GT(b[1], 0.9);
  auto flat = fixed_mock({-1.0, -1.0, -1.0});
  const auto u = lgbu_update("apple", opts, {0.6, 0.2, 0.2}, {"kitchen", 1.0, false, {}}, *flat);
  for (double x : u) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
  EXPECT_THROW(lgbu_update("apple", opts, {0.5, 0.5}, {}, *flat), ContractViolation);
}

TEST(Lgbu, PromptListsBeliefAndObservation) {
  const auto s = lgbu_user_prompt("apple", {"kitchen", "bedroom"}, {0.75, 0.25}, {"kitchen", 0.5, false, {"banana"}});
  EXPECT_NE(s.find("kitchen: 0.75, bedroom: 0.25"), std::string::npos);
  EXPECT_NE(s.find("- visibility: 0.50"), std::string::npos);
  EXPECT_NE(s.find("- result: not found"), std::string::npos);
  EXPECT_NE(s.find("- co_detected: banana"), std::string::npos);
  EXPECT_NE(s.find("(B) bedroom"), std::string::npos);
}

TEST(CommonsenseMock, FollowsTheDataset) {
  auto data = std::make_shared<sim::PlacementDataset>(sim::load_dataset(data_dir() + "/dataset.jsonl"));
  ProviderConfig cfg;
  auto p = make_provider(cfg, {data, load_object_knowledge(data_dir() + "/object_knowledge.json")});
  const auto rooms = data->rooms();
  const auto rec = generate_room_prior("apple", rooms, *p);
  const auto best = rooms[static_cast<std::size_t>(std::max_element(rec.prior.begin(), rec.prior.end()) - rec.prior.begin())];
  double top = 0.0;
  std::string want;
  for (const auto& r : rooms)
    if (data->room_affinity("apple", r) > top) {
      top = data->room_affinity("apple", r);
      want = r;
    }
  EXPECT_EQ(best, want);
  EXPECT_EQ(describe_object_uses("toaster", *p).rfind("A toaster browns sliced bread", 0), 0u);
  const auto sims = build_similarity_matrix({"apple", "banana", "screwdriver"}, *p);
  EXPECT_GT(sims.sim(ObjectId{0}, ObjectId{1}), sims.sim(ObjectId{0}, ObjectId{2}));
}

TEST(ProviderConfig, ParsesJson) {
  const auto c = provider_config_from_json(
      {{"mode", "live"}, {"endpoint", "http://localhost:8000/v1"}, {"model", "m"}, {"cache", "c.jsonl"}});
  EXPECT_EQ(c.mode, ProviderMode::live);
  EXPECT_EQ(c.live_id(), "m|text-embedding-3-small");
  EXPECT_THROW(parse_mode("offline"), ConfigurationError);
}

TEST(HttpProvider, MissingKeyIsAProviderError) {
  ProviderConfig cfg;
  cfg.endpoint = "http://127.0.0.1:9";
  cfg.api_key_env = "BELTAMP_TEST_UNSET_KEY";
  HttpProvider p(cfg);
  ChatRequest req;
  req.messages = {{"user", "hi"}};
  EXPECT_THROW(p.chat(req), ProviderError);
}
