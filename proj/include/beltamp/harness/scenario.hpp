#pragma once

#include <beltamp/harness/episode.hpp>
#include <beltamp/priors/mock.hpp>

#include <fstream>
#include <set>

namespace beltamp::harness {

/// Canned language-model answers for a scenario: MCQA logprobs per query,
/// object descriptions (embedded as bags of words) and dispersed objects.
struct ScenarioPriors {
  struct Mcqa {
    std::string object;
    priors::Level level = priors::Level::room;
    std::string room;
    std::vector<std::string> labels;
    std::vector<double> logprobs;
  };
  std::vector<Mcqa> mcqa;
  std::map<std::string, std::string> descriptions;
  std::set<std::string> dispersed;
};

inline ScenarioPriors scenario_priors_from_json(const nlohmann::json& j) {
  ScenarioPriors p;
  for (const auto& e : j.value("mcqa", nlohmann::json::array()))
    p.mcqa.push_back({e.at("object").get<std::string>(), e.at("level").get<priors::Level>(), e.value("room", ""),
                      e.at("labels").get<std::vector<std::string>>(), e.at("logprobs").get<std::vector<double>>()});
  p.descriptions = j.value("descriptions", std::map<std::string, std::string>{});
  for (const auto& d : j.value("dispersed", std::vector<std::string>{})) p.dispersed.insert(d);
  return p;
}

/// Provider answering only from a scenario's canned priors.
inline std::shared_ptr<priors::MockProvider> scenario_provider(const ScenarioPriors& p) {
  auto m = std::make_shared<priors::MockProvider>();
  m->name = "scenario-mock";
  m->on_chat = [p](const priors::ChatRequest& req) -> priors::ChatResponse {
    const auto object = req.meta.value("object", std::string{});
    switch (req.kind) {
      case priors::RequestKind::mcqa: {
        const auto labels = req.meta.at("labels").get<std::vector<std::string>>();
        const auto level = req.meta.at("level").get<priors::Level>();
        const auto room = req.meta.value("room", std::string{});
        for (const auto& q : p.mcqa)
          if (q.object == object && q.level == level && q.labels == labels && (level == priors::Level::room || q.room == room))
            return priors::mcqa_reply(q.logprobs);
        throw MissingPrior("scenario has no MCQA answer for " + object + " over " + nlohmann::json(labels).dump());
      }
      case priors::RequestKind::describe: {
        auto it = p.descriptions.find(object);
        if (it == p.descriptions.end()) throw MissingPrior("scenario has no description of " + object);
        return {it->second, {}};
      }
      case priors::RequestKind::toggle:
        return {p.dispersed.count(object) ? "True" : "False", {}};
      case priors::RequestKind::lgbu: {
        // Current belief, with the inspected option scaled by its miss
        // probability or, on a find, all mass moved onto it.
        const auto labels = req.meta.at("labels").get<std::vector<std::string>>();
        auto w = req.meta.at("belief").get<std::vector<double>>();
        const auto& obs = req.meta.at("observation");
        const auto where = obs.at("location").get<std::string>();
        const double v = obs.at("visibility").get<double>();
        const bool found = obs.at("found").get<bool>();
        std::vector<double> lp;
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (labels[i] == where) w[i] = found ? 1.0 : w[i] * (1.0 - v) + 1e-6;
          else if (found) w[i] = 1e-6;
          lp.push_back(std::log(std::max(w[i], 1e-12)));
        }
        return priors::mcqa_reply(lp);
      }
      default:
        throw ProviderError("scenario provider cannot answer this request");
    }
  };
  m->on_embed = [](const std::string& text) { return priors::bag_of_words_embedding(text); };
  return m;
}

struct ScenarioExpectation {
  std::vector<std::string> detects;  ///< "surface room" per executed detect
  std::size_t replans = 0;
};

struct Scenario {
  std::string name;
  sim::EnvironmentSpec env;
  Pose2 start;
  planner::Task task;
  EpisodeConfig episode;
  std::uint64_t seed = 1;
  ScenarioPriors priors;
  std::map<std::string, sim::NoiseScript> scripts;  ///< per variant name
  std::map<std::string, ScenarioExpectation> expect;
};

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    s.name = j.value("name", "scenario");
    s.env = sim::environment_from_json(j.at("environment"));
    const auto st = j.at("start").get<std::vector<double>>();
    if (st.size() != 3) throw ConfigurationError("start must be [x, y, yaw]");
    s.start = {st[0], st[1], st[2]};
    s.task = planner::task_from_json(j.at("task"));
    s.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      auto& np = s.episode.replan.noise;
      np.p_fn = n.value("p_fn", np.p_fn);
      np.p_fp = n.value("p_fp", np.p_fp);
      np.sigma = n.value("sigma", np.sigma);
      np.lambda = n.value("lambda", np.lambda);
      np.validate();
    }
    s.episode.particles_per_surface = j.value("particles_per_surface", s.episode.particles_per_surface);
    if (j.contains("planner")) {
      const auto& p = j.at("planner");
      auto& pc = s.episode.replan.planner;
      pc.move_cost_per_m = p.value("move_cost_per_m", pc.move_cost_per_m);
      pc.top_b = p.value("top_b", pc.top_b);
      pc.pose_samples = p.value("pose_samples", pc.pose_samples);
      pc.views_per_pose = p.value("views_per_pose", pc.views_per_pose);
    }
    s.episode.replan.replan_cap = j.value("replan_cap", s.episode.replan.replan_cap);
    s.priors = scenario_priors_from_json(j.value("priors", nlohmann::json::object()));
    const nlohmann::json runs = j.value("runs", nlohmann::json::object());
    for (const auto& [variant, run] : runs.items()) {
      sim::NoiseScript script;
      for (bool b : run.value("false_negatives", std::vector<bool>{})) script.false_negatives.push_back(b);
      for (bool b : run.value("false_positives", std::vector<bool>{})) script.false_positives.push_back(b);
      s.scripts[variant] = script;
      if (run.contains("expect"))
        s.expect[variant] = {run.at("expect").at("detects").get<std::vector<std::string>>(),
                             run.at("expect").at("replans").get<std::size_t>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed scenario: ") + e.what());
  }
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open scenario " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigurationError(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

struct ScenarioReport {
  std::string variant;
  planner::PlanTrace trace;
  std::vector<std::string> detects;
  bool checked = false;  ///< the scenario declares an expectation for this variant
  bool passed = false;
  std::string divergence;
};

/// Run one variant of a scenario with scripted noise and compare the detect
/// sequence and replan count against the scenario's expectation. Without an
/// explicit provider the scenario's canned priors answer.
inline ScenarioReport run_scenario(const Scenario& sc, const std::string& variant_name,
                                   priors::Provider* provider = nullptr) {
  const VariantConfig& v = variant_named(variant_name);
  std::shared_ptr<priors::MockProvider> own;
  if (!provider) {
    own = scenario_provider(sc.priors);
    provider = own.get();
  }
  EpisodeConfig cfg = sc.episode;
  auto script = sc.scripts.find(v.name);
  cfg.script = script != sc.scripts.end() ? script->second : sim::NoiseScript{};
  const EpisodeTask task = task_from_spec(sc.env, sc.task, sc.start);

  ScenarioReport rep;
  rep.variant = v.name;
  rep.trace = run_episode(v, sc.env, task, provider, sc.seed, cfg).trace;
  for (const auto& d : rep.trace.detects)
    rep.detects.push_back(sc.env.surface(d.surface).label + " " + sc.env.room(d.room).label);

  auto exp = sc.expect.find(v.name);
  if (exp == sc.expect.end()) {
    rep.passed = rep.trace.solved;
    if (!rep.passed) rep.divergence = "episode not solved: " + rep.trace.status;
    return rep;
  }
  rep.checked = true;
  const auto& want = exp->second.detects;
  for (std::size_t i = 0; i < std::max(want.size(), rep.detects.size()); ++i) {
    const std::string got = i < rep.detects.size() ? rep.detects[i] : "<none>";
    const std::string expd = i < want.size() ? want[i] : "<none>";
    if (got != expd) {
      rep.divergence = "detect " + std::to_string(i + 1) + ": expected '" + expd + "', got '" + got + "'";
      return rep;
    }
  }
  if (rep.trace.replans != exp->second.replans) {
    rep.divergence = "replans: expected " + std::to_string(exp->second.replans) + ", got " +
                     std::to_string(rep.trace.replans);
    return rep;
  }
  if (!rep.trace.solved) {
    rep.divergence = "episode not solved: " + rep.trace.status;
    return rep;
  }
  rep.passed = true;
  return rep;
}

}  // namespace beltamp::harness
