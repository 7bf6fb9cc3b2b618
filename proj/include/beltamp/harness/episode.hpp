#pragma once

#include <beltamp/belief/hierarchical_belief.hpp>
#include <beltamp/planner/replan.hpp>
#include <beltamp/priors/llm_priors.hpp>
#include <beltamp/sim/sampler.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace beltamp::harness {

enum class PriorSource { uniform, mcqa };

/// One of the six compared methods.
struct VariantConfig {
  std::string name;  ///< CLI name, e.g. "mcqa+comodel"
  std::string display;
  PriorSource prior = PriorSource::uniform;
  planner::UpdateMode update = planner::UpdateMode::bayes;

  bool uses_provider() const { return prior == PriorSource::mcqa || update != planner::UpdateMode::bayes; }
};

inline const std::vector<VariantConfig>& all_variants() {
  using planner::UpdateMode;
  static const std::vector<VariantConfig> v{
      {"baseline", "Baseline", PriorSource::uniform, UpdateMode::bayes},
      {"comodel", "Co-Model", PriorSource::uniform, UpdateMode::bayes_comodel},
      {"lgbu", "LGBU", PriorSource::uniform, UpdateMode::lgbu},
      {"mcqa", "MCQA", PriorSource::mcqa, UpdateMode::bayes},
      {"mcqa+comodel", "MCQA+Co-Model", PriorSource::mcqa, UpdateMode::bayes_comodel},
      {"mcqa+lgbu", "MCQA+LGBU", PriorSource::mcqa, UpdateMode::lgbu},
  };
  return v;
}

inline const VariantConfig& variant_named(const std::string& name) {
  for (const auto& v : all_variants())
    if (v.name == name || v.display == name) return v;
  throw ConfigurationError("unknown variant '" + name + "'");
}

/// Comma-separated variant names, or "all".
inline std::vector<VariantConfig> parse_variants(const std::string& list) {
  if (list == "all") return all_variants();
  std::vector<VariantConfig> out;
  std::size_t i = 0;
  while (i <= list.size()) {
    const std::size_t j = std::min(list.find(',', i), list.size());
    if (j > i) out.push_back(variant_named(list.substr(i, j - i)));
    i = j + 1;
  }
  if (out.empty()) throw ConfigurationError("no variants selected");
  return out;
}

/// Per-episode settings shared by benchmark and scenario runs.
struct EpisodeConfig {
  planner::ReplanConfig replan;
  std::size_t particles_per_surface = 100;
  std::optional<sim::NoiseScript> script;
};

/// A concrete problem: goals, the initial symbolic state and the start pose.
struct EpisodeTask {
  std::vector<std::string> objects;  ///< task-relevant objects (a belief each)
  std::vector<planner::Goal> goals;
  planner::SymbolicState initial;
};

/// Task in the benchmark's shape: find `target` and put it on `goal_surface`.
inline EpisodeTask fetch_task(const sim::EnvironmentSpec& env, const std::string& target,
                              const std::string& goal_surface, Pose2 start) {
  EpisodeTask t;
  t.objects = {target};
  t.goals = {{planner::Goal::at, planner::object_named(env, target), planner::surface_named(env, goal_surface)}};
  t.initial.base = start;
  t.initial.objects.assign(env.num_objects(), {});
  return t;
}

inline EpisodeTask task_from_spec(const sim::EnvironmentSpec& env, const planner::Task& spec, Pose2 start) {
  EpisodeTask t;
  t.objects = spec.objects;
  t.goals = planner::goals_from_literals(env, spec.goal);
  std::map<std::string, Pose2> poses;
  for (const auto& o : env.objects()) poses.emplace(o.label, o.pose);
  t.initial = planner::state_from_literals(env, spec.initial, start, poses);
  return t;
}

/// Initial belief for one object under a variant's prior source.
inline belief::HierarchicalBelief initial_belief(const sim::EnvironmentSpec& env, ObjectId o, PriorSource prior,
                                                 priors::Provider* provider, std::size_t particles, Rng& rng) {
  auto b = belief::init_uniform_belief(env, o, particles, rng);
  if (prior == PriorSource::uniform) return b;
  expects(provider != nullptr, "MCQA priors need a provider");
  const std::string& label = env.object(o).label;
  if (env.num_rooms() > 1) {
    std::vector<std::string> rooms;
    for (std::size_t r = 0; r < env.num_rooms(); ++r) rooms.push_back(env.room(RoomId{r}).label);
    b.set_room_belief(priors::generate_room_prior(label, rooms, *provider).prior);
  }
  for (std::size_t r = 0; r < env.num_rooms(); ++r) {
    const auto& members = b.layout().room_surfaces[r];
    if (members.size() < 2) continue;
    std::vector<std::string> labels;
    for (const SurfaceId s : members) labels.push_back(env.surface(s).label);
    b.set_surface_belief(RoomId{r},
                         priors::generate_surface_prior(label, labels, env.room(RoomId{r}).label, *provider).prior);
  }
  b.check_invariants();
  return b;
}

struct EpisodeResult {
  planner::PlanTrace trace;
  std::map<std::string, belief::HierarchicalBelief> final_beliefs;
};

/// Build the variant's beliefs and similarity matrix, then plan and execute.
inline EpisodeResult run_episode(const VariantConfig& variant, const sim::EnvironmentSpec& env,
                                 const EpisodeTask& task, priors::Provider* provider, std::uint64_t seed,
                                 const EpisodeConfig& cfg = {}) {
  if (variant.uses_provider() && provider == nullptr)
    throw ConfigurationError("variant " + variant.name + " needs a prior provider");
  Rng rng(seed);
  std::map<ObjectId, belief::HierarchicalBelief> beliefs;
  for (const auto& name : task.objects) {
    const ObjectId o = planner::object_named(env, name);
    if (task.initial.objects.at(o.value).kind != planner::ObjectStatus::unknown) continue;
    Rng brng = rng.fork(100 + o.value);
    beliefs.emplace(o, initial_belief(env, o, variant.prior, provider, cfg.particles_per_surface, brng));
  }

  std::optional<belief::SimilarityMatrix> sims;
  if (variant.update == planner::UpdateMode::bayes_comodel) {
    std::vector<std::string> labels;
    for (const auto& p : env.objects()) labels.push_back(p.label);
    sims = priors::build_similarity_matrix(labels, *provider, true);
  }

  planner::ReplanConfig rc = cfg.replan;
  rc.mode = variant.update;
  sim::WorldState world = sim::WorldState::from(env, task.initial.base);
  if (task.initial.holding) {
    world.robot.holding = task.initial.holding;
    world.confirmed[task.initial.holding->value] = world.objects[task.initial.holding->value].pose;
  }
  for (std::size_t o = 0; o < env.num_objects(); ++o)
    if (task.initial.objects[o].kind == planner::ObjectStatus::located) world.confirmed[o] = env.object(ObjectId{o}).pose;

  sim::DetectorNoise noise(rc.noise, rng.fork(1), cfg.script);
  Rng loop = rng.fork(2);
  EpisodeResult res;
  res.trace = planner::execute_and_replan(env, task.goals, task.initial, world, beliefs, sims ? &*sims : nullptr, rc,
                                          noise, loop, {provider});
  for (auto& [o, b] : beliefs) res.final_beliefs.emplace(env.object(o).label, std::move(b));
  return res;
}

}  // namespace beltamp::harness
