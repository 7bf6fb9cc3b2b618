// beltamp: benchmark, scenario, environment and prior-cache commands.

#include <beltamp/harness/benchmark.hpp>
#include <beltamp/harness/scenario.hpp>
#include <beltamp/priors/factory.hpp>
#include <beltamp/sim/svg.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace beltamp;
namespace fs = std::filesystem;

namespace {

struct ProviderOptions {
  std::string mode = "mock";
  std::string cache;
  std::string config;
  std::string data = std::string(BELTAMP_DATA_DIR) + "/dataset.jsonl";
  std::string knowledge = std::string(BELTAMP_DATA_DIR) + "/object_knowledge.json";

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "prior provider: live, replay or mock")->check(CLI::IsMember({"live", "replay", "mock"}));
    app->add_option("--cache", cache, "prompt cache (JSON lines)");
    app->add_option("--provider-config", config, "provider config JSON (endpoint, model, api_key_env)");
    app->add_option("--data", data, "placement dataset (JSON lines)");
    app->add_option("--knowledge", knowledge, "object knowledge table for the mock provider");
  }

  priors::ProviderConfig config_object() const {
    priors::ProviderConfig c;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw ConfigurationError("cannot open provider config " + config);
      c = priors::provider_config_from_json(nlohmann::json::parse(in));
    }
    c.mode = priors::parse_mode(mode);
    if (!cache.empty()) c.cache_path = cache;
    return c;
  }
};

std::shared_ptr<sim::PlacementDataset> load_data(const std::string& path) {
  return std::make_shared<sim::PlacementDataset>(sim::load_dataset(path));
}

std::shared_ptr<priors::Provider> make(const ProviderOptions& o, std::shared_ptr<sim::PlacementDataset> data) {
  priors::MockSources src;
  if (o.mode == "mock") {
    src.dataset = std::move(data);
    src.knowledge = priors::load_object_knowledge(o.knowledge);
  }
  return priors::make_provider(o.config_object(), src);
}

int bench_run(const harness::BenchmarkConfig& base, const std::string& layout, const std::string& variants,
              const ProviderOptions& po, const std::string& out, bool wall_clock) {
  harness::BenchmarkConfig cfg = base;
  cfg.layout = harness::parse_layout(layout);
  cfg.episode.replan.deterministic_timing = !wall_clock;
  const auto vs = harness::parse_variants(variants);
  auto data = load_data(po.data);
  std::shared_ptr<priors::Provider> provider;
  if (std::any_of(vs.begin(), vs.end(), [](const auto& v) { return v.uses_provider(); })) provider = make(po, data);
  const auto table = harness::run_benchmark(cfg, vs, *data, provider.get());
  std::cout << harness::format_table(table, vs);
  if (!out.empty()) {
    harness::write_results(table, out);
    std::cout << "wrote " << (fs::path(out) / "episodes.csv").string() << " and summary.json\n";
  }
  return 0;
}

int scenario_run(const std::string& file, const std::string& variant, const std::string& trace_out) {
  const auto sc = harness::load_scenario(file);
  std::vector<std::string> names;
  if (variant == "all") {
    for (const auto& [v, e] : sc.expect) names.push_back(v);
  } else {
    names.push_back(harness::variant_named(variant).name);
  }
  int rc = 0;
  nlohmann::json traces = nlohmann::json::object();
  for (const auto& n : names) {
    const auto rep = harness::run_scenario(sc, n);
    std::cout << harness::variant_named(n).display << ":\n";
    for (const auto& d : rep.detects) std::cout << "  detect " << sc.task.objects.front() << " " << d << "\n";
    std::cout << "  replans: " << rep.trace.replans << "  status: " << rep.trace.status << "\n";
    if (rep.checked || !rep.passed)
      std::cout << "  " << (rep.passed ? "PASS" : "FAIL " + rep.divergence) << "\n";
    if (!rep.passed) rc = 1;
    traces[n] = planner::to_json(rep.trace, sc.env);
  }
  if (!trace_out.empty()) std::ofstream(trace_out) << traces.dump(1) << '\n';
  return rc;
}

int env_sample(const std::string& layout, std::uint64_t seed, bool adversarial, const std::string& data_path,
               const std::string& out, const std::string& svg) {
  const auto l = harness::parse_layout(layout);
  auto data = load_data(data_path);
  harness::BenchmarkConfig cfg;
  cfg.layout = l;
  cfg.adversarial = adversarial;
  sim::SamplerConfig sc = cfg.sampler;
  sc.num_rooms = l.rooms;
  sc.num_surfaces = l.surfaces;
  sc.adversarial = adversarial;
  Rng rng(seed);
  const auto env = sim::sample_environment(*data, sc, rng);
  if (out.empty()) {
    std::cout << sim::to_json(env).dump(1) << '\n';
  } else {
    sim::save_environment(env, out);
  }
  if (!svg.empty()) std::ofstream(svg) << sim::render_svg(env, nullptr, sim::default_start(env));
  return 0;
}

int priors_fetch(const std::string& env_path, const std::vector<std::string>& objects, const ProviderOptions& po,
                 bool similarity) {
  const auto env = sim::load_environment(env_path);
  std::shared_ptr<sim::PlacementDataset> data;
  if (po.mode == "mock") data = load_data(po.data);
  auto provider = make(po, data);
  std::vector<std::string> rooms;
  for (std::size_t r = 0; r < env.num_rooms(); ++r) rooms.push_back(env.room(RoomId{r}).label);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& o : objects) {
    nlohmann::json rec{{"object", o}};
    rec["room"] = to_json(priors::generate_room_prior(o, rooms, *provider));
    for (std::size_t r = 0; r < env.num_rooms(); ++r) {
      std::vector<std::string> labels;
      for (const SurfaceId s : env.surfaces_in(RoomId{r})) labels.push_back(env.surface(s).label);
      rec["surfaces"][rooms[r]] = to_json(priors::generate_surface_prior(o, labels, rooms[r], *provider));
    }
    out.push_back(rec);
  }
  if (similarity) {
    std::vector<std::string> labels;
    for (const auto& p : env.objects()) labels.push_back(p.label);
    const auto m = priors::build_similarity_matrix(labels, *provider, true);
    nlohmann::json sim = nlohmann::json::object();
    for (std::size_t j = 0; j < labels.size(); ++j)
      for (std::size_t k = 0; k < labels.size(); ++k) sim[labels[j]][labels[k]] = m.sim(ObjectId{j}, ObjectId{k});
    out.push_back({{"similarity", sim}});
  }
  std::cout << out.dump(1) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"belief-space task and motion planning workbench"};
  app.require_subcommand(1);

  // bench run
  auto* bench = app.add_subcommand("bench", "benchmark the six variants");
  bench->require_subcommand(1);
  auto* brun = bench->add_subcommand("run", "run a benchmark sweep");
  harness::BenchmarkConfig bcfg;
  std::string layout = "6x12";
  std::string variants = "all";
  std::string out;
  bool wall_clock = false;
  ProviderOptions bpo;
  brun->add_option("--layout", layout, "rooms x surfaces, one of 4x8 4x16 6x12 6x24 8x16 8x32");
  brun->add_option("--envs", bcfg.num_envs, "environments per variant");
  brun->add_option("--seed", bcfg.seed, "benchmark seed");
  brun->add_option("--variants", variants, "comma-separated variant names or 'all'");
  brun->add_flag("--adversarial", bcfg.adversarial, "place objects uniformly instead of by commonsense");
  brun->add_option("--cap", bcfg.episode.replan.replan_cap, "replan cap per episode");
  brun->add_option("--workers", bcfg.workers, "parallel episodes (0: all cores)");
  brun->add_option("--target", bcfg.target, "object to fetch");
  brun->add_option("--goal", bcfg.goal_surface, "surface to put it on");
  brun->add_option("--particles", bcfg.episode.particles_per_surface, "particles per surface");
  brun->add_option("--occluder-rate", bcfg.sampler.occluder_rate, "chance of an occluder beside each non-target surface");
  brun->add_option("--objects-per-surface", bcfg.sampler.objects_per_surface, "objects placed on each surface besides the target");
  brun->add_option("--out", out, "output directory for episodes.csv and summary.json");
  brun->add_flag("--wall-clock", wall_clock, "charge measured planning time instead of expansions");
  bpo.add(brun);

  // scenario run
  auto* scen = app.add_subcommand("scenario", "scripted scenarios");
  scen->require_subcommand(1);
  auto* srun = scen->add_subcommand("run", "run a scenario and check its expectations");
  std::string scen_file;
  std::string scen_variant = "all";
  std::string trace_out;
  srun->add_option("file", scen_file, "scenario JSON")->required();
  srun->add_option("--variant", scen_variant, "variant name or 'all' (every variant with an expectation)");
  srun->add_option("--trace", trace_out, "write the PlanTraces as JSON");

  // env sample
  auto* envc = app.add_subcommand("env", "environments");
  envc->require_subcommand(1);
  auto* esample = envc->add_subcommand("sample", "sample a household environment");
  std::string elayout = "4x8";
  std::uint64_t eseed = 1;
  bool eadv = false;
  std::string eout;
  std::string esvg;
  std::string edata = std::string(BELTAMP_DATA_DIR) + "/dataset.jsonl";
  esample->add_option("--layout", elayout, "rooms x surfaces");
  esample->add_option("--seed", eseed, "sampler seed");
  esample->add_flag("--adversarial", eadv, "uniform object placement");
  esample->add_option("--out", eout, "environment JSON (stdout if omitted)");
  esample->add_option("--svg", esvg, "also render an SVG snapshot");
  esample->add_option("--data", edata, "placement dataset");

  // priors fetch
  auto* pri = app.add_subcommand("priors", "language-model priors");
  pri->require_subcommand(1);
  auto* pfetch = pri->add_subcommand("fetch", "fetch MCQA priors (and similarities) into the cache");
  std::string penv;
  std::vector<std::string> pobjects;
  bool psim = false;
  ProviderOptions ppo;
  pfetch->add_option("--env", penv, "environment JSON")->required();
  pfetch->add_option("--objects", pobjects, "object labels")->required()->delimiter(',');
  pfetch->add_flag("--similarity", psim, "also build the similarity matrix over the environment's objects");
  ppo.add(pfetch);

  CLI11_PARSE(app, argc, argv);
  try {
    if (brun->parsed()) return bench_run(bcfg, layout, variants, bpo, out, wall_clock);
    if (srun->parsed()) return scenario_run(scen_file, scen_variant, trace_out);
    if (esample->parsed()) return env_sample(elayout, eseed, eadv, edata, eout, esvg);
    if (pfetch->parsed()) return priors_fetch(penv, pobjects, ppo, psim);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
