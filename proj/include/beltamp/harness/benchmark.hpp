#pragma once

#include <beltamp/harness/episode.hpp>
#include <beltamp/harness/stats.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace beltamp::harness {

struct Layout {
  std::size_t rooms = 6;
  std::size_t surfaces = 12;

  std::string str() const { return std::to_string(rooms) + "x" + std::to_string(surfaces); }
  friend bool operator==(const Layout&, const Layout&) = default;
};

inline const std::vector<Layout>& evaluated_layouts() {
  static const std::vector<Layout> l{{4, 8}, {4, 16}, {6, 12}, {6, 24}, {8, 16}, {8, 32}};
  return l;
}

/// "6x12" -> {6, 12}; only the evaluated layouts are accepted.
inline Layout parse_layout(const std::string& text) {
  const auto x = text.find('x');
  Layout l;
  try {
    if (x == std::string::npos) throw std::invalid_argument("no x");
    l = {std::stoul(text.substr(0, x)), std::stoul(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw ConfigurationError("layout must look like 6x12, got '" + text + "'");
  }
  for (const auto& p : evaluated_layouts())
    if (p == l) return l;
  throw ConfigurationError("layout " + text + " is not one of 4x8 4x16 6x12 6x24 8x16 8x32");
}

struct BenchmarkConfig {
  Layout layout;
  std::size_t num_envs = 50;
  std::uint64_t seed = 1;
  bool adversarial = false;
  std::string target = "apple";
  std::string goal_surface = "table";
  std::size_t workers = 0;  ///< 0: hardware concurrency
  EpisodeConfig episode;
  sim::SamplerConfig sampler;  ///< layout, target and adversarial fields are overwritten
};

struct EpisodeRow {
  std::string variant;
  std::size_t env_index = 0;
  std::uint64_t env_seed = 0;
  std::size_t replans = 0;
  double plan_time_s = 0.0;
  double exec_time_s = 0.0;
  bool solved = false;
  std::string status;

  double cumulative_s() const { return plan_time_s + exec_time_s; }
};

struct VariantMetrics {
  std::string variant;
  Summary time;
  Summary replans;
  std::size_t unsolved = 0;
};

struct MetricsTable {
  Layout layout;
  std::vector<EpisodeRow> rows;  ///< variant-major, then env index
  std::vector<VariantMetrics> variants;
  std::vector<PairwiseRow> time_vs_best;
  std::vector<PairwiseRow> replans_vs_best;

  const VariantMetrics& metrics(const std::string& variant) const {
    for (const auto& v : variants)
      if (v.variant == variant) return v;
    throw ConfigurationError("no metrics for variant " + variant);
  }
  const PairwiseRow& replan_delta(const std::string& variant) const {
    for (const auto& r : replans_vs_best)
      if (r.variant == variant) return r;
    throw ConfigurationError("no pairwise row for variant " + variant);
  }
};

/// Seed of environment i; every variant sees the same environment.
inline std::uint64_t env_seed(std::uint64_t seed, std::size_t i) { return Rng(seed).fork(i).seed(); }

inline sim::EnvironmentSpec benchmark_environment(const sim::PlacementDataset& data, const BenchmarkConfig& cfg,
                                                  std::size_t i) {
  sim::SamplerConfig sc = cfg.sampler;
  sc.num_rooms = cfg.layout.rooms;
  sc.num_surfaces = cfg.layout.surfaces;
  sc.target = cfg.target;
  sc.adversarial = cfg.adversarial;
  if (std::find(sc.required_surfaces.begin(), sc.required_surfaces.end(), cfg.goal_surface) ==
      sc.required_surfaces.end())
    sc.required_surfaces.push_back(cfg.goal_surface);
  Rng rng(env_seed(cfg.seed, i));
  return sim::sample_environment(data, sc, rng);
}

/// Aggregate rows into the metrics table (means, CIs, pairwise deltas).
inline MetricsTable aggregate(Layout layout, std::vector<EpisodeRow> rows, const std::vector<std::string>& order) {
  MetricsTable t;
  t.layout = layout;
  t.rows = std::move(rows);
  std::map<std::string, std::vector<double>> time;
  std::map<std::string, std::vector<double>> replans;
  for (const auto& name : order) {
    VariantMetrics m;
    m.variant = name;
    std::vector<double> ts;
    std::vector<double> rs;
    for (const auto& r : t.rows) {
      if (r.variant != name) continue;
      ts.push_back(r.cumulative_s());
      rs.push_back(static_cast<double>(r.replans));
      if (!r.solved) ++m.unsolved;
    }
    m.time = summarize(ts);
    m.replans = summarize(rs);
    time[name] = ts;
    replans[name] = rs;
    t.variants.push_back(m);
  }
  auto ordered = [&](std::vector<PairwiseRow> rows_) {
    std::vector<PairwiseRow> out;
    for (const auto& name : order)
      for (const auto& r : rows_)
        if (r.variant == name) out.push_back(r);
    return out;
  };
  t.time_vs_best = ordered(pairwise_vs_best(time));
  t.replans_vs_best = ordered(pairwise_vs_best(replans));
  return t;
}

/// Run every variant on `num_envs` sampled environments. A throwing episode is
/// recorded as unsolved with its error and the sweep continues.
inline MetricsTable run_benchmark(const BenchmarkConfig& cfg, const std::vector<VariantConfig>& variants,
                                  const sim::PlacementDataset& data, priors::Provider* provider) {
  if (cfg.num_envs == 0) throw ConfigurationError("num_envs must be positive");
  std::vector<std::optional<sim::EnvironmentSpec>> envs(cfg.num_envs);
  std::vector<std::string> env_errors(cfg.num_envs);
  for (std::size_t i = 0; i < cfg.num_envs; ++i) {
    try {
      envs[i] = benchmark_environment(data, cfg, i);
    } catch (const std::exception& e) {
      env_errors[i] = e.what();
    }
  }

  const std::size_t jobs = cfg.num_envs * variants.size();
  std::vector<EpisodeRow> rows(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t v = j / cfg.num_envs;
      const std::size_t i = j % cfg.num_envs;
      EpisodeRow& row = rows[j];
      row.variant = variants[v].name;
      row.env_index = i;
      row.env_seed = env_seed(cfg.seed, i);
      try {
        if (!envs[i]) throw GenerationError(env_errors[i]);
        const auto& env = *envs[i];
        const auto task = fetch_task(env, cfg.target, cfg.goal_surface, sim::default_start(env));
        const auto res = run_episode(variants[v], env, task, provider, Rng(row.env_seed).fork(7).seed(), cfg.episode);
        row.replans = res.trace.replans;
        row.plan_time_s = res.trace.planning_s();
        row.exec_time_s = res.trace.execution_s();
        row.solved = res.trace.solved;
        row.status = res.trace.status;
      } catch (const std::exception& e) {
        row.solved = false;
        row.replans = cfg.episode.replan.replan_cap;
        row.status = std::string("error: ") + e.what();
      }
    }
  };
  std::size_t n = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  n = std::min(n, jobs);
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::string> order;
  for (const auto& v : variants) order.push_back(v.name);
  return aggregate(cfg.layout, std::move(rows), order);
}

// ---------------------------------------------------------------------------
// Output

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string format_double(double x) {
  std::ostringstream o;
  o << std::setprecision(17) << x;
  return o.str();
}

inline void write_csv(std::ostream& out, const std::vector<EpisodeRow>& rows) {
  out << "variant,env_index,env_seed,replans,plan_time_s,exec_time_s,solved,status\n";
  for (const auto& r : rows)
    out << r.variant << ',' << r.env_index << ',' << r.env_seed << ',' << r.replans << ','
        << format_double(r.plan_time_s) << ',' << format_double(r.exec_time_s) << ',' << (r.solved ? 1 : 0) << ','
        << csv_escape(r.status) << '\n';
}

inline std::vector<EpisodeRow> read_csv(std::istream& in) {
  std::vector<EpisodeRow> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0;; ++i) {
      if (i == line.size()) {
        // A quoted field may span lines.
        std::string more;
        if (!quoted || !std::getline(in, more)) break;
        cur += '\n';
        line = std::move(more);
        i = static_cast<std::size_t>(-1);
        continue;
      }
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    if (f.size() != 8) throw DatasetError("bad CSV row: " + line);
    rows.push_back({f[0], std::stoul(f[1]), std::stoull(f[2]), std::stoul(f[3]), std::stod(f[4]), std::stod(f[5]),
                    f[6] == "1", f[7]});
  }
  return rows;
}

inline nlohmann::json to_json(const Summary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}, {"ci95", s.ci95}};
}

inline nlohmann::json to_json(const MetricsTable& t) {
  using nlohmann::json;
  json vs = json::array();
  for (const auto& v : t.variants)
    vs.push_back({{"variant", v.variant},
                  {"cumulative_time_s", to_json(v.time)},
                  {"replans", to_json(v.replans)},
                  {"unsolved", v.unsolved}});
  auto pw = [](const std::vector<PairwiseRow>& rows) {
    json a = json::array();
    for (const auto& r : rows)
      a.push_back({{"variant", r.variant},
                   {"best", r.best},
                   {"delta_mean", r.delta.mean},
                   {"delta_ci95", r.delta.ci95},
                   {"significant", r.significant()}});
    return a;
  };
  return {{"layout", t.layout.str()},
          {"variants", vs},
          {"time_vs_best", pw(t.time_vs_best)},
          {"replans_vs_best", pw(t.replans_vs_best)}};
}

/// Writes episodes.csv and summary.json into `dir`.
inline void write_results(const MetricsTable& t, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "episodes.csv");
  write_csv(csv, t.rows);
  std::ofstream js(dir / "summary.json");
  js << to_json(t).dump(2) << '\n';
}

/// Human-readable table: means, CIs and paired replan deltas against the best variant.
inline std::string format_table(const MetricsTable& t, const std::vector<VariantConfig>& variants) {
  std::ostringstream o;
  o << "layout " << t.layout.str() << "\n";
  o << std::left << std::setw(16) << "variant" << std::right << std::setw(22) << "time [s]" << std::setw(20)
    << "replans" << std::setw(20) << "d replans vs best" << std::setw(10) << "unsolved" << "\n";
  o << std::fixed;
  for (std::size_t i = 0; i < t.variants.size(); ++i) {
    const auto& m = t.variants[i];
    const auto& d = t.replans_vs_best[i];
    std::string name = m.variant;
    for (const auto& v : variants)
      if (v.name == m.variant) name = v.display;
    std::ostringstream a, b, c;
    a << std::fixed << std::setprecision(1) << m.time.mean << " +- " << m.time.ci95;
    b << std::fixed << std::setprecision(2) << m.replans.mean << " +- " << m.replans.ci95;
    c << std::fixed << std::setprecision(2) << d.delta.mean << " +- " << d.delta.ci95;
    o << std::left << std::setw(16) << name << std::right << std::setw(22) << a.str() << std::setw(20) << b.str()
      << std::setw(20) << c.str() << std::setw(10) << m.unsolved << "\n";
  }
  return o.str();
}

}  // namespace beltamp::harness
