#include "hwassure/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "hwassure/assurance.hpp"
#include "hwassure/platform.hpp"
#include "hwassure/rng.hpp"
#include "text_util.hpp"

namespace hwassure {

namespace fs = std::filesystem;
using nlohmann::json;

// ------------------------------------------------------------ attack setup

std::unique_ptr<Oracle> AttackInstance::make_oracle() const {
  if (topology) return std::make_unique<ScanOracle>(access, *topology);
  return std::make_unique<CircuitOracle>(access);
}

AttackInstance prepare_attack(const Circuit& circuit, std::size_t key_length, std::uint64_t seed, std::size_t cr,
                              std::size_t chains, bool wrap_io) {
  AttackInstance a;
  a.locked = insert_random_locking(circuit, key_length, seed);
  a.metadata = extract_metadata(a.locked.core, key_length);
  a.metadata.name = circuit.name();
  if (circuit.is_combinational() && !wrap_io) {
    a.access = a.locked;
    a.model = a.locked;
    return a;
  }
  a.access = circuit.is_combinational()
                 ? make_locked(scan_wrap(a.locked.core), a.locked.correct_key, a.locked.lock_sites)
                 : a.locked;
  a.metadata.num_flip_flop_io = a.access.core.flip_flops().size();
  a.topology = ScanTopology::for_flops(a.access.core.flip_flops().size(), chains, cr);
  a.model = platform_attack_model(a.access, *a.topology);
  return a;
}

// ------------------------------------------------------------ config parsing

namespace {

bool non_negative(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Tracks which keys of a JSON object were read so leftovers can be rejected.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) fail("must be an object");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where_ + ": " + what); }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) fail("missing '" + key + "'");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const auto& v = raw(key);
    try {
      if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!non_negative(v)) fail("'" + key + "' must be a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail("'" + key + "' must be a number");
      }
      return v.get<T>();
    } catch (const json::exception&) {
      fail("'" + key + "' has the wrong type");
    }
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  template <typename T>
  std::vector<T> list(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_array()) fail("'" + key + "' must be a list");
    std::vector<T> out;
    for (const auto& item : v) {
      if constexpr (std::is_unsigned_v<T>) {
        if (!non_negative(item)) fail("'" + key + "' entries must be non-negative integers");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!item.is_number()) fail("'" + key + "' entries must be numbers");
      } else {
        if (!item.is_string()) fail("'" + key + "' entries must be strings");
      }
      out.push_back(item.get<T>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) fail("unknown key '" + it.key() + "'");
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

fs::path existing_file(const fs::path& base, const std::string& p, const Fields& f) {
  const auto path = fs::path(p).is_absolute() ? fs::path(p) : base / p;
  if (!fs::is_regular_file(path)) f.fail("file not found: " + path.string());
  return fs::weakly_canonical(path);
}

std::vector<fs::path> bench_list(Fields& f, const std::string& key, const fs::path& base) {
  std::vector<fs::path> out;
  for (const auto& p : f.list<std::string>(key)) out.push_back(existing_file(base, p, f));
  return out;
}

AesBlock key_field(Fields& f, const std::string& key) {
  try {
    return parse_block(f.get<std::string>(key));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    f.fail("'" + key + "': " + e.what());
  }
}

ScoreThresholds thresholds_field(Fields& f) {
  ScoreThresholds t;
  if (!f.has("thresholds")) return t;
  const auto cuts = f.list<double>("thresholds");
  if (cuts.size() != 4) f.fail("'thresholds' needs four cut points");
  std::copy(cuts.begin(), cuts.end(), t.cuts.begin());
  t.profile = "custom";
  try {
    t.validate();
  } catch (const Error& e) {
    f.fail(e.what());
  }
  return t;
}

std::vector<std::uint64_t> seeds_field(Fields& f) {
  if (!f.has("seeds")) return {};
  auto seeds = f.list<std::uint64_t>("seeds");
  if (seeds.empty()) f.fail("'seeds' must not be empty");
  return seeds;
}

// "@name" must refer to an earlier task of the given kind.
std::string task_ref(Fields& f, const std::string& key, const std::vector<TaskSpec>& earlier,
                     const std::string& kind, const fs::path& base, bool directory) {
  const auto v = f.get<std::string>(key);
  if (!v.empty() && v[0] == '@') {
    const auto name = v.substr(1);
    for (const auto& t : earlier)
      if (t.name == name) {
        if (t.kind != kind) f.fail("'" + key + "' refers to task '" + name + "' which is not a " + kind + " task");
        return v;
      }
    f.fail("'" + key + "' refers to unknown or later task '" + name + "'");
  }
  const auto path = fs::path(v).is_absolute() ? fs::path(v) : base / v;
  if (directory ? !fs::is_directory(path) : !fs::is_regular_file(path)) f.fail("not found: " + path.string());
  return fs::weakly_canonical(path).string();
}

std::vector<std::size_t> positive_list(Fields& f, const std::string& key) {
  auto v = f.list<std::size_t>(key);
  if (v.empty()) f.fail("'" + key + "' must not be empty");
  for (auto x : v)
    if (x == 0) f.fail("'" + key + "' entries must be positive");
  return v;
}

std::vector<bool> schedule_field(const json& j, const Fields& f) {
  if (!j.is_string()) f.fail("'schedule' must be a string of 0/1");
  std::vector<bool> out;
  for (char c : j.get<std::string>()) {
    if (c != '0' && c != '1') f.fail("'schedule' must be a string of 0/1");
    out.push_back(c == '1');
  }
  if (!out.empty() && std::find(out.begin(), out.end(), true) == out.end()) f.fail("'schedule' is never active");
  return out;
}

TaskBody parse_attack(Fields& f, const fs::path& base) {
  AttackTask t;
  t.benchmarks = bench_list(f, "benchmarks", base);
  if (t.benchmarks.empty()) f.fail("'benchmarks' must not be empty");
  t.key_lengths = positive_list(f, "key_lengths");
  if (f.has("crs")) t.crs = positive_list(f, "crs");
  t.seeds = seeds_field(f);
  t.chains = f.get<std::size_t>("chains", 16);
  for (auto cr : t.crs)
    if (t.chains == 0 || t.chains % cr != 0)
      f.fail("CR " + std::to_string(cr) + " does not divide " + std::to_string(t.chains) + " chains");
  t.wrap_io = f.get<bool>("wrap_io", false);
  t.timeout_s = f.get<double>("timeout_s", 3600.0);
  if (!(t.timeout_s > 0)) f.fail("'timeout_s' must be positive");
  t.max_iterations = f.get<std::uint64_t>("max_iterations", 0);
  t.solver = f.get<std::string>("solver", "builtin");
  if (t.solver != "builtin" && t.solver.rfind("dimacs:", 0) != 0) f.fail("'solver' must be builtin or dimacs:<path>");
  t.verify = f.get<bool>("verify", true);
  return t;
}

CostMetric metric_field(Fields& f) {
  const auto m = f.get<std::string>("metric", "elapsed");
  if (m == "elapsed") return CostMetric::ElapsedSeconds;
  if (m == "iterations") return CostMetric::Iterations;
  f.fail("'metric' must be elapsed or iterations");
}

TaskBody parse_metrics(Fields& f, const fs::path& base) {
  MetricsTask t;
  t.metric = f.get<std::string>("metric");
  auto file = [&](const std::string& key) { t.params[key] = existing_file(base, f.get<std::string>(key), f).string(); };
  if (t.metric == "scoap") {
    file("bench");
    const auto ctf = f.get<std::string>("ctf", "halved");
    if (ctf != "halved" && ctf != "classical") f.fail("'ctf' must be halved or classical");
    t.params["ctf"] = ctf;
  } else if (t.metric == "oh") {
    file("bench");
    t.params["node"] = f.get<std::string>("node");
    if (!read_bench_file(t.params["bench"].get<std::string>()).find_net(t.params["node"].get<std::string>()))
      f.fail("unknown node '" + t.params["node"].get<std::string>() + "'");
    t.params["exhaustive"] = f.get<bool>("exhaustive", false);
    t.params["patterns"] = f.get<std::size_t>("patterns", 4096);
    if (f.has("seed")) t.params["seed"] = f.get<std::uint64_t>("seed");
  } else if (t.metric == "fsm-fi") {
    file("fsm");
  } else if (t.metric == "puf") {
    if (f.has("responses")) file("responses");
    if (f.has("reference") || f.has("samples")) {
      file("reference");
      file("samples");
    }
    if (t.params.empty()) f.fail("puf needs 'responses' and/or 'reference' + 'samples'");
  } else if (t.metric == "cdc") {
    file("defects");
  } else {
    f.fail("unknown metric '" + t.metric + "' (scoap, oh, fsm-fi, puf, cdc)");
  }
  return t;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& config, const fs::path& base_dir) {
  Fields top(config, "config");
  ExperimentConfig c;
  c.name = top.get<std::string>("name");
  c.seed = top.get<std::uint64_t>("seed");
  c.workers = top.get<std::size_t>("workers", 1);
  if (c.workers == 0) top.fail("'workers' must be positive");
  c.output_dir = top.get<std::string>("output_dir", c.name);
  const auto& tasks = top.raw("tasks");
  if (!tasks.is_array() || tasks.empty()) top.fail("'tasks' must be a non-empty list");
  top.finish();

  std::set<std::string> names;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    Fields f(tasks[i], "task " + std::to_string(i));
    TaskSpec spec;
    spec.name = f.get<std::string>("name");
    if (spec.name.empty() || spec.name.find_first_of("/\\@") != std::string::npos || spec.name[0] == '.')
      f.fail("task name must be a plain file name");
    if (!names.insert(spec.name).second) f.fail("duplicate task name '" + spec.name + "'");
    Fields g(tasks[i], "task '" + spec.name + "'");
    g.get<std::string>("name");
    spec.kind = g.get<std::string>("kind");
    const auto& k = spec.kind;
    if (k == "attack") {
      spec.body = parse_attack(g, base_dir);
    } else if (k == "sat-fit") {
      SatFitTask t;
      t.dataset = task_ref(g, "dataset", c.tasks, "attack", base_dir, false);
      t.metric = metric_field(g);
      t.max_submodels = g.get<std::size_t>("max_submodels", 20);
      if (t.max_submodels == 0) g.fail("'max_submodels' must be positive");
      spec.body = t;
    } else if (k == "sat-estimate") {
      SatEstimateTask t;
      t.model = task_ref(g, "model", c.tasks, "sat-fit", base_dir, false);
      if (g.has("bench")) {
        const auto path = existing_file(base_dir, g.get<std::string>("bench"), g);
        const auto circuit = read_bench_file(path.string());
        t.metadata = extract_metadata(circuit, g.get<std::size_t>("key_length"));
        t.metadata.name = circuit.name();
      } else {
        Fields m(g.raw("metadata"), g.where() + " metadata");
        t.metadata.name = m.get<std::string>("name", "ip");
        t.metadata.key_length = m.get<std::size_t>("key_length");
        t.metadata.num_gates = m.get<std::size_t>("num_gates");
        t.metadata.num_primary_inputs = m.get<std::size_t>("num_pi");
        t.metadata.num_primary_outputs = m.get<std::size_t>("num_po");
        t.metadata.num_flip_flop_io = m.get<std::size_t>("num_ffio");
        m.finish();
      }
      t.crs = g.list<double>("crs");
      if (t.crs.empty()) g.fail("'crs' must not be empty");
      for (auto cr : t.crs)
        if (!(cr >= 1)) g.fail("'crs' entries must be at least 1");
      t.ip_time_s = g.get<double>("ip_time_s");
      if (!(t.ip_time_s > 0)) g.fail("'ip_time_s' must be positive");
      spec.body = t;
    } else if (k == "psc-measure") {
      PscMeasureTask t;
      t.key1 = key_field(g, "key1");
      t.key2 = key_field(g, "key2");
      t.aes_enabled = g.get<bool>("aes", true);
      if (g.has("noise_ips")) {
        const auto& list = g.raw("noise_ips");
        if (!list.is_array()) g.fail("'noise_ips' must be a list");
        for (std::size_t n = 0; n < list.size(); ++n) {
          Fields ip(list[n], g.where() + " noise_ips[" + std::to_string(n) + "]");
          NoiseIpSpec s;
          s.bench = existing_file(base_dir, ip.get<std::string>("bench"), ip);
          if (ip.has("seed")) s.seed = ip.get<std::uint64_t>("seed");
          if (ip.has("schedule")) s.schedule = schedule_field(ip.raw("schedule"), ip);
          ip.finish();
          t.noise_ips.push_back(std::move(s));
        }
      }
      if (g.has("noise_counts")) {
        t.noise_counts = g.list<std::size_t>("noise_counts");
        for (auto n : t.noise_counts)
          if (n > t.noise_ips.size()) g.fail("noise count " + std::to_string(n) + " exceeds the noise IP list");
      } else {
        t.noise_counts = {t.noise_ips.size()};
      }
      if (!t.aes_enabled && std::find(t.noise_counts.begin(), t.noise_counts.end(), 0) != t.noise_counts.end())
        g.fail("a subsystem with AES disabled needs at least one noise IP");
      t.plaintexts = g.get<std::size_t>("plaintexts", 1000);
      if (t.plaintexts < 2) g.fail("'plaintexts' must be at least 2");
      t.seeds = seeds_field(g);
      t.bins = g.get<std::size_t>("bins", kDefaultJsBins);
      t.thresholds = thresholds_field(g);
      spec.body = t;
    } else if (k == "psc-db") {
      PscDbTask t;
      t.benchmarks = bench_list(g, "benchmarks", base_dir);
      if (t.benchmarks.empty()) g.fail("'benchmarks' must not be empty");
      t.cycles = g.get<std::size_t>("cycles", 11000);
      if (t.cycles == 0) g.fail("'cycles' must be positive");
      if (g.has("seed")) t.seed = g.get<std::uint64_t>("seed");
      spec.body = t;
    } else if (k == "psc-estimate") {
      PscEstimateTask t;
      t.db = task_ref(g, "db", c.tasks, "psc-db", base_dir, true);
      t.queries = bench_list(g, "queries", base_dir);
      t.key1 = key_field(g, "key1");
      t.key2 = key_field(g, "key2");
      if (g.has("noise_counts")) {
        t.noise_counts = g.list<std::size_t>("noise_counts");
        for (auto n : t.noise_counts)
          if (n > t.queries.size()) g.fail("noise count " + std::to_string(n) + " exceeds the query list");
      } else {
        t.noise_counts = {t.queries.size()};
      }
      t.plaintexts = g.get<std::size_t>("plaintexts", 1000);
      if (t.plaintexts < 2) g.fail("'plaintexts' must be at least 2");
      t.seeds = seeds_field(g);
      t.bins = g.get<std::size_t>("bins", kDefaultJsBins);
      t.thresholds = thresholds_field(g);
      spec.body = t;
    } else if (k == "metrics") {
      spec.body = parse_metrics(g, base_dir);
    } else {
      g.fail("unknown kind '" + k + "'");
    }
    g.finish();
    c.tasks.push_back(std::move(spec));
  }
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path.string()));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_experiment_config(j, fs::absolute(path).parent_path());
}

// ------------------------------------------------------------ batch

namespace {

template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

void write_json(const fs::path& path, const json& j) { write_text_file(path.string(), j.dump(2) + "\n"); }

std::string stem(const fs::path& p) { return p.stem().string(); }

struct TaskContext {
  fs::path out;       // task directory
  fs::path root;      // batch output root
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  const BatchOverrides* overrides = nullptr;
  std::ostream* log = nullptr;
  std::mutex* log_mutex = nullptr;
  std::vector<std::string>* failures = nullptr;
  std::size_t runs = 0;
  json summary = json::array();

  void note(const std::string& line) const {
    if (!log) return;
    std::lock_guard<std::mutex> lock(*log_mutex);
    *log << line << '\n';
  }
  void fail(const std::string& id, const std::string& why) {
    failures->push_back(id + ": " + why);
    note("FAILED " + id + ": " + why);
  }
};

fs::path resolve_ref(const std::string& ref, const TaskContext& ctx, const std::string& file) {
  if (!ref.empty() && ref[0] == '@') return ctx.root / ref.substr(1) / file;
  return ref;
}

std::vector<std::uint64_t> effective_seeds(const std::vector<std::uint64_t>& seeds, const TaskContext& ctx) {
  return seeds.empty() ? std::vector<std::uint64_t>{ctx.seed} : seeds;
}

void write_report(const TaskContext& ctx, RecordKind kind, const std::vector<json>& records) {
  const auto r = make_report(kind, records);
  write_text_file((ctx.out / "report.txt").string(), r.summary);
  for (const auto& [name, csv] : r.tables) write_text_file((ctx.out / name).string(), csv);
}

void run_attack_task(const std::string& name, const AttackTask& t, TaskContext& ctx) {
  struct Run {
    fs::path bench;
    std::size_t k, cr;
    std::uint64_t seed;
    std::string id;
    json record;
    std::optional<ExperimentRecord> data;
    std::string error;
  };
  const auto seeds = effective_seeds(t.seeds, ctx);
  std::vector<Run> runs;
  for (const auto& b : t.benchmarks)
    for (auto k : t.key_lengths)
      for (auto cr : t.crs)
        for (auto s : seeds)
          runs.push_back({b, k, cr, s,
                          stem(b) + "_k" + std::to_string(k) + "_cr" + std::to_string(cr) + "_s" + std::to_string(s),
                          {}, {}, {}});

  AttackBudget budget;
  budget.max_seconds = ctx.overrides->timeout_s.value_or(t.timeout_s);
  budget.max_iterations = t.max_iterations;
  budget.solver = ctx.overrides->solver.value_or(t.solver);

  std::map<fs::path, Circuit> circuits;
  for (const auto& b : t.benchmarks)
    if (!circuits.count(b)) circuits.emplace(b, read_bench_file(b.string()));

  parallel_for(runs.size(), ctx.workers, [&](std::size_t i) {
    auto& r = runs[i];
    r.record = {{"kind", "sat"},        {"task", name},   {"id", r.id}, {"design", stem(r.bench)},
                {"key_length", r.k},    {"cr", r.cr},     {"seed", r.seed}, {"chains", t.chains},
                {"wrap_io", t.wrap_io}, {"solver", budget.solver}};
    try {
      const auto inst = prepare_attack(circuits.at(r.bench), r.k, r.seed, r.cr, t.chains, t.wrap_io);
      auto oracle = inst.make_oracle();
      const auto res = sat_attack(inst.model, *oracle, budget);
      r.record["status"] = std::string(to_string(res.status));
      r.record["iterations"] = res.iterations;
      r.record["elapsed_s"] = res.elapsed_seconds;
      r.record["recovered_key"] = res.recovered_key.to_string();
      r.record["oracle_queries"] = oracle->queries();
      r.record["num_gates"] = inst.metadata.num_gates;
      r.record["num_pi"] = inst.metadata.num_primary_inputs;
      r.record["num_po"] = inst.metadata.num_primary_outputs;
      r.record["num_ffio"] = inst.metadata.num_flip_flop_io;
      if (res.status != AttackStatus::Success) {
        r.error = "attack timed out after " + std::to_string(res.iterations) + " iterations";
        return;
      }
      if (t.verify) {
        auto check = inst.make_oracle();
        const auto v = verify_key(inst.model, *check, res.recovered_key);
        r.record["verified"] = v.equivalent;
        r.record["verify_patterns"] = v.patterns;
        r.record["verify_exhaustive"] = v.exhaustive;
        if (!v.equivalent) {
          r.error = "recovered key is not equivalent (" + std::to_string(v.mismatches) + " mismatches)";
          return;
        }
      }
      r.data = ExperimentRecord{inst.metadata, static_cast<double>(r.cr), std::max(res.elapsed_seconds, 1e-9),
                                res.iterations};
    } catch (const std::exception& e) {
      r.record["status"] = "error";
      r.error = e.what();
    }
  });

  fs::create_directories(ctx.out / "runs");
  std::ostringstream dataset, rollup;
  dataset << dataset_csv_header() << '\n';
  rollup << "id,design,key_length,cr,seed,status,iterations,verified,recovered_key,elapsed_s\n";
  std::vector<json> records;
  for (auto& r : runs) {
    if (!r.error.empty()) r.record["error"] = r.error;
    write_json(ctx.out / "runs" / (r.id + ".json"), r.record);
    records.push_back(r.record);
    ++ctx.runs;
    const auto& j = r.record;
    rollup << r.id << ',' << stem(r.bench) << ',' << r.k << ',' << r.cr << ',' << r.seed << ','
           << j.value("status", "error") << ',' << j.value("iterations", std::uint64_t{0}) << ','
           << (j.contains("verified") ? (j["verified"].get<bool>() ? "1" : "0") : "") << ','
           << j.value("recovered_key", "") << ',' << format_double(j.value("elapsed_s", 0.0)) << '\n';
    if (r.data) {
      r.data->metadata.name = stem(r.bench);
      dataset << to_dataset_csv_row(*r.data) << '\n';
    }
    if (!r.error.empty())
      ctx.fail(name + "/" + r.id, r.error);
    else
      ctx.note(name + "/" + r.id + ": " + r.record["status"].get<std::string>() + " in " +
               std::to_string(r.record["iterations"].get<std::uint64_t>()) + " iterations");
  }
  write_text_file((ctx.out / "dataset.csv").string(), dataset.str());
  write_text_file((ctx.out / "rollup.csv").string(), rollup.str());
  write_report(ctx, RecordKind::Sat, records);
}

void run_fit_task(const std::string& name, const SatFitTask& t, TaskContext& ctx) {
  ++ctx.runs;
  try {
    const auto records = read_dataset_csv(resolve_ref(t.dataset, ctx, "dataset.csv").string());
    const auto model = build_estimation_model(records, t.max_submodels, t.metric);
    fs::create_directories(ctx.out);
    write_json(ctx.out / "model.json", to_json(model));
    json names = json::array();
    for (const auto& s : model.sub_models) names.push_back(s.metadata.name + "_k" + std::to_string(s.metadata.key_length));
    write_json(ctx.out / "record.json",
               {{"kind", "sat-fit"},
                {"task", name},
                {"records", records.size()},
                {"metric", t.metric == CostMetric::Iterations ? "iterations" : "elapsed"},
                {"sub_models", names}});
    ctx.note(name + ": " + std::to_string(model.sub_models.size()) + " submodels from " +
             std::to_string(records.size()) + " records");
  } catch (const std::exception& e) {
    ctx.fail(name, e.what());
  }
}

void run_sat_estimate_task(const std::string& name, const SatEstimateTask& t, TaskContext& ctx) {
  ++ctx.runs;
  try {
    const auto model = estimation_model_from_json(
        json::parse(read_text_file(resolve_ref(t.model, ctx, "model.json").string())));
    const auto sel = select_submodel(model, t.metadata);
    const auto& sm = model.sub_models.at(sel.index);
    json estimates = json::array();
    std::ostringstream csv;
    csv << "cr,estimate_s\n";
    for (auto cr : t.crs) {
      const auto e = estimate_attack_time(model, t.metadata, cr, t.ip_time_s);
      estimates.push_back({{"cr", cr}, {"estimate_s", e}});
      csv << format_double(cr) << ',' << format_double(e) << '\n';
    }
    fs::create_directories(ctx.out);
    write_json(ctx.out / "record.json",
               {{"kind", "sat-estimate"},
                {"task", name},
                {"design", t.metadata.name},
                {"ip_time_s", t.ip_time_s},
                {"selected", sm.metadata.name + "_k" + std::to_string(sm.metadata.key_length)},
                {"similarity", sel.similarity},
                {"estimates", estimates}});
    write_text_file((ctx.out / "estimates.csv").string(), csv.str());
    ctx.note(name + ": mapped to " + sm.metadata.name);
  } catch (const std::exception& e) {
    ctx.fail(name, e.what());
  }
}

json matrix_json(const JsMatrix& m) { return {{"blocks", m.blocks}, {"values", m.values}}; }

void run_psc_measure_task(const std::string& name, const PscMeasureTask& t, TaskContext& ctx) {
  std::vector<Circuit> circuits;
  for (const auto& ip : t.noise_ips) circuits.push_back(read_bench_file(ip.bench.string()));
  struct Run {
    std::size_t count;
    std::uint64_t seed;
    std::string id;
    json record;
    std::string profiles1, profiles2, matrix;
    std::string error;
  };
  std::vector<Run> runs;
  for (auto n : t.noise_counts)
    for (auto s : effective_seeds(t.seeds, ctx))
      runs.push_back({n, s, "n" + std::to_string(n) + "_s" + std::to_string(s), {}, {}, {}, {}, {}});

  parallel_for(runs.size(), ctx.workers, [&](std::size_t i) {
    auto& r = runs[i];
    try {
      SubsystemConfig cfg;
      cfg.aes_enabled = t.aes_enabled;
      json ips = json::array();
      for (std::size_t j = 0; j < r.count; ++j) {
        const auto& spec = t.noise_ips[j];
        const auto seed = spec.seed.value_or(derive_seed(r.seed, j));
        cfg.noise_ips.push_back({stem(spec.bench), circuits[j], seed, spec.schedule});
        ips.push_back({{"name", stem(spec.bench)}, {"seed", seed}});
      }
      PscMeasureOptions o;
      o.plaintexts = t.plaintexts;
      o.plaintext_seed = r.seed;
      o.bins = t.bins;
      o.thresholds = t.thresholds;
      const auto m = measure_psc(cfg, t.key1, t.key2, o);
      r.record = {{"kind", "psc"},
                  {"mode", "measure"},
                  {"task", name},
                  {"id", r.id},
                  {"noise_count", r.count},
                  {"noise_ips", ips},
                  {"seed", r.seed},
                  {"plaintexts", t.plaintexts},
                  {"bins", t.bins},
                  {"key1", to_hex(t.key1)},
                  {"key2", to_hex(t.key2)},
                  {"js", m.js},
                  {"js_aes_only", m.js_aes_only},
                  {"js_cycle_max", m.js_cycle_max},
                  {"score", m.score},
                  {"threshold_profile", {{"name", t.thresholds.profile}, {"cuts", t.thresholds.cuts}}},
                  {"matrix", matrix_json(m.matrix)}};
      r.profiles1 = profiles_csv(m.key1);
      r.profiles2 = profiles_csv(m.key2);
      r.matrix = to_csv(m.matrix);
    } catch (const std::exception& e) {
      r.record = {{"kind", "psc"}, {"mode", "measure"}, {"task", name}, {"id", r.id}, {"error", e.what()}};
      r.error = e.what();
    }
  });

  fs::create_directories(ctx.out / "runs");
  std::ostringstream rollup;
  rollup << "id,noise_count,seed,js,js_aes_only,js_cycle_max,score\n";
  std::vector<json> records;
  for (const auto& r : runs) {
    ++ctx.runs;
    write_json(ctx.out / "runs" / (r.id + ".json"), r.record);
    records.push_back(r.record);
    if (!r.error.empty()) {
      ctx.fail(name + "/" + r.id, r.error);
      continue;
    }
    write_text_file((ctx.out / "runs" / (r.id + "_profiles_key1.csv")).string(), r.profiles1);
    write_text_file((ctx.out / "runs" / (r.id + "_profiles_key2.csv")).string(), r.profiles2);
    write_text_file((ctx.out / "runs" / (r.id + "_matrix.csv")).string(), r.matrix);
    const auto& j = r.record;
    rollup << r.id << ',' << r.count << ',' << r.seed << ',' << format_double(j["js"].get<double>()) << ','
           << format_double(j["js_aes_only"].get<double>()) << ',' << format_double(j["js_cycle_max"].get<double>())
           << ',' << j["score"].get<int>() << '\n';
    ctx.note(name + "/" + r.id + ": JS " + format_double(j["js"].get<double>()));
  }
  write_text_file((ctx.out / "rollup.csv").string(), rollup.str());
  write_report(ctx, RecordKind::Psc, records);
}

void run_psc_db_task(const std::string& name, const PscDbTask& t, TaskContext& ctx) {
  ++ctx.runs;
  try {
    std::vector<Circuit> circuits;
    for (const auto& b : t.benchmarks) circuits.push_back(read_bench_file(b.string()));
    const auto db = build_profile_db(circuits, t.cycles, t.seed.value_or(ctx.seed));
    save_profile_db(db, (ctx.out / "db").string());
    json entries = json::array();
    for (const auto& e : db.entries) entries.push_back({{"name", e.source_name}, {"stimulus_seed", e.stimulus_seed}});
    write_json(ctx.out / "record.json",
               {{"kind", "psc-db"}, {"task", name}, {"cycles", t.cycles}, {"entries", entries}});
    ctx.note(name + ": " + std::to_string(db.entries.size()) + " profiles");
  } catch (const std::exception& e) {
    ctx.fail(name, e.what());
  }
}

void run_psc_estimate_task(const std::string& name, const PscEstimateTask& t, TaskContext& ctx) {
  ProfileDb db;
  std::vector<IpMapping> mapping;
  std::vector<std::string> query_names;
  try {
    const auto dir = !t.db.empty() && t.db[0] == '@' ? ctx.root / t.db.substr(1) / "db" : fs::path(t.db);
    db = load_profile_db(dir.string());
    for (const auto& q : t.queries) {
      mapping.push_back(map_ip(extract_ip_attributes(read_bench_file(q.string())), db));
      query_names.push_back(stem(q));
    }
  } catch (const std::exception& e) {
    ++ctx.runs;
    ctx.fail(name, e.what());
    return;
  }
  struct Run {
    std::size_t count;
    std::uint64_t seed;
    std::string id;
    json record;
    std::string error;
  };
  std::vector<Run> runs;
  for (auto n : t.noise_counts)
    for (auto s : effective_seeds(t.seeds, ctx))
      runs.push_back({n, s, "n" + std::to_string(n) + "_s" + std::to_string(s), {}, {}});

  parallel_for(runs.size(), ctx.workers, [&](std::size_t i) {
    auto& r = runs[i];
    try {
      const auto pts = random_plaintexts(t.plaintexts, r.seed);
      SubsystemConfig aes_only;
      const auto a1 = simulate_subsystem(aes_only, t.key1, pts).aes;
      const auto a2 = simulate_subsystem(aes_only, t.key2, pts).aes;
      std::vector<const BenchmarkProfile*> mapped;
      json m = json::array();
      for (std::size_t j = 0; j < r.count; ++j) {
        mapped.push_back(&db.entries[mapping[j].index]);
        m.push_back({{"query", query_names[j]},
                     {"profile", db.entries[mapping[j].index].source_name},
                     {"similarity", mapping[j].similarity}});
      }
      EstimateOptions o;
      o.seed = r.seed;
      o.bins = t.bins;
      o.thresholds = t.thresholds;
      const auto e = estimate_subsystem_score(a1, a2, mapped, o);
      r.record = {{"kind", "psc"},     {"mode", "estimate"},  {"task", name},        {"id", r.id},
                  {"noise_count", r.count}, {"mapped", m},    {"seed", r.seed},      {"plaintexts", t.plaintexts},
                  {"bins", t.bins},    {"js", e.js},          {"score", e.score},
                  {"threshold_profile", {{"name", t.thresholds.profile}, {"cuts", t.thresholds.cuts}}}};
    } catch (const std::exception& e) {
      r.record = {{"kind", "psc"}, {"mode", "estimate"}, {"task", name}, {"id", r.id}, {"error", e.what()}};
      r.error = e.what();
    }
  });

  fs::create_directories(ctx.out / "runs");
  std::ostringstream rollup;
  rollup << "id,noise_count,seed,js,score\n";
  std::vector<json> records;
  for (const auto& r : runs) {
    ++ctx.runs;
    write_json(ctx.out / "runs" / (r.id + ".json"), r.record);
    records.push_back(r.record);
    if (!r.error.empty()) {
      ctx.fail(name + "/" + r.id, r.error);
      continue;
    }
    rollup << r.id << ',' << r.count << ',' << r.seed << ',' << format_double(r.record["js"].get<double>()) << ','
           << r.record["score"].get<int>() << '\n';
    ctx.note(name + "/" + r.id + ": estimated JS " + format_double(r.record["js"].get<double>()));
  }
  write_text_file((ctx.out / "rollup.csv").string(), rollup.str());
  write_report(ctx, RecordKind::Psc, records);
}

json metric_record(const std::string& task, const std::string& metric, json value, json params, json detail = {}) {
  json j{{"kind", "metrics"}, {"task", task}, {"metric", metric}, {"value", std::move(value)}, {"params", std::move(params)}};
  if (!detail.is_null()) j["detail"] = std::move(detail);
  return j;
}

void run_metrics_task(const std::string& name, const MetricsTask& t, TaskContext& ctx) {
  ++ctx.runs;
  std::vector<json> records;
  const auto& p = t.params;
  auto param_files = [&] {
    json out = p;
    for (auto it = out.begin(); it != out.end(); ++it)
      if (it->is_string() && fs::path(it->get<std::string>()).is_absolute())
        *it = fs::path(it->get<std::string>()).filename().string();
    return out;
  }();
  try {
    fs::create_directories(ctx.out);
    if (t.metric == "scoap") {
      const auto c = read_bench_file(p["bench"].get<std::string>());
      const auto form = p["ctf"] == "classical" ? CtfForm::Classical : CtfForm::Halved;
      const auto cy = controllability(c, form);
      const auto oy = observability(c);
      std::ostringstream csv;
      csv << "net,cy,oy\n";
      double mcy = 0, moy = 0;
      for (NetId n = 0; n < c.num_nets(); ++n) {
        csv << c.net_name(n) << ',' << format_double(cy[n]) << ',' << format_double(oy[n]) << '\n';
        mcy += cy[n];
        moy += oy[n];
      }
      write_text_file((ctx.out / "nets.csv").string(), csv.str());
      const double nn = static_cast<double>(c.num_nets());
      records.push_back(metric_record(name, "controllability_mean", mcy / nn, param_files));
      records.push_back(metric_record(name, "observability_mean", moy / nn, param_files));
    } else if (t.metric == "oh") {
      const auto c = read_bench_file(p["bench"].get<std::string>());
      const auto node = c.find_net(p["node"].get<std::string>());
      if (!node) throw Error("unknown node '" + p["node"].get<std::string>() + "'");
      OhOptions o;
      o.exhaustive = p["exhaustive"].get<bool>();
      o.patterns = p["patterns"].get<std::size_t>();
      o.seed = p.contains("seed") ? p["seed"].get<std::uint64_t>() : ctx.seed;
      const auto r = observation_hardness(c, *node, o);
      records.push_back(metric_record(name, "observation_hardness", r.value, param_files,
                                      {{"detected", r.detected}, {"injected", r.injected}, {"patterns", r.patterns}}));
    } else if (t.metric == "fsm-fi") {
      const auto r = fsm_fi_vulnerability(parse_fsm_csv(read_text_file(p["fsm"].get<std::string>())));
      json sf = json::array();
      for (const auto& s : r.sf) sf.push_back({{"transition", s.transition}, {"sf", s.sf}});
      records.push_back(metric_record(name, "pvt_percent", r.pvt_percent, param_files));
      records.push_back(metric_record(name, "asf", r.asf ? json(*r.asf) : json(nullptr), param_files, {{"sf", sf}}));
    } else if (t.metric == "puf") {
      if (p.contains("responses"))
        records.push_back(metric_record(
            name, "puf_inter_hd", puf_inter_hd(parse_puf_responses(read_text_file(p["responses"].get<std::string>()))),
            param_files));
      if (p.contains("reference")) {
        const auto ref = parse_puf_responses(read_text_file(p["reference"].get<std::string>()));
        if (ref.size() != 1) throw Error("the PUF reference file must hold exactly one response");
        records.push_back(metric_record(
            name, "puf_intra_hd",
            puf_intra_hd(ref[0], parse_puf_responses(read_text_file(p["samples"].get<std::string>()))), param_files));
      }
    } else if (t.metric == "cdc") {
      records.push_back(metric_record(name, "cdc", cdc(parse_defect_csv(read_text_file(p["defects"].get<std::string>()))),
                                      param_files));
    }
    fs::create_directories(ctx.out / "runs");
    for (std::size_t i = 0; i < records.size(); ++i)
      write_json(ctx.out / "runs" / (records[i]["metric"].get<std::string>() + ".json"), records[i]);
    write_report(ctx, RecordKind::Metrics, records);
    for (const auto& r : records) ctx.note(name + ": " + r["metric"].get<std::string>() + " = " + r["value"].dump());
  } catch (const std::exception& e) {
    ctx.fail(name, e.what());
  }
}

}  // namespace

BatchResult run_batch(const ExperimentConfig& config, const BatchOverrides& overrides, std::ostream* log) {
  BatchResult result;
  result.output_dir = overrides.output_dir.value_or(config.output_dir);
  fs::create_directories(result.output_dir);
  std::mutex log_mutex;
  json tasks = json::array();
  for (const auto& spec : config.tasks) {
    TaskContext ctx;
    ctx.out = result.output_dir / spec.name;
    ctx.root = result.output_dir;
    ctx.workers = overrides.workers.value_or(config.workers);
    ctx.seed = overrides.seed.value_or(config.seed);
    ctx.overrides = &overrides;
    ctx.log = log;
    ctx.log_mutex = &log_mutex;
    ctx.failures = &result.failures;
    const auto before = result.failures.size();
    fs::remove_all(ctx.out);
    fs::create_directories(ctx.out);
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, AttackTask>) run_attack_task(spec.name, body, ctx);
          else if constexpr (std::is_same_v<T, SatFitTask>) run_fit_task(spec.name, body, ctx);
          else if constexpr (std::is_same_v<T, SatEstimateTask>) run_sat_estimate_task(spec.name, body, ctx);
          else if constexpr (std::is_same_v<T, PscMeasureTask>) run_psc_measure_task(spec.name, body, ctx);
          else if constexpr (std::is_same_v<T, PscDbTask>) run_psc_db_task(spec.name, body, ctx);
          else if constexpr (std::is_same_v<T, PscEstimateTask>) run_psc_estimate_task(spec.name, body, ctx);
          else run_metrics_task(spec.name, body, ctx);
        },
        spec.body);
    result.runs += ctx.runs;
    tasks.push_back({{"name", spec.name},
                     {"kind", spec.kind},
                     {"runs", ctx.runs},
                     {"failures", json(std::vector<std::string>(result.failures.begin() + static_cast<std::ptrdiff_t>(before),
                                                                result.failures.end()))}});
  }
  write_json(result.output_dir / "summary.json",
             {{"name", config.name}, {"seed", overrides.seed.value_or(config.seed)}, {"runs", result.runs},
              {"failures", result.failures}, {"tasks", tasks}, {"exit_code", result.exit_code()}});
  return result;
}

// ------------------------------------------------------------ reports

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::Sat: return "sat";
    case RecordKind::Psc: return "psc";
    case RecordKind::Metrics: return "metrics";
  }
  return "sat";
}

RecordKind record_kind_from_string(std::string_view s) {
  if (s == "sat") return RecordKind::Sat;
  if (s == "psc") return RecordKind::Psc;
  if (s == "metrics") return RecordKind::Metrics;
  throw Error("record kind must be sat, psc or metrics, got '" + std::string(s) + "'");
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Report make_report(RecordKind kind, const std::vector<json>& records) {
  for (const auto& r : records)
    if (!r.contains("kind") || r["kind"] != to_string(kind))
      throw Error("report over '" + std::string(to_string(kind)) + "' records got a '" + r.value("kind", "?") +
                  "' record");
  Report rep;
  std::ostringstream sum, csv;
  if (kind == RecordKind::Sat) {
    // design, key length, cr -> (iterations, elapsed) of successful runs
    struct Cell {
      std::size_t runs = 0;
      std::vector<double> its, secs;
    };
    std::map<std::tuple<std::string, std::size_t, std::size_t>, Cell> cells;
    for (const auto& r : records) {
      auto& c = cells[{r.value("design", ""), r.value("key_length", std::size_t{0}), r.value("cr", std::size_t{0})}];
      ++c.runs;
      if (r.value("status", "") == "success") {
        c.its.push_back(r.value("iterations", 0.0));
        c.secs.push_back(r.value("elapsed_s", 0.0));
      }
    }
    csv << "design,key_length,cr,runs,succeeded,median_iterations,median_elapsed_s\n";
    std::string last;
    for (const auto& [key, c] : cells) {
      const auto& [design, k, cr] = key;
      csv << design << ',' << k << ',' << cr << ',' << c.runs << ',' << c.its.size() << ','
          << (c.its.empty() ? "" : format_double(median(c.its))) << ','
          << (c.secs.empty() ? "" : format_double(median(c.secs))) << '\n';
      const auto label = design + " k=" + std::to_string(k);
      if (label != last) {
        sum << (last.empty() ? "" : "\n") << label << ":";
        last = label;
      }
      sum << "  CR" << cr << " -> " << (c.its.empty() ? std::string("timeout") : format_double(median(c.its)) + " it");
    }
    sum << (records.empty() ? "no SAT records\n" : "\n");
  } else if (kind == RecordKind::Psc) {
    struct Cell {
      std::vector<double> js;
      std::vector<int> scores;
    };
    std::map<std::pair<std::string, std::size_t>, Cell> cells;
    for (const auto& r : records) {
      if (!r.contains("js")) continue;
      auto& c = cells[{r.value("mode", ""), r.value("noise_count", std::size_t{0})}];
      c.js.push_back(r["js"].get<double>());
      c.scores.push_back(r["score"].get<int>());
    }
    csv << "mode,noise_count,runs,mean_js,min_js,max_js,min_score,max_score\n";
    for (const auto& [key, c] : cells) {
      double mean = 0;
      for (auto v : c.js) mean += v / static_cast<double>(c.js.size());
      csv << key.first << ',' << key.second << ',' << c.js.size() << ',' << format_double(mean) << ','
          << format_double(*std::min_element(c.js.begin(), c.js.end())) << ','
          << format_double(*std::max_element(c.js.begin(), c.js.end())) << ','
          << *std::min_element(c.scores.begin(), c.scores.end()) << ','
          << *std::max_element(c.scores.begin(), c.scores.end()) << '\n';
      sum << key.first << " AES+" << key.second << " IPs: mean JS " << format_double(mean) << " over "
          << c.js.size() << " runs\n";
    }
    if (records.empty()) sum << "no PSC records\n";
    for (const auto& r : records) {
      if (!r.contains("matrix")) continue;
      JsMatrix m;
      m.blocks = r["matrix"]["blocks"].get<std::vector<std::string>>();
      m.values = r["matrix"]["values"].get<std::vector<std::vector<double>>>();
      rep.tables.emplace_back("js_matrix_" + r.value("id", "run") + ".csv", to_csv(m));
    }
  } else {
    csv << "metric,value\n";
    for (const auto& r : records) {
      const auto& v = r["value"];
      csv << r.value("metric", "") << ',' << (v.is_number() ? format_double(v.get<double>()) : std::string("undefined"))
          << '\n';
      sum << r.value("metric", "") << " = " << (v.is_number() ? format_double(v.get<double>()) : "undefined") << '\n';
    }
    if (records.empty()) sum << "no metric records\n";
  }
  rep.summary = sum.str();
  rep.tables.insert(rep.tables.begin(), {"report.csv", csv.str()});
  return rep;
}

std::vector<json> load_records(const fs::path& directory) {
  if (!fs::is_directory(directory)) throw Error("not a directory: " + directory.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(directory))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<json> out;
  for (const auto& f : files) {
    json j;
    try {
      j = json::parse(read_text_file(f.string()));
    } catch (const json::parse_error& e) {
      throw Error(f.string() + ": " + e.what());
    }
    if (j.is_object() && j.contains("kind") && j["kind"].is_string()) {
      const auto k = j["kind"].get<std::string>();
      if (k == "sat" || k == "psc" || k == "metrics") out.push_back(std::move(j));
    }
  }
  return out;
}

// ------------------------------------------------------------ determinism

namespace {

bool wall_clock_key(const std::string& k) {
  const std::string_view suffix = "elapsed_s";
  const bool elapsed = k.size() >= suffix.size() && k.compare(k.size() - suffix.size(), suffix.size(), suffix) == 0;
  return elapsed || k.rfind("wall_", 0) == 0;
}

void strip_wall_clock(json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end();) {
      if (wall_clock_key(it.key()))
        it = j.erase(it);
      else
        strip_wall_clock(*it++);
    }
  } else if (j.is_array()) {
    for (auto& v : j) strip_wall_clock(v);
  }
}

std::string strip_csv_columns(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<bool> keep;
  std::ostringstream out;
  bool header = true;
  while (std::getline(in, line)) {
    const auto fields = split_csv_line(line);
    if (header) {
      for (const auto& f : fields) keep.push_back(!wall_clock_key(f));
      header = false;
    }
    bool first = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i < keep.size() && !keep[i]) continue;
      out << (first ? "" : ",") << fields[i];
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::map<std::string, std::string> canonical_outputs(const fs::path& directory) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(directory)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), directory).generic_string();
    auto text = read_text_file(e.path().string());
    if (e.path().extension() == ".json") {
      auto j = json::parse(text);
      strip_wall_clock(j);
      text = j.dump(2);
    } else if (e.path().extension() == ".csv") {
      text = strip_csv_columns(text);
    }
    out.emplace(rel, std::move(text));
  }
  return out;
}

}  // namespace hwassure
