#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hwassure/experiment.hpp"
#include "hwassure/platform.hpp"
#include "hwassure/psc_estimation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hwassure;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> workers;
  std::optional<double> timeout_s;
  std::optional<std::string> solver;
};

// Relative output paths live under HWASSURE_OUT_ROOT when it is set.
fs::path resolve_out(const std::string& out, const std::string& fallback) {
  fs::path p = out.empty() ? fallback : out;
  if (p.is_relative())
    if (const char* root = std::getenv("HWASSURE_OUT_ROOT"); root && *root) p = fs::path(root) / p;
  return p;
}

std::uint64_t seed_of(const Globals& g) { return g.seed.value_or(1); }

BatchOverrides overrides_of(const Globals& g) {
  BatchOverrides o;
  o.workers = g.workers;
  o.timeout_s = g.timeout_s;
  o.solver = g.solver;
  o.seed = g.seed;
  return o;
}

int run_config(const ExperimentConfig& config, const Globals& g, const std::string& fallback_out) {
  auto o = overrides_of(g);
  o.output_dir = resolve_out(g.out.empty() ? config.output_dir.string() : g.out, fallback_out);
  const auto res = run_batch(config, o, &std::cerr);
  for (const auto& t : config.tasks) {
    const auto report = res.output_dir / t.name / "report.txt";
    if (fs::exists(report)) std::cout << std::ifstream(report).rdbuf();
  }
  std::cout << res.runs << " runs, " << res.failures.size() << " failed; outputs in " << res.output_dir.string()
            << '\n';
  return res.exit_code();
}

// Wraps one task into a config resolved against the working directory.
int run_single(const std::string& kind, json task, const Globals& g) {
  task["name"] = kind;
  task["kind"] = task.value("kind", kind);
  const json cfg{{"name", kind}, {"seed", seed_of(g)}, {"tasks", {task}}};
  return run_config(parse_experiment_config(cfg, fs::current_path()), g, kind + "_out");
}

json seeds_json(const std::vector<std::uint64_t>& seeds) { return seeds; }

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardware assurance toolkit: logic-locking SAT attacks under scan compression, power side-channel "
               "leakage measurement and estimation, and assurance metric calculators."};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Experiment config (JSON); runs the whole batch")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Base seed (overrides the config seed)");
  app.add_option("--out", g.out, "Output path; relative paths resolve under $HWASSURE_OUT_ROOT when set");
  app.add_option("--workers", g.workers, "Parallel runs")->check(CLI::PositiveNumber);
  app.add_option("--timeout-s", g.timeout_s, "Per-attack wall-clock budget")->check(CLI::PositiveNumber);
  app.add_option("--solver", g.solver, "builtin or dimacs:<path>");

  int rc = 0;

  // ---- run
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->callback([&] {
    if (g.config.empty()) throw ConfigError("run needs --config");
    rc = run_config(load_experiment_config(g.config), g, "out");
  });

  // ---- lock
  std::string bench;
  std::size_t key_length = 0;
  auto* lock = app.add_subcommand("lock", "Insert random XOR/XNOR key gates");
  lock->add_option("bench", bench, "Input .bench")->required()->check(CLI::ExistingFile);
  lock->add_option("-k,--key-length", key_length, "Number of key gates")->required();
  lock->callback([&] {
    const auto locked = insert_random_locking(read_bench_file(bench), key_length, seed_of(g));
    const auto out = resolve_out(g.out, fs::path(bench).stem().string() + "_k" + std::to_string(key_length) + ".bench");
    write_bench_file(locked.core, out.string());
    auto key_path = out;
    key_path.replace_extension(".key");
    write_key_file(locked.correct_key, key_path.string());
    std::cout << "wrote " << out.string() << " and " << key_path.string() << '\n';
  });

  // ---- frame
  auto* fr = app.add_subcommand("frame", "Expose flip-flops as pseudo primary I/O");
  fr->add_option("bench", bench, "Sequential .bench")->required()->check(CLI::ExistingFile);
  fr->callback([&] {
    const auto out = resolve_out(g.out, fs::path(bench).stem().string() + "_frame.bench");
    const auto m = frame(read_bench_file(bench));
    write_bench_file(m.frame, out.string());
    std::cout << "wrote " << out.string() << " (" << m.ff_inputs.size() << " flops framed)\n";
  });

  // ---- compose
  std::size_t chains = 16, cr = 1;
  bool wrap = false;
  auto* comp = app.add_subcommand("compose", "Frame a design behind a scan decompressor and compactor");
  comp->add_option("bench", bench, "Sequential (or --wrap combinational) .bench")->required()->check(CLI::ExistingFile);
  comp->add_option("--chains", chains, "Internal scan chains");
  comp->add_option("--cr", cr, "Compression ratio (chains per channel)");
  comp->add_flag("--wrap", wrap, "Scan-wrap a combinational design first");
  comp->callback([&] {
    auto c = read_bench_file(bench);
    if (wrap) c = scan_wrap(c);
    const auto topo = ScanTopology::for_flops(c.flip_flops().size(), chains, cr);
    const auto pf = compose_platform_frame(frame(c), topo);
    const auto out = resolve_out(g.out, fs::path(bench).stem().string() + "_cr" + std::to_string(cr) + ".bench");
    write_bench_file(pf.circuit, out.string());
    std::cout << "wrote " << out.string() << ": " << topo.num_chains << " chains x " << topo.chain_length << ", "
              << topo.external_channels << " channels, " << pf.scan_in.size() << " scan-in and "
              << pf.scan_out.size() << " scan-out ports\n";
  });

  // ---- attack
  std::vector<std::string> benches;
  std::vector<std::size_t> key_lengths, crs{1};
  std::vector<std::uint64_t> seeds;
  std::uint64_t max_iterations = 0;
  bool no_verify = false;
  std::string locked_path, key_path;
  auto* atk = app.add_subcommand("attack", "Oracle-guided SAT attack over a benchmark x key x CR grid");
  atk->add_option("--bench", benches, "Benchmarks to lock and attack")->check(CLI::ExistingFile);
  atk->add_option("-k,--key-length", key_lengths, "Key lengths");
  atk->add_option("--cr", crs, "Compression ratios");
  atk->add_option("--seeds", seeds, "Locking seeds (default: --seed)");
  atk->add_option("--chains", chains, "Internal scan chains");
  atk->add_flag("--wrap-io", wrap, "Reach combinational designs through a scan wrapper");
  atk->add_option("--max-iterations", max_iterations, "Iteration cap (0 = none)");
  atk->add_flag("--no-verify", no_verify, "Skip equivalence check of the recovered key");
  atk->add_option("--locked", locked_path, "Attack an already-locked .bench instead")->check(CLI::ExistingFile);
  atk->add_option("--key", key_path, "Correct-key sidecar for --locked (drives the oracle)")->check(CLI::ExistingFile);
  atk->callback([&] {
    if (!locked_path.empty()) {
      if (key_path.empty()) throw ConfigError("--locked needs --key");
      const auto locked = make_locked(read_bench_file(locked_path), read_key_file(key_path));
      AttackBudget budget;
      budget.max_seconds = g.timeout_s.value_or(3600.0);
      budget.max_iterations = max_iterations;
      budget.solver = g.solver.value_or("builtin");
      std::unique_ptr<Oracle> oracle;
      LockedCircuit model = locked;
      if (locked.core.is_combinational()) {
        oracle = std::make_unique<CircuitOracle>(locked);
      } else {
        const auto topo = ScanTopology::for_flops(locked.core.flip_flops().size(), chains, crs.front());
        oracle = std::make_unique<ScanOracle>(locked, topo);
        model = platform_attack_model(locked, topo);
      }
      const auto r = sat_attack(model, *oracle, budget);
      json j{{"design", locked.core.name()},     {"key_length", locked.key_length()},
             {"cr", locked.core.is_combinational() ? 1 : crs.front()},
             {"iterations", r.iterations},      {"elapsed_s", r.elapsed_seconds},
             {"status", std::string(to_string(r.status))}, {"recovered_key", r.recovered_key.to_string()}};
      if (r.status == AttackStatus::Success && !no_verify) j["verified"] = verify_key(model, *oracle, r.recovered_key).equivalent;
      write_out(g.out, j.dump(2) + "\n");
      rc = r.status == AttackStatus::Success && j.value("verified", true) ? 0 : 1;
      return;
    }
    if (benches.empty() || key_lengths.empty()) throw ConfigError("attack needs --bench and --key-length (or --locked)");
    json t{{"benchmarks", benches}, {"key_lengths", key_lengths}, {"crs", crs},          {"chains", chains},
           {"wrap_io", wrap},       {"verify", !no_verify},       {"max_iterations", max_iterations}};
    if (!seeds.empty()) t["seeds"] = seeds_json(seeds);
    rc = run_single("attack", t, g);
  });

  // ---- sat-fit
  std::string dataset, metric = "elapsed";
  std::size_t max_submodels = 20;
  auto* fit = app.add_subcommand("sat-fit", "Fit CR-multiplier submodels from an attack dataset");
  fit->add_option("dataset", dataset, "Dataset CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--metric", metric, "elapsed or iterations")->check(CLI::IsMember({"elapsed", "iterations"}));
  fit->add_option("--max-submodels", max_submodels, "Submodels kept");
  fit->callback([&] {
    const auto records = read_dataset_csv(dataset);
    const auto model = build_estimation_model(
        records, max_submodels, metric == "iterations" ? CostMetric::Iterations : CostMetric::ElapsedSeconds);
    write_out(g.out.empty() ? "-" : resolve_out(g.out, "").string(), to_json(model).dump(2) + "\n");
  });

  // ---- sat-estimate
  std::string model_path, metadata_row;
  std::vector<double> est_crs;
  double ip_time = 0;
  auto* est = app.add_subcommand("sat-estimate", "Estimate platform-level attack time from an IP-level time");
  est->add_option("model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  est->add_option("--bench", bench, "IP netlist (metadata extracted)")->check(CLI::ExistingFile);
  est->add_option("-k,--key-length", key_length, "Key length used with --bench");
  est->add_option("--metadata", metadata_row, "name,key_length,num_gates,num_pi,num_po,num_ffio");
  est->add_option("--cr", est_crs, "Compression ratios")->required();
  est->add_option("--ip-time-s", ip_time, "IP-level attack time in seconds")->required();
  est->callback([&] {
    const auto model = estimation_model_from_json(json::parse(std::ifstream(model_path)));
    CircuitMetadata m;
    if (!bench.empty()) {
      const auto c = read_bench_file(bench);
      m = extract_metadata(c, key_length);
      m.name = c.name();
    } else {
      std::vector<std::string> f;
      std::stringstream ss(metadata_row);
      for (std::string s; std::getline(ss, s, ',');) f.push_back(s);
      if (f.size() != 6) throw ConfigError("--metadata needs 6 comma-separated fields");
      try {
        m = {f[0], std::stoul(f[1]), std::stoul(f[2]), std::stoul(f[3]), std::stoul(f[4]), std::stoul(f[5])};
      } catch (const std::exception&) {
        throw ConfigError("--metadata fields 2-6 must be integers");
      }
    }
    const auto sel = select_submodel(model, m);
    json rows = json::array();
    for (auto c : est_crs) rows.push_back({{"cr", c}, {"estimate_s", estimate_attack_time(model, m, c, ip_time)}});
    write_out("-", json{{"design", m.name},
                        {"selected", model.sub_models[sel.index].metadata.name},
                        {"similarity", sel.similarity},
                        {"estimates", rows}}
                       .dump(2) +
                       "\n");
  });

  // ---- psc-measure
  std::string key1 = std::string(32, '0'), key2 = std::string(32, 'f');
  std::vector<std::string> noise;
  std::vector<std::size_t> noise_counts;
  std::size_t plaintexts = 1000, bins = kDefaultJsBins;
  bool no_aes = false;
  auto* pm = app.add_subcommand("psc-measure", "Measure subsystem JS leakage between two AES keys");
  pm->add_option("--key1", key1, "First AES key (hex)");
  pm->add_option("--key2", key2, "Second AES key (hex)");
  pm->add_option("--noise", noise, "Noise IP netlists")->check(CLI::ExistingFile);
  pm->add_option("--noise-counts", noise_counts, "Prefix sizes of --noise to evaluate");
  pm->add_option("--plaintexts", plaintexts, "Plaintexts per key");
  pm->add_option("--seeds", seeds, "Plaintext seeds (default: --seed)");
  pm->add_option("--bins", bins, "Histogram bins (0 = exact support)");
  pm->add_flag("--no-aes", no_aes, "Leave the AES core out of the subsystem");
  pm->callback([&] {
    json ips = json::array();
    for (const auto& n : noise) ips.push_back({{"bench", n}});
    json t{{"key1", key1}, {"key2", key2}, {"aes", !no_aes}, {"noise_ips", ips}, {"plaintexts", plaintexts}, {"bins", bins}};
    if (!noise_counts.empty()) t["noise_counts"] = noise_counts;
    if (!seeds.empty()) t["seeds"] = seeds_json(seeds);
    rc = run_single("psc-measure", t, g);
  });

  // ---- psc-db
  std::size_t cycles = 11000;
  auto* pdb = app.add_subcommand("psc-db", "Build a switching-profile database from benchmark netlists");
  pdb->add_option("--bench", benches, "Benchmarks")->required()->check(CLI::ExistingFile);
  pdb->add_option("--cycles", cycles, "Cycles simulated per benchmark");
  pdb->callback([&] { rc = run_single("psc-db", {{"benchmarks", benches}, {"cycles", cycles}}, g); });

  // ---- psc-estimate
  std::string db;
  auto* pe = app.add_subcommand("psc-estimate", "Estimate subsystem JS from mapped database profiles");
  pe->add_option("--db", db, "Profile database directory")->required()->check(CLI::ExistingDirectory);
  pe->add_option("--query", noise, "Noise IP netlists to map")->check(CLI::ExistingFile);
  pe->add_option("--key1", key1, "First AES key (hex)");
  pe->add_option("--key2", key2, "Second AES key (hex)");
  pe->add_option("--noise-counts", noise_counts, "Prefix sizes of --query to evaluate");
  pe->add_option("--plaintexts", plaintexts, "Plaintexts per key");
  pe->add_option("--seeds", seeds, "Seeds (default: --seed)");
  pe->add_option("--bins", bins, "Histogram bins (0 = exact support)");
  pe->callback([&] {
    json t{{"db", db}, {"queries", noise}, {"key1", key1}, {"key2", key2}, {"plaintexts", plaintexts}, {"bins", bins}};
    if (!noise_counts.empty()) t["noise_counts"] = noise_counts;
    if (!seeds.empty()) t["seeds"] = seeds_json(seeds);
    rc = run_single("psc-estimate", t, g);
  });

  // ---- metrics
  auto* met = app.add_subcommand("metrics", "Assurance metric calculators");
  met->require_subcommand(1);
  std::string ctf = "halved", node, file, reference, samples;
  std::size_t patterns = 4096;
  bool exhaustive = false;
  auto metric_task = [&](const std::string& name, json params) {
    params["kind"] = "metrics";
    params["metric"] = name;
    rc = run_single("metrics", params, g);
  };
  auto* scoap = met->add_subcommand("scoap", "Probability-based controllability and observability");
  scoap->add_option("bench", bench, "Combinational .bench")->required()->check(CLI::ExistingFile);
  scoap->add_option("--ctf", ctf, "halved or classical")->check(CLI::IsMember({"halved", "classical"}));
  scoap->callback([&] { metric_task("scoap", {{"bench", bench}, {"ctf", ctf}}); });
  auto* oh = met->add_subcommand("oh", "Observation hardness of one node by fault simulation");
  oh->add_option("bench", bench, "Combinational .bench")->required()->check(CLI::ExistingFile);
  oh->add_option("--node", node, "Net name")->required();
  oh->add_option("--patterns", patterns, "Random patterns");
  oh->add_flag("--exhaustive", exhaustive, "Enumerate all input patterns");
  oh->callback([&] {
    metric_task("oh", {{"bench", bench}, {"node", node}, {"patterns", patterns}, {"exhaustive", exhaustive}});
  });
  auto* fsm = met->add_subcommand("fsm-fi", "FSM fault-injection vulnerability");
  fsm->add_option("fsm", file, "FSM CSV")->required()->check(CLI::ExistingFile);
  fsm->callback([&] { metric_task("fsm-fi", {{"fsm", file}}); });
  auto* puf = met->add_subcommand("puf", "PUF inter- and intra-Hamming distance");
  puf->add_option("--responses", file, "One response per line, from different chips")->check(CLI::ExistingFile);
  puf->add_option("--reference", reference, "Reference response of one chip")->check(CLI::ExistingFile);
  puf->add_option("--samples", samples, "Repeated responses of the same chip")->check(CLI::ExistingFile);
  puf->callback([&] {
    json p = json::object();
    if (!file.empty()) p["responses"] = file;
    if (!reference.empty()) p["reference"] = reference;
    if (!samples.empty()) p["samples"] = samples;
    metric_task("puf", p);
  });
  auto* cdc = met->add_subcommand("cdc", "Counterfeit defect coverage");
  cdc->add_option("defects", file, "Defect CSV")->required()->check(CLI::ExistingFile);
  cdc->callback([&] { metric_task("cdc", {{"defects", file}}); });

  // ---- report
  std::string kind = "sat", in_dir;
  auto* rep = app.add_subcommand("report", "Summarize run records into text and CSV");
  rep->add_option("dir", in_dir, "Directory of run records")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--kind", kind, "sat, psc or metrics")->check(CLI::IsMember({"sat", "psc", "metrics"}));
  rep->callback([&] {
    const auto r = make_report(record_kind_from_string(kind), load_records(in_dir));
    std::cout << r.summary;
    if (!g.out.empty()) {
      const auto out = resolve_out(g.out, "");
      fs::create_directories(out);
      for (const auto& [name, csv] : r.tables) write_out((out / name).string(), csv);
      std::cout << "tables in " << out.string() << '\n';
    } else {
      std::cout << '\n' << r.tables.front().second;
    }
  });

  // ---- synth
  std::vector<std::string> rows;
  auto* syn = app.add_subcommand("synth", "Generate synthetic netlists matching reference IP attribute rows");
  syn->add_option("rows", rows, "Reference row names (default: all)");
  syn->callback([&] {
    const auto dir = resolve_out(g.out, ".");
    fs::create_directories(dir);
    if (rows.empty())
      for (const auto& r : reference_ip_attributes()) rows.push_back(r.name);
    for (const auto& r : rows) {
      const auto name = r + "_syn";
      const auto c = generate_profile_circuit(reference_ip_attributes(r), seed_of(g), name);
      write_out((dir / (name + ".bench")).string(), "# synthetic: random netlist matching the " + r +
                                                         " attribute row, seed " + std::to_string(seed_of(g)) +
                                                         "\n" + write_bench(c));
    }
    std::cout << "wrote " << rows.size() << " netlists to " << dir.string() << '\n';
  });

  try {
    app.parse(argc, argv);
    if (!app.get_subcommands().size()) {
      if (g.config.empty()) {
        std::cout << app.help();
        return 0;
      }
      rc = run_config(load_experiment_config(g.config), g, "out");
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
