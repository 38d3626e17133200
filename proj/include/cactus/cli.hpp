#pragma once

#include "cactus/generators.hpp"
#include "cactus/io.hpp"
#include "cactus/realization.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cactus::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageOrIo = 1,
  kInvalidInput = 2,
  kNotCactus = 3,
};

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string output;  // empty: stdout
  std::string dot_output;
  bool float_mode = false;
  std::optional<double> epsilon;
  std::string format = "json";  // json | dot | csv
  std::optional<int> decimal_digits;
  int verbosity = 0;
  bool check_minimal = true;

  // gen
  std::string gen_kind = "cactus";
  std::uint64_t seed = 1;
  std::size_t n = 8;
  double cycle_fraction = 0.5;
  std::string weight_min = "1";
  std::string weight_max = "10";
  std::string slack = "any";
  std::string out_prefix;

  // bench
  std::vector<std::size_t> sizes{50, 100, 200, 400};
  std::size_t reps = 3;
};

namespace detail {

struct Io {
  std::ostream& out;
  std::ostream& err;
  const RunConfig& cfg;

  io::ValueFormat value_format() const {
    io::ValueFormat f;
    if (cfg.decimal_digits) {
      f.decimal = true;
      f.digits = *cfg.decimal_digits;
    }
    return f;
  }

  void emit(const std::string& text) const {
    if (cfg.output.empty()) {
      out << text;
    } else {
      io::write_file(cfg.output, text);
    }
  }
  void emit(const io::json& j) const { emit(j.dump(2) + "\n"); }
};

inline io::json metric_error_json(const MetricError& e) {
  return {{"valid", false}, {"error", to_string(e.kind())}, {"witness", e.witness()}};
}

template <Scalar T>
int cmd_validate(const Io& io) {
  try {
    auto m = io::read_metric<T>(io.cfg.inputs.at(0));
    io.emit(io::json{{"valid", true}, {"n", m.size()}, {"mode", scalar_traits<T>::mode_name}});
    return kOk;
  } catch (const MetricError& e) {
    io.emit(metric_error_json(e));
    return kInvalidInput;
  }
}

template <Scalar T>
io::json realization_json(const RealizationResult<T>& r, const FiniteMetric<T>& m, const io::ValueFormat& f) {
  io::json j;
  if (r.realized()) {
    j["status"] = "realized";
    j["class"] = to_string(classify_realization(r, m.size()));
    j["optimal_weight"] = io::format_value(r.graph->total_weight(), f);
    j["graph"] = io::graph_to_json(*r.graph, f);
  } else {
    j["status"] = "rejected";
    j["class"] = to_string(MetricClass::NotCactus);
    j["rejection"] = io::rejection_to_json(*r.rejection);
  }
  j["certificate"] = io::certificate_to_json(r.certificate);
  return j;
}

template <Scalar T>
int cmd_classify(const Io& io) {
  auto m = io::read_metric<T>(io.cfg.inputs.at(0));
  auto r = realize_cactus(m);
  auto cls = classify_realization(r, m.size());
  io::json j = {{"class", to_string(cls)}};
  if (!r.realized()) j["rejection"] = io::rejection_to_json(*r.rejection);
  io.emit(j);
  return r.realized() ? kOk : kNotCactus;
}

template <Scalar T>
int cmd_realize(const Io& io) {
  auto m = io::read_metric<T>(io.cfg.inputs.at(0));
  auto r = realize_cactus(m);
  const auto f = io.value_format();
  if (r.realized() && !io.cfg.dot_output.empty()) io::write_file(io.cfg.dot_output, io::graph_to_dot(*r.graph, f));
  if (io.cfg.format == "dot" && r.realized()) {
    io.emit(io::graph_to_dot(*r.graph, f));
  } else {
    io.emit(realization_json(r, m, f));
  }
  return r.realized() ? kOk : kNotCactus;
}

template <Scalar T>
int cmd_compactify(const Io& io) {
  auto g = io::read_graph<T>(io.cfg.inputs.at(0));
  auto x = x_labels(g);
  auto c = compactify(g, x, io.cfg.check_minimal);
  const auto f = io.value_format();
  if (io.cfg.format == "dot") {
    io.emit(io::graph_to_dot(c.graph, f));
  } else {
    io.emit(io::compactification_to_json(c, f));
  }
  return kOk;
}

template <Scalar T>
int cmd_metric(const Io& io) {
  auto g = io::read_graph<T>(io.cfg.inputs.at(0));
  auto m = induced_metric(g);
  if (io.cfg.format == "json") {
    io.emit(io::metric_to_json(m, io.value_format()));
  } else {
    io.emit(io::write_matrix_csv(m, io.value_format()));
  }
  return kOk;
}

template <Scalar T>
int cmd_verify(const Io& io) {
  auto g = io::read_graph<T>(io.cfg.inputs.at(0));
  auto m = io::read_metric<T>(io.cfg.inputs.at(1));
  auto bad = realization_mismatch(g, m);
  io::json j = {{"realizes", !bad}};
  if (bad) j["mismatch"] = {bad->first, bad->second};
  io.emit(j);
  return bad ? kNotCactus : kOk;
}

template <Scalar T>
int cmd_explain(const Io& io) {
  auto m = io::read_metric<T>(io.cfg.inputs.at(0));
  auto hook = [](const FiniteMetric<T>& s) {
    return std::holds_alternative<CyclicOrder<T>>(recognize_optimal_cycle(s));
  };
  auto tree = decompose(m, LeafHook<T>(hook));
  io.emit(io::decomposition_to_json(tree, io.value_format()));
  return kOk;
}

inline SlackMode parse_slack(const std::string& s) {
  if (s == "any") return SlackMode::Any;
  if (s == "some") return SlackMode::AtLeastOne;
  if (s == "none") return SlackMode::None;
  throw CLI::ValidationError("--slack", "expected any|some|none");
}

template <Scalar T>
int cmd_gen(const Io& io) {
  GenSpec spec;
  spec.seed = io.cfg.seed;
  spec.n_labels = io.cfg.n;
  spec.cycle_fraction = io.cfg.gen_kind == "tree" ? 0.0 : io.cfg.cycle_fraction;
  spec.weight_min = Rational::parse(io.cfg.weight_min);
  spec.weight_max = Rational::parse(io.cfg.weight_max);
  spec.slack = parse_slack(io.cfg.slack);
  auto inst = gen_cactus<T>(spec);
  const auto f = io.value_format();
  io::json meta = {{"rng", inst.rng},       {"seed", spec.seed},
                   {"kind", io.cfg.gen_kind}, {"n_labels", spec.n_labels},
                   {"cycle_fraction", spec.cycle_fraction}};
  auto graph = io::graph_to_json(inst.graph, f);
  graph["meta"] = meta;
  auto csv = io::write_matrix_csv(inst.metric, f);
  if (!io.cfg.out_prefix.empty()) {
    io::write_file(io.cfg.out_prefix + ".json", graph.dump(2) + "\n");
    io::write_file(io.cfg.out_prefix + ".csv", csv);
    io.emit(io::json{{"graph", io.cfg.out_prefix + ".json"}, {"matrix", io.cfg.out_prefix + ".csv"}, {"meta", meta}});
  } else {
    io.emit(io::json{{"graph", graph}, {"matrix_csv", csv}});
  }
  return kOk;
}

struct BenchRow {
  std::size_t n;
  double median;
  double min;
  double max;
};

template <Scalar T>
std::vector<BenchRow> bench(const std::vector<std::size_t>& sizes, std::size_t reps, std::uint64_t seed,
                            std::ostream* log = nullptr) {
  std::vector<BenchRow> rows;
  for (auto n : sizes) {
    std::vector<double> times;
    for (std::size_t r = 0; r < reps; ++r) {
      GenSpec spec;
      spec.seed = seed + 1000 * n + r;
      spec.n_labels = n;
      auto inst = gen_cactus<T>(spec);
      auto t0 = std::chrono::steady_clock::now();
      auto res = realize_cactus(inst.metric);
      auto t1 = std::chrono::steady_clock::now();
      if (!res.realized()) throw std::logic_error("bench: generated cactus metric was rejected");
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
      if (log) *log << "n=" << n << " rep=" << r << " " << times.back() << "s\n";
    }
    std::sort(times.begin(), times.end());
    const std::size_t k = times.size();
    double median = k % 2 ? times[k / 2] : (times[k / 2 - 1] + times[k / 2]) / 2;
    rows.push_back({n, median, times.front(), times.back()});
  }
  return rows;
}

/// Log-log slope of median runtime between the two sizes, if both ran.
inline std::optional<double> bench_slope(const std::vector<BenchRow>& rows, std::size_t a, std::size_t b) {
  auto find = [&](std::size_t n) -> const BenchRow* {
    for (const auto& r : rows) {
      if (r.n == n) return &r;
    }
    return nullptr;
  };
  auto ra = find(a), rb = find(b);
  if (!ra || !rb || ra->median <= 0 || rb->median <= 0) return std::nullopt;
  return std::log(rb->median / ra->median) / std::log(static_cast<double>(b) / static_cast<double>(a));
}

template <Scalar T>
int cmd_bench(const Io& io) {
  auto rows = bench<T>(io.cfg.sizes, io.cfg.reps, io.cfg.seed, io.cfg.verbosity > 0 ? &io.err : nullptr);
  auto slope = bench_slope(rows, 100, 400);
  if (io.cfg.format == "json") {
    io::json j = io::json::array();
    for (const auto& r : rows) j.push_back({{"n", r.n}, {"median_s", r.median}, {"min_s", r.min}, {"max_s", r.max}});
    io::json doc = {{"mode", scalar_traits<T>::mode_name}, {"reps", io.cfg.reps}, {"rows", j}};
    doc["slope_100_400"] = slope ? io::json(*slope) : io::json(nullptr);
    io.emit(doc);
    return kOk;
  }
  std::ostringstream s;
  s << std::fixed << std::setprecision(4);
  s << "n\tmedian_s\tmin_s\tmax_s\n";
  for (const auto& r : rows) s << r.n << '\t' << r.median << '\t' << r.min << '\t' << r.max << '\n';
  if (slope) s << "slope(100->400)\t" << std::setprecision(3) << *slope << '\n';
  io.emit(s.str());
  return kOk;
}

template <Scalar T>
int dispatch(const Io& io) {
  const auto& c = io.cfg.command;
  if (c == "validate") return cmd_validate<T>(io);
  if (c == "classify") return cmd_classify<T>(io);
  if (c == "realize") return cmd_realize<T>(io);
  if (c == "compactify") return cmd_compactify<T>(io);
  if (c == "metric") return cmd_metric<T>(io);
  if (c == "verify") return cmd_verify<T>(io);
  if (c == "explain") return cmd_explain<T>(io);
  if (c == "gen") return cmd_gen<T>(io);
  if (c == "bench") return cmd_bench<T>(io);
  throw CLI::ValidationError("command", "unknown command " + c);
}

}  // namespace detail

/// Runs an already parsed configuration; maps failures to exit codes.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::Io io{out, err, cfg};
  try {
    if (cfg.epsilon && !cfg.float_mode) {
      err << "error: --epsilon is only valid together with --float\n";
      return kUsageOrIo;
    }
    if (cfg.float_mode) {
      ScopedFloatTolerance tol(cfg.epsilon.value_or(float_tolerance()));
      return detail::dispatch<double>(io);
    }
    return detail::dispatch<Rational>(io);
  } catch (const MetricError& e) {
    err << "invalid metric: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const GraphError& e) {
    err << "invalid graph: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const io::FormatError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const DecompositionError& e) {
    err << "decomposition failed: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const GeneratorError& e) {
    err << "generator: " << e.what() << "\n";
    return kUsageOrIo;
  } catch (const io::IoError& e) {
    err << "io: " << e.what() << "\n";
    return kUsageOrIo;
  } catch (const CLI::Error& e) {
    err << "usage: " << e.what() << "\n";
    return kUsageOrIo;
  } catch (const std::invalid_argument& e) {
    err << "usage: " << e.what() << "\n";
    return kUsageOrIo;
  }
}

/// Parses argv (argv[0] is the program name) and runs the command.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Recognize cactus metrics and build their optimal realizations"};
  app.require_subcommand(1);
  app.fallthrough();
  bool float_mode = false;
  double epsilon = 0;
  int decimal = -1;
  auto* eps_opt = app.add_option("--epsilon", epsilon, "Relative tolerance for --float");
  app.add_flag("--float", float_mode, "Use floating point with a relative tolerance instead of exact rationals");
  app.add_option("--decimal", decimal, "Print values as decimals with this many digits");
  app.add_option("-o,--output", cfg.output, "Write the main output here instead of stdout");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "dot", "csv", "text"}));
  app.add_flag("-v,--verbose", cfg.verbosity, "More logging on stderr");

  auto matrix_cmd = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("matrix", cfg.inputs, "Distance matrix (CSV, TSV, PHYLIP or JSON)")->required()->expected(1);
    return sub;
  };
  matrix_cmd("validate", "Check the metric axioms");
  matrix_cmd("classify", "TreeMetric, Cyclelike, CactusGeneral or NotCactus");
  auto* realize = matrix_cmd("realize", "Build the optimal cactus realization");
  realize->add_option("--dot", cfg.dot_output, "Also write the realization as DOT");
  matrix_cmd("explain", "Print the decomposition tree");

  auto* compact = app.add_subcommand("compactify", "Compactify a minimal X-cactus into the optimal one");
  compact->add_option("graph", cfg.inputs, "Graph JSON")->required()->expected(1);
  compact->add_flag("!--no-minimal-check", cfg.check_minimal, "Skip the minimality precondition check");
  auto* metric = app.add_subcommand("metric", "Induced distance matrix of a graph");
  metric->add_option("graph", cfg.inputs, "Graph JSON")->required()->expected(1);
  auto* verify = app.add_subcommand("verify", "Check that a graph realizes a matrix");
  verify->add_option("files", cfg.inputs, "Graph JSON, then distance matrix")->required()->expected(2);

  auto* gen = app.add_subcommand("gen", "Generate a random X-cactus and its metric");
  gen->add_option("kind", cfg.gen_kind, "cactus or tree")->check(CLI::IsMember({"cactus", "tree"}));
  gen->add_option("--seed", cfg.seed, "RNG seed");
  gen->add_option("--n", cfg.n, "Number of labels")->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  gen->add_option("--cycle-fraction", cfg.cycle_fraction, "Chance of attaching a cycle")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--weight-min", cfg.weight_min, "Smallest edge weight");
  gen->add_option("--weight-max", cfg.weight_max, "Largest edge weight");
  gen->add_option("--slack", cfg.slack, "Slack in generated cycles: any, some or none");
  gen->add_option("--out", cfg.out_prefix, "Write PREFIX.json and PREFIX.csv");

  auto* bench = app.add_subcommand("bench", "Time realization of random cactus metrics");
  bench->add_option("--sizes", cfg.sizes, "Label counts")->delimiter(',');
  bench->add_option("--reps", cfg.reps, "Instances per size")->check(CLI::PositiveNumber);
  bench->add_option("--seed", cfg.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << "\n" << app.help();
    return kUsageOrIo;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.float_mode = float_mode;
  if (eps_opt->count()) cfg.epsilon = epsilon;
  if (decimal >= 0) cfg.decimal_digits = decimal;
  if (cfg.format == "text" && cfg.command != "bench") cfg.format = "json";
  if (cfg.command == "bench" && cfg.format == "json" && !app.get_option("--format")->count()) cfg.format = "text";
  return run(cfg, out, err);
}

}  // namespace cactus::cli
