#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cecdpop/cecdpop.hpp"

namespace fs = std::filesystem;
using namespace cecdpop;

namespace {

enum Exit { kOk = 0, kUsage = 2, kInfeasible = 3, kVerifyFailed = 4, kBudget = 5 };

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw InvalidConfig("bad integer list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidConfig("empty list");
  return out;
}

// "8", "5..12" (step 1) or "0.1..0.9:0.2".
std::vector<double> parse_sweep(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) return {std::stod(text)};
    const double lo = std::stod(text.substr(0, dots));
    auto rest = text.substr(dots + 2);
    double step = 1.0;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = std::stod(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const double hi = std::stod(rest);
    if (!(step > 0) || hi < lo) throw InvalidConfig("bad sweep '" + text + "'");
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) out.push_back(std::round((lo + step * static_cast<double>(k)) * 1e9) / 1e9);
    return out;
  } catch (const std::logic_error&) {
    throw InvalidConfig("bad sweep '" + text + "'");
  }
}

std::vector<Algorithm> parse_algos(const std::string& name) {
  if (name == "all") return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<Algorithm> out;
  std::stringstream ss(name);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_algorithm(item));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DcopError("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string family;
  std::size_t n = 0;
  std::size_t d = 5;
  double density = 0.5;
  double hard_fraction = 0.5;
  Utility lo = 0;
  Utility hi = 100;
  std::size_t freqs = 10;
  std::string sep = "3,4";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  DcopInstance p;
  if (a.family == "random") {
    RandomDcopConfig c;
    c.n = a.n;
    c.d = a.d;
    c.density = a.density;
    c.hard_fraction = a.hard_fraction;
    c.utility_lo = a.lo;
    c.utility_hi = a.hi;
    c.seed = a.seed;
    p = gen_random(c);
  } else {
    RlfaConfig c;
    c.n = a.n;
    c.freqs = a.freqs;
    c.separations = parse_int_list(a.sep);
    c.density = a.density;
    c.seed = a.seed;
    p = gen_rlfa(c);
  }
  write_text(a.out, print_instance(p));
  return kOk;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string path;
  std::string algo = "cec-dpop";
  std::uint64_t order_seed = 0;
  std::size_t budget = kDefaultTableBudget;
  bool no_prune = false;
  bool phases = false;
  std::string transcript;
};

int cmd_solve(const SolveArgs& a) {
  DcopInstance p;
  try {
    p = load_instance(a.path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << a.path << ": " << e.what() << '\n';
    return kUsage;
  }
  const auto algos = parse_algos(a.algo);
  std::cout << "algo,status,utility,messages,entries,max_entries,rounds,surviving_values,millis\n";
  std::vector<std::string> details;
  Transcript transcript;
  bool infeasible = false;
  bool budget = false;
  std::optional<Utility> first;
  bool disagree = false;
  for (auto algo : algos) {
    SolveOptions o;
    o.order_seed = a.order_seed;
    o.table_budget = a.budget;
    o.prune_domains = !a.no_prune;
    if (!a.transcript.empty()) o.transcript = &transcript;
    SolveResult r;
    try {
      r = solve(p, algo, o);
    } catch (const BudgetExceeded& e) {
      std::cout << to_string(algo) << ",budget,,,,,,,\n";
      details.push_back(std::string(to_string(algo)) + ": " + e.what());
      budget = true;
      continue;
    } catch (const RoundLimitExceeded& e) {
      std::cout << to_string(algo) << ",timeout,,,,,,,\n";
      details.push_back(std::string(to_string(algo)) + ": " + e.what());
      budget = true;
      continue;
    }
    const auto t = r.metrics.total();
    std::cout << to_string(algo) << ',' << (r.feasible ? "feasible" : "infeasible") << ',';
    if (r.feasible) std::cout << r.utility;
    std::cout << ',' << t.messages << ',' << t.entries << ',' << t.max_entries << ',' << t.rounds << ','
              << r.surviving_values << ',' << t.millis << '\n';
    infeasible = infeasible || !r.feasible;
    if (r.feasible) {
      if (first && *first != r.utility) disagree = true;
      if (!first) first = r.utility;
      std::ostringstream os;
      os << "assignment " << to_string(algo) << ':';
      for (std::size_t x = 0; x < r.assignment.size(); ++x) os << " x" << x << '=' << r.assignment[x];
      details.push_back(os.str());
    }
    if (a.phases) {
      std::istringstream in(r.metrics.to_csv());
      std::string line;
      while (std::getline(in, line)) details.push_back("phases " + std::string(to_string(algo)) + ": " + line);
    }
  }
  for (const auto& d : details) std::cout << d << '\n';
  if (!a.transcript.empty()) {
    std::string text;
    for (const auto& l : transcript.lines) text += l + "\n";
    write_text(a.transcript, text);
  }
  if (disagree) {
    std::cerr << "error: algorithms disagree on the optimum\n";
    return kVerifyFailed;
  }
  if (budget) return kBudget;
  return infeasible ? kInfeasible : kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string family = "random";
  std::string n = "10";
  std::string d = "5";
  std::string density = "0.5";
  std::string hard_fraction = "0.5";
  std::string sep = "3,4";
  std::size_t instances = 30;
  std::uint64_t seed = 0;
  std::string algo = "all";
  bool shapes = false;
  std::size_t budget = kDefaultTableBudget;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  if (a.family != "random" && a.family != "rlfa") throw InvalidConfig("unknown family '" + a.family + "'");
  BenchOptions o;
  o.instances = a.instances;
  o.base_seed = a.seed;
  o.algorithms = parse_algos(a.algo);
  o.shapes_only = a.shapes;
  o.table_budget = a.budget;
  const auto ns = parse_sweep(a.n);
  const auto ds = parse_sweep(a.d);
  const auto rhos = parse_sweep(a.density);
  const auto hfs = parse_sweep(a.hard_fraction);
  const auto seps = parse_int_list(a.sep);

  std::string csv = std::string(BenchRow::kCsvHeader) + "\n";
  std::size_t index = 0;
  double c1 = -1;
  std::size_t timeouts = 0;
  for (auto n : ns) {
    for (auto d : ds) {
      for (auto rho : rhos) {
        for (auto hf : hfs) {
          SweepPoint point;
          point.family = a.family;
          point.n = static_cast<std::size_t>(std::llround(n));
          point.d = static_cast<std::size_t>(std::llround(d));
          point.density = rho;
          point.hard_fraction = hf;
          point.separations = seps;
          for (const auto& row : run_point(point, index++, o)) {
            csv += row.csv() + "\n";
            c1 = std::max(c1, row.ac_c1);
            timeouts += row.timeouts;
          }
        }
      }
    }
  }
  write_text(a.out, csv);
  if (c1 >= 0) std::cerr << "fitted c1 (ac messages / (d*|X|), max over runs) = " << c1 << "\n";
  if (timeouts) std::cerr << timeouts << " runs exceeded the budget; their rows are marked timeout\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::vector<std::string> paths;
  std::size_t seeds = 0;
  std::uint64_t budget = oracle::kDefaultBudget;
};

// Fresh corpus for --seeds: small random and RLFA instances, cycling shapes.
DcopInstance seeded_instance(std::size_t i) {
  static const double densities[] = {0.3, 0.5, 0.8};
  static const double hard[] = {0.2, 0.5, 0.8};
  if (i % 4 == 3) {
    RlfaConfig c;
    c.n = 4 + i % 5;
    c.freqs = 3 + (i / 4) % 4;
    c.separations = {static_cast<int>(i % 3), static_cast<int>(i % 3) + 1};
    c.density = i % 2 ? 0.8 : 0.5;
    c.seed = 50000 + i;
    return gen_rlfa(c);
  }
  RandomDcopConfig c;
  c.n = 5 + (i / 3) % 5;
  c.density = std::max(densities[i % 3], 2.0 / static_cast<double>(c.n));
  c.d = 2 + (i / 5) % 3;
  c.hard_fraction = hard[(i / 2) % 3];
  c.seed = 50000 + i;
  return gen_random(c);
}

int cmd_verify(const VerifyArgs& a) {
  std::vector<std::string> files;
  for (const auto& p : a.paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".dcop") found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty() && a.seeds == 0) {
    std::cerr << "verify: nothing to check (give paths or --seeds)\n";
    return kUsage;
  }
  VerifyOptions vo;
  vo.oracle_budget = a.budget;
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t skip = 0;
  auto report = [&](const std::string& label, const DcopInstance& p) {
    for (const auto& c : verify_instance(p, vo)) {
      std::cout << to_string(c.status) << ' ' << label << ' ' << c.name;
      if (!c.detail.empty()) std::cout << ": " << c.detail;
      std::cout << '\n';
      pass += c.status == CheckStatus::Pass;
      fail += c.status == CheckStatus::Fail;
      skip += c.status == CheckStatus::Skip;
    }
  };
  for (const auto& f : files) {
    DcopInstance p;
    try {
      p = load_instance(f);
    } catch (const DcopError& e) {
      std::cout << "FAIL " << f << " parse: " << e.what() << '\n';
      ++fail;
      continue;
    }
    report(f, p);
  }
  for (std::size_t i = 0; i < a.seeds; ++i) report("seed#" + std::to_string(i), seeded_instance(i));
  std::cout << "summary: " << pass << " pass, " << fail << " fail, " << skip << " skip\n";
  return fail ? kVerifyFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CeC-DPOP solver, generators and benchmarks"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a seeded instance in the dcop text format");
  generate->add_option("family", gen.family, "random or rlfa")->required()->check(CLI::IsMember({"random", "rlfa"}));
  generate->add_option("--n", gen.n, "number of variables")->required();
  generate->add_option("--d", gen.d, "domain size (random)");
  generate->add_option("--density", gen.density, "graph density in (0, 1]");
  generate->add_option("--hard-fraction", gen.hard_fraction, "share of edges that are hard (random)");
  generate->add_option("--lo", gen.lo, "lowest soft utility (random)");
  generate->add_option("--hi", gen.hi, "highest soft utility (random)");
  generate->add_option("--freqs", gen.freqs, "frequency count (rlfa)");
  generate->add_option("--sep", gen.sep, "separation set, comma separated (rlfa)");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("-o,--out", gen.out, "output file (default stdout)");

  SolveArgs sol;
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance file on the simulator");
  solve_cmd->add_option("path", sol.path, "instance file")->required();
  solve_cmd->add_option("--algo", sol.algo, "dpop, bfs-dpop, ac-dpop, cec-dpop, a comma list, or all");
  solve_cmd->add_option("--order-seed", sol.order_seed, "shuffle within-round processing order (0 = by id)");
  solve_cmd->add_option("--budget", sol.budget, "largest UTIL hypercube, in entries");
  solve_cmd->add_flag("--no-prune", sol.no_prune, "keep values with no surviving cross-edge pair");
  solve_cmd->add_flag("--phases", sol.phases, "print per-phase metrics");
  solve_cmd->add_option("--transcript", sol.transcript, "write the message transcript to this file (- for stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "run a sweep and print one CSV row per point and algorithm");
  bench_cmd->add_option("--family", bench.family, "random or rlfa");
  bench_cmd->add_option("--n", bench.n, "variables: value or lo..hi[:step]");
  bench_cmd->add_option("--d", bench.d, "domain size (frequency count for rlfa): value or range");
  bench_cmd->add_option("--density", bench.density, "density: value or range");
  bench_cmd->add_option("--hard-fraction", bench.hard_fraction, "hard share (random): value or range");
  bench_cmd->add_option("--sep", bench.sep, "separation set (rlfa)");
  bench_cmd->add_option("--instances", bench.instances, "instances per point");
  bench_cmd->add_option("--seed", bench.seed, "base seed");
  bench_cmd->add_option("--algo", bench.algo, "algorithms, comma list or all");
  bench_cmd->add_flag("--shapes", bench.shapes, "account UTIL by message shape only, no tables");
  bench_cmd->add_option("--budget", bench.budget, "largest UTIL hypercube, in entries");
  bench_cmd->add_option("-o,--out", bench.out, "output CSV (default stdout)");

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "cross-check instances against the brute-force oracles");
  verify_cmd->add_option("paths", ver.paths, "instance files or directories");
  verify_cmd->add_option("--seeds", ver.seeds, "also check this many freshly generated instances");
  verify_cmd->add_option("--budget", ver.budget, "oracle enumeration budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*solve_cmd) return cmd_solve(sol);
    if (*bench_cmd) return cmd_bench(bench);
    if (*verify_cmd) return cmd_verify(ver);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const DcopError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
