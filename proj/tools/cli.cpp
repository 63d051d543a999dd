#include "cli.hpp"

#include "rentharmony/errors.hpp"
#include "rentharmony/harmony.hpp"
#include "rentharmony/http_service.hpp"
#include "rentharmony/multisperner.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <pthread.h>
#include <thread>

namespace rentharmony::cli {

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConstructionError(path + " is not valid JSON: " + e.what());
  }
}

// `-` is stdout; an empty path writes nothing.
void write_json(const std::string& path, const nlohmann::json& j, std::ostream& out) {
  if (path.empty()) return;
  if (path == "-") {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write " + path);
  f << j.dump(2) << '\n';
}

Rational rational_of(const nlohmann::json& x) {
  if (x.is_string()) return parse_rational(x.get<std::string>());
  if (x.is_number_integer()) return Rational(x.get<std::int64_t>());
  throw ConstructionError("expected an integer or a rational string, got " + x.dump());
}

SpernerLabeling labeling_of(const nlohmann::json& j) {
  if (j.contains("random")) {
    const auto& r = j.at("random");
    return random_sperner_labeling(r.at("n").get<int>(), r.at("m").get<Coord>(), r.value("seed", std::uint64_t{0}));
  }
  return labeling_from_json(j);
}

std::string cents_list(const nlohmann::json& a) {
  std::string s;
  for (const auto& x : a) s += (s.empty() ? "" : " ") + std::to_string(x.get<std::int64_t>());
  return s;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string file;
  Coord m = 0;
  std::optional<std::uint64_t> seed;
  std::string strategy;
  std::string out;
  std::string trace;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  auto spec = read_json(a.file);
  if (!spec.is_object()) throw ConstructionError("problem must be a JSON object");
  if (a.m > 0) spec["m"] = a.m;
  if (a.seed) spec["seed"] = *a.seed;
  if (!a.strategy.empty()) spec["strategy"] = a.strategy;
  const auto problem = problem_from_json(spec);
  const auto sol = solve(problem);
  const auto j = solution_to_json(sol);

  std::ostream& summary = a.out == "-" ? err : out;
  write_json(a.out, j, out);
  if (!a.trace.empty()) {
    std::ofstream t(a.trace);
    write_trace_jsonl(t, sol.trace);
  }

  summary << "strategy " << to_string(sol.strategy) << ", m = " << sol.m << ", " << sol.trace.steps
          << " walk steps, " << sol.queries << " oracle queries\n";
  summary << "prices (cents): " << cents_list(j["prices_cents"]) << "\n";
  for (std::size_t s = 0; s < sol.assignments.size(); ++s) {
    summary << "secretive roommate takes room " << s + 1 << ":";
    for (std::size_t r = 0; r < sol.assignments[s].size(); ++r) {
      summary << "  roommate " << r + 1 << " -> room " << sol.assignments[s][r];
    }
    summary << (sol.envy[s].ok() ? "" : "  (envy check failed)") << "\n";
  }
  summary << "envy-free within " << floor_cents(sol.envy_tolerance) << " cent(s): " << (j["envy_ok"] ? "yes" : "no")
          << "\n";
  if (!sol.overrides.empty()) summary << sol.overrides.size() << " boundary answer(s) overridden\n";
  return j["envy_ok"].get<bool>() ? kOk : kInternal;
}

// ---------------------------------------------------------------------------

int cmd_verify(const std::string& file, std::uint64_t max_cells, std::ostream& out) {
  const auto l = labeling_from_json(read_json(file));
  const auto points = enumerate_lattice_points(l.n(), l.resolution()).size();
  if (points > max_cells) {
    throw GridTooLarge("grid has " + std::to_string(points) + " vertices, guard is " + std::to_string(max_cells));
  }
  const auto bad = validate_sperner(l, true, max_cells);
  if (!bad.empty()) {
    out << bad.size() << " violation(s)\n";
    for (const auto& v : bad) out << "  " << to_string(v.vertex) << " label " << v.label << ": " << v.reason << "\n";
    return kDomain;
  }
  const auto cells = enumerate_fully_labeled(l, max_cells);
  out << "valid Sperner labeling, n = " << l.n() << ", m = " << l.resolution() << "\n";
  out << "count=" << cells.size() << (cells.size() % 2 ? " (odd)" : " (even)") << "\n";
  return cells.size() % 2 ? kOk : kInternal;
}

// ---------------------------------------------------------------------------

int cmd_multisperner(const std::string& file, std::uint64_t seed, const std::string& out_path, std::ostream& out,
                     std::ostream& err) {
  const auto spec = read_json(file);
  const auto mode = spec.at("mode").get<std::string>();
  std::vector<SpernerLabeling> ls;
  for (const auto& l : spec.at("labelings")) ls.push_back(labeling_of(l));
  if (ls.empty()) throw ConstructionError("no labelings given");
  std::ostream& summary = out_path == "-" ? err : out;

  if (mode == "capture") {
    RVec y;
    for (const auto& x : spec.at("y")) y.push_back(rational_of(x));
    if (!check_capture_hypothesis(y, static_cast<Coord>(ls.size()))) {
      throw HypothesisFailure("y lies in the convex hull of " + std::to_string(y.size() - 1) +
                              " lattice points; capture is not guaranteed");
    }
    const auto r = find_capture_cell(ls, y, false, seed);
    write_json(out_path, capture_to_json(r), out);
    summary << "capture cell:";
    for (const auto& v : r.vertices) summary << " " << to_string(v);
    summary << "\nmultiplicities:";
    for (const auto& v : r.multiplicities) summary << " " << to_string(v);
    summary << "\n";
    return kOk;
  }
  if (mode == "distinct") {
    DistinctCountSpec ds{ls[0].n(), spec.at("k").get<std::vector<int>>()};
    if (auto p = ds.problem()) throw HypothesisFailure("invalid distinct-count spec: " + *p);
    const auto r = find_distinct_count_cell(ls, ds, seed);
    if (auto why = verify_beta_certificate(r.certificate, ds)) throw InternalInconsistency("certificate: " + *why);
    write_json(out_path, distinct_to_json(r), out);
    summary << "distinct-count cell: " << to_string(r.cell) << "\nlabels per labeling:";
    for (std::size_t j = 0; j < ds.k.size(); ++j) {
      summary << " " << r.certificate.support_counts[j] << "/" << ds.k[j];
    }
    summary << "\ncertificate ok\n";
    return kOk;
  }
  throw ConstructionError("mode must be 'capture' or 'distinct', got '" + mode + "'");
}

// ---------------------------------------------------------------------------

struct ServeArgs {
  std::string addr = "127.0.0.1:8080";
  std::string dir = "sessions";
  std::uint64_t seed = 0;
  std::vector<std::string> cors;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  const auto colon = a.addr.rfind(':');
  int port = -1;
  if (colon != std::string::npos && colon > 0) {
    try {
      std::size_t used = 0;
      port = std::stoi(a.addr.substr(colon + 1), &used);
      if (used != a.addr.size() - colon - 1) port = -1;
    } catch (const std::exception&) {
      port = -1;
    }
  }
  if (port < 0 || port > 65535) {
    err << "bad --addr '" << a.addr << "', expected host:port\n";
    return kUsage;
  }
  const auto host = a.addr.substr(0, colon);

  ServiceConfig cfg;
  cfg.dir = a.dir;
  cfg.default_seed = a.seed;
  cfg.cors_allowlist = a.cors;
  SessionStore store(cfg);
  for (const auto& p : store.load_all()) err << "skipping " << p << "\n";

  // Signals are taken by a dedicated thread, which stops the server.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  sigset_t old;
  pthread_sigmask(SIG_BLOCK, &set, &old);

  HttpService service(store);
  const int bound = service.bind(host, port);
  if (bound < 0) {
    pthread_sigmask(SIG_SETMASK, &old, nullptr);
    err << "cannot listen on " << a.addr << "\n";
    return kDomain;
  }
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&set, &sig);
    service.stop();
  });
  out << "listening on " << host << ":" << bound << ", " << store.size() << " session(s) loaded from " << a.dir
      << std::endl;
  service.run();
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  pthread_sigmask(SIG_SETMASK, &old, nullptr);
  store.persist_all();
  out << "stopped, " << store.size() << " session(s) saved" << std::endl;
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Envy-free rent division and multi-labeling Sperner tools"};
  app.set_version_flag("--version", std::string(RENTHARMONY_VERSION));
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Divide the rent for a problem file");
  solve_cmd->add_option("problem", solve_args.file, "Problem JSON")->required();
  solve_cmd->add_option("--m", solve_args.m, "Grid resolution (default: twice the rent in cents)");
  solve_cmd->add_option("--seed", solve_args.seed, "Perturbation seed");
  solve_cmd->add_option("--strategy", solve_args.strategy, "general or n3-trapdoor")
      ->check(CLI::IsMember({"general", "n3-trapdoor"}));
  solve_cmd->add_option("--out", solve_args.out, "Write the solution JSON here ('-' for stdout)");
  solve_cmd->add_option("--trace", solve_args.trace, "Write the walk as JSON lines");

  std::string verify_file;
  std::uint64_t max_cells = 2'000'000;
  auto* verify_cmd = app.add_subcommand("verify", "Check a labeling and count its fully labeled cells");
  verify_cmd->add_option("labeling", verify_file, "Labeling JSON")->required();
  verify_cmd->add_option("--max-cells", max_cells, "Refuse grids with more vertices than this");

  std::string ms_file, ms_out;
  std::uint64_t ms_seed = 0;
  auto* ms_cmd = app.add_subcommand("multisperner", "Capture or distinct-count search over several labelings");
  ms_cmd->add_option("spec", ms_file, "Spec JSON with mode capture or distinct")->required();
  ms_cmd->add_option("--seed", ms_seed, "Perturbation seed");
  ms_cmd->add_option("--out", ms_out, "Write the certificate JSON here (default '-')");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the session HTTP service");
  serve_cmd->add_option("--addr", serve_args.addr, "host:port to listen on");
  serve_cmd->add_option("--dir", serve_args.dir, "Session directory");
  serve_cmd->add_option("--seed", serve_args.seed, "Default seed for new sessions");
  serve_cmd->add_option("--cors", serve_args.cors, "Allowed browser origins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args, out, err);
    if (*verify_cmd) return cmd_verify(verify_file, max_cells, out);
    if (*ms_cmd) return cmd_multisperner(ms_file, ms_seed, ms_out.empty() ? "-" : ms_out, out, err);
    if (*serve_cmd) return cmd_serve(serve_args, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InternalInconsistency& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const HypothesisFailure& e) {
    err << "hypothesis failed: " << e.what() << "\n";
    return kDomain;
  } catch (const ConditionViolation& e) {
    err << "condition violated: " << e.what() << "\n";
    return kDomain;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kDomain;
  }
  return kUsage;
}

}  // namespace rentharmony::cli
