// btom: maze validation, corpus generation, evaluation, tracing and the
// live session service.

#include <csignal>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "btom/evalharness.hpp"
#include "btom/service.hpp"

namespace {

using namespace btom;

struct RunConfig {
  std::string maze_dir = "mazes";
  std::string corpus = "corpus.jsonl";
  std::string out = "results";
  std::vector<std::string> models{"Full", "TWG", "TW", "TG", "Switching"};
  std::string measure = "S1";
  double beta = 1.5;
  double gen_beta = 10.0;
  double gamma0 = -1.0;  // measure default
  int radius = 3;
  int seeds = 20;
  std::uint64_t seed_base = 0;
  bool traces = false;
  std::string trajectory;
  std::string host = "127.0.0.1";
  int port = 8080;
};

Measure parse_measure(const std::string& s) {
  auto m = measure_from_name(s);
  if (!m) throw Error(ErrorCode::InvalidConfig, "unknown measure '" + s + "'");
  return *m;
}

EvalConfig eval_config(const RunConfig& rc) {
  EvalConfig cfg;
  cfg.model.beta = rc.beta;
  cfg.model.reveal_radius = rc.radius;
  cfg.model.validate();
  cfg.measure = parse_measure(rc.measure);
  cfg.gamma0 = rc.gamma0 > 0.0 ? rc.gamma0 : default_gamma0(cfg.measure);
  cfg.pool = default_pool(cfg.model);
  cfg.columns.clear();
  for (const auto& name : rc.models) cfg.columns.push_back(column_from_name(name));
  cfg.traces = rc.traces;
  return cfg;
}

Color variant_goal(const Maze& m) {
  const auto g = m.goal();
  if (!g) throw Error(ErrorCode::BadMazeSyntax, m.id() + " v" + std::to_string(m.variant()) + " has no goal= header");
  return *g;
}

int cmd_validate(const RunConfig& rc) {
  for (const auto& m : load_maze_dir(rc.maze_dir)) {
    const Color g = variant_goal(m);
    const Cell c = m.exits()[static_cast<std::size_t>(m.slot_of_color(g))].cell;
    std::printf("%s v%d %dx%d goal=%c optimal=%d%s\n", m.id().c_str(), m.variant(), m.width(), m.height(), to_char(g),
                true_distance(m, m.start(), c), m.has_tag("deadend") ? " deadend" : "");
  }
  return 0;
}

int cmd_generate(const RunConfig& rc) {
  if (rc.seeds <= 0) throw Error(ErrorCode::InvalidConfig, "--seeds must be positive");
  std::vector<Trajectory> corpus;
  for (const auto& m : load_maze_dir(rc.maze_dir))
    for (Condition c : kAllConditions)
      for (int i = 0; i < rc.seeds; ++i)
        corpus.push_back(generate(c, m, variant_goal(m), rc.gen_beta, rc.seed_base + static_cast<std::uint64_t>(i)));
  write_corpus(rc.corpus, corpus);
  std::printf("%zu trajectories -> %s\n", corpus.size(), rc.corpus.c_str());
  return 0;
}

int cmd_eval(const RunConfig& rc) {
  const auto mazes = load_maze_dir(rc.maze_dir);
  const auto corpus = read_corpus(rc.corpus);
  const auto tables = evaluate_corpus(mazes, corpus, eval_config(rc));
  export_tables(tables, rc.out);
  for (const auto& s : tables.skipped) std::fprintf(stderr, "skipped %s: %s\n", s.id.c_str(), s.reason.c_str());
  std::printf("%zu trajectories evaluated, %zu skipped -> %s\n", tables.results.size(), tables.skipped.size(),
              rc.out.c_str());
  return 0;
}

int cmd_trace(const RunConfig& rc) {
  const auto mazes = load_maze_dir(rc.maze_dir);
  const auto corpus = read_corpus(rc.corpus);
  auto it = std::find_if(corpus.begin(), corpus.end(), [&](const Trajectory& t) { return t.id() == rc.trajectory; });
  if (it == corpus.end()) throw Error(ErrorCode::UnknownTrajectory, "no trajectory '" + rc.trajectory + "'");
  EvalConfig cfg = eval_config(rc);
  cfg.traces = true;
  MetricTables tables;
  tables.measure = cfg.measure;
  for (const auto& c : cfg.columns) tables.columns.push_back(c.name);
  tables.results.push_back(evaluate_trajectory(find_maze(mazes, it->maze, it->variant), *it, cfg));
  const std::string text = trace_text(tables, tables.results.back());
  if (rc.out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(rc.out, std::ios::binary);
    if (!(f << text)) throw Error(ErrorCode::IoError, "cannot write " + rc.out);
  }
  return 0;
}

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const RunConfig& rc) {
  ServiceConfig sc;
  sc.model.beta = rc.beta;
  sc.model.reveal_radius = rc.radius;
  sc.model.validate();
  Service service(load_maze_dir(rc.maze_dir), sc);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const int port = service.bind(rc.host, rc.port);
  std::printf("listening on http://%s:%d\n", rc.host.c_str(), port);
  std::fflush(stdout);
  service.run();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;
  CLI::App app{"Bayesian theory-of-mind models for gridworld mazes"};
  app.require_subcommand(1);

  auto add_mazes = [&](CLI::App* c) { c->add_option("--mazes", rc.maze_dir, "Maze directory")->capture_default_str(); };
  auto add_model = [&](CLI::App* c) {
    c->add_option("--beta", rc.beta, "Evaluator rationality")->capture_default_str();
    c->add_option("--radius", rc.radius, "Reveal radius")->capture_default_str();
    c->add_option("--measure", rc.measure, "S1 or S2")->capture_default_str();
    c->add_option("--gamma0", rc.gamma0, "Initial switching threshold (default: 20 for S1, 1.5 for S2)");
    c->add_option("--models", rc.models, "Columns to evaluate")->capture_default_str();
  };

  auto* validate = app.add_subcommand("validate", "Check every maze file");
  add_mazes(validate);

  auto* gen = app.add_subcommand("generate", "Write a synthetic corpus");
  add_mazes(gen);
  gen->add_option("--corpus", rc.corpus, "Output corpus")->capture_default_str();
  gen->add_option("--seeds", rc.seeds, "Seeds per maze variant and condition")->capture_default_str();
  gen->add_option("--seed-base", rc.seed_base, "First seed")->capture_default_str();
  gen->add_option("--gen-beta", rc.gen_beta, "Generator rationality")->capture_default_str();

  auto* ev = app.add_subcommand("eval", "Evaluate a corpus and export tables");
  add_mazes(ev);
  add_model(ev);
  ev->add_option("--corpus", rc.corpus, "Input corpus")->capture_default_str();
  ev->add_option("--out", rc.out, "Output directory")->capture_default_str();
  ev->add_flag("--traces", rc.traces, "Also write per-trajectory traces");

  auto* tr = app.add_subcommand("trace", "Per-step trace of one trajectory");
  add_mazes(tr);
  add_model(tr);
  tr->add_option("--corpus", rc.corpus, "Input corpus")->capture_default_str();
  tr->add_option("--id", rc.trajectory, "Trajectory id")->required();
  tr->add_option("--out", rc.out, "Output file, - for stdout");

  auto* serve = app.add_subcommand("serve", "Run the session service");
  add_mazes(serve);
  serve->add_option("--beta", rc.beta, "Evaluator rationality")->capture_default_str();
  serve->add_option("--radius", rc.radius, "Reveal radius")->capture_default_str();
  serve->add_option("--host", rc.host)->capture_default_str();
  serve->add_option("--port", rc.port)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  if (tr->parsed() && tr->count("--out") == 0) rc.out = "-";
  try {
    if (validate->parsed()) return cmd_validate(rc);
    if (gen->parsed()) return cmd_generate(rc);
    if (ev->parsed()) return cmd_eval(rc);
    if (tr->parsed()) return cmd_trace(rc);
    if (serve->parsed()) return cmd_serve(rc);
  } catch (const Error& e) {
    std::fprintf(stderr, "btom: %s\n", e.what());
    return 1;
  }
  return 1;
}
