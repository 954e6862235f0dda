#include "cli.hpp"

#include "gradarg/af_format.hpp"
#include "gradarg/analysis.hpp"
#include "gradarg/corpus.hpp"
#include "gradarg/error.hpp"
#include "gradarg/http_service.hpp"
#include "gradarg/json_io.hpp"
#include "gradarg/resolver.hpp"
#include "gradarg/session.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace gradarg::cli {

namespace {

struct Options {
  std::string framework;
  std::string scenario;
  std::string semantics = "qe";
  std::string mode = "auto";
  std::string strategy = "lexicographic";
  std::vector<std::string> rank;
  std::vector<std::string> activate;
  std::vector<std::string> deactivate;
  std::vector<std::string> set_base;
  bool activate_all = false;
  bool json = false;
  int precision = 6;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string out;
  std::string filter = "all";
  bool keep_inert = false;
  std::string method = "auto";
  std::size_t samples = 20000;
  std::string target;
  std::size_t points = 11;
  std::vector<double> grid;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string storage;
};

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

EvalConfig eval_config(const Options& o) {
  EvalConfig c;
  if (o.mode == "auto") {
    c.mode = EvalMode::Auto;
  } else if (o.mode == "topological") {
    c.mode = EvalMode::Topological;
  } else if (o.mode == "iterative") {
    c.mode = EvalMode::Iterative;
  } else {
    throw Error(ErrorCode::InvalidArgument, "mode must be auto, topological or iterative");
  }
  return c;
}

// Applies --activate-all / --activate / --deactivate / --set-base on top of the file's own flags.
Framework prepared(const Framework& f, const Options& o) {
  auto args = f.argument_list();
  auto find = [&](const std::string& raw) -> Argument& {
    const auto id = normalize_id(raw);
    for (auto& a : args) {
      if (a.id == id) return a;
    }
    throw Error(ErrorCode::UnknownArgument, "unknown argument '" + raw + "'");
  };
  if (o.activate_all) {
    for (auto& a : args) a.active = true;
  }
  for (const auto& id : o.activate) find(id).active = true;
  for (const auto& id : o.deactivate) find(id).active = false;
  for (const auto& spec : o.set_base) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--set-base expects ID=VALUE");
    double v = 0.0;
    try {
      v = std::stod(spec.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad base score in '" + spec + "'");
    }
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::BadScore, "base score outside [0,1] in '" + spec + "'");
    find(spec.substr(0, eq)).base_score = v;
  }
  return Framework(std::move(args), f.relations(), f.options(), f.users(), f.preferences());
}

CorpusEntry load(const std::string& name_or_path) {
  if (name_or_path.empty()) throw Error(ErrorCode::InvalidArgument, "no framework or scenario given");
  return load_corpus_or_file(name_or_path);
}

// Writes to --out when given, stdout otherwise.
template <typename Writer>
void emit(const Options& o, std::ostream& out, Writer write) {
  if (o.out.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw Error(ErrorCode::NotFound, "cannot write '" + o.out + "'");
  write(file);
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  SourceDocument doc;
  try {
    doc = read_document(o.framework);
  } catch (const Error&) {
    doc = load(o.framework).document;
  }
  const auto result = parse_framework(doc);
  for (const auto& e : result.errors) err << format_error(e, doc.origin) << '\n';
  if (!result.ok()) return 1;
  const auto report = validate_structure(*result.framework);
  for (const auto& w : report.warnings) err << doc.origin << ": warning: " << w.code << ": " << w.message << '\n';
  if (o.json) {
    out << to_json(report).dump(2) << '\n';
  } else {
    out << "ok arguments=" << result.framework->arguments().size()
        << " relations=" << result.framework->relations().size() << " warnings=" << report.warnings.size() << '\n';
  }
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto f = prepared(load(o.framework).framework, o);
  const auto s = evaluate(f, parse_semantics(o.semantics), eval_config(o));
  if (o.json) {
    out << to_json(s).dump(2) << '\n';
    return 0;
  }
  out << "argument,strength\n";
  for (const auto& [id, v] : s.values) out << id << ',' << fixed(v, o.precision) << '\n';
  return 0;
}

int cmd_classify(const Options& o, std::ostream& out) {
  const auto f = load(o.framework).framework;
  const auto cls = classify(f.total_preferences());
  if (o.json) {
    out << to_json(cls).dump(2) << '\n';
    return 0;
  }
  out << "labels=";
  bool first = true;
  for (auto l : cls.labels) {
    out << (first ? "" : ",") << to_string(l);
    first = false;
  }
  out << " overall=" << (cls.overall == Overall::Conflict ? "conflict" : "no_conflict") << '\n';
  return 0;
}

int cmd_resolve(const Options& o, std::ostream& out) {
  const auto f = prepared(load(o.framework).framework, o);
  TieBreakStrategy strategy;
  strategy.kind = parse_tie_break(o.strategy);
  if (strategy.kind == TieBreakKind::Interactive) {
    throw Error(ErrorCode::InvalidArgument, "the interactive strategy needs a session; use 'serve'");
  }
  for (const auto& r : o.rank) strategy.rank.push_back(normalize_id(r));
  const auto d = mupcr(f, parse_semantics(o.semantics), strategy, eval_config(o));
  if (o.json) {
    out << to_json(d).dump(2) << '\n';
    return 0;
  }
  out << "decision=" << *d.selected;
  for (const auto& opt : f.options()) out << " σ(" << opt << ")=" << fixed(d.strengths.at(opt), o.precision);
  out << '\n';
  return 0;
}

EnumerateOptions enumerate_options(const Options& o, ScenarioFilter filter) {
  EnumerateOptions e;
  e.filter = filter;
  e.keep_inert = o.keep_inert;
  e.jobs = o.jobs;
  return e;
}

int cmd_enumerate(const Options& o, std::ostream& out) {
  const auto entry = load(o.scenario.empty() ? o.framework : o.scenario);
  const auto kind = parse_semantics(o.semantics);
  std::vector<ScenarioFilter> filters;
  if (o.filter == "every") {
    filters = {ScenarioFilter::All, ScenarioFilter::RootActive, ScenarioFilter::RiskRemoved};
  } else {
    filters = {parse_filter(o.filter)};
  }
  std::vector<DistributionTable> tables;
  for (auto f : filters) {
    tables.push_back(enumerate_decisions(entry.scenario, kind, eval_config(o), enumerate_options(o, f)));
  }
  emit(o, out, [&](std::ostream& s) { write_distribution_csv(s, tables, o.precision); });
  return 0;
}

int cmd_attribute(const Options& o, std::ostream& out) {
  const auto f = prepared(load(o.framework).framework, o);
  AttributionOptions a;
  if (o.method == "auto") {
    a.method = AttributionMethod::Auto;
  } else if (o.method == "exact") {
    a.method = AttributionMethod::ExactShapley;
  } else if (o.method == "sampling") {
    a.method = AttributionMethod::PermutationSampling;
  } else {
    throw Error(ErrorCode::InvalidArgument, "method must be auto, exact or sampling");
  }
  a.samples = o.samples;
  a.seed = o.seed;
  a.jobs = o.jobs;
  const auto table = relation_attribution(f, parse_semantics(o.semantics), a, eval_config(o));
  if (o.json) {
    emit(o, out, [&](std::ostream& s) { s << to_json(table).dump(2) << '\n'; });
  } else {
    emit(o, out, [&](std::ostream& s) { write_attribution_csv(s, table, o.precision); });
  }
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto entry = load(o.scenario.empty() ? o.framework : o.scenario);
  ArgumentId target = o.target.empty() ? (entry.scenario.risk.empty() ? "" : entry.scenario.risk.front())
                                       : normalize_id(o.target);
  if (target.empty()) throw Error(ErrorCode::InvalidArgument, "--target is required for this scenario");
  const auto grid = o.grid.empty() ? linear_grid(0.0, 1.0, o.points) : o.grid;
  const auto result = base_score_sweep(entry.scenario, target, grid, parse_semantics(o.semantics), eval_config(o),
                                       enumerate_options(o, parse_filter(o.filter)));
  emit(o, out, [&](std::ostream& s) { write_sweep_csv(s, result, o.precision); });
  return 0;
}

int cmd_serve(const Options& o, std::ostream& out) {
  SessionManager sessions(o.storage);
  HttpService service(sessions);
  out << "listening on http://" << o.host << ':' << o.port << std::endl;
  if (!service.listen(o.host, o.port)) throw Error(ErrorCode::InvalidArgument, "cannot bind port " + std::to_string(o.port));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Multi-user gradual argumentation engine", "gradarg"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto add_framework = [&](CLI::App* c, bool required = true) {
    auto* opt = c->add_option("--framework,-f", o.framework, "An .af file or a bundled corpus name");
    if (required) opt->required();
  };
  auto add_semantics = [&](CLI::App* c) {
    c->add_option("--semantics,-s", o.semantics, "qe, dfquad or euler")->capture_default_str();
    c->add_option("--mode", o.mode, "auto, topological or iterative")->capture_default_str();
  };
  auto add_activation = [&](CLI::App* c) {
    c->add_flag("--activate-all", o.activate_all, "Activate every non-option argument");
    c->add_option("--activate", o.activate, "Arguments to activate")->delimiter(',');
    c->add_option("--deactivate", o.deactivate, "Arguments to deactivate")->delimiter(',');
    c->add_option("--set-base", o.set_base, "ID=VALUE base-score overrides")->delimiter(',');
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--precision", o.precision, "Decimals in numeric output")->capture_default_str()->check(
        CLI::Range(0, 17));
    c->add_flag("--json", o.json, "JSON output");
  };
  auto add_parallel = [&](CLI::App* c) {
    c->add_option("--jobs,-j", o.jobs, "Worker threads (0 = all cores)")->capture_default_str();
    c->add_option("--out,-o", o.out, "Write output to a file");
  };
  auto add_scenario = [&](CLI::App* c) {
    c->add_option("--scenario", o.scenario, "Bundled corpus name or .af file");
    add_framework(c, false);
    c->add_option("--filter", o.filter, "all, root_active, risk_removed or every")->capture_default_str();
    c->add_flag("--keep-inert", o.keep_inert, "Keep arguments with no path to an option when removing the risk");
  };

  auto* validate = app.add_subcommand("validate", "Parse and check a framework");
  add_framework(validate);
  add_common(validate);

  auto* eval = app.add_subcommand("eval", "Final strengths of the active arguments");
  add_framework(eval);
  add_semantics(eval);
  add_activation(eval);
  add_common(eval);

  auto* classify_cmd = app.add_subcommand("classify", "Conflict labels of the preference profile");
  add_framework(classify_cmd);
  add_common(classify_cmd);

  auto* resolve = app.add_subcommand("resolve", "Select an option");
  add_framework(resolve);
  add_semantics(resolve);
  add_activation(resolve);
  add_common(resolve);
  resolve->add_option("--strategy", o.strategy, "lexicographic or external_rank")->capture_default_str();
  resolve->add_option("--rank", o.rank, "Option order for external_rank")->delimiter(',');

  auto* enumerate = app.add_subcommand("enumerate", "Decision distribution over all toggle assignments");
  add_scenario(enumerate);
  add_semantics(enumerate);
  add_common(enumerate);
  add_parallel(enumerate);

  auto* attribute = app.add_subcommand("attribute", "Shapley attribution of relations");
  add_framework(attribute);
  add_semantics(attribute);
  add_activation(attribute);
  add_common(attribute);
  add_parallel(attribute);
  attribute->add_option("--method", o.method, "auto, exact or sampling")->capture_default_str();
  attribute->add_option("--samples", o.samples, "Permutations when sampling")->capture_default_str();
  attribute->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Base-score sensitivity of one argument");
  add_scenario(sweep);
  add_semantics(sweep);
  add_common(sweep);
  add_parallel(sweep);
  sweep->add_option("--target", o.target, "Argument whose base score is swept (default: the risk argument)");
  sweep->add_option("--points", o.points, "Evenly spaced grid points over [0,1]")->capture_default_str();
  sweep->add_option("--grid", o.grid, "Explicit grid values")->delimiter(',');

  auto* serve = app.add_subcommand("serve", "Start the session HTTP service");
  serve->add_option("--port,-p", o.port, "TCP port")->capture_default_str();
  serve->add_option("--host", o.host, "Bind address")->capture_default_str();
  serve->add_option("--storage", o.storage, "Directory for session logs (in-memory when empty)");

  std::vector<std::string> args(raw.rbegin(), raw.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (e.get_exit_code() != 0) err << app.help();
    return 2;
  }

  try {
    if (*validate) return cmd_validate(o, out, err);
    if (*eval) return cmd_eval(o, out);
    if (*classify_cmd) return cmd_classify(o, out);
    if (*resolve) return cmd_resolve(o, out);
    if (*enumerate) return cmd_enumerate(o, out);
    if (*attribute) return cmd_attribute(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*serve) return cmd_serve(o, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace gradarg::cli
