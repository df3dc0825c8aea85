#include "cli.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dtsim/compile.h"
#include "dtsim/error.h"
#include "dtsim/indep_test.h"
#include "dtsim/protogen.h"
#include "dtsim/random.h"
#include "dtsim/runtime.h"
#include "json.hpp"

namespace dtsim {
namespace {

using Json = nlohmann::ordered_json;

// What one invocation read and wrote, for --manifest.
struct Session {
  std::string subcommand;
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

std::string read_file(Session& s, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  s.inputs.push_back(path);
  return buf.str();
}

// Writes to `path`, or to `out` when path is empty or "-".
void write_output(Session& s, const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text) || !f.flush()) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  s.outputs.push_back(path);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Program apply_order(Program p, const std::string& order) {
  return order.empty() ? p : with_party_order(std::move(p), split_list(order));
}

Circuit load_circuit(Session& s, const std::string& file, const std::string& builtin) {
  if (!file.empty()) return parse_bristol(read_file(s, file));
  return builtin_circuit(builtin);
}

struct TestFlags {
  std::size_t iters = 100;
  std::size_t train = 1024;
  std::size_t test = 256;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string json;
  bool no_wall_time = false;

  void add_to(CLI::App* app) {
    app->add_option("--iters", iters, "Test iterations")->capture_default_str();
    app->add_option("--train", train, "Training rows per iteration")->capture_default_str();
    app->add_option("--test", test, "Testing rows per iteration")->capture_default_str();
    app->add_option("--alpha", alpha, "Significance level")->capture_default_str();
    app->add_option("--seed", seed, "Root seed")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads, 0 for all cores")->capture_default_str();
    app->add_option("--json", json, "Report path (default stdout)");
    app->add_flag("--no-wall-time", no_wall_time, "Write wallSeconds as 0");
  }
  TestConfig config() const {
    TestConfig c;
    c.iters = iters;
    c.train_n = train;
    c.test_n = test;
    c.alpha = alpha;
    c.seed = seed;
    c.threads = threads;
    return c;
  }
  Json to_json() const {
    return {{"iters", iters}, {"trainN", train}, {"testN", test}, {"alpha", alpha}, {"seed", seed}};
  }
};

int finish_test(Session& s, const TestFlags& flags, const TestReport& report, std::ostream& out) {
  write_output(s, flags.json, report_json(report, !flags.no_wall_time), out);
  if (!flags.json.empty() && flags.json != "-") {
    out << to_string(report.verdict) << " p=" << report.p_value << "\n";
  }
  return report.verdict == Verdict::kInsecure ? kExitInsecure : kExitOk;
}

std::uint64_t run_seed(std::uint64_t seed) { return derive_seed(seed, {kTagTape}); }

ViewTable run_views(const Program& p, std::size_t runs, const std::vector<PartyId>& corrupt,
                    std::uint64_t seed) {
  const Executable exe(p);
  return extract_views(exe.run(TapeSet::uniform(exe.shape(), runs, run_seed(seed)), runs), corrupt);
}

GenConfig gen_config_from_json(const Json& j) {
  GenConfig c;
  c.parties = j.value("parties", c.parties);
  c.secret_bits = j.value("secretBits", c.secret_bits);
  c.random_bits = j.value("randomBits", c.random_bits);
  c.output_bits = j.value("outputBits", c.output_bits);
  c.body_len = j.value("bodyLen", c.body_len);
  c.max_width = j.value("maxWidth", c.max_width);
  c.usage_bias = j.value("usageBias", c.usage_bias);
  c.seed = j.value("seed", c.seed);
  if (j.contains("opWeights")) {
    const Json& w = j["opWeights"];
    c.weights.local = w.value("local", c.weights.local);
    c.weights.send = w.value("send", c.weights.send);
    c.weights.oblivious = w.value("oblivious", c.weights.oblivious);
    c.weights.flip = w.value("flip", c.weights.flip);
  }
  return c;
}

Json gen_config_to_json(const GenConfig& c) {
  return {{"parties", c.parties},
          {"secretBits", c.secret_bits},
          {"randomBits", c.random_bits},
          {"outputBits", c.output_bits},
          {"bodyLen", c.body_len},
          {"maxWidth", c.max_width},
          {"usageBias", c.usage_bias},
          {"opWeights",
           {{"local", c.weights.local},
            {"send", c.weights.send},
            {"oblivious", c.weights.oblivious},
            {"flip", c.weights.flip}}},
          {"seed", c.seed}};
}

FilterOptions filter_from_json(const Json& j) {
  FilterOptions o;
  o.test.iters = j.value("iters", o.test.iters);
  o.test.train_n = j.value("trainN", o.test.train_n);
  o.test.test_n = j.value("testN", o.test.test_n);
  o.test.alpha = j.value("alpha", o.test.alpha);
  o.test.seed = j.value("seed", o.test.seed);
  o.max_attempts = j.value("maxAttempts", o.max_attempts);
  if (j.contains("corrupt")) o.corrupt = j["corrupt"].get<std::vector<std::string>>();
  return o;
}

Json filter_to_json(const FilterOptions& o) {
  return {{"iters", o.test.iters},   {"trainN", o.test.train_n},
          {"testN", o.test.test_n},  {"alpha", o.test.alpha},
          {"seed", o.test.seed},     {"corrupt", o.corrupt},
          {"maxAttempts", o.max_attempts}};
}

std::string numbered(std::size_t i) {
  std::ostringstream name;
  name << "prog_" << std::setw(4) << std::setfill('0') << i << ".cho";
  return name.str();
}

void write_manifest(const std::string& path, const Session& s, const std::vector<std::string>& args,
                    int code, double wall) {
  Json j;
  j["subcommand"] = s.subcommand;
  j["args"] = args;
  j["seed"] = s.seed;
  j["config"] = s.config;
  Json inputs = Json::array();
  for (const std::string& p : s.inputs) inputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  j["inputs"] = std::move(inputs);
  Json outputs = Json::array();
  for (const std::string& p : s.outputs) outputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  j["outputs"] = std::move(outputs);
  j["exitCode"] = code;
  j["wallSeconds"] = wall;
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << j.dump(2) << "\n")) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int replay(const std::string& path, std::ostream& out, std::ostream& err) {
  Session s;
  const Json m = Json::parse(read_file(s, path));
  for (const Json& in : m.at("inputs")) {
    const std::string p = in.at("path");
    if (sha256_file(p) != in.at("sha256").get<std::string>()) {
      throw Error(ErrorKind::kIo, "input '" + p + "' changed since the manifest was written");
    }
  }
  const int code = dispatch(m.at("args").get<std::vector<std::string>>(), out, err);
  bool same = code == m.at("exitCode").get<int>();
  if (!same) err << "exit code " << code << " differs from recorded " << m.at("exitCode") << "\n";
  for (const Json& o : m.at("outputs")) {
    const std::string p = o.at("path");
    const bool match = sha256_file(p) == o.at("sha256").get<std::string>();
    err << p << ": " << (match ? "identical" : "differs") << "\n";
    same = same && match;
  }
  return same ? code : kExitRuntime;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistical insecurity testing for two-party choreographies", "dtsim"};
  app.require_subcommand(1);
  std::string manifest;
  app.add_option("--manifest", manifest, "Write a run manifest (JSON) to this path");
  app.fallthrough();
  Session s;
  std::function<int()> action;

  // parse
  std::string parse_file, parse_out, parse_order;
  bool parse_raw = false;
  auto* parse = app.add_subcommand("parse", "Parse, expand and validate a .cho file");
  parse->add_option("file", parse_file, "Program")->required();
  parse->add_option("-o,--out", parse_out, "Write the normalized program here (default stdout)");
  parse->add_flag("--raw", parse_raw, "Print without expanding macros or validating");
  parse->add_option("--party-order", parse_order, "Comma-separated party order");
  parse->callback([&] {
    action = [&] {
      s.config = {{"file", parse_file}, {"raw", parse_raw}, {"partyOrder", parse_order}};
      const std::string text = read_file(s, parse_file);
      const Program p = parse_raw ? parse_program(text) : apply_order(load_program(text), parse_order);
      if (!parse_raw) validate_or_throw(p);
      write_output(s, parse_out, print_program(p), out);
      return kExitOk;
    };
  });

  // run
  std::string run_file, run_csv, run_order, run_corrupt;
  std::size_t run_runs = 1024;
  std::uint64_t run_seed_flag = 0;
  bool run_describe = false;
  auto* run = app.add_subcommand("run", "Execute a program and write corrupt-party views as CSV");
  run->add_option("file", run_file, "Program")->required();
  run->add_option("--runs", run_runs, "Executions")->capture_default_str();
  run->add_option("--corrupt", run_corrupt, "Comma-separated corrupt parties")->required();
  run->add_option("--seed", run_seed_flag, "Root seed")->capture_default_str();
  run->add_option("--csv", run_csv, "CSV path (default stdout)");
  run->add_option("--party-order", run_order, "Comma-separated party order");
  run->add_flag("--describe", run_describe, "Print what each column holds instead of running");
  run->callback([&] {
    action = [&] {
      s.seed = run_seed_flag;
      s.config = {{"file", run_file},       {"runs", run_runs},
                  {"corrupt", run_corrupt}, {"seed", run_seed_flag},
                  {"partyOrder", run_order}};
      const Program p = apply_order(load_program(read_file(s, run_file)), run_order);
      const auto corrupt = split_list(run_corrupt);
      if (run_describe) {
        const ViewLayout l = describe_views(Executable(p), corrupt);
        const std::pair<char, const std::vector<std::string>*> groups[] = {
            {'L', &l.labels}, {'I', &l.ideal}, {'R', &l.real_only}};
        for (const auto& [prefix, names] : groups) {
          for (std::size_t i = 0; i < names->size(); ++i) {
            out << prefix << i << " " << (*names)[i] << "\n";
          }
        }
        return kExitOk;
      }
      write_output(s, run_csv, emit_csv(run_views(p, run_runs, corrupt, run_seed_flag)), out);
      return kExitOk;
    };
  });

  // compile
  std::string comp_circuit, comp_builtin, comp_framework = "gmw", comp_mutate, comp_out;
  auto* comp = app.add_subcommand("compile", "Compile a circuit into a two-party protocol");
  auto* comp_src = comp->add_option("--circuit", comp_circuit, "Bristol-fashion circuit file");
  comp->add_option("--builtin", comp_builtin, "adder:N, lt:N or btgen:N")->excludes(comp_src);
  comp->add_option("--framework", comp_framework, "gmw or beaver")->capture_default_str();
  comp->add_option("--mutate", comp_mutate, "Bug to inject, e.g. kind=biased_sharing,b=3");
  comp->add_option("-o,--out", comp_out, "Output .cho (default stdout)");
  comp->callback([&] {
    action = [&] {
      if (comp_circuit.empty() && comp_builtin.empty()) {
        throw CLI::RequiredError("--circuit or --builtin");
      }
      s.config = {{"circuit", comp_circuit},
                  {"builtin", comp_builtin},
                  {"framework", comp_framework},
                  {"mutate", comp_mutate}};
      CompileOptions opts;
      opts.framework = parse_framework(comp_framework);
      if (!comp_mutate.empty()) opts.mutation = parse_mutation_spec(comp_mutate);
      const Program p = compile(load_circuit(s, comp_circuit, comp_builtin), opts);
      write_output(s, comp_out, print_program(p), out);
      return kExitOk;
    };
  });

  // mutate
  std::string mut_file, mut_spec, mut_out;
  auto* mut = app.add_subcommand("mutate", "Leak honest secrets of an existing program");
  mut->add_option("file", mut_file, "Program")->required();
  mut->add_option("--spec", mut_spec, "e.g. kind=accidental_secret,b=2")->required();
  mut->add_option("-o,--out", mut_out, "Output .cho (default stdout)");
  mut->callback([&] {
    action = [&] {
      s.config = {{"file", mut_file}, {"spec", mut_spec}};
      const Program p =
          mutate_program(load_program(read_file(s, mut_file)), parse_mutation_spec(mut_spec));
      write_output(s, mut_out, print_program(p), out);
      return kExitOk;
    };
  });

  // gen
  std::string gen_cfg_file, gen_dir = ".";
  std::size_t gen_keep = 1, gen_threads = 1;
  std::optional<std::uint64_t> gen_seed;
  bool gen_no_filter = false;
  auto* gen = app.add_subcommand("gen", "Generate random protocols, dropping easy-to-flag ones");
  gen->add_option("--config", gen_cfg_file, "JSON generator config")->required();
  gen->add_option("--keep", gen_keep, "Programs to keep")->capture_default_str();
  gen->add_option("--out-dir", gen_dir, "Directory for prog_NNNN.cho and manifest.jsonl")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Override the config seed");
  gen->add_option("--threads", gen_threads, "Candidates tested at once")->capture_default_str();
  gen->add_flag("--no-filter", gen_no_filter, "Keep every generated program");
  gen->callback([&] {
    action = [&] {
      const Json j = Json::parse(read_file(s, gen_cfg_file));
      GenConfig cfg = gen_config_from_json(j);
      if (gen_seed) cfg.seed = *gen_seed;
      FilterOptions fo = filter_from_json(j.value("filter", Json::object()));
      fo.keep = gen_keep;
      fo.threads = gen_threads;
      s.seed = cfg.seed;
      s.config = {{"generator", gen_config_to_json(cfg)},
                  {"filter", gen_no_filter ? Json() : filter_to_json(fo)},
                  {"keep", gen_keep}};
      std::filesystem::create_directories(gen_dir);
      const std::filesystem::path dir(gen_dir);
      std::string lines;
      std::size_t written = 0;
      auto emit = [&](const Program& p, const Json& meta) {
        const std::string file = (dir / numbered(written++)).string();
        write_output(s, file, print_program(p), out);
        Json line = meta;
        line["file"] = file;
        lines += line.dump() + "\n";
      };
      const Json cfg_json = gen_config_to_json(cfg);
      if (gen_no_filter) {
        for (std::size_t i = 0; i < gen_keep; ++i) {
          GenConfig c = cfg;
          c.seed = candidate_seed(cfg.seed, i);
          emit(generate(c), {{"index", i}, {"seed", c.seed}, {"config", cfg_json},
                             {"verdict", nullptr}});
        }
      } else {
        const FilterResult r = filter_stream(cfg, fo);
        std::size_t kept = 0;
        for (const FilterCandidate& c : r.candidates) {
          Json meta = {{"index", c.index},     {"seed", c.seed},
                       {"config", cfg_json},   {"verdict", to_string(c.verdict)},
                       {"pValue", c.p_value}};
          if (c.verdict == Verdict::kMaybeSecure) {
            emit(r.kept[kept++], meta);
          } else {
            lines += meta.dump() + "\n";
          }
        }
        out << "kept " << r.kept.size() << " of " << r.attempts << " (" << r.rejected
            << " flagged)\n";
      }
      write_output(s, (dir / "manifest.jsonl").string(), lines, out);
      return kExitOk;
    };
  });

  // test
  std::string test_csv, test_cho, test_corrupt, test_order;
  TestFlags tflags;
  auto* test = app.add_subcommand("test", "Run the insecurity test");
  auto* test_csv_opt = test->add_option("--csv", test_csv, "Views from `dtsim run`");
  test->add_option("--cho", test_cho, "Program to execute in-process")->excludes(test_csv_opt);
  test->add_option("--corrupt", test_corrupt, "Comma-separated corrupt parties (with --cho)");
  test->add_option("--party-order", test_order, "Comma-separated party order (with --cho)");
  tflags.add_to(test);
  test->callback([&] {
    action = [&] {
      s.seed = tflags.seed;
      s.config = tflags.to_json();
      s.config["csv"] = test_csv;
      s.config["cho"] = test_cho;
      s.config["corrupt"] = test_corrupt;
      if (!test_csv.empty()) {
        const TableViewSource src(parse_csv_text(read_file(s, test_csv)));
        return finish_test(s, tflags, run_test(src, tflags.config()), out);
      }
      if (test_cho.empty() || test_corrupt.empty()) {
        throw CLI::RequiredError("--csv, or --cho with --corrupt");
      }
      const Program p = apply_order(load_program(read_file(s, test_cho)), test_order);
      const ProgramViewSource src(p, split_list(test_corrupt));
      return finish_test(s, tflags, run_test(src, tflags.config()), out);
    };
  });

  // pipeline
  std::string pipe_circuit, pipe_builtin, pipe_framework = "gmw", pipe_mutate, pipe_corrupt = "P2";
  std::string pipe_cho_out, pipe_csv_out;
  TestFlags pflags;
  auto* pipe = app.add_subcommand("pipeline", "compile, run and test in one step");
  auto* pipe_src = pipe->add_option("--circuit", pipe_circuit, "Bristol-fashion circuit file");
  pipe->add_option("--builtin", pipe_builtin, "adder:N, lt:N or btgen:N")->excludes(pipe_src);
  pipe->add_option("--framework", pipe_framework, "gmw or beaver")->capture_default_str();
  pipe->add_option("--mutate", pipe_mutate, "Bug to inject");
  pipe->add_option("--corrupt", pipe_corrupt, "Comma-separated corrupt parties")
      ->capture_default_str();
  pipe->add_option("--cho-out", pipe_cho_out, "Also write the compiled program");
  pipe->add_option("--csv-out", pipe_csv_out, "Also write the views");
  pflags.add_to(pipe);
  pipe->callback([&] {
    action = [&] {
      if (pipe_circuit.empty() && pipe_builtin.empty()) {
        throw CLI::RequiredError("--circuit or --builtin");
      }
      s.seed = pflags.seed;
      s.config = pflags.to_json();
      s.config["circuit"] = pipe_circuit;
      s.config["builtin"] = pipe_builtin;
      s.config["framework"] = pipe_framework;
      s.config["mutate"] = pipe_mutate;
      s.config["corrupt"] = pipe_corrupt;
      CompileOptions opts;
      opts.framework = parse_framework(pipe_framework);
      if (!pipe_mutate.empty()) opts.mutation = parse_mutation_spec(pipe_mutate);
      // Round-trip through source text so the result matches chained commands.
      const std::string source =
          print_program(compile(load_circuit(s, pipe_circuit, pipe_builtin), opts));
      if (!pipe_cho_out.empty()) write_output(s, pipe_cho_out, source, out);
      const std::size_t runs = pflags.iters * (pflags.train + pflags.test);
      const ViewTable views =
          run_views(load_program(source), runs, split_list(pipe_corrupt), pflags.seed);
      if (!pipe_csv_out.empty()) write_output(s, pipe_csv_out, emit_csv(views), out);
      return finish_test(s, pflags, run_test(TableViewSource(views), pflags.config()), out);
    };
  });

  // replay
  std::string replay_file;
  auto* rep = app.add_subcommand("replay", "Re-run a manifest and compare its outputs");
  rep->add_option("manifest", replay_file, "Manifest written by --manifest")->required();
  rep->callback([&] { action = [&] { return replay(replay_file, out, err); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) s.subcommand = sub->get_name();

  const auto start = std::chrono::steady_clock::now();
  int code;
  try {
    code = action();
  } catch (const CLI::ParseError& e) {
    err << "dtsim: " << e.what() << " is required\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "dtsim: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "dtsim: " << e.what() << "\n";
    return kExitRuntime;
  }
  if (!manifest.empty()) {
    std::vector<std::string> recorded;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--manifest") {
        ++i;
      } else if (args[i].rfind("--manifest=", 0) != 0) {
        recorded.push_back(args[i]);
      }
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
      write_manifest(manifest, s, recorded, code, wall);
    } catch (const std::exception& e) {
      err << "dtsim: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  return code;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch(args, out, err);
}

}  // namespace dtsim
