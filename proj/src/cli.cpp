#include "thinging/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "thinging/corpus.hpp"
#include "thinging/dsl.hpp"
#include "thinging/events.hpp"
#include "thinging/render.hpp"
#include "thinging/sim.hpp"

namespace thinging {

namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes next to the target, then renames over it.
void write_file(const std::string& path, std::string_view text) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write '" + path + "'");
    os << text;
    if (!os.flush()) throw IoError("cannot write '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot write '" + path + "'");
  }
}

// Output of one input file, produced off-thread and printed in input order.
struct FileReport {
  std::string out;
  std::string err;
  int status = exit_code::kOk;
};

std::string format_all(const Diagnostics& diags, const std::string& file) {
  std::string text;
  for (const auto& d : diags) text += format_diagnostic(d, file) + "\n";
  return text;
}

template <class Fn>
int for_each_file(const std::vector<std::string>& files, std::ostream& out, std::ostream& err,
                  Fn fn) {
  std::vector<std::future<FileReport>> jobs;
  jobs.reserve(files.size());
  for (const auto& f : files) {
    jobs.push_back(std::async(std::launch::async, [&fn, f] {
      try {
        return fn(f);
      } catch (const IoError& e) {
        return FileReport{"", std::string("error: ") + e.what() + "\n", exit_code::kUsage};
      }
    }));
  }
  int status = exit_code::kOk;
  for (auto& job : jobs) {
    FileReport r = job.get();
    out << r.out;
    err << r.err;
    status = std::max(status, r.status);
  }
  return status;
}

// Parses a model file; diagnostics go to `report`. Empty optional on errors.
std::optional<Model> load_model(const std::string& path, bool lax, FileReport& report) {
  ParseResult r = parse(read_file(path), {path, lax});
  report.err += format_all(r.diagnostics, path);
  if (!r.model) report.status = exit_code::kInvalid;
  return r.model;
}

struct Options {
  std::vector<std::string> files;
  std::string scenario;
  std::string output;
  std::string view = "static";
  bool lax = false;
  bool in_place = false;
  bool json = false;
  long max_steps = 0;
  std::string directory;
};

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  return for_each_file(o.files, out, err, [&](const std::string& f) {
    FileReport r;
    load_model(f, o.lax, r);
    return r;
  });
}

int cmd_fmt(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.output.empty() && o.files.size() != 1) {
    err << "error: -o takes exactly one input file\n";
    return exit_code::kUsage;
  }
  return for_each_file(o.files, out, err, [&](const std::string& f) {
    FileReport r;
    auto model = load_model(f, o.lax, r);
    if (!model) return r;
    const std::string text = serialize(*model);
    if (o.in_place) {
      write_file(f, text);
    } else if (!o.output.empty()) {
      write_file(o.output, text);
    } else {
      r.out = text;
    }
    return r;
  });
}

int cmd_sim(const Options& o, std::ostream& out, std::ostream& err) {
  FileReport r;
  int status = exit_code::kOk;
  try {
    auto model = load_model(o.files.front(), o.lax, r);
    if (model) {
      Scenario scenario;
      if (!o.scenario.empty()) scenario = parse_scenario(read_file(o.scenario), o.scenario);
      if (o.max_steps > 0) scenario.max_steps = o.max_steps;
      const Trace trace = simulate(*model, scenario);
      r.err += format_all(trace.warnings, o.scenario.empty() ? o.files.front() : o.scenario);
      const std::string text = write_trace(trace);
      if (o.output.empty()) {
        r.out = text;
      } else {
        write_file(o.output, text);
      }
    }
    status = r.status;
  } catch (const IoError& e) {
    r.err += std::string("error: ") + e.what() + "\n";
    status = exit_code::kUsage;
  } catch (const Error& e) {
    r.err += "error " + e.code() + " " + o.files.front() + ": " + e.what() + "\n";
    status = e.code() == codes::kUnresolvedChoice ? exit_code::kSimulation : exit_code::kUsage;
  }
  out << r.out;
  err << r.err;
  return status;
}

int cmd_render(const Options& o, std::ostream& out, std::ostream& err) {
  FileReport r;
  int status = exit_code::kOk;
  try {
    auto model = load_model(o.files.front(), o.lax, r);
    status = r.status;
    if (model) {
      std::string dot;
      if (o.view == "static") {
        dot = render_static(*model);
      } else if (o.view == "events") {
        dot = render_events(*model);
      } else {
        dot = render_chronology(*model);
      }
      if (o.output.empty()) {
        r.out = dot;
      } else {
        write_file(o.output, dot);
      }
    }
  } catch (const IoError& e) {
    r.err += std::string("error: ") + e.what() + "\n";
    status = exit_code::kUsage;
  } catch (const Error& e) {
    r.err += "error " + e.code() + " " + o.files.front() + ": " + e.what() + "\n";
    status = exit_code::kUsage;
  }
  out << r.out;
  err << r.err;
  return status;
}

int cmd_coverage(const Options& o, std::ostream& out, std::ostream& err) {
  return for_each_file(o.files, out, err, [&](const std::string& f) {
    FileReport r;
    auto model = load_model(f, o.lax, r);
    if (!model) return r;
    const CoverageReport report = coverage(*model);
    std::string text = o.json ? coverage_json(report) : format_coverage(report);
    if (o.files.size() > 1 && !o.json) text = f + ":\n" + text;
    r.out = text;
    return r;
  });
}

int cmd_corpus_list(std::ostream& out) {
  for (const auto& e : corpus_list()) {
    out << e.name << '\t' << e.model_file;
    for (const auto& s : e.scenarios) out << '\t' << s;
    out << '\n';
  }
  return exit_code::kOk;
}

int cmd_corpus_copy(const Options& o, std::ostream& out, std::ostream& err) {
  try {
    for (const auto& path : embedded_files()) {
      const fs::path target = fs::path(o.directory) / path;
      std::error_code ec;
      fs::create_directories(target.parent_path(), ec);
      if (ec) throw IoError("cannot create '" + target.parent_path().string() + "'");
      write_file(target.string(), *embedded_file(path));
      out << target.string() << '\n';
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  return exit_code::kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thinging machine models: validate, format, simulate, render.", "tm"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check models and print diagnostics");
  validate->add_option("files", o.files, "Model files")->required();
  validate->add_flag("--lax", o.lax, "Cross-machine flows between non-transfer stages warn");

  auto* fmt = app.add_subcommand("fmt", "Print models in canonical form");
  fmt->add_option("files", o.files, "Model files")->required();
  fmt->add_option("-o,--output", o.output, "Write to this file");
  fmt->add_flag("-i,--in-place", o.in_place, "Rewrite each input file");
  fmt->add_flag("--lax", o.lax, "Relaxed boundary rule");

  auto* sim = app.add_subcommand("sim", "Simulate a model under a scenario");
  sim->add_option("model", o.files, "Model file")->required()->expected(1);
  sim->add_option("--scenario", o.scenario, "Scenario file");
  sim->add_option("-o,--output", o.output, "Trace file");
  sim->add_option("--max-steps", o.max_steps, "Override the scenario step limit")
      ->check(CLI::PositiveNumber);
  sim->add_flag("--lax", o.lax, "Relaxed boundary rule");

  auto* render = app.add_subcommand("render", "Emit a DOT diagram");
  render->add_option("model", o.files, "Model file")->required()->expected(1);
  render->add_option("--view", o.view, "static, events or chronology")
      ->check(CLI::IsMember({"static", "events", "chronology"}));
  render->add_option("-o,--output", o.output, "DOT file");
  render->add_flag("--lax", o.lax, "Relaxed boundary rule");

  auto* cov = app.add_subcommand("coverage", "Report which edges belong to some event");
  cov->add_option("files", o.files, "Model files")->required();
  cov->add_flag("--json", o.json, "JSON output");
  cov->add_flag("--lax", o.lax, "Relaxed boundary rule");

  auto* corpus = app.add_subcommand("corpus", "The bundled example models");
  corpus->require_subcommand(1);
  auto* list = corpus->add_subcommand("list", "List bundled models and scenarios");
  auto* copy = corpus->add_subcommand("copy", "Copy the bundled files into a directory");
  copy->add_option("directory", o.directory, "Target directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return exit_code::kUsage;
  }

  if (*validate) return cmd_validate(o, out, err);
  if (*fmt) return cmd_fmt(o, out, err);
  if (*sim) return cmd_sim(o, out, err);
  if (*render) return cmd_render(o, out, err);
  if (*cov) return cmd_coverage(o, out, err);
  if (*list) return cmd_corpus_list(out);
  if (*copy) return cmd_corpus_copy(o, out, err);
  return exit_code::kUsage;
}

}  // namespace thinging
