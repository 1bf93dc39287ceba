#include "cli.hpp"

#include <functional>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "parmine/error.hpp"
#include "pipeline.hpp"

namespace parmine::cli {
namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Turns leftover "--a.b=v" / "--a.b v" arguments into config overrides.
Overrides parse_overrides(const std::vector<std::string>& extras) {
  Overrides out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (!arg.starts_with("--") || arg.size() == 2) {
      throw ConfigError("unexpected argument '" + arg + "'");
    }
    const std::string body = arg.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size() && !extras[i + 1].starts_with("--")) {
      out.emplace_back(body, extras[++i]);
    } else {
      throw ConfigError("override '" + arg + "' has no value");
    }
  }
  return out;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return 1;
    case ErrorKind::Data: return 2;
    case ErrorKind::Provider: return 3;
  }
  return 1;
}

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Data: return "data";
    case ErrorKind::Provider: return "provider";
  }
  return "usage";
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parallel passage mining for classical-language corpora", "parmine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::size_t threads = 0;
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> labels;

  struct Command {
    const char* name;
    const char* help;
    std::function<void(const PipelineConfig&, RunContext&)> body;
  };
  const std::vector<Command> commands = {
      {"ingest", "Validate corpora and write normalized copies", stage_ingest},
      {"windows", "Build sentence windows for both mining sides", stage_windows},
      {"embed", "Embed the windows", stage_embed},
      {"mine", "Find candidate window pairs by kNN", stage_mine},
      {"cluster", "Cluster candidate pairs into regions", stage_cluster},
      {"align", "Align sentences inside every region", stage_align},
      {"export", "Filter and write the parallel dataset", stage_export},
      {"mine-all", "windows, embed, mine, cluster, align and export", stage_mine_all},
      {"eval", "Run the retrieval evaluation", stage_eval},
      {"audit-sample", "Sample pairs for manual annotation",
       [&](const PipelineConfig& c, RunContext& r) { stage_audit_sample(c, r, dataset); }},
      {"audit-report", "Summarize an annotated audit sheet",
       [&](const PipelineConfig& c, RunContext& r) { stage_audit_report(c, r, labels); }},
      {"stats", "Corpus and dataset statistics",
       [&](const PipelineConfig& c, RunContext& r) { stage_stats(c, r, dataset); }},
  };

  std::vector<CLI::App*> subs;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->allow_extras();
    sub->add_option("-c,--config", config_path, "JSON configuration file")->required();
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    const std::string name = cmd.name;
    if (name == "audit-sample" || name == "stats") {
      sub->add_option("--dataset", dataset, "Dataset JSONL to read");
    } else if (name == "audit-report") {
      sub->add_option("--labels", labels, "Annotated audit TSV");
    }
    subs.push_back(sub);
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "parmine: error[usage]: " << one_line(e.what()) << "\n";
    return 1;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = subs[i];
    if (!sub->parsed()) continue;
    try {
      const PipelineConfig cfg = load_config(config_path, parse_overrides(sub->remaining()));
      RunContext ctx;
      ctx.threads = threads;
      ctx.log = &err;
      commands[i].body(cfg, ctx);
      ctx.manifest.write(cfg.output_dir / ("manifest." + std::string(commands[i].name) + ".json"),
                         cfg.snapshot);
      return 0;
    } catch (const Error& e) {
      err << "parmine: error[" << kind_name(e.kind()) << "]: " << one_line(e.what()) << "\n";
      return exit_code(e.kind());
    } catch (const std::exception& e) {
      err << "parmine: error[data]: " << one_line(e.what()) << "\n";
      return 2;
    }
  }
  return 1;
}

}  // namespace parmine::cli
