#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "shiftlab/error.hpp"

namespace fs = std::filesystem;
using shiftlab::cli::Command;
using shiftlab::cli::Json;
using shiftlab::cli::UsageError;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunResult {
  int code = 0;
  Json report;  // or error object when code != 0
  std::string text;
};

Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"error", kind}, {"message", message}};
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << contents;
}

RunResult run_one(const Command& cmd, const Json& given, bool meta, const std::string& out_dir) {
  RunResult rr;
  try {
    const Json params = shiftlab::cli::resolve_params(cmd, given);
    auto outcome = cmd.run(params);
    Json& rep = rr.report;
    rep["command"] = cmd.name;
    rep["params"] = params;
    rep["result"] = std::move(outcome.result);
    if (meta) rep["meta"] = Json{{"tool", "shiftlab"}, {"version", kVersion}, {"generated", utc_now()}};
    rr.text = std::move(outcome.text);
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      write_file(fs::path(out_dir) / "report.json", rep.dump(2) + "\n");
      for (const auto& [name, contents] : outcome.files) write_file(fs::path(out_dir) / name, contents);
    }
  } catch (const shiftlab::Error& e) {
    rr.code = 2;
    rr.report = error_json(std::string(shiftlab::to_string(e.code())), e.what());
  } catch (const UsageError& e) {
    rr.code = 1;
    rr.report = error_json("UsageError", e.what());
  } catch (const Json::exception& e) {
    rr.code = 1;
    rr.report = error_json("UsageError", e.what());
  } catch (const fs::filesystem_error& e) {
    rr.code = 1;
    rr.report = error_json("UsageError", e.what());
  }
  return rr;
}

std::string flag_of(const std::string& key) {
  std::string f = key;
  for (char& c : f) {
    if (c == '_') c = '-';
  }
  return "--" + f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shiftlab: analyticity of solutions to equations with a time shift"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  std::string config_path, out_dir, sweep_path;
  bool no_meta = false;
  app.add_option("--config", config_path, "JSON object with parameters (unknown keys rejected)");
  app.add_option("--output-dir", out_dir, "directory for report.json and CSV files")
      ->envname("SHIFTLAB_OUTPUT_DIR");
  app.add_flag("--no-meta", no_meta, "omit the timestamped meta block");
  app.add_option("--sweep", sweep_path, "JSON array of parameter objects, run concurrently");

  const auto& cmds = shiftlab::cli::commands();
  std::map<std::string, std::map<std::string, std::string>> flag_text;
  std::map<std::string, std::map<std::string, CLI::Option*>> flag_opt;
  for (const auto& cmd : cmds) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    for (const auto& p : cmd.params) {
      flag_opt[cmd.name][p.name] = sub->add_option(flag_of(p.name), flag_text[cmd.name][p.name],
                                                   p.help + " (default " + p.default_value.dump() + ")");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("UsageError", e.what()).dump() << "\n";
    return 1;
  }

  const Command* cmd = nullptr;
  for (const auto& c : cmds) {
    if (app.got_subcommand(c.name)) cmd = &c;
  }

  Json base = Json::object();
  std::vector<Json> runs;
  try {
    if (!config_path.empty()) {
      base = read_json_file(config_path);
      if (!base.is_object()) throw UsageError("--config must hold a JSON object");
    }
    for (const auto& p : cmd->params) {
      if (flag_opt[cmd->name][p.name]->count() > 0) {
        base[p.name] = shiftlab::cli::parse_flag(p, flag_text[cmd->name][p.name]);
      }
    }
    if (!sweep_path.empty()) {
      const Json sweep = read_json_file(sweep_path);
      if (!sweep.is_array() || sweep.empty()) throw UsageError("--sweep must hold a non-empty JSON array");
      for (const auto& item : sweep) {
        if (!item.is_object()) throw UsageError("sweep entries must be JSON objects");
        Json merged = base;
        for (const auto& [k, v] : item.items()) merged[k] = v;
        runs.push_back(std::move(merged));
      }
    }
  } catch (const UsageError& e) {
    std::cerr << error_json("UsageError", e.what()).dump() << "\n";
    return 1;
  }

  if (runs.empty()) {
    RunResult rr = run_one(*cmd, base, !no_meta, out_dir);
    if (rr.code != 0) {
      std::cerr << rr.report.dump() << "\n";
      return rr.code;
    }
    if (!rr.text.empty()) {
      std::cout << rr.text;
    } else {
      std::cout << rr.report.dump(2) << "\n";
    }
    return 0;
  }

  // Each sweep entry gets its own subdirectory and runs on its own thread.
  std::vector<std::future<RunResult>> pending;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string dir;
    if (!out_dir.empty()) {
      std::ostringstream name;
      name << "run_" << std::setw(3) << std::setfill('0') << i;
      dir = (fs::path(out_dir) / name.str()).string();
    }
    pending.push_back(std::async(std::launch::async, run_one, std::cref(*cmd), runs[i], !no_meta, dir));
  }
  int worst = 0;
  Json all = Json::array();
  for (std::size_t i = 0; i < pending.size(); ++i) {
    RunResult rr = pending[i].get();
    worst = std::max(worst, rr.code);
    Json entry{{"run", i}};
    entry[rr.code == 0 ? "report" : "error"] = std::move(rr.report);
    all.push_back(std::move(entry));
  }
  std::cout << all.dump(2) << "\n";
  return worst;
}
