// wmap_lab run <config.json> [--out DIR] [--format csv,json]
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wmap/wmap.h"

namespace {

std::string jsonEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

int report(int exitCode, const std::string& kind, const std::string& message) {
  std::fprintf(stderr, "{\"error\":\"%s\",\"exit\":%d,\"message\":\"%s\"}\n", kind.c_str(), exitCode,
               jsonEscape(message).c_str());
  return exitCode;
}

int exitCodeFor(wmap_status status) {
  switch (status) {
    case WMAP_OK: return 0;
    case WMAP_ERR_PARSE: return 2;
    case WMAP_ERR_VALIDATION: return 3;
    default: return 4;
  }
}

unsigned threadsFromEnv() {
  const char* env = std::getenv("WMAP_LAB_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0 || v > 1024) return 0;
  return static_cast<unsigned>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak MAP estimation lab"};
  app.set_version_flag("--version", std::string(wmap_version()));
  app.require_subcommand(1);

  std::string configPath;
  std::string outDir = ".";
  std::vector<std::string> formats{"csv", "json"};
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", configPath, "Config file")->required();
  run->add_option("--out", outDir, "Output directory");
  run->add_option("--format", formats, "Report formats")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(2, "usage", e.what());
  }

  const unsigned threads = threadsFromEnv();
  if (threads == 0) return report(3, "validation-error", "WMAP_LAB_THREADS must be a positive integer");

  wmap_run_options opts;
  wmap_run_options_default(&opts);
  opts.out_dir = outDir.c_str();
  opts.write_csv = 0;
  opts.write_json = 0;
  for (const auto& f : formats) {
    if (f == "csv") opts.write_csv = 1;
    if (f == "json") opts.write_json = 1;
  }
  opts.threads = threads;

  const wmap_status status = wmap_run_experiment(configPath.c_str(), &opts);
  if (status != WMAP_OK) return report(exitCodeFor(status), wmap_status_name(status), wmap_last_error());
  return 0;
}
