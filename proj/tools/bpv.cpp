// Command-line driver: pseries | alpha | dickson | verify-main | filtration | recheck.

#include <CLI11.hpp>
#include <fstream>
#include <sstream>

#include "bpv/driver.hpp"

namespace {

// Optional key=value overrides, one per line; '#' starts a comment.
void apply_config_file(const std::string& path, bpv::RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw bpv::config_error("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "prime") cfg.p = std::stol(val);
    else if (key == "m") cfg.m = std::stoi(val);
    else if (key == "n") cfg.n = std::stoi(val);
    else if (key == "k") cfg.k = std::stoi(val);
    else if (key == "trunc-deg") cfg.D = std::stoi(val);
    else if (key == "padic-prec") cfg.N = std::stoi(val);
    else if (key == "flavor") cfg.flavor = val;
    else if (key == "out") cfg.out = val;
    else if (key == "cache-dir") cfg.cache_dir = val;
    else if (key == "degrees") {
      cfg.degrees.clear();
      std::istringstream ss(val);
      std::string tok;
      while (std::getline(ss, tok, ',')) cfg.degrees.push_back(std::stol(tok));
    } else {
      throw bpv::config_error("unknown config key: " + key);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verifier for formal-group-law torsion identities"};
  app.require_subcommand(1);

  bpv::RunConfig cfg;
  std::string config_file;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--prime", cfg.p, "the prime p");
    sub->add_option("--m", cfg.m, "lower chromatic index m");
    sub->add_option("--n", cfg.n, "upper chromatic index n");
    sub->add_option("--k", cfg.k, "number of x-variables (default w = n+1-m)");
    sub->add_option("--trunc-deg", cfg.D, "truncation degree D");
    sub->add_option("--padic-prec", cfg.N, "p-adic precision N");
    sub->add_option("--flavor", cfg.flavor, "generator flavor: hazewinkel | araki");
    sub->add_option("--degrees", cfg.degrees, "slice degrees for slice checks");
    sub->add_option("--out", cfg.out, "report output path (default stdout)");
    sub->add_option("--cache-dir", cfg.cache_dir, "law cache directory");
    sub->add_option("--config", config_file, "key=value config file overriding flags");
  };

  for (const char* name : {"pseries", "alpha", "dickson", "verify-main", "filtration"})
    add_common(app.add_subcommand(name));
  auto* recheck = app.add_subcommand("recheck");
  recheck->add_option("file", cfg.input, "certificate JSON file")->required();
  add_common(recheck);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!config_file.empty()) {
    try {
      apply_config_file(config_file, cfg);
    } catch (const bpv::config_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return bpv::run(cfg);
}
