#include "croc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace croc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": invalid number \"" + value +
                      "\"");
  }
  if (used != value.size()) {
    throw ConfigError("config key " + key + ": invalid number \"" + value +
                      "\"");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": invalid integer \"" + value +
                      "\"");
  }
  if (used != value.size()) {
    throw ConfigError("config key " + key + ": invalid integer \"" + value +
                      "\"");
  }
  return out;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') {
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got \"" + stripped + "\"");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("config key " + key + " appears more than once");
    }

    if (key == "k_start") {
      cfg.k_start = static_cast<int>(parse_int(key, value));
    } else if (key == "lambda") {
      cfg.lambda = parse_double(key, value);
    } else if (key == "lambda_pos") {
      cfg.lambda_pos = parse_double(key, value);
    } else if (key == "tau_t") {
      cfg.tau_t = parse_double(key, value);
    } else if (key == "tau_s") {
      cfg.tau_s = parse_double(key, value);
    } else if (key == "alpha") {
      cfg.alpha = parse_double(key, value);
    } else if (key == "init_policy") {
      if (value == "top_k") {
        cfg.init_policy = InitPolicy::kTopK;
      } else if (value == "multinomial") {
        cfg.init_policy = InitPolicy::kMultinomial;
      } else {
        throw ConfigError("init_policy must be top_k or multinomial, got \"" +
                          value + "\"");
      }
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "tol") {
      cfg.tol = parse_double(key, value);
    } else if (key == "max_iter") {
      cfg.max_iter = static_cast<int>(parse_int(key, value));
    } else {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string RunConfig::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << "k_start=" << k_start << "\n"
      << "lambda=" << lambda << "\n"
      << "lambda_pos=" << lambda_pos << "\n"
      << "tau_t=" << tau_t << "\n"
      << "tau_s=" << tau_s << "\n"
      << "alpha=" << alpha << "\n"
      << "init_policy="
      << (init_policy == InitPolicy::kTopK ? "top_k" : "multinomial") << "\n"
      << "seed=" << seed << "\n"
      << "tol=" << tol << "\n"
      << "max_iter=" << max_iter << "\n";
  return out.str();
}

ClusteringConfig RunConfig::clustering() const {
  ClusteringConfig cfg;
  cfg.k_start = k_start;
  cfg.lambda = lambda;
  cfg.lambda_pos = lambda_pos;
  cfg.init_policy = init_policy;
  cfg.seed = seed;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  return cfg;
}

void RunConfig::validate() const {
  if (k_start < 2) {
    throw ConfigError("k_start must be >= 2");
  }
  if (!(lambda > 0.0)) {
    throw ConfigError("lambda must be > 0");
  }
  if (lambda_pos < 0.0) {
    throw ConfigError("lambda_pos must be >= 0");
  }
  if (!(tau_t > 0.0) || !(tau_s > 0.0)) {
    throw ConfigError("temperatures must be > 0");
  }
  if (alpha < 0.0) {
    throw ConfigError("alpha must be >= 0");
  }
  if (!(tol > 0.0)) {
    throw ConfigError("tol must be > 0");
  }
  if (max_iter < 1) {
    throw ConfigError("max_iter must be >= 1");
  }
}

}  // namespace croc
