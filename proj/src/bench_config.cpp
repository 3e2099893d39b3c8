#include "s3pose/bench_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

#include "s3pose/errors.hpp"

namespace s3pose {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& value, int line, const std::string& key) {
  T out{};
  const auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size()) {
    throw ConfigError("invalid value '" + value + "' for " + key, line, key);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) {
      throw ConfigError("non-finite value for " + key, line, key);
    }
  }
  return out;
}

int parse_int(const std::string& v, int line, const std::string& key) {
  return parse_number<int>(v, line, key);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  return parse_number<double>(v, line, key);
}

using Setter = std::function<void(BenchConfig&, const std::string&, int)>;

// Rethrows a ConfigError raised without position with the given line and key.
template <class F>
void at_line(int line, const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    if (e.line() > 0) throw;
    throw ConfigError(e.what(), line, key);
  }
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"shapes",
       {{"kinds",
         [](BenchConfig& c, const std::string& v, int line) {
           c.shapes.clear();
           std::size_t start = 0;
           while (start <= v.size()) {
             auto end = v.find(',', start);
             if (end == std::string::npos) end = v.size();
             const std::string name = trim(std::string_view(v).substr(start, end - start));
             if (!name.empty()) {
               at_line(line, "kinds", [&] { c.shapes.push_back(parse_shape_kind(name)); });
             }
             start = end + 1;
           }
         }},
        {"n_scenes",
         [](BenchConfig& c, const std::string& v, int line) {
           c.n_scenes = parse_int(v, line, "n_scenes");
           if (c.n_scenes < 0) throw ConfigError("n_scenes must be >= 0", line, "n_scenes");
         }},
        {"sample_count",
         [](BenchConfig& c, const std::string& v, int line) {
           c.sample_count = parse_int(v, line, "sample_count");
           if (c.sample_count < 16) {
             throw ConfigError("sample_count must be >= 16", line, "sample_count");
           }
         }}}},
      {"fit",
       {{"mode",
         [](BenchConfig& c, const std::string& v, int line) {
           at_line(line, "mode", [&] { c.mode = parse_fit_mode(v); });
         }},
        {"seed",
         [](BenchConfig& c, const std::string& v, int line) {
           c.seed = parse_number<std::uint64_t>(v, line, "seed");
         }},
        {"symmetry",
         [](BenchConfig& c, const std::string& v, int line) {
           if (v == "true") {
             c.fit_symmetry.reset();
           } else {
             at_line(line, "symmetry", [&] { c.fit_symmetry = parse_symmetry_kind(v); });
           }
         }},
        {"k", [](BenchConfig& c, const std::string& v, int l) { c.fit.k = parse_int(v, l, "k"); }},
        {"sigma", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.sigma = parse_double(v, l, "sigma"); }},
        {"steps", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.steps = parse_int(v, l, "steps"); }},
        {"eta", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.eta = parse_double(v, l, "eta"); }},
        {"n_eq", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.n_eq = parse_int(v, l, "n_eq"); }},
        {"beta", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.beta = parse_double(v, l, "beta"); }},
        {"warmup_steps", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.warmup_steps = parse_int(v, l, "warmup_steps"); }},
        {"keep_threshold", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.keep_threshold = parse_double(v, l, "keep_threshold"); }},
        {"probe_angles", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.probe_angles = parse_int(v, l, "probe_angles"); }},
        {"fd_step", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.fd_step = parse_double(v, l, "fd_step"); }},
        {"registration_points", [](BenchConfig& c, const std::string& v, int l) {
           c.fit.registration_points = parse_int(v, l, "registration_points"); }}}},
      {"noise",
       {{"sigma",
         [](BenchConfig& c, const std::string& v, int line) {
           c.noise_sigma = parse_double(v, line, "sigma");
           if (c.noise_sigma < 0.0) throw ConfigError("sigma must be >= 0", line, "sigma");
         }},
        {"crop",
         [](BenchConfig& c, const std::string& v, int line) {
           c.crop = parse_double(v, line, "crop");
           if (c.crop < 0.0 || c.crop > 0.5) {
             throw ConfigError("crop must lie in [0, 0.5]", line, "crop");
           }
         }}}},
      {"output",
       {{"csv", [](BenchConfig& c, const std::string& v, int) { c.csv_path = v; }},
        {"summary", [](BenchConfig& c, const std::string& v, int) { c.summary_path = v; }},
        {"threads",
         [](BenchConfig& c, const std::string& v, int line) {
           c.threads = parse_int(v, line, "threads");
           if (c.threads < 1) throw ConfigError("threads must be >= 1", line, "threads");
         }}}},
  };
  return table;
}

}  // namespace

BenchConfig parse_bench_config(std::istream& in) {
  BenchConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::map<std::string, int> fit_lines;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = trim(raw);
    if (text.empty() || text.front() == '#' || text.front() == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (!schema().count(section)) {
        throw ConfigError("unknown section [" + section + "]", line, section);
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (section.empty()) throw ConfigError("key outside any section", line, key);
    const auto& keys = schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      throw ConfigError("unknown key '" + key + "' in [" + section + "]", line, key);
    }
    if (!seen.insert(section + "." + key).second) {
      throw ConfigError("duplicate key '" + key + "'", line, key);
    }
    if (value.empty()) throw ConfigError("empty value for " + key, line, key);
    it->second(cfg, value, line);
    if (section == "fit") fit_lines[key] = line;
  }
  try {
    validate(cfg.fit);
  } catch (const ConfigError& e) {
    const auto l = fit_lines.find(e.field());
    throw ConfigError(e.what(), l == fit_lines.end() ? 0 : l->second, e.field());
  }
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_bench_config(in);
}

}  // namespace s3pose
