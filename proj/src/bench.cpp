#include "lpcascade/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "lpcascade/error.hpp"
#include "lpcascade/oracle.hpp"
#include "lpcascade/rng.hpp"

namespace lpcascade {

namespace {

constexpr std::uint64_t kCalibrationStream = 0xCA11B;
constexpr std::uint64_t kHoldoutStream = 0x401D;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (t.empty()) throw InputError("empty item in list '" + std::string(text) + "'");
    items.push_back(std::move(t));
  }
  if (items.empty()) throw InputError("empty list");
  return items;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), last, v);
  if (ec != std::errc() || ptr != last) {
    throw InputError("config key '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!csv::parse_double(value, v) || !std::isfinite(v)) {
    throw InputError("config key '" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

// orthogonal before adaptive; finite p ascending, inf last.
bool cell_order(const BenchCell& a, const BenchCell& b) {
  if (a.mode != b.mode) return a.mode == ProjectionMode::orthogonal;
  return a.norm.p() < b.norm.p();
}

void check_report(const QueryReport& r, const SubspaceIndex& index, std::size_t query) {
  const auto& sv = r.survivors;
  for (std::size_t i = 1; i < sv.size(); ++i) {
    if (sv[i - 1] > sv[i]) {
      throw InvariantError("survivor counts are not monotone on query " + std::to_string(query));
    }
  }
  if (sv.back() > index.size()) throw InvariantError("survivor count exceeds dataset size");
  if (r.cost_s != cascade_cost(index.schedule(), sv, index.size())) {
    throw InvariantError("instrumented cost disagrees with the cost formula on query " +
                         std::to_string(query));
  }
}

}  // namespace

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap values;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(number) + ": expected key = value");
    }
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw InputError("config line " + std::to_string(number) + ": empty key");
    if (!values.emplace(key, value).second) {
      throw InputError("config line " + std::to_string(number) + ": repeated key '" + key + "'");
    }
  }
  return values;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

BenchConfig BenchConfig::from_map(const ConfigMap& values) {
  BenchConfig c;
  bool data_seed_set = false;
  for (const auto& [key, value] : values) {
    if (key == "data") {
      c.data_path = value;
    } else if (key == "synthetic") {
      c.synthetic.model = parse_synthetic_model(value);
    } else if (key == "s") {
      c.synthetic.s = parse_count(key, value);
    } else if (key == "n") {
      c.synthetic.n = parse_count(key, value);
    } else if (key == "block") {
      c.synthetic.block_size = parse_count(key, value);
    } else if (key == "rho") {
      c.synthetic.rho = parse_real(key, value);
    } else if (key == "window") {
      c.synthetic.window = parse_count(key, value);
    } else if (key == "data_seed") {
      c.synthetic.seed = parse_count(key, value);
      data_seed_set = true;
    } else if (key == "schedule") {
      c.schedule = DimensionSchedule::parse(value);
    } else if (key == "modes") {
      c.modes.clear();
      for (const auto& m : split_list(value)) c.modes.push_back(parse_projection_mode(m));
    } else if (key == "norms") {
      c.norms.clear();
      for (const auto& p : split_list(value)) c.norms.push_back(NormOrder::parse(p));
    } else if (key == "epsilon") {
      if (value == "calibrate") {
        c.epsilon.fixed.reset();
      } else {
        c.epsilon.fixed = parse_real(key, value);
      }
    } else if (key == "target_nn") {
      c.epsilon.target_nn = parse_count(key, value);
    } else if (key == "calib_sample") {
      c.epsilon.sample_size = parse_count(key, value);
    } else if (key == "queries") {
      c.queries = parse_count(key, value);
    } else if (key == "verify") {
      c.verify_queries = parse_count(key, value);
    } else if (key == "seed") {
      c.seed = parse_count(key, value);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(parse_count(key, value));
    } else if (key == "moment") {
      c.moment = parse_moment_kind(value);
    } else if (key == "output") {
      c.output = value;
    } else if (key == "format") {
      c.format = parse_report_format(value);
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  if (!data_seed_set) c.synthetic.seed = c.seed;
  return c;
}

void BenchConfig::validate() const {
  if (!schedule) throw InputError("config: 'schedule' is required");
  if (modes.empty()) throw InputError("config: 'modes' must not be empty");
  if (norms.empty()) throw InputError("config: 'norms' must not be empty");
  if (queries == 0) throw InputError("config: 'queries' must be positive");
  if (epsilon.fixed && !(*epsilon.fixed > 0.0)) throw InputError("config: epsilon must be positive");
  if (!data_path && synthetic.n != schedule->dim(0)) {
    throw InputError("config: synthetic n = " + std::to_string(synthetic.n) +
                     " does not match dim(U_0) = " + std::to_string(schedule->dim(0)));
  }
}

PreparedData prepare_data(const BenchConfig& config) {
  config.validate();
  if (!config.data_path) {
    SyntheticSpec spec = config.synthetic;
    spec.s = config.synthetic.s + config.queries;
    const DataSet all = generate(spec);
    return PreparedData{std::make_shared<const DataSet>(all.slice(0, config.synthetic.s)),
                        all.slice(config.synthetic.s, config.queries)};
  }
  const DataSet all = load_vectors(*config.data_path);
  if (all.dim() != config.schedule->dim(0)) {
    throw InputError("dataset dimension " + std::to_string(all.dim()) +
                     " does not match dim(U_0) = " + std::to_string(config.schedule->dim(0)));
  }
  if (config.queries >= all.size()) {
    throw InputError("dataset has " + std::to_string(all.size()) + " rows; cannot hold out " +
                     std::to_string(config.queries) + " queries");
  }
  CounterRng rng(derive_seed(config.seed, kHoldoutStream));
  auto held = rng.sample_without_replacement(all.size(), config.queries);
  const std::set<std::size_t> held_set(held.begin(), held.end());
  std::vector<std::size_t> kept;
  kept.reserve(all.size() - held.size());
  for (std::size_t r = 0; r < all.size(); ++r) {
    if (!held_set.count(r)) kept.push_back(r);
  }
  return PreparedData{std::make_shared<const DataSet>(all.select(kept)), all.select(held)};
}

std::vector<BenchRow> BenchResult::rows() const {
  std::vector<BenchRow> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(c.row);
  return out;
}

BenchResult run_bench(const BenchConfig& config, const LogSink& log) {
  return run_bench(config, prepare_data(config), log);
}

BenchResult run_bench(const BenchConfig& config, const PreparedData& data, const LogSink& log) {
  config.validate();
  const auto& db = data.database;
  const auto& schedule = *config.schedule;
  const std::size_t s = db->size();
  auto say = [&](const std::string& line) {
    if (log) log(line);
  };

  BenchResult result;
  for (const NormOrder norm : config.norms) {
    double epsilon = 0.0;
    if (config.epsilon.fixed) {
      epsilon = *config.epsilon.fixed;
    } else {
      CalibrationSpec calib;
      calib.sample_size = std::min(config.epsilon.sample_size, s);
      calib.target_nn = config.epsilon.target_nn;
      calib.seed = derive_seed(config.seed, kCalibrationStream);
      epsilon = calibrate_epsilon(*db, calib, norm);
      if (!(epsilon > 0.0)) {
        throw InputError("calibrated epsilon for " + norm.label() +
                         " is zero (duplicate rows?); set epsilon explicitly");
      }
    }
    say(norm.label() + ": epsilon = " + std::to_string(epsilon));

    for (const ProjectionMode mode : config.modes) {
      BuildOptions options{mode, norm, config.moment};
      const auto index = SubspaceIndex::build(db, schedule, options);
      auto summary = summarize_build(index);
      if (!summary.empty() && summary.back() == '\n') summary.pop_back();
      say(std::string(to_string(mode)) + "/" + norm.label() + " built\n" + summary);

      BenchCell cell{mode, norm, epsilon, {}, index.diagnostics(), {}};
      cell.reports.reserve(data.queries.size());
      QueryOptions qopts{config.threads};
      for (std::size_t q = 0; q < data.queries.size(); ++q) {
        auto report = index.range_query(data.queries.row(q), epsilon, qopts);
        check_report(report, index, q);
        if (q < config.verify_queries) {
          const auto truth = brute_force_range(*db, data.queries.row(q), epsilon, norm);
          if (match_ids(truth.matches) != match_ids(report.matches)) {
            throw InvariantError("cascade and brute force disagree on query " + std::to_string(q) +
                                 " (" + std::string(to_string(mode)) + ", " + norm.label() + ")");
          }
        }
        cell.reports.push_back(std::move(report));
      }

      BenchRow& row = cell.row;
      row.mode = mode;
      row.norm = norm;
      row.epsilon = epsilon;
      row.queries = cell.reports.size();
      row.cost_l = static_cast<double>(s) * static_cast<double>(schedule.dim(0));
      row.mean_sigma.assign(schedule.depth() + 1, 0.0);
      double cost_sum = 0.0;
      double ratio_sum = 0.0;
      for (const auto& r : cell.reports) {
        cost_sum += static_cast<double>(r.cost_s);
        ratio_sum += r.ratio;
        for (std::size_t i = 0; i < r.survivors.size(); ++i) {
          row.mean_sigma[i] += static_cast<double>(r.survivors[i]);
        }
      }
      const double count = static_cast<double>(cell.reports.size());
      row.mean_cost_s = cost_sum / count;
      row.mean_ratio = ratio_sum / count;
      for (double& v : row.mean_sigma) v /= count;
      try {
        row.fitted_const = fit_const(cell.reports, schedule);
        row.estimated_cost = estimate_cost(schedule, s, row.fitted_const);
      } catch (const InputError&) {
        row.fitted_const = std::numeric_limits<double>::quiet_NaN();
        row.estimated_cost = std::numeric_limits<double>::quiet_NaN();
      }
      say(std::string(to_string(mode)) + "/" + norm.label() +
          ": mean ratio = " + std::to_string(row.mean_ratio));
      result.cells.push_back(std::move(cell));
    }
  }
  std::stable_sort(result.cells.begin(), result.cells.end(), cell_order);
  return result;
}

std::string summarize_build(const SubspaceIndex& index) {
  std::ostringstream out;
  const auto& schedule = index.schedule();
  for (std::size_t i = 1; i <= index.depth(); ++i) {
    const auto& d = index.diagnostics()[i - 1];
    char line[200];
    std::snprintf(line, sizeof line,
                  "  level %zu: %zu -> %zu (m=%zu)  diversion max %.3g mean %.3g  unconverged %zu\n",
                  i, schedule.dim(i - 1), schedule.dim(i), schedule.ratio(i), d.diversion.max(),
                  d.diversion.mean(), d.unconverged);
    out << line;
  }
  return out.str();
}

std::string format_bench_table(std::span<const BenchRow> rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-11s %-5s %14s %14s %10s %12s  %s\n", "mode", "p", "epsilon",
                "mean_cost_s", "ratio", "const", "mean sigma_0..t");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-11s %-5s %14.6g %14.1f %10.3f %12.4g ",
                  std::string(to_string(r.mode)).c_str(), r.norm.to_string().c_str(), r.epsilon,
                  r.mean_cost_s, r.mean_ratio, r.fitted_const);
    out << line;
    for (std::size_t i = 0; i < r.mean_sigma.size(); ++i) {
      out << (i ? " " : " ") << r.mean_sigma[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace lpcascade
