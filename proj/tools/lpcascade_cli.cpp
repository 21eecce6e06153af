#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lpcascade/bench.hpp"
#include "lpcascade/dataset_io.hpp"
#include "lpcascade/error.hpp"
#include "lpcascade/index_io.hpp"
#include "lpcascade/reference_tables.hpp"
#include "lpcascade/subspace_tree.hpp"

using namespace lpcascade;
namespace fs = std::filesystem;

namespace {

// Flags that mirror config keys. Set flags override the config file.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> specs = {
      {"data", "dataset file (.fvecs or .csv)"},
      {"synthetic", "synthetic model: iid, block, smooth"},
      {"s", "synthetic database size"},
      {"n", "synthetic dimension"},
      {"block", "block size of the block-correlated model"},
      {"rho", "within-block correlation of the block-correlated model"},
      {"window", "window of the piecewise-smooth model"},
      {"data_seed", "seed of the synthetic generator (defaults to seed)"},
      {"schedule", "dimension schedule, e.g. 64,16,4"},
      {"modes", "projection modes, e.g. orthogonal,adaptive"},
      {"norms", "norms, e.g. 1,2,4,inf"},
      {"moment", "moment matrix of the adaptive fit: raw or centered"},
      {"seed", "base seed (query hold-out, calibration)"},
  };
  std::vector<std::pair<std::string, std::string>> bench_specs = {
      {"epsilon", "fixed epsilon, or 'calibrate'"},
      {"target_nn", "neighbours targeted by calibration"},
      {"calib_sample", "rows sampled by calibration"},
      {"queries", "number of queries"},
      {"verify", "queries per cell checked against brute force"},
      {"threads", "query worker threads (0 = all cores)"},
      {"output", "report path"},
      {"format", "report format: csv or json"},
  };
  std::map<std::string, std::string> values;
  std::string config_path;

  void attach(CLI::App* cmd, bool bench) {
    cmd->add_option("-c,--config", config_path, "key = value config file");
    auto add = [&](const std::pair<std::string, std::string>& spec) {
      std::string flag = "--" + spec.first;
      for (char& ch : flag) {
        if (ch == '_') ch = '-';
      }
      cmd->add_option_function<std::string>(
          flag, [this, key = spec.first](const std::string& v) { values[key] = v; }, spec.second);
    };
    for (const auto& s : specs) add(s);
    if (bench) {
      for (const auto& s : bench_specs) add(s);
    }
  }

  BenchConfig resolve() const {
    ConfigMap merged;
    if (!config_path.empty()) merged = read_config_file(config_path);
    for (const auto& [k, v] : values) merged[k] = v;
    return BenchConfig::from_map(merged);
  }
};

void print_seeds(const BenchConfig& c) {
  std::fprintf(stderr, "seed=%llu", static_cast<unsigned long long>(c.seed));
  if (!c.data_path) {
    std::fprintf(stderr, " data_seed=%llu model=%s s=%zu n=%zu", static_cast<unsigned long long>(c.synthetic.seed),
                 std::string(to_string(c.synthetic.model)).c_str(), c.synthetic.s, c.synthetic.n);
  }
  std::fprintf(stderr, "\n");
}

fs::path cell_path(const fs::path& output, ProjectionMode mode, NormOrder norm, bool several) {
  if (!several) return output;
  fs::path p = output;
  p.replace_filename(output.stem().string() + "-" + std::string(to_string(mode)) + "-" + norm.label() +
                     output.extension().string());
  return p;
}

int cmd_generate(const Overrides& o, const std::string& output) {
  auto c = o.resolve();
  print_seeds(c);
  const auto data = generate(c.synthetic);
  if (fs::path(output).extension() == ".fvecs") {
    save_fvecs(data, output);
  } else {
    save_csv(data, output);
  }
  std::fprintf(stderr, "wrote %zu x %zu to %s\n", data.size(), data.dim(), output.c_str());
  return 0;
}

int cmd_build(const Overrides& o, const std::string& output, const std::string& save_data) {
  auto c = o.resolve();
  if (!c.schedule) throw InputError("build: 'schedule' is required");
  print_seeds(c);
  std::shared_ptr<const DataSet> data;
  if (c.data_path) {
    data = std::make_shared<const DataSet>(load_vectors(*c.data_path));
  } else {
    data = std::make_shared<const DataSet>(generate(c.synthetic));
    if (save_data.empty()) {
      std::fprintf(stderr, "note: synthetic data is not saved; pass --save-data to query the index later\n");
    }
  }
  if (!save_data.empty()) save_csv(*data, save_data);
  for (const auto& w : c.schedule->warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
  const bool several = c.modes.size() * c.norms.size() > 1;
  for (const auto mode : c.modes) {
    for (const auto norm : c.norms) {
      const auto index = SubspaceIndex::build(data, *c.schedule, {mode, norm, c.moment});
      const auto path = cell_path(output, mode, norm, several);
      save_index(index, path);
      std::printf("%s %s -> %s\n%s", std::string(to_string(mode)).c_str(), norm.label().c_str(),
                  path.c_str(), summarize_build(index).c_str());
    }
  }
  return 0;
}

int cmd_query(const std::string& index_path, const std::string& data_path, const std::string& query_path,
              double epsilon, unsigned threads, const std::string& output, bool list_matches) {
  auto data = std::make_shared<const DataSet>(load_vectors(data_path));
  const auto index = load_index(index_path, data);
  const auto queries = load_vectors(query_path);
  if (queries.dim() != data->dim()) {
    throw InputError("queries have dimension " + std::to_string(queries.dim()) + ", index expects " +
                     std::to_string(data->dim()));
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto rep = index.range_query(queries.row(q), epsilon, {threads});
    std::printf("query %zu: %zu matches  cost_s %llu  cost_l %llu  ratio %.4f  sigma", q, rep.matches.size(),
                static_cast<unsigned long long>(rep.cost_s), static_cast<unsigned long long>(rep.cost_l),
                rep.ratio);
    for (auto s : rep.survivors) std::printf(" %zu", s);
    std::printf("\n");
    if (list_matches) {
      for (const auto& m : rep.matches) {
        std::printf("  %llu %.17g\n", static_cast<unsigned long long>(m.id), m.distance);
      }
    }
    nlohmann::ordered_json j;
    j["query"] = q;
    j["epsilon"] = epsilon;
    j["survivors"] = rep.survivors;
    j["cost_s"] = rep.cost_s;
    j["cost_l"] = rep.cost_l;
    j["ratio"] = rep.ratio;
    auto& ms = j["matches"] = nlohmann::ordered_json::array();
    for (const auto& m : rep.matches) ms.push_back({{"id", m.id}, {"distance", m.distance}});
    doc.push_back(std::move(j));
  }
  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) throw InputError("cannot write '" + output + "'");
    out << doc.dump(2) << '\n';
  }
  return 0;
}

int cmd_bench(const Overrides& o, bool reference) {
  auto c = o.resolve();
  print_seeds(c);
  const auto data = prepare_data(c);
  const auto result = run_bench(c, data, [](std::string_view line) {
    std::fprintf(stderr, "%.*s\n", static_cast<int>(line.size()), line.data());
  });
  const auto rows = result.rows();
  std::printf("%s", format_bench_table(rows).c_str());
  if (reference) {
    const auto name = reference_dataset_for_dim(data.database->dim());
    if (name.empty()) std::printf("(dimension matches no reference dataset; showing all)\n");
    std::printf("%s", format_reference_rows(name).c_str());
  }
  if (c.output) {
    const auto fmt = c.format ? *c.format : report_format_for(*c.output);
    write_report(rows, *c.output, fmt);
    std::fprintf(stderr, "report written to %s\n", c.output->c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact l_p range search over cascaded projections"};
  app.require_subcommand(1);

  Overrides gen_o, build_o, bench_o;
  std::string gen_output;
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  gen_o.attach(gen, false);
  gen->add_option("-o,--output", gen_output, "output file (.csv or .fvecs)")->required();

  std::string build_output, save_data;
  auto* build = app.add_subcommand("build", "build and save indexes, one per (mode, norm)");
  build_o.attach(build, false);
  build->add_option("-o,--output", build_output, "index file; several cells add -<mode>-<norm>")->required();
  build->add_option("--save-data", save_data, "also write the indexed rows as CSV");

  std::string index_path, data_path, query_path, query_output;
  double epsilon = 0.0;
  unsigned threads = 1;
  bool list_matches = false;
  auto* query = app.add_subcommand("query", "run range queries against a saved index");
  query->add_option("-i,--index", index_path, "index file")->required();
  query->add_option("-d,--data", data_path, "dataset the index was built from")->required();
  query->add_option("-q,--queries", query_path, "query vectors (.csv or .fvecs)")->required();
  query->add_option("-e,--epsilon", epsilon, "range radius")->required();
  query->add_option("-t,--threads", threads, "worker threads (0 = all cores)");
  query->add_option("-o,--output", query_output, "write a JSON report");
  query->add_flag("--matches", list_matches, "print every match");

  bool reference = false;
  auto* bench = app.add_subcommand("bench", "run the benchmark matrix");
  bench_o.attach(bench, true);
  bench->add_flag("--reference", reference, "print the published reference rows alongside");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_generate(gen_o, gen_output);
    if (*build) return cmd_build(build_o, build_output, save_data);
    if (*query) return cmd_query(index_path, data_path, query_path, epsilon, threads, query_output, list_matches);
    if (*bench) return cmd_bench(bench_o, reference);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const InvariantError& e) {
    std::fprintf(stderr, "invariant violated: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
  return 0;
}
