#include "lpcascade/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "lpcascade/error.hpp"

namespace lpcascade {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double from_json(const Json& j) { return j.is_null() ? kNaN : j.get<double>(); }

std::size_t max_levels(std::span<const BenchRow> rows) {
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max(n, r.mean_sigma.size());
  return n;
}

std::vector<std::string> csv_header(std::size_t levels) {
  std::vector<std::string> h = {"mode", "p", "epsilon", "mean_cost_s", "mean_ratio"};
  for (std::size_t i = 0; i < levels; ++i) h.push_back("sigma_" + std::to_string(i));
  for (const char* c : {"fitted_const", "estimated_cost", "queries", "cost_l"}) h.emplace_back(c);
  return h;
}

double csv_number(const std::string& field, std::size_t line, std::string_view column) {
  if (field == "nan" || field == "NaN") return kNaN;
  double v = 0.0;
  if (!csv::parse_double(field, v)) {
    std::ostringstream msg;
    msg << "report line " << line << ": bad value '" << field << "' in column " << column;
    throw InputError(msg.str());
  }
  return v;
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw InputError("unknown report format '" + std::string(text) + "'");
}

ReportFormat report_format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? ReportFormat::json : ReportFormat::csv;
}

std::string format_report(std::span<const BenchRow> rows, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json out = Json::array();
    for (const auto& r : rows) {
      Json row;
      row["mode"] = std::string(to_string(r.mode));
      row["p"] = r.norm.to_string();
      row["epsilon"] = json_number(r.epsilon);
      row["mean_cost_s"] = json_number(r.mean_cost_s);
      row["mean_ratio"] = json_number(r.mean_ratio);
      Json sigma = Json::array();
      for (double s : r.mean_sigma) sigma.push_back(json_number(s));
      row["mean_sigma"] = std::move(sigma);
      row["fitted_const"] = json_number(r.fitted_const);
      row["estimated_cost"] = json_number(r.estimated_cost);
      row["queries"] = r.queries;
      row["cost_l"] = json_number(r.cost_l);
      out.push_back(std::move(row));
    }
    return out.dump(2) + "\n";
  }

  const std::size_t levels = max_levels(rows);
  std::ostringstream out;
  const auto header = csv_header(levels);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& r : rows) {
    out << to_string(r.mode) << ',' << csv::escape(r.norm.to_string()) << ',' << number(r.epsilon)
        << ',' << number(r.mean_cost_s) << ',' << number(r.mean_ratio);
    for (std::size_t i = 0; i < levels; ++i) {
      out << ',';
      if (i < r.mean_sigma.size()) out << number(r.mean_sigma[i]);
    }
    out << ',' << number(r.fitted_const) << ',' << number(r.estimated_cost) << ',' << r.queries
        << ',' << number(r.cost_l) << '\n';
  }
  return out.str();
}

std::vector<BenchRow> parse_report(std::string_view text, ReportFormat format) {
  std::vector<BenchRow> rows;
  if (format == ReportFormat::json) {
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("report: invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw InputError("report: expected a JSON array of rows");
    try {
      for (const auto& j : doc) {
        BenchRow r;
        r.mode = parse_projection_mode(j.at("mode").get<std::string>());
        r.norm = NormOrder::parse(j.at("p").get<std::string>());
        r.epsilon = from_json(j.at("epsilon"));
        r.mean_cost_s = from_json(j.at("mean_cost_s"));
        r.mean_ratio = from_json(j.at("mean_ratio"));
        for (const auto& s : j.at("mean_sigma")) r.mean_sigma.push_back(from_json(s));
        r.fitted_const = from_json(j.at("fitted_const"));
        r.estimated_cost = from_json(j.at("estimated_cost"));
        r.queries = j.at("queries").get<std::size_t>();
        r.cost_l = from_json(j.at("cost_l"));
        rows.push_back(std::move(r));
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("report: malformed row: ") + e.what());
    }
    return rows;
  }

  const auto records = csv::parse(text);
  if (records.empty()) throw InputError("report: missing CSV header");
  const auto& header = records.front().fields;
  if (header.size() < 9) throw InputError("report: CSV header has too few columns");
  const std::size_t levels = header.size() - 9;
  if (header != csv_header(levels)) throw InputError("report: unexpected CSV header");
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& f = records[k].fields;
    const std::size_t line = records[k].line;
    if (f.size() != header.size()) {
      std::ostringstream msg;
      msg << "report line " << line << ": expected " << header.size() << " columns";
      throw InputError(msg.str());
    }
    BenchRow r;
    r.mode = parse_projection_mode(f[0]);
    r.norm = NormOrder::parse(f[1]);
    r.epsilon = csv_number(f[2], line, header[2]);
    r.mean_cost_s = csv_number(f[3], line, header[3]);
    r.mean_ratio = csv_number(f[4], line, header[4]);
    for (std::size_t i = 0; i < levels; ++i) {
      if (f[5 + i].empty()) continue;
      r.mean_sigma.push_back(csv_number(f[5 + i], line, header[5 + i]));
    }
    const std::size_t tail = 5 + levels;
    r.fitted_const = csv_number(f[tail], line, header[tail]);
    r.estimated_cost = csv_number(f[tail + 1], line, header[tail + 1]);
    r.queries = static_cast<std::size_t>(csv_number(f[tail + 2], line, header[tail + 2]));
    r.cost_l = csv_number(f[tail + 3], line, header[tail + 3]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_report(std::span<const BenchRow> rows, const std::filesystem::path& path,
                  ReportFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write report '" + path.string() + "'");
  out << format_report(rows, format);
  if (!out) throw InputError("failed writing report '" + path.string() + "'");
}

std::vector<BenchRow> read_report(const std::filesystem::path& path, ReportFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open report '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_report(buf.str(), format);
}

bool same_row(const BenchRow& a, const BenchRow& b) {
  auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  if (a.mode != b.mode || !(a.norm == b.norm) || a.queries != b.queries) return false;
  if (a.mean_sigma.size() != b.mean_sigma.size()) return false;
  for (std::size_t i = 0; i < a.mean_sigma.size(); ++i) {
    if (!eq(a.mean_sigma[i], b.mean_sigma[i])) return false;
  }
  return eq(a.epsilon, b.epsilon) && eq(a.mean_cost_s, b.mean_cost_s) &&
         eq(a.mean_ratio, b.mean_ratio) && eq(a.fitted_const, b.fitted_const) &&
         eq(a.estimated_cost, b.estimated_cost) && eq(a.cost_l, b.cost_l);
}

}  // namespace lpcascade
