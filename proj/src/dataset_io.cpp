#include "lpcascade/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <sstream>

#include "csv.hpp"
#include "lpcascade/error.hpp"
#include "lpcascade/rng.hpp"

namespace lpcascade {

namespace {

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint32_t read_u32_le(const unsigned char* p) noexcept {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
}

std::ofstream open_for_write(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

DataSet rows_from_records(const std::vector<csv::Record>& records, std::size_t first,
                          const std::filesystem::path& path) {
  if (records.size() <= first) throw InputError("'" + path.string() + "' contains no vectors");
  const std::size_t dim = records[first].fields.size();
  std::vector<double> values;
  values.reserve((records.size() - first) * dim);
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != dim) {
      std::ostringstream msg;
      msg << path.string() << ":" << rec.line << ": expected " << dim << " columns, found "
          << rec.fields.size();
      throw InputError(msg.str());
    }
    for (std::size_t c = 0; c < dim; ++c) {
      double v = 0.0;
      if (!csv::parse_double(rec.fields[c], v) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << path.string() << ":" << rec.line << ": column " << c + 1
            << " is not a finite number ('" << rec.fields[c] << "')";
        throw InputError(msg.str());
      }
      values.push_back(v);
    }
  }
  return DataSet(dim, std::move(values));
}

bool looks_numeric(const csv::Record& rec) {
  double v = 0.0;
  return std::all_of(rec.fields.begin(), rec.fields.end(),
                     [&](const std::string& f) { return csv::parse_double(f, v); });
}

}  // namespace

DataSet load_fvecs(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.empty()) throw InputError("'" + path.string() + "' is empty");
  std::size_t pos = 0;
  std::size_t record = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 4) {
      std::ostringstream msg;
      msg << path.string() << ": truncated header in record " << record;
      throw InputError(msg.str());
    }
    const auto d = static_cast<std::int32_t>(read_u32_le(bytes.data() + pos));
    pos += 4;
    if (d <= 0) {
      std::ostringstream msg;
      msg << path.string() << ": record " << record << " has invalid dimension " << d;
      throw InputError(msg.str());
    }
    if (record == 0) {
      dim = static_cast<std::size_t>(d);
      values.reserve(bytes.size() / (4 + 4 * dim) * dim);
    } else if (static_cast<std::size_t>(d) != dim) {
      std::ostringstream msg;
      msg << path.string() << ": record " << record << " has dimension " << d << ", expected "
          << dim;
      throw InputError(msg.str());
    }
    if (bytes.size() - pos < 4 * dim) {
      std::ostringstream msg;
      msg << path.string() << ": truncated data in record " << record;
      throw InputError(msg.str());
    }
    for (std::size_t j = 0; j < dim; ++j) {
      const float f = std::bit_cast<float>(read_u32_le(bytes.data() + pos));
      pos += 4;
      if (!std::isfinite(f)) {
        std::ostringstream msg;
        msg << path.string() << ": non-finite value in record " << record << ", component " << j;
        throw InputError(msg.str());
      }
      values.push_back(static_cast<double>(f));
    }
    ++record;
  }
  return DataSet(dim, std::move(values));
}

void save_fvecs(const DataSet& data, const std::filesystem::path& path) {
  std::string out;
  out.reserve(data.size() * (4 + 4 * data.dim()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    put_u32_le(out, static_cast<std::uint32_t>(data.dim()));
    for (double v : data.row(i)) put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  auto file = open_for_write(path, true);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw InputError("failed writing '" + path.string() + "'");
}

DataSet load_csv(const std::filesystem::path& path, bool has_header) {
  const auto records = csv::parse(read_text(path));
  return rows_from_records(records, has_header ? 1 : 0, path);
}

void save_csv(const DataSet& data, const std::filesystem::path& path, bool header) {
  auto out = open_for_write(path, false);
  out << std::setprecision(17);
  if (header) {
    for (std::size_t j = 0; j < data.dim(); ++j) out << (j ? "," : "") << "x" << j;
    out << '\n';
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

DataSet load_vectors(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".fvecs") return load_fvecs(path);
  if (ext == ".csv" || ext == ".txt") {
    const auto records = csv::parse(read_text(path));
    const bool header = !records.empty() && !looks_numeric(records.front());
    return rows_from_records(records, header ? 1 : 0, path);
  }
  throw InputError("unsupported vector file extension '" + ext + "' (use .fvecs or .csv)");
}

std::string_view to_string(SyntheticModel model) noexcept {
  switch (model) {
    case SyntheticModel::iid_uniform:
      return "iid";
    case SyntheticModel::block_correlated:
      return "block";
    case SyntheticModel::piecewise_smooth:
      return "smooth";
  }
  return "iid";
}

SyntheticModel parse_synthetic_model(std::string_view text) {
  if (text == "iid" || text == "iid-uniform" || text == "uniform") return SyntheticModel::iid_uniform;
  if (text == "block" || text == "block-correlated") return SyntheticModel::block_correlated;
  if (text == "smooth" || text == "piecewise-smooth" || text == "image") {
    return SyntheticModel::piecewise_smooth;
  }
  throw InputError("unknown synthetic model '" + std::string(text) + "'");
}

DataSet generate(const SyntheticSpec& spec) {
  if (spec.s == 0 || spec.n == 0) throw InputError("generate: s and n must be positive");
  CounterRng rng(spec.seed);
  std::vector<double> values(spec.s * spec.n);

  switch (spec.model) {
    case SyntheticModel::iid_uniform:
      for (double& v : values) v = rng.uniform();
      break;

    case SyntheticModel::block_correlated: {
      if (spec.block_size == 0 || spec.n % spec.block_size != 0) {
        throw InputError("generate: block size must divide n");
      }
      if (!(spec.rho >= 0.0 && spec.rho <= 1.0)) throw InputError("generate: rho must lie in [0, 1]");
      const double own = std::sqrt(1.0 - spec.rho * spec.rho);
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < values.size(); k += spec.block_size) {
        const double shared = rng.normal();
        for (std::size_t j = 0; j < spec.block_size; ++j) {
          values[k + j] = spec.rho * shared + own * rng.normal();
          lowest = std::min(lowest, values[k + j]);
        }
      }
      for (double& v : values) v -= lowest;
      break;
    }

    case SyntheticModel::piecewise_smooth: {
      if (spec.window == 0) throw InputError("generate: window must be positive");
      const std::size_t coarse = (spec.n + spec.window - 1) / spec.window;
      std::vector<double> grid(coarse);
      for (std::size_t i = 0; i < spec.s; ++i) {
        for (double& g : grid) g = rng.uniform(0.0, 255.0);
        for (std::size_t j = 0; j < spec.n; ++j) {
          const double v = grid[j / spec.window] + rng.uniform(-5.0, 5.0);
          values[i * spec.n + j] = std::clamp(v, 0.0, 255.0);
        }
      }
      break;
    }
  }
  return DataSet(spec.n, std::move(values));
}

}  // namespace lpcascade
