#include "lpcascade/index_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "lpcascade/error.hpp"

namespace lpcascade {

namespace {

constexpr char kMagic[8] = {'L', 'P', 'C', 'I', 'D', 'X', '\0', '\0'};

// float32 rounding is at most 2^-24 relative; keep a little headroom.
constexpr double kFloatTolerance = 0x1.0p-23;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.append(c, n);
  }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) buf_.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) buf_.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  const std::string& str() const noexcept { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::vector<unsigned char> bytes, std::string name)
      : bytes_(std::move(bytes)), name_(std::move(name)) {}

  const unsigned char* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      std::ostringstream msg;
      msg << name_ << ": truncated index file at byte " << pos_;
      throw InputError(msg.str());
    }
    const unsigned char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t u32() {
    const auto* p = take(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(p[k]) << (8 * k);
    return v;
  }
  std::uint64_t u64() {
    const auto* p = take(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(p[k]) << (8 * k);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const noexcept { return pos_ == bytes_.size(); }
  const std::string& name() const noexcept { return name_; }

 private:
  std::vector<unsigned char> bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

[[noreturn]] void corrupt(const Reader& in, const std::string& what) {
  throw InputError(in.name() + ": " + what);
}

}  // namespace

void save_index(const SubspaceIndex& index, const std::filesystem::path& path) {
  Writer out;
  const auto& schedule = index.schedule();
  const std::size_t t = schedule.depth();
  const std::size_t s = index.size();

  out.bytes(kMagic, sizeof kMagic);
  out.u32(kIndexFormatVersion);
  out.u32(index.norm().is_infinite() ? 1u : 0u);
  out.f64(index.norm().is_infinite() ? 0.0 : index.norm().p());
  out.u32(index.mode() == ProjectionMode::orthogonal ? 0u : 1u);
  out.u32(static_cast<std::uint32_t>(t));
  out.u64(s);
  for (std::size_t d : schedule.dims()) out.u64(d);

  for (std::size_t i = 1; i <= t; ++i) {
    const auto& level = index.level(i);
    if (level.mode() == ProjectionMode::adaptive) {
      for (const auto& proj : level.projectors()) {
        for (double z : proj.direction()) out.f64(z);
      }
    }
  }
  for (std::size_t i = 1; i <= t; ++i) {
    for (double v : index.feature_matrix(i)) out.f32(static_cast<float>(v));
  }
  for (std::uint64_t id : index.data().ids()) out.u64(id);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw InputError("cannot write index '" + path.string() + "'");
  file.write(out.str().data(), static_cast<std::streamsize>(out.str().size()));
  if (!file) throw InputError("failed writing index '" + path.string() + "'");
}

SubspaceIndex load_index(const std::filesystem::path& path, std::shared_ptr<const DataSet> data) {
  if (!data || data->empty()) throw InputError("load_index: a non-empty dataset is required");
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot open index '" + path.string() + "'");
  Reader in(std::vector<unsigned char>(std::istreambuf_iterator<char>(file), {}), path.string());

  if (std::memcmp(in.take(sizeof kMagic), kMagic, sizeof kMagic) != 0) {
    corrupt(in, "not an lpcascade index (bad magic)");
  }
  const std::uint32_t version = in.u32();
  if (version != kIndexFormatVersion) {
    corrupt(in, "unsupported index format version " + std::to_string(version));
  }
  const std::uint32_t norm_kind = in.u32();
  const double p = in.f64();
  if (norm_kind > 1) corrupt(in, "bad norm kind");
  const NormOrder norm = norm_kind == 1 ? NormOrder::infinity() : NormOrder::finite(p);
  const std::uint32_t mode_tag = in.u32();
  if (mode_tag > 1) corrupt(in, "bad projection mode");
  const ProjectionMode mode = mode_tag == 0 ? ProjectionMode::orthogonal : ProjectionMode::adaptive;
  const std::uint32_t t = in.u32();
  const std::uint64_t s = in.u64();
  if (t == 0 || t > 64) corrupt(in, "implausible level count");
  std::vector<std::size_t> dims(t + 1);
  for (auto& d : dims) d = static_cast<std::size_t>(in.u64());
  DimensionSchedule schedule(std::move(dims));

  if (s != data->size() || schedule.dim(0) != data->dim()) {
    std::ostringstream msg;
    msg << "index was built over " << s << " x " << schedule.dim(0) << " data, dataset is "
        << data->size() << " x " << data->dim();
    throw InputError(msg.str());
  }

  std::vector<ProjectionLevel> levels;
  for (std::size_t i = 1; i <= t; ++i) {
    const auto partition = BlockPartition::split(schedule.dim(i - 1), schedule.dim(i));
    if (mode == ProjectionMode::orthogonal) {
      levels.push_back(ProjectionLevel::orthogonal(partition, norm));
      continue;
    }
    std::vector<BlockProjector> projectors;
    projectors.reserve(partition.block_count);
    for (std::size_t j = 0; j < partition.block_count; ++j) {
      std::vector<double> z(partition.block_size);
      for (double& v : z) v = in.f64();
      projectors.push_back(BlockProjector::adaptive(std::move(z), norm));
    }
    levels.emplace_back(partition, std::move(projectors), norm);
  }

  std::vector<std::vector<double>> features;
  for (std::size_t i = 1; i <= t; ++i) {
    std::vector<double> f(s * schedule.dim(i));
    for (double& v : f) {
      v = static_cast<double>(in.f32());
      if (!std::isfinite(v)) corrupt(in, "non-finite feature value");
    }
    features.push_back(std::move(f));
  }
  for (std::size_t r = 0; r < s; ++r) {
    if (in.u64() != data->id(r)) {
      throw InputError(path.string() + ": stored ids do not match the dataset (row " +
                       std::to_string(r) + ")");
    }
  }
  if (!in.done()) corrupt(in, "trailing bytes after index payload");

  auto index = SubspaceIndex::assemble(std::move(data), std::move(schedule), norm, mode,
                                       std::move(levels), std::move(features), kFloatTolerance);

  // Spot-check a few rows: re-projected features must agree at float precision.
  const std::size_t probes = std::min<std::size_t>(s, 8);
  for (std::size_t k = 0; k < probes; ++k) {
    const std::size_t r = k * (s / probes);
    const auto fresh = index.project_query(index.data().row(r));
    for (std::size_t i = 1; i <= t; ++i) {
      const auto stored = index.features(i, r);
      const double scale = std::max(1.0, lp_norm(index.data().row(r), norm));
      for (std::size_t j = 0; j < stored.size(); ++j) {
        if (std::abs(stored[j] - fresh[i - 1][j]) > 1e-5 * scale) {
          throw InputError(path.string() + ": stored features do not match the dataset (row " +
                           std::to_string(r) + ", level " + std::to_string(i) + ")");
        }
      }
    }
  }
  return index;
}

}  // namespace lpcascade
