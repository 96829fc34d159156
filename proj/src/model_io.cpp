#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "json.hpp"
#include "rogpl/pipeline.hpp"

namespace rogpl {
namespace {

constexpr char kMagic[8] = {'R', 'O', 'G', 'P', 'L', 'M', 'D', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) bytes_.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) bytes_.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  template <typename Derived>
  void tensor(const Eigen::DenseBase<Derived>& t) {
    u32(static_cast<std::uint32_t>(t.rows()));
    u32(static_cast<std::uint32_t>(t.cols()));
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.cols(); ++j) f64(t(i, j));
    }
  }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
    pos_ += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  Matrix matrix() {
    const std::uint32_t rows = u32();
    const std::uint32_t cols = u32();
    need(std::uint64_t(rows) * cols * 8);
    Matrix m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = f64();
    }
    return m;
  }
  Vector vector() {
    const Matrix m = matrix();
    if (m.cols() != 1) throw FormatError("model file: expected a column vector");
    return m.col(0);
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (data_.size() - pos_ < n) throw FormatError("model file: truncated payload");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(const std::string& payload) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
}

}  // namespace

void save_model(const Model& m, const std::filesystem::path& path) {
  nlohmann::json header = {{"config", to_json(m.config)},
                           {"variant", m.variant.name()},
                           {"n_classes", m.n_classes},
                           {"tau", m.tau},
                           {"best_epoch", m.diagnostics.best_epoch},
                           {"n_clean_final", m.diagnostics.n_clean_final},
                           {"metadata", m.metadata}};
  Writer body;
  body.str(header.dump());
  body.tensor(m.encoder.w1);
  body.tensor(m.encoder.b1);
  body.tensor(m.encoder.w2);
  body.tensor(m.encoder.b2);
  body.tensor(m.pool.interior);
  body.u32(static_cast<std::uint32_t>(m.pool.border.size()));
  for (const auto& per_class : m.pool.border) {
    body.u32(static_cast<std::uint32_t>(per_class.size()));
    for (const auto& b : per_class) {
      body.i32(b.cluster_id);
      body.tensor(b.vec);
    }
  }

  Writer file;
  file.u32(kFormatVersion);
  file.u64(body.bytes().size());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model file " + path.string());
  out.write(kMagic, sizeof(kMagic));
  out.write(file.bytes().data(), static_cast<std::streamsize>(file.bytes().size()));
  out.write(body.bytes().data(), static_cast<std::streamsize>(body.bytes().size()));
  Writer tail;
  tail.u32(checksum(body.bytes()));
  out.write(tail.bytes().data(), static_cast<std::streamsize>(tail.bytes().size()));
  if (!out) throw FormatError("failed writing model file " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file " + path.string());
  const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() < sizeof(kMagic) || std::memcmp(raw.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a model file (bad magic): " + path.string());
  }
  Reader head(std::string_view(raw).substr(sizeof(kMagic)));
  const std::uint32_t version = head.u32();
  if (version != kFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version));
  }
  const std::uint64_t size = head.u64();
  const std::size_t body_start = sizeof(kMagic) + 12;
  if (raw.size() < body_start || raw.size() - body_start < size + 4) {
    throw FormatError("model file truncated: " + path.string());
  }
  if (raw.size() - body_start != size + 4) throw FormatError("model file has trailing bytes");
  const std::string body = raw.substr(body_start, size);
  Reader tail(std::string_view(raw).substr(body_start + size));
  if (tail.u32() != checksum(body)) throw FormatError("model file checksum mismatch");

  Reader r(body);
  Model m;
  try {
    const auto header = nlohmann::json::parse(r.str());
    m.config = train_config_from_json(header.at("config"));
    m.variant = AblationFlags::parse(header.at("variant").get<std::string>());
    m.n_classes = header.at("n_classes").get<int>();
    m.tau = header.at("tau").get<double>();
    m.diagnostics.best_epoch = header.at("best_epoch").get<int>();
    m.diagnostics.n_clean_final = header.at("n_clean_final").get<int>();
    m.metadata = header.at("metadata");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model header: ") + e.what());
  }
  m.encoder.w1 = r.matrix();
  m.encoder.b1 = r.vector();
  m.encoder.w2 = r.matrix();
  m.encoder.b2 = r.vector();
  m.pool.interior = r.matrix();
  const std::uint32_t classes = r.u32();
  m.pool.border.resize(classes);
  for (auto& per_class : m.pool.border) {
    const std::uint32_t count = r.u32();
    for (std::uint32_t k = 0; k < count; ++k) {
      BorderPrototype b;
      b.cluster_id = r.i32();
      b.vec = r.vector();
      per_class.push_back(std::move(b));
    }
  }
  if (!r.done()) throw FormatError("model payload has trailing bytes");
  if (m.pool.n_classes() != m.n_classes || static_cast<int>(classes) != m.n_classes ||
      m.pool.dim() != m.encoder.latent_dim() || m.encoder.w1.cols() != m.encoder.b1.size() ||
      m.encoder.w2.rows() != m.encoder.w1.cols() || m.encoder.w2.cols() != m.encoder.b2.size()) {
    throw FormatError("model file tensors have inconsistent shapes");
  }
  return m;
}

}  // namespace rogpl
