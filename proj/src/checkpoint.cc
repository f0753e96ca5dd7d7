#include "advlane/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace advlane {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

constexpr char kMagic[8] = {'A', 'D', 'V', 'L', 'P', 'O', 'L', '\0'};
constexpr std::uint32_t kMaxDim = 1u << 16;

std::uint64_t Fnv1a(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void Put(T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    bytes.insert(bytes.end(), buf, buf + sizeof(T));
  }
  std::vector<unsigned char> bytes;
};

class Reader {
 public:
  Reader(const std::vector<unsigned char>& bytes, std::size_t limit, const std::string& name)
      : bytes_(bytes), limit_(limit), name_(name) {}

  template <typename T>
  T Get(const char* field) {
    if (pos_ + sizeof(T) > limit_) {
      throw CheckpointError(name_, pos_, std::string("truncated while reading ") + field);
    }
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::vector<unsigned char>& bytes_;
  std::size_t limit_;
  const std::string& name_;
  std::size_t pos_ = 0;
};

}  // namespace

CheckpointError::CheckpointError(const std::string& file, std::uint64_t offset,
                                 const std::string& reason)
    : std::runtime_error(file + ": offset " + std::to_string(offset) + ": " + reason),
      file_(file),
      offset_(offset) {}

std::vector<unsigned char> SerializePolicy(const GaussianPolicy& policy) {
  Writer w;
  for (char c : kMagic) w.Put(c);
  const MlpSpec& spec = policy.spec();
  w.Put(kCheckpointVersion);
  w.Put(static_cast<std::uint32_t>(spec.input_dim));
  w.Put(static_cast<std::uint32_t>(spec.output_dim));
  w.Put(static_cast<std::uint32_t>(spec.hidden.size()));
  for (int h : spec.hidden) w.Put(static_cast<std::uint32_t>(h));
  const Eigen::VectorXd net(policy.Parameters().head(policy.net().NumParameters()));
  for (Eigen::Index i = 0; i < net.size(); ++i) w.Put(net(i));
  for (Eigen::Index d = 0; d < policy.log_std().size(); ++d) w.Put(policy.log_std()(d));
  for (double v : policy.action_low()) w.Put(v);
  for (double v : policy.action_high()) w.Put(v);
  w.Put(Fnv1a(w.bytes.data(), w.bytes.size()));
  return std::move(w.bytes);
}

GaussianPolicy DeserializePolicy(const std::vector<unsigned char>& bytes,
                                 const std::string& name) {
  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint64_t)) {
    throw CheckpointError(name, bytes.size(), "file too short to be a checkpoint");
  }
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  Reader r(bytes, body, name);
  for (char c : kMagic) {
    const std::size_t at = r.pos();
    if (r.Get<char>("magic") != c) throw CheckpointError(name, at, "bad magic");
  }
  std::size_t at = r.pos();
  const auto version = r.Get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw CheckpointError(name, at, "unsupported format version " + std::to_string(version));
  }
  MlpSpec spec;
  at = r.pos();
  const auto in = r.Get<std::uint32_t>("input_dim");
  const auto out = r.Get<std::uint32_t>("output_dim");
  const auto n_hidden = r.Get<std::uint32_t>("hidden layer count");
  if (in == 0 || out == 0 || n_hidden == 0 || in > kMaxDim || out > kMaxDim ||
      n_hidden > 64) {
    throw CheckpointError(name, at, "implausible network dimensions");
  }
  spec.input_dim = static_cast<int>(in);
  spec.output_dim = static_cast<int>(out);
  spec.hidden.clear();
  for (std::uint32_t i = 0; i < n_hidden; ++i) {
    at = r.pos();
    const auto h = r.Get<std::uint32_t>("hidden width");
    if (h == 0 || h > kMaxDim) throw CheckpointError(name, at, "implausible hidden width");
    spec.hidden.push_back(static_cast<int>(h));
  }

  Mlp shape(spec);
  Eigen::VectorXd net(shape.NumParameters());
  for (Eigen::Index i = 0; i < net.size(); ++i) net(i) = r.Get<double>("weights");
  Eigen::VectorXd log_std(out);
  for (Eigen::Index d = 0; d < log_std.size(); ++d) log_std(d) = r.Get<double>("log_std");
  std::vector<double> low(out), high(out);
  for (auto& v : low) v = r.Get<double>("action_low");
  for (auto& v : high) v = r.Get<double>("action_high");
  if (r.pos() != body) throw CheckpointError(name, r.pos(), "trailing bytes before checksum");

  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, sizeof(stored));
  if (stored != Fnv1a(bytes.data(), body)) {
    throw CheckpointError(name, body, "checksum mismatch");
  }

  GaussianPolicy policy;
  try {
    policy = GaussianPolicy(spec, low, high);
  } catch (const InvalidInput& e) {
    throw CheckpointError(name, body, e.what());
  }
  Eigen::VectorXd theta(policy.NumParameters());
  theta << net, log_std;
  policy.SetParameters(theta);
  return policy;
}

void SavePolicy(const std::filesystem::path& path, const GaussianPolicy& policy) {
  const std::vector<unsigned char> bytes = SerializePolicy(policy);
  const std::filesystem::path tmp = path.string() + ".incomplete";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

GaussianPolicy LoadPolicy(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError(path.string(), 0, "cannot open checkpoint");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  return DeserializePolicy(bytes, path.string());
}

}  // namespace advlane
