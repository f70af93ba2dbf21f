#include "msgt/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace msgt {

namespace {

constexpr char kMagic[4] = {'M', 'S', 'G', 'T'};

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_f64s(std::ostream& out, const std::vector<double>& v) {
  for (double d : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64(out, bits);
  }
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::string read_string(std::istream& in) {
  const std::uint64_t len = read_u64(in);
  if (len > (1ULL << 32)) throw std::runtime_error("checkpoint: implausible string length");
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return s;
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(kMagic, 4);
  write_u32(out, Checkpoint::kVersion);
  write_string(out, ckpt.config_json);
  write_string(out, ckpt.rng_state);
  write_u64(out, ckpt.step);
  write_u64(out, ckpt.tensors.size());
  for (const auto& [name, t] : ckpt.tensors) {
    write_string(out, name);
    write_u64(out, static_cast<std::uint64_t>(t.rows()));
    write_u64(out, static_cast<std::uint64_t>(t.cols()));
    write_f64s(out, t.values());
  }
  if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic bytes in " + path);
  const std::uint32_t version = read_u32(in);
  if (version != Checkpoint::kVersion)
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(version) + " (expected " +
                             std::to_string(Checkpoint::kVersion) + ")");
  Checkpoint ckpt;
  ckpt.config_json = read_string(in);
  ckpt.rng_state = read_string(in);
  ckpt.step = read_u64(in);
  const std::uint64_t count = read_u64(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string name = read_string(in);
    const std::uint64_t rows = read_u64(in);
    const std::uint64_t cols = read_u64(in);
    if (rows > (1ULL << 32) || cols > (1ULL << 32))
      throw std::runtime_error("checkpoint: implausible tensor shape for " + name);
    Tensor t(static_cast<int>(rows), static_cast<int>(cols));
    for (double& d : t.values()) {
      const std::uint64_t bits = read_u64(in);
      std::memcpy(&d, &bits, 8);
    }
    ckpt.tensors.emplace_back(name, std::move(t));
  }
  // anything left over means the writer and reader disagree
  char extra;
  if (in.read(&extra, 1))
    throw std::runtime_error("checkpoint: trailing bytes after tensor section");
  return ckpt;
}

Checkpoint make_checkpoint(const std::string& config_json, const ModelParams& params,
                           const OptimizerState& opt) {
  Checkpoint ckpt;
  ckpt.config_json = config_json;
  ckpt.rng_state = "derived-streams";  // all rng streams derive from (seed, tags)
  ckpt.step = static_cast<std::uint64_t>(opt.step);
  const auto named = params.named_tensors();
  for (const auto& [name, t] : named) ckpt.tensors.emplace_back(name, t->clone());
  if (opt.m.size() == named.size()) {
    for (std::size_t i = 0; i < named.size(); ++i) {
      ckpt.tensors.emplace_back("adam.m." + named[i].first, opt.m[i].clone());
      ckpt.tensors.emplace_back("adam.v." + named[i].first, opt.v[i].clone());
    }
  }
  return ckpt;
}

void restore_model(const Checkpoint& ckpt, ModelParams& params, OptimizerState* opt) {
  auto named = params.named_tensors();
  for (auto& [name, tensor] : named) {
    const Tensor* stored = ckpt.find(name);
    if (stored == nullptr)
      throw std::runtime_error("checkpoint: missing tensor '" + name +
                               "' (shape manifest mismatch)");
    if (stored->rows() != tensor->rows() || stored->cols() != tensor->cols())
      throw std::runtime_error("checkpoint: shape manifest mismatch for '" + name +
                               "': file has " + stored->shape_str() + ", model needs " +
                               tensor->shape_str());
    *tensor = stored->clone();
  }
  // reject tensors the model does not expect (e.g. a different head count)
  for (const auto& [name, t] : ckpt.tensors) {
    if (name.rfind("adam.", 0) == 0) continue;
    bool known = false;
    for (const auto& [n, _] : named) known = known || n == name;
    if (!known)
      throw std::runtime_error("checkpoint: unexpected tensor '" + name +
                               "' (shape manifest mismatch)");
  }
  if (opt != nullptr) {
    opt->step = static_cast<long>(ckpt.step);
    opt->m.clear();
    opt->v.clear();
    for (const auto& [name, tensor] : named) {
      const Tensor* m = ckpt.find("adam.m." + name);
      const Tensor* v = ckpt.find("adam.v." + name);
      if (m == nullptr || v == nullptr)
        throw std::runtime_error("checkpoint: missing optimizer state for '" + name + "'");
      opt->m.push_back(m->clone());
      opt->v.push_back(v->clone());
    }
  }
}

}  // namespace msgt
