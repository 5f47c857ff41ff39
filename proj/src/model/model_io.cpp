#include "imf/model/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "imf/common/error.hpp"
#include "imf/common/hash.hpp"

namespace imf::model {
namespace {

constexpr char kMagic[8] = {'I', 'M', 'F', 'N', 'G', 'R', 'A', 'M'};

class Writer {
 public:
  explicit Writer(std::string& out) : out_(out) {}

  void u32(std::uint32_t v) { little(v); }
  void u64(std::uint64_t v) { little(v); }
  void f64(double v) { little(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) { out_.append(s); }

 private:
  template <typename T>
  void little(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string& out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint32_t u32() { return little<std::uint32_t>(); }
  std::uint64_t u64() { return little<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(little<std::uint64_t>()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("model-io", "model file truncated");
  }
  template <typename T>
  T little() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_table(Writer& w, const CountTable& table) {
  w.u64(table.size());
  for (const auto& [ctx, row] : table) {
    w.u32(static_cast<std::uint32_t>(ctx.size()));
    for (TokenId t : ctx) w.u32(t);
    w.u32(static_cast<std::uint32_t>(row.size()));
    for (const auto& [id, value] : row) {
      w.u32(id);
      w.f64(value);
    }
  }
}

CountTable read_table(Reader& r) {
  CountTable table;
  const std::uint64_t rows = r.u64();
  for (std::uint64_t i = 0; i < rows; ++i) {
    Context ctx(r.u32());
    for (TokenId& t : ctx) t = r.u32();
    CountRow row;
    const std::uint32_t entries = r.u32();
    for (std::uint32_t j = 0; j < entries; ++j) {
      const TokenId id = r.u32();
      row[id] = r.f64();
    }
    table.emplace(std::move(ctx), std::move(row));
  }
  return table;
}

}  // namespace

std::string serialize_body(int order, double k, const Vocabulary& vocab, const CountTable& counts,
                           const CountTable& bonus) {
  std::string body;
  Writer w(body);
  w.u32(static_cast<std::uint32_t>(order));
  w.f64(k);
  w.u32(static_cast<std::uint32_t>(vocab.size()));
  for (const std::string& t : vocab.tokens()) {
    w.u32(static_cast<std::uint32_t>(t.size()));
    w.bytes(t);
  }
  write_table(w, counts);
  write_table(w, bonus);
  return body;
}

void save_model(const NGramModel& model, std::ostream& out) {
  const std::string body = serialize_body(model.order(), model.k(), model.vocab(), model.counts(), model.bonus());
  std::string header;
  Writer w(header);
  w.bytes(std::string_view(kMagic, sizeof(kMagic)));
  w.u32(NGramModel::kFormatVersion);
  const Sha256Digest digest = sha256(body);
  w.bytes(std::string_view(reinterpret_cast<const char*>(digest.data()), digest.size()));
  w.u64(body.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw FormatError("model-io", "failed to write model");
}

void save_model_file(const NGramModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("model-io", "cannot open " + path.string() + " for writing");
  save_model(model, out);
}

NGramModel load_model(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(data);
  if (r.bytes(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw FormatError("model-io", "not a model file (bad magic)");
  }
  if (const std::uint32_t version = r.u32(); version != NGramModel::kFormatVersion) {
    throw FormatError("model-io", "unsupported model format version " + std::to_string(version));
  }
  const std::string stored = r.bytes(32);
  const std::uint64_t length = r.u64();
  const std::string body = r.bytes(length);
  if (!r.done()) throw FormatError("model-io", "trailing bytes after model body");
  const Sha256Digest digest = sha256(body);
  if (std::memcmp(digest.data(), stored.data(), digest.size()) != 0) {
    throw FormatError("model-io", "model body does not match its content hash");
  }

  Reader b(body);
  const int order = static_cast<int>(b.u32());
  const double k = b.f64();
  std::vector<std::string> tokens(b.u32());
  for (std::string& t : tokens) t = b.bytes(b.u32());
  CountTable counts = read_table(b);
  CountTable bonus = read_table(b);
  if (!b.done()) throw FormatError("model-io", "trailing bytes inside model body");
  return NGramModel(order, k, Vocabulary::from_id_order(std::move(tokens)), std::move(counts), std::move(bonus));
}

NGramModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("model-io", "cannot open model file " + path.string());
  return load_model(in);
}

}  // namespace imf::model
