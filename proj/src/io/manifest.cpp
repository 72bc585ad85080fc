#include "kloewner/error.hpp"
#include "kloewner/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>

namespace kloewner::io {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw Error(ErrorCode::InvalidInput, "sha256 init failed");
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md, &len);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(digits[md[i] >> 4]);
      out.push_back(digits[md[i] & 15]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, std::size_t(in.gcount()));
  }
  return h.hex();
}

std::string library_version() { return "kloewner 1.0.0"; }

void RunManifest::add_input(const std::filesystem::path& path) { inputs.emplace_back(path.string(), sha256_file(path)); }

void RunManifest::add_output(const std::filesystem::path& path) {
  outputs.emplace_back(path.filename().string(), sha256_file(path));
}

json RunManifest::to_json() const {
  json in = json::array(), out = json::array();
  for (const auto& [p, d] : inputs) in.push_back({{"path", p}, {"sha256", d}});
  for (const auto& [p, d] : outputs) out.push_back({{"path", p}, {"sha256", d}});
  json j{{"command", command},   {"inputs", in},     {"tolerances", tolerances}, {"versions", versions},
         {"summary", summary},   {"outputs", out},   {"flags", flags},           {"wall_clock_seconds", wall_clock},
         {"exit_code", exit_code}};
  if (!failure_code.empty()) j["failure"] = {{"code", failure_code}, {"reason", failure_reason}};
  return j;
}

void RunManifest::write(const std::filesystem::path& path) const { write_json_file(path, to_json()); }

}  // namespace kloewner::io
