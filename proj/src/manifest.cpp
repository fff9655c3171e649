#include <threeprimes/manifest.hpp>

#include <fftw3.h>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace threeprimes::cli {

namespace {

std::string to_hex(const unsigned char* p, unsigned n)
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(2 * n, '0');
  for (unsigned i = 0; i < n; ++i) {
    out[2 * i] = digits[p[i] >> 4];
    out[2 * i + 1] = digits[p[i] & 15];
  }
  return out;
}

} // namespace

std::string sha256_hex(std::string_view data)
{
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  return to_hex(md.data(), len);
}

std::string sha256_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("sha256: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

void write_atomic(const std::filesystem::path& path, std::string_view data)
{
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::ordered_json library_versions()
{
  nlohmann::ordered_json v;
  v["threeprimes"] = THREEPRIMES_VERSION;
  v["fftw"] = std::string(fftw_version);
  v["openssl"] = OPENSSL_VERSION_TEXT;
  v["compiler"] = __VERSION__;
  return v;
}

nlohmann::ordered_json RunManifest::to_json() const
{
  nlohmann::ordered_json j;
  j["command_line"] = command_line;
  j["config_file"] = config_file;
  j["config"] = config;
  j["seed"] = seed;
  j["workers"] = workers;
  j["deterministic"] = deterministic;
  j["versions"] = library_versions();
  j["wall_time_seconds"] = wall_time_seconds;
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& o : outputs)
    j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  return j;
}

std::filesystem::path manifest_path(const std::filesystem::path& output)
{
  auto p = output;
  p += ".manifest.json";
  return p;
}

} // namespace threeprimes::cli
