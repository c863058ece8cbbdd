// .sbarch container: gzip(ustar(manifest.json, runs/000001.json, ...)).

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <memory>
#include <set>
#include <sstream>

#include "json_codec.hpp"
#include "stablebench/report.hpp"

namespace stablebench {

SchemaVersionError::SchemaVersionError(int found, int expected)
    : ArchiveError("archive schema version " + std::to_string(found) +
                   " is not supported (expected " + std::to_string(expected) + ")"),
      found_(found),
      expected_(expected) {}

namespace {

constexpr std::size_t kTarBlock = 512;
constexpr const char* kManifestName = "manifest.json";

/* ----------------------------- SHA-256 ----------------------------- */

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("SHA-256 initialisation failed");
    }
  }
  void update(const std::string& data) {
    EVP_DigestUpdate(ctx_.get(), data.data(), data.size());
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kDigits[md[i] >> 4];
      out += kDigits[md[i] & 0xF];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

/* ----------------------------- tar ----------------------------- */

void put_octal(char* field, std::size_t width, std::uint64_t value) {
  std::snprintf(field, width, "%0*llo", static_cast<int>(width - 1),
                static_cast<unsigned long long>(value));
}

void tar_append(std::string& tar, const std::string& name, const std::string& body) {
  if (name.size() >= 100) throw ArchiveError("tar entry name too long: " + name);
  std::array<char, kTarBlock> h{};
  std::memcpy(h.data(), name.data(), name.size());
  put_octal(h.data() + 100, 8, 0644);
  put_octal(h.data() + 108, 8, 0);
  put_octal(h.data() + 116, 8, 0);
  put_octal(h.data() + 124, 12, body.size());
  put_octal(h.data() + 136, 12, 0);  // mtime fixed; the manifest carries the timestamp
  h[156] = '0';
  std::memcpy(h.data() + 257, "ustar", 6);
  std::memcpy(h.data() + 263, "00", 2);
  std::memset(h.data() + 148, ' ', 8);
  unsigned sum = 0;
  for (char c : h) sum += static_cast<unsigned char>(c);
  std::snprintf(h.data() + 148, 8, "%06o", sum);
  h[155] = ' ';

  tar.append(h.data(), h.size());
  tar += body;
  tar.append((kTarBlock - body.size() % kTarBlock) % kTarBlock, '\0');
}

struct TarEntry {
  std::string name;
  std::string body;
};

std::uint64_t get_octal(const char* field, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width && field[i] != '\0' && field[i] != ' '; ++i) {
    if (field[i] < '0' || field[i] > '7') throw ArchiveError("corrupt archive: bad tar header");
    v = v * 8 + static_cast<std::uint64_t>(field[i] - '0');
  }
  return v;
}

std::vector<TarEntry> tar_read(const std::string& tar) {
  std::vector<TarEntry> entries;
  std::size_t pos = 0;
  while (pos + kTarBlock <= tar.size()) {
    const char* h = tar.data() + pos;
    if (std::all_of(h, h + kTarBlock, [](char c) { return c == '\0'; })) break;

    unsigned stored = static_cast<unsigned>(get_octal(h + 148, 8));
    unsigned sum = 0;
    for (std::size_t i = 0; i < kTarBlock; ++i) {
      sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(h[i]);
    }
    if (sum != stored) throw ArchiveError("corrupt archive: tar header checksum mismatch");

    const std::size_t size = get_octal(h + 124, 12);
    pos += kTarBlock;
    if (pos + size > tar.size()) throw ArchiveError("corrupt archive: truncated tar entry");
    entries.push_back({std::string(h, strnlen(h, 100)), tar.substr(pos, size)});
    pos += (size + kTarBlock - 1) / kTarBlock * kTarBlock;
  }
  return entries;
}

/* ----------------------------- gzip ----------------------------- */

std::string gzip(const std::string& data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw ArchiveError("deflateInit failed");
  }
  std::string out(deflateBound(&zs, data.size()), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw ArchiveError("compression failed");
  out.resize(zs.total_out);
  return out;
}

std::string gunzip(const std::string& data) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 16) != Z_OK) throw ArchiveError("inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  std::array<char, 1 << 16> chunk{};
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw ArchiveError(std::string("corrupt archive: ") + (zs.msg ? zs.msg : "inflate failed"));
    }
    out.append(chunk.data(), chunk.size() - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw ArchiveError("corrupt archive: truncated compressed stream");
    }
  }
  inflateEnd(&zs);
  return out;
}

std::string run_entry_name(std::size_t i) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "runs/%06zu.json", i + 1);
  return buf.data();
}

void check_consistent(const std::vector<RunRecord>& runs, const SweepConfig& config) {
  if (runs.empty()) throw DataError("refusing to archive an empty run list");
  config.validate();
  std::set<std::uint64_t> sizes;
  for (const auto& s : config.swept_sizes()) sizes.insert(s.bytes());
  for (const auto& r : runs) {
    r.validate();
    if (r.backend_id != runs.front().backend_id) {
      throw DataError("runs from different backends cannot share an archive");
    }
    if (!sizes.contains(r.buffer.bytes()) || r.bytes_written != config.file_size ||
        r.run_index < 1 || r.run_index > config.repetitions) {
      throw DataError("run " + std::to_string(r.run_index) + " at buffer " + r.buffer.label() +
                      " does not belong to the archived sweep configuration");
    }
  }
}

}  // namespace

std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::string encode_archive(const std::vector<RunRecord>& runs, const SweepConfig& config,
                           ArchiveManifest& manifest) {
  check_consistent(runs, config);

  std::vector<std::string> payloads;
  payloads.reserve(runs.size());
  Sha256 sha;
  for (const auto& r : runs) {
    payloads.push_back(detail::to_json(r).dump() + '\n');
    sha.update(payloads.back());
  }

  manifest.schema_version = kArchiveSchemaVersion;
  manifest.config = config;
  manifest.backend_id = runs.front().backend_id;
  manifest.run_count = runs.size();
  manifest.checksum = sha.hex();
  if (manifest.tool_version.empty()) manifest.tool_version = kToolVersion;
  if (manifest.created_at.empty()) manifest.created_at = utc_timestamp_now();

  detail::Json m;
  m["schema_version"] = manifest.schema_version;
  m["tool_version"] = manifest.tool_version;
  m["created_at"] = manifest.created_at;
  m["backend_id"] = manifest.backend_id;
  m["run_count"] = manifest.run_count;
  m["checksum"] = manifest.checksum;
  m["config"] = detail::to_json(config);

  std::string tar;
  tar_append(tar, kManifestName, m.dump() + '\n');
  for (std::size_t i = 0; i < payloads.size(); ++i) tar_append(tar, run_entry_name(i), payloads[i]);
  tar.append(2 * kTarBlock, '\0');
  return gzip(tar);
}

LoadedArchive decode_archive(const std::string& bytes) {
  if (bytes.empty()) {
    throw ArchiveError("schema error: archive is empty");
  }
  const auto entries = tar_read(gunzip(bytes));
  if (entries.empty() || entries.front().name != kManifestName) {
    throw ArchiveError("schema error: archive does not start with " + std::string(kManifestName));
  }

  LoadedArchive out;
  try {
    const auto m = detail::Json::parse(entries.front().body);
    const int version = m.at("schema_version").get<int>();
    if (version != kArchiveSchemaVersion) throw SchemaVersionError(version, kArchiveSchemaVersion);
    auto& man = out.manifest;
    man.schema_version = version;
    man.tool_version = m.at("tool_version").get<std::string>();
    man.created_at = m.at("created_at").get<std::string>();
    man.backend_id = m.at("backend_id").get<std::string>();
    man.run_count = m.at("run_count").get<std::size_t>();
    man.checksum = m.at("checksum").get<std::string>();
    man.config = detail::config_from_json(m.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw ArchiveError(std::string("schema error in manifest: ") + e.what());
  } catch (const DataError& e) {
    throw ArchiveError(std::string("schema error in manifest: ") + e.what());
  }

  if (entries.size() - 1 != out.manifest.run_count) {
    throw ArchiveError("schema error: manifest lists " + std::to_string(out.manifest.run_count) +
                       " runs, archive holds " + std::to_string(entries.size() - 1));
  }
  Sha256 sha;
  for (std::size_t i = 1; i < entries.size(); ++i) sha.update(entries[i].body);
  if (sha.hex() != out.manifest.checksum) {
    throw ChecksumError("checksum mismatch: run payloads do not match the manifest");
  }

  out.runs.reserve(out.manifest.run_count);
  for (std::size_t i = 1; i < entries.size(); ++i) {
    try {
      out.runs.push_back(detail::run_from_json(detail::Json::parse(entries[i].body)));
    } catch (const std::exception& e) {
      throw ArchiveError("schema error in " + entries[i].name + ": " + e.what());
    }
  }
  return out;
}

ArchiveManifest write_archive(const std::vector<RunRecord>& runs, const SweepConfig& config,
                              const std::filesystem::path& path,
                              std::optional<std::string> created_at) {
  ArchiveManifest manifest;
  if (created_at) manifest.created_at = *created_at;
  const std::string bytes = encode_archive(runs, config, manifest);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("failed writing archive '" + path.string() + "'");
  return manifest;
}

LoadedArchive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open archive '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading archive '" + path.string() + "'");
  return decode_archive(bytes);
}

}  // namespace stablebench
