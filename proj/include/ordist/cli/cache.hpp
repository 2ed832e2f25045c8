#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "ordist/zlinalg/matrix_io.hpp"

namespace ordist::cli {

inline constexpr const char* kCodeVersion = "1.0.0";
inline constexpr const char* kCacheSchema = "ordist.cache/1";

namespace fs = std::filesystem;

/* Advisory lock on a file, held for the lifetime of the object. */
class FileLock {
 public:
  FileLock(const fs::path& path, bool exclusive) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw Error(Errc::invalid_argument, "cannot open lock file " + path.string());
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw Error(Errc::invalid_argument, "cannot lock " + path.string());
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }

 private:
  int fd_ = -1;
};

/* One directory per (code version, field, modulus): manifest.json holds the
   small data and names the matrix files, which use the zlinalg text format. */
class Cache {
 public:
  explicit Cache(fs::path root) : root_(std::move(root)) {}

  /* --cache beats ORDIST_CACHE beats $XDG_CACHE_HOME/ordist beats ~/.cache/ordist. */
  static std::optional<Cache> open(const std::string& flag, bool disabled) {
    if (disabled) return std::nullopt;
    fs::path root;
    if (!flag.empty()) {
      root = flag;
    } else if (const char* env = std::getenv("ORDIST_CACHE"); env && *env) {
      root = env;
    } else if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
      root = fs::path(xdg) / "ordist";
    } else if (const char* home = std::getenv("HOME"); home && *home) {
      root = fs::path(home) / ".cache" / "ordist";
    } else {
      return std::nullopt;
    }
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec || ::access(root.c_str(), W_OK) != 0) return std::nullopt;
    return Cache(root);
  }

  const fs::path& root() const { return root_; }

  fs::path entry_dir(long d, const std::string& modulus) const {
    std::string key;
    for (char c : modulus) key += (c == ':' ? '_' : c == ',' ? '+' : c == '^' ? 'e' : c);
    return root_ / (std::string("v") + kCodeVersion) / ("d" + std::to_string(d)) / key;
  }

  /* The manifest section `name`, with any matrix files it names read back. */
  struct Entry {
    nlohmann::json data;
    std::map<std::string, IntMatrix> matrices;
  };

  std::optional<Entry> load(long d, const std::string& modulus, const std::string& name) const {
    fs::path dir = entry_dir(d, modulus);
    if (!fs::exists(dir / "manifest.json")) return std::nullopt;
    FileLock lock(dir / ".lock", false);
    nlohmann::json manifest;
    try {
      std::ifstream in(dir / "manifest.json");
      manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
    if (!manifest.is_object() || manifest.value("schema", "") != kCacheSchema || manifest.value("version", "") != kCodeVersion ||
        manifest.value("d", 0L) != d || manifest.value("modulus", "") != modulus || !manifest["entries"].contains(name))
      return std::nullopt;
    Entry e;
    e.data = manifest["entries"][name];
    if (e.data.contains("files")) {
      for (auto& [key, file] : e.data["files"].items()) {
        std::ifstream in(dir / file.get<std::string>());
        if (!in) return std::nullopt;
        try {
          e.matrices.emplace(key, read_matrix(in, IntMatrix::Storage::sparse));
        } catch (const Error&) {
          return std::nullopt;
        }
      }
    }
    return e;
  }

  /* Adds or replaces the manifest section `name`; matrices go to `<name>.<key>.txt`. */
  void store(long d, const std::string& modulus, const std::string& name, nlohmann::json data,
             const std::map<std::string, const IntMatrix*>& matrices = {}) const {
    fs::path dir = entry_dir(d, modulus);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) return;
    FileLock lock(dir / ".lock", true);
    for (const auto& [key, m] : matrices) {
      std::string file = name + "." + key + ".txt";
      write_atomically(dir / file, matrix_to_string(*m));
      data["files"][key] = file;
    }
    nlohmann::json manifest;
    if (fs::exists(dir / "manifest.json")) {
      try {
        std::ifstream in(dir / "manifest.json");
        manifest = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception&) {
        manifest = nlohmann::json();
      }
    }
    if (!manifest.is_object() || manifest.value("schema", "") != kCacheSchema || manifest.value("version", "") != kCodeVersion)
      manifest = nlohmann::json::object();
    manifest["schema"] = kCacheSchema;
    manifest["version"] = kCodeVersion;
    manifest["d"] = d;
    manifest["modulus"] = modulus;
    manifest["entries"][name] = std::move(data);
    write_atomically(dir / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  static void write_atomically(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << text;
      if (!out) throw Error(Errc::invalid_argument, "cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
  }

  fs::path root_;
};

}  // namespace ordist::cli
