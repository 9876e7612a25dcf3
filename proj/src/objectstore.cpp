#include "hypersweep/objectstore.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>

#include "hypersweep/digest.hpp"

namespace hypersweep::jobspec {

namespace fs = std::filesystem;

namespace {

void validate_key(std::string_view key) {
    if (key.empty() || key.front() == '/' || key.back() == '/') {
        throw std::invalid_argument("invalid object key: '" + std::string(key) + "'");
    }
    std::string segment;
    auto flush = [&] {
        if (segment.empty() || segment == "." || segment == "..") {
            throw std::invalid_argument("invalid object key: '" + std::string(key) + "'");
        }
        segment.clear();
    };
    for (char c : key) {
        if (c == '/') {
            flush();
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
                   c == '_') {
            segment.push_back(c);
        } else {
            throw std::invalid_argument("invalid object key: '" + std::string(key) + "'");
        }
    }
    flush();
}

}  // namespace

StagedObject make_staged(std::string key, std::vector<std::byte> bytes) {
    StagedObject obj;
    obj.key = std::move(key);
    obj.content_hash = sha256_hex(std::span<const std::byte>(bytes));
    obj.bytes = std::move(bytes);
    return obj;
}

StagedObject make_staged(std::string key, std::string_view text) {
    std::vector<std::byte> bytes(text.size());
    std::transform(text.begin(), text.end(), bytes.begin(),
                   [](char c) { return static_cast<std::byte>(c); });
    return make_staged(std::move(key), std::move(bytes));
}

DirStore::DirStore(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_);
}

std::vector<ObjectInfo> DirStore::list(std::string_view prefix) {
    std::vector<ObjectInfo> out;
    if (!fs::exists(root_)) return out;
    for (const auto& entry : fs::recursive_directory_iterator(root_)) {
        if (!entry.is_regular_file()) continue;
        std::string key = fs::relative(entry.path(), root_).generic_string();
        if (key.compare(0, prefix.size(), prefix) != 0) continue;
        out.push_back({key, sha256_hex(get(key))});
    }
    std::sort(out.begin(), out.end(),
              [](const ObjectInfo& a, const ObjectInfo& b) { return a.key < b.key; });
    return out;
}

void DirStore::put(std::string_view key, std::span<const std::byte> bytes) {
    validate_key(key);
    const fs::path path = root_ / fs::path(std::string(key));
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("store: cannot write " + path.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("store: write failed for " + path.string());
    }
    fs::rename(tmp, path);
}

std::vector<std::byte> DirStore::get(std::string_view key) {
    validate_key(key);
    const fs::path path = root_ / fs::path(std::string(key));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("store: no such key '" + std::string(key) + "'");
    std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    std::vector<std::byte> bytes(raw.size());
    std::transform(raw.begin(), raw.end(), bytes.begin(),
                   [](char c) { return static_cast<std::byte>(c); });
    return bytes;
}

SyncReport sync(const std::vector<StagedObject>& staged, ObjectStore& remote) {
    std::set<std::string_view> seen;
    for (const auto& obj : staged) {
        if (!seen.insert(obj.key).second) {
            throw std::invalid_argument("sync: duplicate staged key '" + obj.key + "'");
        }
    }

    SyncReport report;
    std::map<std::string, std::string> remote_hash;
    try {
        for (const auto& info : remote.list("")) remote_hash[info.key] = info.content_hash;
    } catch (const std::exception& e) {
        throw StoreUnavailableError(std::string("sync: listing failed: ") + e.what(), report);
    }

    for (const auto& obj : staged) {
        auto it = remote_hash.find(obj.key);
        if (it != remote_hash.end() && it->second == obj.content_hash) {
            ++report.skipped;
            continue;
        }
        try {
            remote.put(obj.key, std::span<const std::byte>(obj.bytes));
        } catch (const std::exception& e) {
            throw StoreUnavailableError(
                std::string("sync: upload failed for '") + obj.key + "': " + e.what(), report);
        }
        ++report.uploaded;
        report.bytes_moved += obj.bytes.size();
    }
    return report;
}

}  // namespace hypersweep::jobspec
