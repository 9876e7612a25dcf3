#pragma once
// Pluggable object store plus the idempotent artifact sync.
//
// Keys are flat slash-separated paths. Change detection is by content hash,
// never by timestamp, so re-running a sync after success uploads nothing.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypersweep::jobspec {

struct ObjectInfo {
    std::string key;
    std::string content_hash;  // hex SHA-256 of the object bytes
};

struct StagedObject {
    std::string key;
    std::string content_hash;
    std::vector<std::byte> bytes;
};

StagedObject make_staged(std::string key, std::vector<std::byte> bytes);
StagedObject make_staged(std::string key, std::string_view text);

struct SyncReport {
    std::size_t uploaded = 0;
    std::size_t skipped = 0;
    std::uint64_t bytes_moved = 0;

    bool operator==(const SyncReport&) const = default;
};

struct StoreUnavailableError : std::runtime_error {
    SyncReport partial;  // progress made before the backend failed
    StoreUnavailableError(const std::string& what, SyncReport progress)
        : std::runtime_error(what), partial(progress) {}
};

class ObjectStore {
public:
    virtual ~ObjectStore() = default;
    virtual std::vector<ObjectInfo> list(std::string_view prefix) = 0;  // sorted by key
    virtual void put(std::string_view key, std::span<const std::byte> bytes) = 0;
    virtual std::vector<std::byte> get(std::string_view key) = 0;
};

// Default backend: one file per key under a root directory.
class DirStore final : public ObjectStore {
public:
    explicit DirStore(std::filesystem::path root);

    std::vector<ObjectInfo> list(std::string_view prefix) override;
    void put(std::string_view key, std::span<const std::byte> bytes) override;
    std::vector<std::byte> get(std::string_view key) override;

private:
    std::filesystem::path root_;
};

// Uploads exactly the staged objects whose key is absent remotely or whose
// hash differs. Backend failures surface as StoreUnavailableError carrying
// the partial report. Staged keys must be unique.
SyncReport sync(const std::vector<StagedObject>& staged, ObjectStore& remote);

}  // namespace hypersweep::jobspec
