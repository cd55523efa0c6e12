#pragma once

// Append-only event log: one JSON document per line (events.ndjson).

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "availd/core/error.hpp"
#include "availd/core/json.hpp"
#include "availd/core/time.hpp"

namespace availd::store {

inline constexpr int kSchemaVersion = 1;

struct StoredEvent {
    std::uint64_t seq = 0;
    Timestamp at;
    /// entity + verb, e.g. "incident.opened".
    std::string kind;
    std::string entity_id;
    Json payload;
    int schema_version = kSchemaVersion;

    friend bool operator==(const StoredEvent&, const StoredEvent&) = default;
};

Json to_json(const StoredEvent& e);
/// Throws ValidationError on a malformed document.
StoredEvent event_from_json(const Json& j);
std::string to_line(const StoredEvent& e);

/// Raised when the log has a gap or an unreadable record that is not the tail.
class ReplayError : public StoreError {
public:
    ReplayError(std::uint64_t seq, const std::string& message)
        : StoreError("replay halted at seq " + std::to_string(seq) + ": " + message), seq_(seq) {}

    std::uint64_t seq() const noexcept { return seq_; }

private:
    std::uint64_t seq_;
};

/// Byte storage behind the log. The file implementation fsyncs every append.
class LogStorage {
public:
    virtual ~LogStorage() = default;
    virtual std::string read_all() const = 0;
    /// Must be durable when it returns; throws StoreError otherwise.
    virtual void append(std::string_view bytes) = 0;
    virtual void truncate(std::size_t size) = 0;
};

class FileStorage final : public LogStorage {
public:
    explicit FileStorage(std::filesystem::path path);
    ~FileStorage() override;
    FileStorage(const FileStorage&) = delete;
    FileStorage& operator=(const FileStorage&) = delete;

    std::string read_all() const override;
    void append(std::string_view bytes) override;
    void truncate(std::size_t size) override;

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

/// In-memory storage for tests; `fail_next_append` simulates a disk failure.
class MemoryStorage final : public LogStorage {
public:
    std::string read_all() const override { return bytes_; }
    void append(std::string_view bytes) override;
    void truncate(std::size_t size) override { bytes_.resize(std::min(size, bytes_.size())); }

    bool fail_next_append = false;
    std::string& bytes() { return bytes_; }

private:
    std::string bytes_;
};

struct ReadResult {
    std::vector<StoredEvent> events;
    /// Set when an incomplete trailing record was skipped.
    std::optional<std::string> warning;
    /// Byte length of the valid prefix.
    std::size_t valid_bytes = 0;
};

/// Parses a whole log. A damaged final line is dropped with a warning; any
/// other damage, or a sequence gap, throws ReplayError naming the seq.
ReadResult parse_log(std::string_view bytes);

class EventLog {
public:
    /// Opens the log, dropping an incomplete tail so later appends stay aligned.
    explicit EventLog(std::unique_ptr<LogStorage> storage);
    static EventLog open_file(const std::filesystem::path& path);
    static EventLog in_memory();

    /// Assigns the next seq and persists the event before returning it.
    /// Rejects a non-object payload or empty kind without consuming a seq.
    StoredEvent append(std::string kind, std::string entity_id, Json payload, Timestamp at);

    /// Appends an externally produced event verbatim; its seq must be last_seq() + 1.
    void append_existing(const StoredEvent& event);

    /// Every event with seq >= from_seq.
    std::vector<StoredEvent> read(std::uint64_t from_seq = 1) const;

    std::uint64_t last_seq() const noexcept { return last_seq_; }
    const std::optional<std::string>& open_warning() const noexcept { return open_warning_; }
    LogStorage& storage() { return *storage_; }

private:
    std::unique_ptr<LogStorage> storage_;
    std::uint64_t last_seq_ = 0;
    std::optional<std::string> open_warning_;
};

}  // namespace availd::store
