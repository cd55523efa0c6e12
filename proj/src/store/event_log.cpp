#include "availd/store/event_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace availd::store {

Json to_json(const StoredEvent& e) {
    return Json{{"seq", e.seq},           {"at", e.at},           {"kind", e.kind},
                {"entity_id", e.entity_id}, {"payload", e.payload}, {"schema_version", e.schema_version}};
}

StoredEvent event_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("event must be a JSON object");
    StoredEvent e;
    e.seq = required<std::uint64_t>(j, "seq");
    e.at = required<Timestamp>(j, "at");
    e.kind = required<std::string>(j, "kind");
    e.entity_id = j.value("entity_id", "");
    e.payload = j.contains("payload") ? j.at("payload") : Json::object();
    e.schema_version = j.value("schema_version", kSchemaVersion);
    if (!e.payload.is_object()) throw ValidationError("event payload must be an object");
    return e;
}

std::string to_line(const StoredEvent& e) { return to_json(e).dump() + "\n"; }

namespace {

[[noreturn]] void io_failure(const std::string& what, const std::filesystem::path& path) {
    throw StoreError(what + " " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

FileStorage::FileStorage(std::filesystem::path path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) io_failure("cannot open event log", path_);
}

FileStorage::~FileStorage() {
    if (fd_ >= 0) ::close(fd_);
}

std::string FileStorage::read_all() const {
    std::string out;
    char buf[1 << 16];
    off_t offset = 0;
    for (;;) {
        const ssize_t n = ::pread(fd_, buf, sizeof buf, offset);
        if (n < 0) {
            if (errno == EINTR) continue;
            io_failure("cannot read event log", path_);
        }
        if (n == 0) break;
        out.append(buf, static_cast<std::size_t>(n));
        offset += n;
    }
    return out;
}

void FileStorage::append(std::string_view bytes) {
    std::size_t written = 0;
    while (written < bytes.size()) {
        const ssize_t n = ::write(fd_, bytes.data() + written, bytes.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            io_failure("cannot append to event log", path_);
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) io_failure("cannot sync event log", path_);
}

void FileStorage::truncate(std::size_t size) {
    if (::ftruncate(fd_, static_cast<off_t>(size)) != 0) io_failure("cannot truncate event log", path_);
}

void MemoryStorage::append(std::string_view bytes) {
    if (fail_next_append) {
        fail_next_append = false;
        throw StoreError("simulated storage failure");
    }
    bytes_.append(bytes);
}

ReadResult parse_log(std::string_view bytes) {
    ReadResult result;
    std::size_t pos = 0;
    std::uint64_t expected = 1;
    while (pos < bytes.size()) {
        const std::size_t nl = bytes.find('\n', pos);
        const bool last = nl == std::string_view::npos || nl + 1 >= bytes.size();
        const std::string_view line =
            bytes.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);

        std::optional<StoredEvent> event;
        std::string problem;
        if (nl == std::string_view::npos) {
            problem = "record has no terminating newline";
        } else {
            try {
                event = event_from_json(Json::parse(line));
            } catch (const std::exception& e) {
                problem = e.what();
            }
        }
        if (!event) {
            if (last) {
                result.warning = "dropped incomplete record after seq " + std::to_string(expected - 1) + " (" +
                                 problem + ")";
                return result;
            }
            throw ReplayError(expected, "unreadable record: " + problem);
        }
        if (event->seq != expected) {
            throw ReplayError(event->seq, "expected seq " + std::to_string(expected));
        }
        result.events.push_back(std::move(*event));
        ++expected;
        pos = nl + 1;
        result.valid_bytes = pos;
    }
    return result;
}

EventLog::EventLog(std::unique_ptr<LogStorage> storage) : storage_(std::move(storage)) {
    const std::string bytes = storage_->read_all();
    ReadResult r = parse_log(bytes);
    if (r.warning) {
        open_warning_ = r.warning;
        storage_->truncate(r.valid_bytes);
    }
    last_seq_ = r.events.empty() ? 0 : r.events.back().seq;
}

EventLog EventLog::open_file(const std::filesystem::path& path) {
    return EventLog{std::make_unique<FileStorage>(path)};
}

EventLog EventLog::in_memory() { return EventLog{std::make_unique<MemoryStorage>()}; }

StoredEvent EventLog::append(std::string kind, std::string entity_id, Json payload, Timestamp at) {
    if (kind.empty()) throw ValidationError("event kind must not be empty");
    if (!payload.is_object()) throw ValidationError("event payload must be a JSON object");
    StoredEvent e{last_seq_ + 1, at, std::move(kind), std::move(entity_id), std::move(payload), kSchemaVersion};
    storage_->append(to_line(e));
    last_seq_ = e.seq;
    return e;
}

void EventLog::append_existing(const StoredEvent& event) {
    if (event.seq != last_seq_ + 1) {
        throw StoreError("cannot append seq " + std::to_string(event.seq) + " after " + std::to_string(last_seq_));
    }
    if (!event.payload.is_object()) throw ValidationError("event payload must be a JSON object");
    storage_->append(to_line(event));
    last_seq_ = event.seq;
}

std::vector<StoredEvent> EventLog::read(std::uint64_t from_seq) const {
    ReadResult r = parse_log(storage_->read_all());
    std::vector<StoredEvent> out;
    for (auto& e : r.events) {
        if (e.seq >= from_seq) out.push_back(std::move(e));
    }
    return out;
}

}  // namespace availd::store
