#include "realseal/trust_service.hpp"

#include <fstream>

#include "realseal/kv.hpp"
#include "realseal/timeutil.hpp"

namespace realseal::trust {

namespace {

constexpr std::size_t kMaxManufacturerName = 128;

Result<crypto::KeyPair, ServiceError> load_or_create_ca_key(const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) {
        auto bytes = read_file_bytes(path);
        if (!bytes) {
            return ServiceError{ServiceErrorKind::IoError, "cannot read " + path.string()};
        }
        auto key = crypto::parse_private_key_file(to_string(*bytes));
        if (!key.ok()) {
            return ServiceError{ServiceErrorKind::IoError,
                                "CA key file invalid: " + key.error().detail};
        }
        auto pair = crypto::generate_keypair(key.value().bytes);
        return std::move(pair).value();
    }
    crypto::KeyPair pair = crypto::generate_keypair();
    std::string encoded = crypto::encode_private_key_file(pair.private_key);
    if (!write_file_bytes(path, to_bytes(encoded))) {
        return ServiceError{ServiceErrorKind::IoError, "cannot write " + path.string()};
    }
    return pair;
}

}  // namespace

Result<std::unique_ptr<TrustService>, ServiceError> TrustService::open(ServiceConfig config) {
    if (config.admin_token.empty()) {
        return ServiceError{ServiceErrorKind::InvalidInput, "admin token must be nonempty"};
    }
    if (!config.clock) config.clock = now_utc;

    std::unique_ptr<TrustService> service(new TrustService());
    service->config_ = std::move(config);

    auto ca = load_or_create_ca_key(service->config_.ca_key_path);
    if (!ca.ok()) return ca.error();
    service->ca_keys_ = ca.value();

    // Replay the operation log; state (including issued_at) comes entirely
    // from logged timestamps so a restart republishes identical bytes.
    if (std::filesystem::exists(service->config_.log_path)) {
        auto bytes = read_file_bytes(service->config_.log_path);
        if (!bytes) {
            return ServiceError{ServiceErrorKind::IoError,
                                "cannot read log " + service->config_.log_path.string()};
        }
        std::string text = to_string(*bytes);
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t end = text.find("\n\n", pos);
            std::size_t block_end = end == std::string::npos ? text.size() : end + 1;
            std::string_view block(text.data() + pos, block_end - pos);
            pos = end == std::string::npos ? text.size() : end + 2;
            if (block.empty() || block == "\n") continue;

            auto parsed = kv::parse(block);
            if (!parsed.ok()) {
                return ServiceError{ServiceErrorKind::IoError,
                                    "corrupt log record: " + parsed.error().detail};
            }
            const auto& fields = parsed.value();
            const std::string* op = kv::find(fields, "op");
            const std::string* ts_text = kv::find(fields, "ts");
            auto ts = ts_text ? parse_utc(*ts_text) : std::nullopt;
            if (!op || !ts) {
                return ServiceError{ServiceErrorKind::IoError, "log record missing op/ts"};
            }

            std::string name;
            crypto::PublicKey key;
            crypto::Fingerprint fingerprint;
            if (*op == "register") {
                const std::string* name_text = kv::find(fields, "name");
                const std::string* key_text = kv::find(fields, "public_key");
                auto parsed_key =
                    key_text ? crypto::PublicKey::from_hex(*key_text) : std::nullopt;
                if (!name_text || !parsed_key) {
                    return ServiceError{ServiceErrorKind::IoError, "corrupt register record"};
                }
                name = *name_text;
                key = *parsed_key;
            } else if (*op == "approve" || *op == "revoke") {
                const std::string* fp_text = kv::find(fields, "fingerprint");
                auto parsed_fp =
                    fp_text ? crypto::Fingerprint::from_hex(*fp_text) : std::nullopt;
                if (!parsed_fp) {
                    return ServiceError{ServiceErrorKind::IoError, "corrupt " + *op + " record"};
                }
                fingerprint = *parsed_fp;
            } else if (*op == "init") {
                service->list_issued_at_ = *ts;
                continue;
            } else {
                return ServiceError{ServiceErrorKind::IoError, "unknown log op " + *op};
            }

            std::string detail;
            auto applied = service->apply(*op, name, key, fingerprint, *ts, &detail);
            if (!applied.ok()) {
                return ServiceError{ServiceErrorKind::IoError,
                                    "log replay rejected a " + *op + " record: " + detail};
            }
        }
    } else {
        std::int64_t ts = service->config_.clock();
        service->list_issued_at_ = ts;
        auto logged = service->append_log({{"op", "init"}, {"ts", format_utc(ts)}});
        if (!logged.ok()) return logged.error();
    }

    std::lock_guard lock(service->mutation_mutex_);
    service->publish_locked();
    return service;
}

Result<bool, ServiceError> TrustService::apply(const std::string& op, const std::string& name,
                                               const crypto::PublicKey& key,
                                               const crypto::Fingerprint& fingerprint,
                                               std::int64_t ts, std::string* error_detail) {
    auto fail = [&](ServiceErrorKind kind, std::string detail) -> Result<bool, ServiceError> {
        if (error_detail) *error_detail = detail;
        return ServiceError{kind, std::move(detail)};
    };
    if (op == "register") {
        crypto::Fingerprint fp = crypto::fingerprint_of(key);
        if (records_.contains(fp.hex())) {
            return fail(ServiceErrorKind::AlreadyRegistered,
                        "fingerprint " + fp.hex() + " already registered");
        }
        SignerRecord record;
        record.fingerprint = fp;
        record.public_key = key;
        record.manufacturer_name = name;
        record.status = SignerStatus::Pending;
        record.registered_at = ts;
        record.status_changed_at = ts;
        records_.emplace(fp.hex(), std::move(record));
        return false;  // published list unchanged
    }
    auto it = records_.find(fingerprint.hex());
    if (it == records_.end()) {
        return fail(ServiceErrorKind::NotFound, "fingerprint " + fingerprint.hex() + " unknown");
    }
    SignerRecord& record = it->second;
    if (op == "approve") {
        if (record.status != SignerStatus::Pending) {
            return fail(ServiceErrorKind::InvalidTransition,
                        "only pending records can be approved");
        }
        record.status = SignerStatus::Active;
    } else {  // revoke
        if (record.status != SignerStatus::Active) {
            return fail(ServiceErrorKind::InvalidTransition,
                        "only active records can be revoked");
        }
        record.status = SignerStatus::Revoked;
    }
    record.status_changed_at = std::max(ts, record.status_changed_at);
    ++list_version_;
    list_issued_at_ = ts;
    return true;
}

void TrustService::publish_locked() {
    TrustList list;
    list.list_version = list_version_;
    list.issued_at = list_issued_at_;
    list.ca_public_key = ca_keys_.public_key;
    for (const auto& [hex, record] : records_) {
        if (record.status == SignerStatus::Pending) continue;
        list.entries.push_back(record);  // map order is fingerprint-hex order
    }
    std::string body = serialize_trust_list_body(list);
    list.ca_signature = crypto::sign(to_bytes(body), ca_keys_.private_key);

    auto snapshot = std::make_shared<SignedTrustList>();
    snapshot->bytes = serialize_trust_list(list);
    snapshot->list = std::move(list);
    {
        std::lock_guard lock(snapshot_mutex_);
        snapshot_ = std::move(snapshot);
    }
}

Result<bool, ServiceError> TrustService::append_log(
    const std::vector<std::pair<std::string, std::string>>& fields) {
    std::ofstream out(config_.log_path, std::ios::binary | std::ios::app);
    if (!out) {
        return ServiceError{ServiceErrorKind::IoError,
                            "cannot append to " + config_.log_path.string()};
    }
    out << kv::serialize(fields) << "\n";
    if (!out.good()) {
        return ServiceError{ServiceErrorKind::IoError, "log write failed"};
    }
    return true;
}

Result<SignerRecord, ServiceError> TrustService::register_manufacturer(
    const std::string& name, const crypto::PublicKey& key) {
    if (name.empty() || name.size() > kMaxManufacturerName) {
        return ServiceError{ServiceErrorKind::InvalidInput,
                            "manufacturer name must be 1-128 bytes"};
    }
    std::lock_guard lock(mutation_mutex_);
    std::int64_t ts = config_.clock();
    std::string detail;
    auto applied = apply("register", name, key, {}, ts, &detail);
    if (!applied.ok()) return applied.error();
    auto logged = append_log({{"op", "register"},
                              {"name", name},
                              {"public_key", key.hex()},
                              {"ts", format_utc(ts)}});
    if (!logged.ok()) return logged.error();
    return records_.at(crypto::fingerprint_of(key).hex());
}

Result<std::shared_ptr<const SignedTrustList>, ServiceError> TrustService::approve(
    const crypto::Fingerprint& fingerprint, const std::string& admin_token) {
    if (admin_token != config_.admin_token) {
        return ServiceError{ServiceErrorKind::Unauthorized, "admin token mismatch"};
    }
    std::lock_guard lock(mutation_mutex_);
    std::int64_t ts = config_.clock();
    std::string detail;
    auto applied = apply("approve", {}, {}, fingerprint, ts, &detail);
    if (!applied.ok()) return applied.error();
    auto logged = append_log(
        {{"op", "approve"}, {"fingerprint", fingerprint.hex()}, {"ts", format_utc(ts)}});
    if (!logged.ok()) return logged.error();
    publish_locked();
    return current_list();
}

Result<std::shared_ptr<const SignedTrustList>, ServiceError> TrustService::revoke(
    const crypto::Fingerprint& fingerprint, const std::string& admin_token,
    const std::string& reason) {
    if (admin_token != config_.admin_token) {
        return ServiceError{ServiceErrorKind::Unauthorized, "admin token mismatch"};
    }
    std::lock_guard lock(mutation_mutex_);
    std::int64_t ts = config_.clock();
    std::string detail;
    auto applied = apply("revoke", {}, {}, fingerprint, ts, &detail);
    if (!applied.ok()) return applied.error();
    auto logged = append_log({{"op", "revoke"},
                              {"fingerprint", fingerprint.hex()},
                              {"reason", reason},
                              {"ts", format_utc(ts)}});
    if (!logged.ok()) return logged.error();
    publish_locked();
    return current_list();
}

std::shared_ptr<const SignedTrustList> TrustService::current_list() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

std::optional<SignerRecord> TrustService::find_record(
    const crypto::Fingerprint& fingerprint) const {
    std::lock_guard lock(mutation_mutex_);
    auto it = records_.find(fingerprint.hex());
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

}  // namespace realseal::trust
