#include "mdpass/store.hpp"

#include <algorithm>

#include "json_codec.hpp"
#include "mdpass/error.hpp"
#include "mdpass/hex.hpp"

namespace mdpass::auth {
namespace {

using nlohmann::json;

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::kCorruptLog, "log record: " + what);
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_hex(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_string()) corrupt(std::string("missing ") + field);
  const auto bytes = from_hex(j[field].get<std::string>());
  if (!bytes || bytes->size() != N) corrupt(std::string("bad ") + field);
  std::array<std::uint8_t, N> out{};
  std::ranges::copy(*bytes, out.begin());
  return out;
}

std::set<std::string> string_set(const json& j) {
  if (!j.is_array()) corrupt("expected array");
  std::set<std::string> out;
  for (const auto& v : j) out.insert(v.get<std::string>());
  return out;
}

struct Encoder {
  json operator()(const OrgRecord& r) const {
    return {{"v", kLogSchemaVersion}, {"type", "org"},         {"org_id", r.org_id},
            {"name", r.name},         {"services", r.agreed_services}, {"created_at", r.created_at}};
  }
  json operator()(const StoredCredential& r) const {
    return {{"v", kLogSchemaVersion},
            {"type", "credential"},
            {"org_id", r.org_id},
            {"user_id", r.user_id},
            {"spec", detail::spec_to_json(r.spec.dimensions())},
            {"password",
             {{"version", r.password.version},
              {"salt", to_hex(r.password.salt)},
              {"digest", to_hex(r.password.digest)}}},
            {"created_at", r.created_at}};
  }
  json operator()(const ServiceGrant& r) const {
    return {{"v", kLogSchemaVersion}, {"type", "grant"},
            {"org_id", r.org_id},     {"service", r.service},
            {"privileges", r.privileges}};
  }
};

}  // namespace

std::string encode_record(const LogRecord& record) { return std::visit(Encoder{}, record).dump(); }

LogRecord decode_record(std::string_view line) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) corrupt("not a JSON object");
  if (!j.contains("v") || !j["v"].is_number_integer()) corrupt("missing schema version");
  if (j["v"].get<int>() != kLogSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersion,
                "log schema version " + std::to_string(j["v"].get<int>()) + " is not supported");
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "org") {
      return OrgRecord{j.at("org_id").get<std::string>(), j.at("name").get<std::string>(),
                       string_set(j.at("services")), j.at("created_at").get<std::int64_t>()};
    }
    if (type == "credential") {
      const json& pw = j.at("password");
      PasswordDigest password;
      password.version = pw.at("version").get<std::uint8_t>();
      password.salt = fixed_hex<16>(pw, "salt");
      password.digest = fixed_hex<32>(pw, "digest");
      return StoredCredential{j.at("org_id").get<std::string>(), j.at("user_id").get<std::string>(),
                              detail::spec_from_json(j.at("spec")), password,
                              j.at("created_at").get<std::int64_t>()};
    }
    if (type == "grant") {
      return ServiceGrant{j.at("org_id").get<std::string>(), j.at("service").get<std::string>(),
                          string_set(j.at("privileges"))};
    }
    corrupt("unknown type '" + type + "'");
  } catch (const json::exception& e) {
    corrupt(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptLog) throw;
    corrupt(e.what());
  }
}

LoadResult load_log(const std::filesystem::path& path) {
  LoadResult result;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return result;
    throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  }
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    ++line_no;
    const std::size_t nl = data.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::size_t end = terminated ? nl : data.size();
    const std::string_view line(data.data() + pos, end - pos);
    const bool last = !terminated || end + 1 == data.size();

    if (!line.empty()) {
      try {
        if (!terminated) corrupt("unterminated line");
        result.records.push_back(decode_record(line));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kCorruptLog) throw;
        if (!last) {
          throw Error(ErrorCode::kCorruptLog, path.string() + ":" + std::to_string(line_no) +
                                                  ": " + e.what());
        }
        result.warnings.push_back(path.string() + ":" + std::to_string(line_no) +
                                  ": dropped damaged trailing record (" + e.what() + ")");
        break;
      }
    }
    pos = terminated ? end + 1 : end;
    result.intact_bytes = pos;
  }
  return result;
}

RecordLog::RecordLog(std::filesystem::path path) : path_(std::move(path)), loaded_(load_log(path_)) {
  std::error_code ec;
  if (std::filesystem::exists(path_, ec) &&
      std::filesystem::file_size(path_, ec) != loaded_.intact_bytes) {
    std::filesystem::resize_file(path_, loaded_.intact_bytes, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot truncate '" + path_.string() + "': " + ec.message());
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorCode::kIo, "cannot open '" + path_.string() + "' for append");
}

void RecordLog::append(const LogRecord& record) {
  out_ << encode_record(record) << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, "failed appending to '" + path_.string() + "'");
}

}  // namespace mdpass::auth
