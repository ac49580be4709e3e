#include "magheat/cli.hpp"
#include "magheat/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace magheat::cli {

const char* version_string() {
#ifdef MAGHEAT_VERSION_STRING
    return MAGHEAT_VERSION_STRING;
#else
    return "unknown";
#endif
}

std::string output_path(const RunConfig& rc, const std::string& name) {
    std::filesystem::path dir(rc.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + rc.out_dir + ": " + ec.message());
    return (dir / name).string();
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : file_(std::make_unique<std::ofstream>(path, std::ios::binary)) {
    if (!*file_) throw ConfigError("cannot write " + path);
    os_ = file_.get();
    for (std::size_t i = 0; i < header.size(); ++i) *os_ << (i ? "," : "") << header[i];
    *os_ << "\n";
}

CsvWriter& CsvWriter::operator<<(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    *os_ << (first_ ? "" : ",") << buf;
    first_ = false;
    return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
    *os_ << (first_ ? "" : ",") << v;
    first_ = false;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
    *os_ << (first_ ? "" : ",") << s;
    first_ = false;
    return *this;
}

void CsvWriter::end_row() {
    *os_ << "\n";
    first_ = true;
}

void write_summary(const std::string& path, const std::string& command, const RunConfig& rc,
                   const nlohmann::ordered_json& result) {
    nlohmann::ordered_json doc = {{"command", command},
                                  {"version", version_string()},
                                  {"config", rc.to_json()},
                                  {"result", result}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << doc.dump(2) << "\n";
}

} // namespace magheat::cli
