#include "writers.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace slgcli {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path.string()), cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buf_ += ",";
        buf_ += header[i];
    }
    buf_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != cols_) throw std::runtime_error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buf_ += ",";
        buf_ += format_g17(values[i]);
    }
    buf_ += "\n";
}

void CsvWriter::close() {
    if (!open_) return;
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path_);
    out << buf_;
    open_ = false;
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char chunk[4096];
    while (in.read(chunk, sizeof chunk) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(chunk[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

OutputDir::OutputDir(const std::filesystem::path& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path OutputDir::path(const std::string& name) {
    note_artifact(name);
    return dir_ / name;
}

void OutputDir::write_text(const std::string& name, const std::string& text) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << text;
    note_artifact(name);
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& doc) {
    write_text(name, doc.dump(2) + "\n");
}

void OutputDir::note_artifact(const std::string& name) {
    for (const auto& a : artifacts_)
        if (a == name) return;
    artifacts_.push_back(name);
}

void OutputDir::write_manifest() {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& name : artifacts_) {
        const auto p = dir_ / name;
        if (!std::filesystem::exists(p)) continue;
        files.push_back({{"name", name},
                         {"bytes", std::filesystem::file_size(p)},
                         {"fnv1a64", file_hash(p)}});
    }
    nlohmann::json doc{{"files", files}};
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << doc.dump(2) << "\n";
}

}  // namespace slgcli
