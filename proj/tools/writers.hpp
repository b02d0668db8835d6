#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace slgcli {

// CSV with a header row, LF line endings and 17-significant-digit decimals.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void close();

private:
    std::string path_;
    std::string buf_;
    std::size_t cols_;
    bool open_ = true;
};

std::string format_g17(double v);

// FNV-1a 64 of a file's bytes, hex-encoded.
std::string file_hash(const std::filesystem::path& path);

// Output directory bookkeeping: collects artifact names, writes
// manifest.json (name, bytes, fnv1a64 per file) at the end.
class OutputDir {
public:
    explicit OutputDir(const std::filesystem::path& dir);
    const std::filesystem::path& dir() const { return dir_; }

    std::filesystem::path path(const std::string& name);
    void write_text(const std::string& name, const std::string& text);
    void write_json(const std::string& name, const nlohmann::json& doc);
    void note_artifact(const std::string& name);  // for files written elsewhere
    void write_manifest();

private:
    std::filesystem::path dir_;
    std::vector<std::string> artifacts_;
};

}  // namespace slgcli
