#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace slgcli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw UsageError("config value for " + key + " is not a number: '" + v + "'");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str(), path);
}

RunConfig RunConfig::from_string(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(origin + ":" + std::to_string(lineno) + ": expected 'section.key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos)
            throw UsageError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                             "' is missing its section");
        cfg.values_[key] = value;
        cfg.consumed_[key] = false;
    }
    return cfg;
}

void RunConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw UsageError("override must look like section.key=value: '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    if (key.find('.') == std::string::npos)
        throw UsageError("override key '" + key + "' is missing its section");
    values_[key] = trim(assignment.substr(eq + 1));
    consumed_[key] = false;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    return values_.count(full_key(section, key)) > 0;
}

std::optional<std::string> RunConfig::raw(const std::string& section, const std::string& key) {
    const auto it = values_.find(full_key(section, key));
    if (it == values_.end()) return std::nullopt;
    consumed_[it->first] = true;
    return it->second;
}

void RunConfig::note(const std::string& section, const std::string& key,
                     const std::string& value) {
    resolved_[full_key(section, key)] = value;
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) {
    const auto v = raw(section, key);
    const double x = v ? parse_double(full_key(section, key), *v) : fallback;
    note(section, key, format_double(x));
    return x;
}

double RunConfig::require_double(const std::string& section, const std::string& key) {
    const auto v = raw(section, key);
    if (!v) throw UsageError("missing required config key " + full_key(section, key));
    const double x = parse_double(full_key(section, key), *v);
    note(section, key, format_double(x));
    return x;
}

long long RunConfig::get_int(const std::string& section, const std::string& key,
                             long long fallback) {
    const auto v = raw(section, key);
    long long x = fallback;
    if (v) {
        try {
            std::size_t pos = 0;
            x = std::stoll(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument(*v);
        } catch (const std::exception&) {
            throw UsageError("config value for " + full_key(section, key) +
                             " is not an integer: '" + *v + "'");
        }
    }
    note(section, key, std::to_string(x));
    return x;
}

std::string RunConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) {
    const auto v = raw(section, key);
    const std::string x = v ? *v : fallback;
    note(section, key, x);
    return x;
}

std::string RunConfig::require_string(const std::string& section, const std::string& key) {
    const auto v = raw(section, key);
    if (!v) throw UsageError("missing required config key " + full_key(section, key));
    note(section, key, *v);
    return *v;
}

std::vector<double> RunConfig::get_array(const std::string& section, const std::string& key,
                                         const std::vector<double>& fallback) {
    const auto v = raw(section, key);
    std::vector<double> out;
    if (v) {
        for (const auto& piece : split(*v, ','))
            if (!piece.empty()) out.push_back(parse_double(full_key(section, key), piece));
    } else {
        out = fallback;
    }
    std::string echo;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i) echo += ",";
        echo += format_double(out[i]);
    }
    note(section, key, echo);
    return out;
}

std::vector<std::string> RunConfig::get_string_array(const std::string& section,
                                                     const std::string& key,
                                                     const std::vector<std::string>& fallback) {
    const auto v = raw(section, key);
    std::vector<std::string> out;
    if (v) {
        for (const auto& piece : split(*v, ','))
            if (!piece.empty()) out.push_back(piece);
    } else {
        out = fallback;
    }
    std::string echo;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i) echo += ",";
        echo += out[i];
    }
    note(section, key, echo);
    return out;
}

std::vector<std::vector<double>> RunConfig::get_matrix(const std::string& section,
                                                       const std::string& key) {
    const auto v = raw(section, key);
    std::vector<std::vector<double>> out;
    if (v) {
        for (const auto& row : split(*v, ';')) {
            if (row.empty()) continue;
            std::vector<double> r;
            for (const auto& piece : split(row, ','))
                if (!piece.empty()) r.push_back(parse_double(full_key(section, key), piece));
            out.push_back(std::move(r));
        }
        note(section, key, *v);
    }
    return out;
}

std::vector<std::string> RunConfig::keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_) out.push_back(key);
    return out;
}

void RunConfig::assert_all_consumed() const {
    std::string unknown;
    for (const auto& [key, used] : consumed_)
        if (!used) unknown += (unknown.empty() ? "" : ", ") + key;
    if (!unknown.empty()) throw UsageError("unknown config key(s): " + unknown);
}

std::string RunConfig::resolved_echo() const {
    std::string out = "# resolved configuration (defaults materialized)\n";
    for (const auto& [key, value] : resolved_) out += key + " = " + value + "\n";
    return out;
}

}  // namespace slgcli
