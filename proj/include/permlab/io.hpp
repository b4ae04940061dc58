#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "permlab/gentree.hpp"
#include "permlab/permutation.hpp"
#include "permlab/permuton.hpp"

namespace permlab {

// Writes through a temp file in the same directory, then renames into place.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

// Self-describing envelope shared by every file the commands produce.
struct Envelope {
    std::string schema = "permuton-lab/v1";
    std::string family;
    std::string kind;  // permutation | walk | labels | permuton
    nlohmann::json data;
};

inline void write_envelope(const std::filesystem::path& path, const Envelope& env) {
    nlohmann::json j{{"schema", env.schema}, {"family", env.family}, {"kind", env.kind}, {"data", env.data}};
    atomic_write(path, j.dump(1) + "\n");
}

inline Envelope read_envelope(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    Envelope env;
    env.schema = j.at("schema").get<std::string>();
    if (env.schema != "permuton-lab/v1")
        throw std::runtime_error("unsupported schema: " + env.schema);
    env.family = j.at("family").get<std::string>();
    env.kind = j.at("kind").get<std::string>();
    env.data = j.at("data");
    return env;
}

inline nlohmann::json perms_to_json(const std::vector<Permutation>& ps) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : ps) arr.push_back(p.values());
    return arr;
}

inline std::vector<Permutation> json_to_perms(const nlohmann::json& data) {
    std::vector<Permutation> out;
    for (const auto& item : data) out.emplace_back(item.get<std::vector<int>>());
    return out;
}

inline nlohmann::json walks_to_json(const std::vector<Walk>& ws) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& w : ws) {
        nlohmann::json jw = nlohmann::json::array();
        for (Pt p : w) jw.push_back({p.x, p.y});
        arr.push_back(std::move(jw));
    }
    return arr;
}

inline std::vector<Walk> json_to_walks(const nlohmann::json& data) {
    std::vector<Walk> out;
    for (const auto& jw : data) {
        Walk w;
        for (const auto& jp : jw) w.push_back({jp.at(0).get<int>(), jp.at(1).get<int>()});
        out.push_back(std::move(w));
    }
    return out;
}

inline nlohmann::json permuton_to_json(const EmpiricalPermuton& e) {
    nlohmann::json rows = nlohmann::json::array();
    for (int ix = 0; ix < e.grid(); ++ix) {
        nlohmann::json row = nlohmann::json::array();
        for (int iy = 0; iy < e.grid(); ++iy) row.push_back(e.at(ix, iy));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Fixed-format float so CSV bytes are reproducible.
inline std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    atomic_write(path, out);
}

}  // namespace permlab
