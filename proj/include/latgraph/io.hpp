#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "latgraph/graph.hpp"
#include "latgraph/models.hpp"

namespace latgraph {

// Graph JSON: {"n": int, "edges": [[i,j],...]} with 1-based sorted pairs.
inline std::string graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["n"] = g.n();
    auto edges = nlohmann::json::array();
    for (auto [a, b] : g.edges()) edges.push_back({a + 1, b + 1});
    j["edges"] = std::move(edges);
    return j.dump();
}

inline Graph graph_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int n = j.at("n").get<int>();
    Graph::Builder b(n);
    for (const auto& e : j.at("edges")) {
        int a = e.at(0).get<int>(), c = e.at(1).get<int>();
        b.set(a - 1, c - 1);
    }
    return std::move(b).build();
}

// Edge-list text: one "i j" line per edge, 1-based.
inline std::string graph_to_edge_list(const Graph& g) {
    std::ostringstream os;
    for (auto [a, b] : g.edges()) os << (a + 1) << ' ' << (b + 1) << '\n';
    return os.str();
}

inline Graph graph_from_edge_list(int n, const std::string& text) {
    Graph::Builder b(n);
    std::istringstream is(text);
    int a, c;
    while (is >> a >> c) b.set(a - 1, c - 1);
    return std::move(b).build();
}

// Matrix CSV: header "i,j,value", upper triangle only, 1-based.
inline std::string matrix_to_csv(const IntersectionMatrix& m) {
    std::ostringstream os;
    os << "i,j,value\n";
    for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j) os << (i + 1) << ',' << (j + 1) << ',' << m.at(i, j) << '\n';
    return os.str();
}

// key=value config lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_kv_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value, got '" + line + "'");
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

// Comma-separated key=value form used by --a/--b model arguments.
inline std::map<std::string, std::string> parse_kv_inline(const std::string& text) {
    std::string t = text;
    for (auto& c : t)
        if (c == ',') c = '\n';
    return parse_kv_text(t);
}

inline std::map<std::string, std::string> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_kv_text(ss.str());
}

// Write via temp file + rename so a crashed run never leaves partial output.
inline void atomic_write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + tmp + " -> " + path);
}

} // namespace latgraph
