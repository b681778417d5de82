#pragma once

#include <fstream>
#include <sstream>

#include "qc/core/parse.hpp"
#include "qc/curve/spectral_curve.hpp"

namespace qc {

// Sections of "key = value" lines; values may be double-quoted; '#' starts a comment.
using KeyValueSections = std::map<std::string, std::vector<std::pair<std::string, std::string>>>;

inline std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && ws(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

inline KeyValueSections parse_sections(std::istream& in) {
    KeyValueSections out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw CurveError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            out[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos || section.empty())
            throw CurveError("line " + std::to_string(lineno) + ": expected 'key = value' inside a section");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
        out[section].emplace_back(key, val);
    }
    return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline SpectralCurve curve_from_sections(const KeyValueSections& kv) {
    auto it = kv.find("curve");
    if (it == kv.end()) throw CurveError("missing [curve] section");
    std::map<std::string, std::string> cur(it->second.begin(), it->second.end());
    for (const char* k : {"x", "y"})
        if (!cur.count(k)) throw CurveError(std::string("missing key '") + k + "' in [curve]");
    std::string name = cur.count("name") ? cur["name"] : "curve";
    auto params = cur.count("parameters") ? split_list(cur["parameters"]) : std::vector<std::string>{};
    RatFunc x, y;
    try {
        x = parse_expr(cur["x"]);
        y = parse_expr(cur["y"]);
    } catch (const ParseError& e) {
        throw CurveError(std::string("in [curve]: ") + e.what());
    }
    std::vector<TimeEntry> tm;
    if (auto t = kv.find("times"); t != kv.end()) {
        std::vector<std::pair<std::string, std::string>> derivs;
        for (auto& [k, v] : t->second) {
            if (k.find('/') != std::string::npos) derivs.emplace_back(k, v);
            else tm.push_back({k, parse_expr(v), {}});
        }
        for (auto& [k, v] : derivs) {
            auto slash = k.find('/');
            std::string num = trim(k.substr(0, slash)), den = trim(k.substr(slash + 1));
            if (num.size() < 2 || num[0] != 'd' || den.size() < 2 || den[0] != 'd')
                throw CurveError("malformed Jacobian key '" + k + "'");
            num = num.substr(1);
            den = den.substr(1);
            bool found = false;
            for (auto& e : tm)
                if (e.name == num) {
                    RatFunc declared = parse_expr(v);
                    if (declared != e.value.derivative(var(den)))
                        throw CurveError("declared " + k + " disagrees with the derivative of " + num);
                    e.jacobian[den] = declared;
                    found = true;
                }
            if (!found) throw CurveError("Jacobian entry for unknown time '" + num + "'");
        }
    }
    return validate_curve(name, params, x, y, std::move(tm));
}

inline SpectralCurve load_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CurveError("cannot open curve file '" + path + "'");
    return curve_from_sections(parse_sections(in));
}

inline SpectralCurve curve_from_string(const std::string& text) {
    std::istringstream in(text);
    return curve_from_sections(parse_sections(in));
}

}  // namespace qc
