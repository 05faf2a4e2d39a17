#pragma once

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "obw/cycle_type.hpp"
#include "obw/factors.hpp"

namespace obw {

// On-disk solution record. Vertices are canonical integers 0..v-1.
struct SolutionRecord {
    int order = 0;
    CycleType type;
    std::string method;  // 1rot | 2rot-odd | 2rot-even | derived-1rot | derived-2rot
    Factorization fz;
};

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(int l, int c, const std::string& what)
        : std::runtime_error("line " + std::to_string(l) + ", col " + std::to_string(c) + ": " + what),
          line(l),
          column(c) {}
};

inline std::string serialize(const SolutionRecord& rec) {
    if (rec.fz.factors.empty()) throw std::invalid_argument("serialize: no factors");
    std::ostringstream out;
    out << "obw 1\n";
    out << "order " << rec.order << "\n";
    out << "type " << format_cycle_type(rec.type) << "\n";
    out << "method " << rec.method << "\n";
    for (const auto& factor : rec.fz.factors) {
        out << "factor: ";
        for (const auto& cyc : factor) {
            out << '(';
            for (size_t i = 0; i < cyc.size(); ++i) {
                if (i) out << ',';
                out << cyc[i];
            }
            out << ')';
        }
        out << "\n";
    }
    if (rec.fz.one_factor) {
        out << "one-factor:";
        for (const Edge& e : *rec.fz.one_factor) out << " [" << e.a << "-" << e.b << "]";
        out << "\n";
    }
    return out.str();
}

namespace detail {

struct LineScanner {
    const std::string& s;
    int line;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    void expect(char c) {
        skip_ws();
        if (pos >= s.size() || s[pos] != c)
            throw ParseError(line, static_cast<int>(pos) + 1,
                             std::string("expected '") + c + "'");
        ++pos;
    }
    int integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError(line, static_cast<int>(pos) + 1, "expected integer");
        int value = 0;
        std::from_chars(s.data() + start, s.data() + pos, value);
        return value;
    }
};

}  // namespace detail

inline SolutionRecord deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    SolutionRecord rec;
    bool have_magic = false, have_order = false, have_type = false, have_method = false;

    auto check_vertex = [&](int x, int ln) {
        if (!have_order) throw ParseError(ln, 1, "factor before order header");
        if (x < 0 || x >= rec.order)
            throw ParseError(ln, 1, "vertex " + std::to_string(x) + " out of range for order " +
                                        std::to_string(rec.order));
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.rfind("obw ", 0) == 0) {
            if (line != "obw 1") throw ParseError(lineno, 5, "unsupported format version");
            have_magic = true;
        } else if (line.rfind("order ", 0) == 0) {
            try {
                rec.order = std::stoi(line.substr(6));
            } catch (const std::exception&) {
                throw ParseError(lineno, 7, "expected integer order");
            }
            if (rec.order < 3) throw ParseError(lineno, 7, "order must be >= 3");
            rec.fz.order = rec.order;
            have_order = true;
        } else if (line.rfind("type ", 0) == 0) {
            try {
                rec.type = parse_cycle_type(line.substr(5));
            } catch (const std::exception& e) {
                throw ParseError(lineno, 6, e.what());
            }
            have_type = true;
        } else if (line.rfind("method ", 0) == 0) {
            rec.method = line.substr(7);
            have_method = true;
        } else if (line.rfind("factor:", 0) == 0) {
            detail::LineScanner sc{line, lineno, 7};
            std::vector<std::vector<int>> factor;
            while (!sc.done()) {
                sc.expect('(');
                std::vector<int> cyc;
                while (true) {
                    int x = sc.integer();
                    check_vertex(x, lineno);
                    cyc.push_back(x);
                    if (sc.peek() == ',') {
                        sc.expect(',');
                        continue;
                    }
                    break;
                }
                sc.expect(')');
                if (cyc.size() < 3) throw ParseError(lineno, 8, "cycle shorter than 3");
                factor.push_back(std::move(cyc));
            }
            if (factor.empty()) throw ParseError(lineno, 8, "empty factor line");
            rec.fz.factors.push_back(std::move(factor));
        } else if (line.rfind("one-factor:", 0) == 0) {
            detail::LineScanner sc{line, lineno, 11};
            std::vector<Edge> edges;
            while (!sc.done()) {
                sc.expect('[');
                int a = sc.integer();
                sc.expect('-');
                int b = sc.integer();
                sc.expect(']');
                check_vertex(a, lineno);
                check_vertex(b, lineno);
                edges.push_back({a, b});
            }
            rec.fz.one_factor = std::move(edges);
        } else {
            throw ParseError(lineno, 1, "unrecognized line: " + line);
        }
    }
    if (!have_magic) throw ParseError(1, 1, "missing 'obw 1' header");
    if (!have_order) throw ParseError(1, 1, "missing order header");
    if (!have_type) throw ParseError(1, 1, "missing type header");
    if (!have_method) throw ParseError(1, 1, "missing method header");
    if (rec.fz.factors.empty()) throw ParseError(lineno, 1, "record has no factors");
    return rec;
}

inline nlohmann::json to_json(const SolutionRecord& rec) {
    nlohmann::json j;
    j["obw"] = 1;
    j["order"] = rec.order;
    j["type"] = format_cycle_type(rec.type);
    j["method"] = rec.method;
    j["factors"] = rec.fz.factors;
    if (rec.fz.one_factor) {
        auto arr = nlohmann::json::array();
        for (const Edge& e : *rec.fz.one_factor) arr.push_back({e.a, e.b});
        j["one_factor"] = arr;
    }
    return j;
}

}  // namespace obw
