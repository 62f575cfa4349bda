#include "orbinspect/ply.hpp"

#include "orbinspect/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace orbinspect::geometry {
namespace {

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;  // "list" properties are stored as "list"
    int xyz[3] = {-1, -1, -1};
};

std::vector<std::string> split(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string tok; ss >> tok;) out.push_back(tok);
    return out;
}

bool is_scalar_type(const std::string& t) {
    static const char* names[] = {"char",  "uchar",  "short",   "ushort",  "int",    "uint",
                                  "float", "double", "int8",    "uint8",   "int16",  "uint16",
                                  "int32", "uint32", "float32", "float64"};
    for (const char* n : names)
        if (t == n) return true;
    return false;
}

bool is_float_type(const std::string& t) {
    return t == "float" || t == "double" || t == "float32" || t == "float64";
}

double parse_number(const std::string& tok, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError("invalid number '" + tok + "'", line);
    return v;
}

}  // namespace

PointCloud parse_ply(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line() || line != "ply") throw ParseError("missing 'ply' magic", lineno == 0 ? 1 : lineno);

    std::vector<Element> elements;
    bool have_format = false;
    for (;;) {
        if (!next_line()) throw ParseError("unexpected end of header", lineno);
        const auto tok = split(line);
        if (tok.empty()) continue;
        if (tok[0] == "end_header") break;
        if (tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "format") {
            if (tok.size() < 2) throw ParseError("malformed format line", lineno);
            if (tok[1] != "ascii") throw UnsupportedFormat("PLY encoding '" + tok[1] + "' is not supported");
            have_format = true;
        } else if (tok[0] == "element") {
            if (tok.size() != 3) throw ParseError("malformed element line", lineno);
            Element e;
            e.name = tok[1];
            e.count = static_cast<std::size_t>(parse_number(tok[2], lineno));
            elements.push_back(std::move(e));
        } else if (tok[0] == "property") {
            if (elements.empty()) throw ParseError("property before any element", lineno);
            Element& e = elements.back();
            if (tok.size() == 5 && tok[1] == "list") {
                e.properties.push_back("list");
            } else if (tok.size() == 3 && is_scalar_type(tok[1])) {
                const int axis = tok[2] == "x" ? 0 : tok[2] == "y" ? 1 : tok[2] == "z" ? 2 : -1;
                if (axis >= 0) {
                    if (e.name == "vertex" && !is_float_type(tok[1]))
                        throw ParseError("vertex coordinate '" + tok[2] + "' must be float or double", lineno);
                    e.xyz[axis] = static_cast<int>(e.properties.size());
                }
                e.properties.push_back(tok[1]);
            } else {
                throw ParseError("malformed property line", lineno);
            }
        } else {
            throw ParseError("unknown header keyword '" + tok[0] + "'", lineno);
        }
    }
    if (!have_format) throw ParseError("header has no format line", lineno);

    PointCloud cloud;
    bool found_vertex = false;
    for (const Element& e : elements) {
        const bool is_vertex = e.name == "vertex";
        if (is_vertex) {
            found_vertex = true;
            for (int a : e.xyz)
                if (a < 0) throw ParseError("vertex element lacks x, y or z", lineno);
            cloud.points.reserve(e.count);
        }
        for (std::size_t r = 0; r < e.count; ++r) {
            if (!next_line()) throw ParseError("unexpected end of data in element '" + e.name + "'", lineno);
            const auto tok = split(line);
            // Walk the row so list properties shift later columns correctly.
            std::size_t col = 0;
            std::vector<double> values;
            for (const std::string& p : e.properties) {
                if (col >= tok.size()) throw ParseError("too few values", lineno);
                if (p == "list") {
                    const double n = parse_number(tok[col++], lineno);
                    if (n < 0 || col + static_cast<std::size_t>(n) > tok.size())
                        throw ParseError("list length exceeds row", lineno);
                    col += static_cast<std::size_t>(n);
                    values.push_back(0.0);
                } else {
                    values.push_back(is_vertex ? parse_number(tok[col], lineno) : 0.0);
                    ++col;
                }
            }
            if (col != tok.size()) throw ParseError("too many values", lineno);
            if (is_vertex) cloud.points.emplace_back(values[e.xyz[0]], values[e.xyz[1]], values[e.xyz[2]]);
        }
    }
    if (!found_vertex) throw ParseError("no vertex element", lineno);
    return cloud;
}

PointCloud load_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_ply(in);
}

}  // namespace orbinspect::geometry
