#pragma once

#include "bmq/model.hpp"
#include "bmq/virtmod.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bmq {

using Json = nlohmann::json;

// Input rejected: carries a human-readable location (json path, or line and
// column for syntax errors).
struct SpecParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace io_detail {

inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& path) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok) throw SpecParseError(path + ": unknown key '" + item.key() + "'");
    }
}

inline const Json& need(const Json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw SpecParseError(path + ": missing required key '" + key + "'");
    return *it;
}

inline long long get_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer())
        throw SpecParseError(path + ": expected an integer (floats are not accepted)");
    return j.get<long long>();
}

inline Rat get_rat(const Json& j, const std::string& path) {
    if (!j.is_string())
        throw SpecParseError(path + ": rationals must be strings like \"p/q\" (floats are not accepted)");
    try {
        return parse_rat(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw SpecParseError(path + ": " + e.what());
    }
}

inline std::string get_string(const Json& j, const std::string& path) {
    if (!j.is_string()) throw SpecParseError(path + ": expected a string");
    return j.get<std::string>();
}

inline Vec get_int_vector(const Json& j, int d, const std::string& path) {
    if (!j.is_array()) throw SpecParseError(path + ": expected an array of integers");
    if (d >= 0 && static_cast<int>(j.size()) != d)
        throw SpecParseError(path + ": expected exactly " + std::to_string(d) + " entries");
    Vec v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_int(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

inline HPolytope get_polytope(const Json& j, int d, const std::string& path) {
    if (!j.is_object()) throw SpecParseError(path + ": expected an object");
    check_keys(j, {"halfspaces"}, path);
    const Json& hs = need(j, "halfspaces", path);
    if (!hs.is_array()) throw SpecParseError(path + ".halfspaces: expected an array");
    HPolytope p{d, {}};
    for (std::size_t i = 0; i < hs.size(); ++i) {
        std::string hp = path + ".halfspaces[" + std::to_string(i) + "]";
        const Json& h = hs[i];
        if (!h.is_object()) throw SpecParseError(hp + ": expected an object");
        check_keys(h, {"normal", "bound", "closed"}, hp);
        Halfspace half;
        half.normal = get_int_vector(need(h, "normal", hp), d, hp + ".normal");
        half.bound = get_rat(need(h, "bound", hp), hp + ".bound");
        if (h.contains("closed")) {
            if (!h["closed"].is_boolean()) throw SpecParseError(hp + ".closed: expected a boolean");
            half.closed = h["closed"].get<bool>();
        }
        p.halfspaces.push_back(std::move(half));
    }
    return p;
}

}  // namespace io_detail

inline ManifoldSpec spec_from_json(const Json& j) {
    using namespace io_detail;
    const std::string top = "$";
    if (!j.is_object()) throw SpecParseError(top + ": expected an object");
    check_keys(j, {"m", "d", "base_piece", "pieces", "z_components"}, top);
    ManifoldSpec spec;
    spec.m = static_cast<int>(get_int(need(j, "m", top), top + ".m"));
    spec.d = static_cast<int>(get_int(need(j, "d", top), top + ".d"));
    spec.base_piece = get_string(need(j, "base_piece", top), top + ".base_piece");

    const Json& pieces = need(j, "pieces", top);
    if (!pieces.is_array()) throw SpecParseError(top + ".pieces: expected an array");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        std::string pp = top + ".pieces[" + std::to_string(i) + "]";
        const Json& pj = pieces[i];
        if (!pj.is_object()) throw SpecParseError(pp + ": expected an object");
        check_keys(pj, {"id", "regions"}, pp);
        Piece piece;
        piece.id = get_string(need(pj, "id", pp), pp + ".id");
        if (pj.contains("regions")) {
            const Json& regions = pj["regions"];
            if (!regions.is_array()) throw SpecParseError(pp + ".regions: expected an array");
            for (std::size_t r = 0; r < regions.size(); ++r)
                piece.regions.push_back(
                    get_polytope(regions[r], spec.d, pp + ".regions[" + std::to_string(r) + "]"));
        }
        spec.pieces.push_back(std::move(piece));
    }

    if (j.contains("z_components")) {
        const Json& zs = j["z_components"];
        if (!zs.is_array()) throw SpecParseError(top + ".z_components: expected an array");
        for (std::size_t i = 0; i < zs.size(); ++i) {
            std::string zp = top + ".z_components[" + std::to_string(i) + "]";
            const Json& zj = zs[i];
            if (!zj.is_object()) throw SpecParseError(zp + ": expected an object");
            check_keys(zj, {"id", "a_hat", "ratios", "leaf_polytope", "side_plus", "side_minus",
                            "threshold_override"},
                       zp);
            ZComponent z;
            z.id = get_string(need(zj, "id", zp), zp + ".id");
            z.a_hat = get_int_vector(need(zj, "a_hat", zp), spec.d, zp + ".a_hat");
            const Json& ratios = need(zj, "ratios", zp);
            if (!ratios.is_array()) throw SpecParseError(zp + ".ratios: expected an array");
            for (std::size_t r = 0; r < ratios.size(); ++r)
                z.modular_ratios.push_back(get_rat(ratios[r], zp + ".ratios[" + std::to_string(r) + "]"));
            z.leaf_polytope = get_polytope(need(zj, "leaf_polytope", zp), spec.d, zp + ".leaf_polytope");
            z.side_plus_piece = get_string(need(zj, "side_plus", zp), zp + ".side_plus");
            z.side_minus_piece = get_string(need(zj, "side_minus", zp), zp + ".side_minus");
            if (zj.contains("threshold_override"))
                z.threshold_override = get_rat(zj["threshold_override"], zp + ".threshold_override");
            spec.z_components.push_back(std::move(z));
        }
    }
    return spec;
}

// Parses a spec document; syntax errors are reported with line and column.
inline ManifoldSpec parse_spec_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        auto [line, col] = io_detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw SpecParseError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                             ": " + e.what());
    }
    return spec_from_json(j);
}

inline Json polytope_to_json(const HPolytope& p) {
    Json hs = Json::array();
    for (const auto& h : p.halfspaces) {
        Json hj;
        hj["normal"] = h.normal;
        hj["bound"] = rat_str(h.bound);
        hj["closed"] = h.closed;
        hs.push_back(std::move(hj));
    }
    return Json{{"halfspaces", std::move(hs)}};
}

inline Json spec_to_json(const ManifoldSpec& spec) {
    Json j;
    j["m"] = spec.m;
    j["d"] = spec.d;
    j["base_piece"] = spec.base_piece;
    Json pieces = Json::array();
    for (const auto& p : spec.pieces) {
        Json pj;
        pj["id"] = p.id;
        Json regions = Json::array();
        for (const auto& r : p.regions) regions.push_back(polytope_to_json(r));
        pj["regions"] = std::move(regions);
        pieces.push_back(std::move(pj));
    }
    j["pieces"] = std::move(pieces);
    Json zs = Json::array();
    for (const auto& z : spec.z_components) {
        Json zj;
        zj["id"] = z.id;
        zj["a_hat"] = z.a_hat;
        Json ratios = Json::array();
        for (const auto& r : z.modular_ratios) ratios.push_back(rat_str(r));
        zj["ratios"] = std::move(ratios);
        zj["leaf_polytope"] = polytope_to_json(z.leaf_polytope);
        zj["side_plus"] = z.side_plus_piece;
        zj["side_minus"] = z.side_minus_piece;
        if (z.threshold_override) zj["threshold_override"] = rat_str(*z.threshold_override);
        zs.push_back(std::move(zj));
    }
    j["z_components"] = std::move(zs);
    return j;
}

inline std::string spec_to_text(const ManifoldSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

inline Json module_to_json(const VirtualTModule& v) {
    Json j;
    j["d"] = v.d;
    Json fin = Json::array();
    for (const auto& [k, val] : v.finite) fin.push_back(Json{{"weight", k}, {"mult", val}});
    j["finite"] = std::move(fin);
    Json rays = Json::array();
    for (const auto& r : v.rays) rays.push_back(Json{{"base", r.base}, {"dir", r.dir}, {"value", r.value}});
    j["rays"] = std::move(rays);
    return j;
}

inline VirtualTModule module_from_json(const Json& j) {
    using namespace io_detail;
    const std::string top = "$";
    if (!j.is_object()) throw SpecParseError(top + ": expected an object");
    check_keys(j, {"d", "finite", "rays"}, top);
    int d = static_cast<int>(get_int(need(j, "d", top), top + ".d"));
    std::map<Vec, long long> fin;
    for (const auto& e : need(j, "finite", top)) {
        check_keys(e, {"weight", "mult"}, top + ".finite[]");
        fin[get_int_vector(need(e, "weight", top), d, top + ".weight")] =
            get_int(need(e, "mult", top), top + ".mult");
    }
    std::vector<Ray> rays;
    for (const auto& e : need(j, "rays", top)) {
        check_keys(e, {"base", "dir", "value"}, top + ".rays[]");
        rays.push_back(Ray{get_int_vector(need(e, "base", top), d, top + ".base"),
                           get_int_vector(need(e, "dir", top), d, top + ".dir"),
                           get_int(need(e, "value", top), top + ".value")});
    }
    return canonicalize(d, fin, std::move(rays));
}

inline Json profile_to_json(const AsymptoticProfile& p) {
    Json j;
    j["xi"] = p.xi ? Json(*p.xi) : Json(nullptr);
    j["c_plus"] = p.c_plus;
    j["c_minus"] = p.c_minus;
    j["lambda0"] = p.lambda0;
    j["off_axis_clean"] = p.off_axis_clean;
    j["multi_direction"] = p.multi_direction;
    return j;
}

inline AsymptoticProfile profile_from_json(const Json& j) {
    using namespace io_detail;
    AsymptoticProfile p;
    if (!j["xi"].is_null()) p.xi = get_int_vector(j["xi"], -1, "$.xi");
    p.c_plus = get_int(j["c_plus"], "$.c_plus");
    p.c_minus = get_int(j["c_minus"], "$.c_minus");
    p.lambda0 = get_int(j["lambda0"], "$.lambda0");
    p.off_axis_clean = j["off_axis_clean"].get<bool>();
    p.multi_direction = j["multi_direction"].get<bool>();
    return p;
}

// One closed integer range per axis.
struct Window {
    std::vector<std::pair<long long, long long>> axes;
};

// Multiplicity table over the window: header w1,...,wd,mult; rows in
// lexicographic weight order; LF line endings.
inline std::string csv_table(const VirtualTModule& v, const Window& win) {
    if (static_cast<int>(win.axes.size()) != v.d) throw std::invalid_argument("window has wrong dimension");
    std::string out;
    for (int i = 1; i <= v.d; ++i) out += "w" + std::to_string(i) + ",";
    out += "mult\n";
    Vec y(v.d);
    for (int i = 0; i < v.d; ++i) y[i] = win.axes[i].first;
    for (;;) {
        for (int i = 0; i < v.d; ++i) out += std::to_string(y[i]) + ",";
        out += std::to_string(multiplicity(v, y)) + "\n";
        int i = v.d - 1;
        while (i >= 0) {
            if (++y[i] <= win.axes[i].second) break;
            y[i] = win.axes[i].first;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

// Self-contained stem (d = 1) or signed heat grid (d = 2) rendering of the
// same table the CSV carries. Integer-only geometry keeps the output
// byte-deterministic.
inline std::string svg_diagram(const VirtualTModule& v, const Window& win) {
    if (v.d != 1 && v.d != 2) throw std::invalid_argument("SVG diagrams exist for d <= 2 only");
    if (static_cast<int>(win.axes.size()) != v.d) throw std::invalid_argument("window has wrong dimension");
    std::string out;
    auto cell_color = [](long long m) { return m > 0 ? "#2166ac" : "#b2182b"; };
    if (v.d == 1) {
        long long lo = win.axes[0].first, hi = win.axes[0].second;
        long long n = hi - lo + 1;
        long long maxabs = 1;
        for (long long k = lo; k <= hi; ++k) maxabs = std::max(maxabs, std::abs(multiplicity(v, {k})));
        long long width = 20 * n + 40, height = 240, base = 120;
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
               std::to_string(height) + "\">\n";
        out += "<line x1=\"20\" y1=\"" + std::to_string(base) + "\" x2=\"" + std::to_string(width - 20) +
               "\" y2=\"" + std::to_string(base) + "\" stroke=\"#888\"/>\n";
        for (long long k = lo; k <= hi; ++k) {
            long long m = multiplicity(v, {k});
            long long x = 30 + 20 * (k - lo);
            if (m != 0) {
                long long h = (90 * std::abs(m)) / maxabs;
                long long y1 = base, y2 = m > 0 ? base - h : base + h;
                out += "<line x1=\"" + std::to_string(x) + "\" y1=\"" + std::to_string(y1) + "\" x2=\"" +
                       std::to_string(x) + "\" y2=\"" + std::to_string(y2) + "\" stroke=\"" + cell_color(m) +
                       "\" stroke-width=\"4\"/>\n";
            }
            out += "<circle cx=\"" + std::to_string(x) + "\" cy=\"" + std::to_string(base) +
                   "\" r=\"2\" fill=\"#444\"/>\n";
            out += "<text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(height - 8) +
                   "\" font-size=\"9\" text-anchor=\"middle\">" + std::to_string(k) + "</text>\n";
        }
        out += "</svg>\n";
        return out;
    }
    long long x0 = win.axes[0].first, x1 = win.axes[0].second;
    long long y0 = win.axes[1].first, y1 = win.axes[1].second;
    long long maxabs = 1;
    for (long long a = x0; a <= x1; ++a)
        for (long long b = y0; b <= y1; ++b) maxabs = std::max(maxabs, std::abs(multiplicity(v, {a, b})));
    const long long cell = 16;
    long long width = cell * (x1 - x0 + 1) + 40, height = cell * (y1 - y0 + 1) + 40;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\">\n";
    for (long long a = x0; a <= x1; ++a) {
        for (long long b = y0; b <= y1; ++b) {
            long long m = multiplicity(v, {a, b});
            long long px = 20 + cell * (a - x0);
            long long py = 20 + cell * (y1 - b);  // larger second coordinate drawn higher
            out += "<rect x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(py) + "\" width=\"" +
                   std::to_string(cell - 1) + "\" height=\"" + std::to_string(cell - 1) + "\"";
            if (m == 0) {
                out += " fill=\"#eeeeee\"/>\n";
            } else {
                long long percent = 25 + (75 * std::abs(m)) / maxabs;
                std::string opacity = percent >= 100
                                          ? std::string("1")
                                          : "0." + std::string(percent < 10 ? "0" : "") + std::to_string(percent);
                out += std::string(" fill=\"") + cell_color(m) + "\" fill-opacity=\"" + opacity + "\"/>\n";
            }
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace bmq
