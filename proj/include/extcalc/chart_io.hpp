#pragma once

// Chart serialization (stable field order), the expected-table format, and
// the ascii / svg renderers.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "extcalc/adams.hpp"
#include "extcalc/resolve.hpp"

namespace extcalc {

using ordered_json = nlohmann::ordered_json;

// Canonical form: classes sorted by (stem, filtration, index), edges remapped
// to the sorted ids and sorted themselves.
inline ExtChart canonicalize(const ExtChart& chart)
{
    std::vector<int> order(chart.classes.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const ChartClass& ca = chart.classes[static_cast<std::size_t>(a)];
        const ChartClass& cb = chart.classes[static_cast<std::size_t>(b)];
        if (ca.stem != cb.stem)
            return ca.stem < cb.stem;
        if (ca.filtration != cb.filtration)
            return ca.filtration < cb.filtration;
        return ca.index < cb.index;
    });
    std::vector<int> new_id(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        new_id[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    ExtChart out;
    out.algebra = chart.algebra;
    out.module = chart.module;
    out.max_stem = chart.max_stem;
    out.max_filtration = chart.max_filtration;
    for (int id : order)
        out.classes.push_back(chart.classes[static_cast<std::size_t>(id)]);
    for (const auto& [a, b] : chart.h0)
        out.h0.emplace_back(new_id[static_cast<std::size_t>(a)], new_id[static_cast<std::size_t>(b)]);
    for (const auto& [a, b] : chart.h1)
        out.h1.emplace_back(new_id[static_cast<std::size_t>(a)], new_id[static_cast<std::size_t>(b)]);
    std::sort(out.h0.begin(), out.h0.end());
    std::sort(out.h1.begin(), out.h1.end());
    return out;
}

inline ordered_json chart_to_json(const ExtChart& chart_in)
{
    ExtChart chart = canonicalize(chart_in);
    ordered_json j;
    j["algebra"] = chart.algebra;
    j["module"] = chart.module;
    j["window"] = ordered_json{{"max_stem", chart.max_stem}, {"max_filtration", chart.max_filtration}};
    j["classes"] = ordered_json::array();
    for (const auto& c : chart.classes)
        j["classes"].push_back(ordered_json{{"stem", c.stem}, {"filtration", c.filtration}, {"index", c.index}});
    j["h0"] = ordered_json::array();
    for (const auto& [a, b] : chart.h0)
        j["h0"].push_back(ordered_json::array({a, b}));
    j["h1"] = ordered_json::array();
    for (const auto& [a, b] : chart.h1)
        j["h1"].push_back(ordered_json::array({a, b}));
    return j;
}

inline std::string chart_to_string(const ExtChart& chart) { return chart_to_json(chart).dump(2) + "\n"; }

inline ExtChart chart_from_json(const ordered_json& j)
{
    ExtChart chart;
    chart.algebra = j.at("algebra").get<std::string>();
    chart.module = j.at("module").get<std::string>();
    chart.max_stem = j.at("window").at("max_stem").get<int>();
    chart.max_filtration = j.at("window").at("max_filtration").get<int>();
    for (const auto& c : j.at("classes"))
        chart.classes.push_back({c.at("stem").get<int>(), c.at("filtration").get<int>(), c.at("index").get<int>()});
    for (const auto& e : j.at("h0"))
        chart.h0.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    for (const auto& e : j.at("h1"))
        chart.h1.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return chart;
}

inline ExtChart chart_from_string(const std::string& text)
{
    return chart_from_json(ordered_json::parse(text));
}

// Structural chart equality: cell dimensions plus the ranks of every h0/h1
// map between cells.  Independent of within-cell basis choices.
inline bool charts_equivalent(const ExtChart& a, const ExtChart& b, std::string* why = nullptr,
                              bool compare_h1 = true)
{
    auto complain = [&why](const std::string& msg) {
        if (why)
            *why = msg;
        return false;
    };
    int lo = 0;
    for (const auto& c : a.classes)
        lo = std::min(lo, c.stem);
    for (const auto& c : b.classes)
        lo = std::min(lo, c.stem);
    int hi = std::max(a.max_stem, b.max_stem);
    int top = std::max(a.max_filtration, b.max_filtration);
    for (int n = lo; n <= hi; ++n)
        for (int s = 0; s <= top; ++s) {
            if (a.cell_dim(n, s) != b.cell_dim(n, s))
                return complain("cell (" + std::to_string(n) + "," + std::to_string(s) + "): dim " +
                                std::to_string(a.cell_dim(n, s)) + " vs " + std::to_string(b.cell_dim(n, s)));
            for (int i : {0, 1}) {
                if (i == 1 && !compare_h1)
                    continue;
                if (a.h_rank(i, n, s) != b.h_rank(i, n, s))
                    return complain("h" + std::to_string(i) + " rank at (" + std::to_string(n) + "," +
                                    std::to_string(s) + "): " + std::to_string(a.h_rank(i, n, s)) + " vs " +
                                    std::to_string(b.h_rank(i, n, s)));
            }
        }
    return true;
}

// One text row per filtration, fixed 4-column stems.  Cell format: class
// count, then '|' when the cell supports h0 into the row above, '/' when it
// supports h1 diagonally.
inline std::string render_ascii(const ExtChart& chart)
{
    int lo = 0;
    for (const auto& c : chart.classes)
        lo = std::min(lo, c.stem);
    std::ostringstream os;
    for (int s = chart.max_filtration; s >= 0; --s) {
        os << (s < 10 ? " " : "") << s << " |";
        for (int n = lo; n <= chart.max_stem; ++n) {
            int d = chart.cell_dim(n, s);
            std::string cell = "    ";
            if (d > 0) {
                cell[0] = d < 10 ? static_cast<char>('0' + d) : '*';
                if (chart.h_rank(0, n, s) > 0)
                    cell[1] = '|';
                if (chart.h_rank(1, n, s) > 0)
                    cell[2] = '/';
            }
            os << cell;
        }
        os << "\n";
    }
    os << "---+";
    for (int n = lo; n <= chart.max_stem; ++n)
        os << "----";
    os << "\n   ";
    for (int n = lo; n <= chart.max_stem; ++n) {
        std::string label = std::to_string(n);
        os << " " << label << std::string(4 - 1 - label.size(), ' ');
    }
    os << "\n";
    return os.str();
}

// Dots at (stem, filtration), vertical h0 segments, slope-(1,1) h1 segments;
// several classes in a cell are offset horizontally.
inline std::string render_svg(const ExtChart& chart)
{
    const int cell = 36, r = 4, margin = 30;
    int lo = 0;
    for (const auto& c : chart.classes)
        lo = std::min(lo, c.stem);
    int w = (chart.max_stem - lo + 1) * cell + 2 * margin;
    int h = (chart.max_filtration + 1) * cell + 2 * margin;
    auto x_of = [&](const ChartClass& c) {
        return margin + (c.stem - lo) * cell + cell / 2 + c.index * 2 * (r + 1) -
               (chart.cell_dim(c.stem, c.filtration) - 1) * (r + 1);
    };
    auto y_of = [&](const ChartClass& c) { return h - margin - c.filtration * cell - cell / 2; };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
       << w << " " << h << "\">\n";
    for (int n = lo; n <= chart.max_stem + 1; ++n)
        os << "  <line x1=\"" << margin + (n - lo) * cell << "\" y1=\"" << margin << "\" x2=\""
           << margin + (n - lo) * cell << "\" y2=\"" << h - margin << "\" stroke=\"#ddd\"/>\n";
    for (int s = 0; s <= chart.max_filtration + 1; ++s)
        os << "  <line x1=\"" << margin << "\" y1=\"" << h - margin - s * cell << "\" x2=\"" << w - margin
           << "\" y2=\"" << h - margin - s * cell << "\" stroke=\"#ddd\"/>\n";
    for (int n = lo; n <= chart.max_stem; ++n)
        os << "  <text x=\"" << margin + (n - lo) * cell + cell / 2 << "\" y=\"" << h - margin / 3
           << "\" font-size=\"11\" text-anchor=\"middle\">" << n << "</text>\n";
    for (int s = 0; s <= chart.max_filtration; ++s)
        os << "  <text x=\"" << margin / 3 << "\" y=\"" << h - margin - s * cell - cell / 2 + 4
           << "\" font-size=\"11\" text-anchor=\"middle\">" << s << "</text>\n";
    auto edge = [&](int a, int b, const char* color) {
        const ChartClass& ca = chart.classes[static_cast<std::size_t>(a)];
        const ChartClass& cb = chart.classes[static_cast<std::size_t>(b)];
        os << "  <line x1=\"" << x_of(ca) << "\" y1=\"" << y_of(ca) << "\" x2=\"" << x_of(cb) << "\" y2=\""
           << y_of(cb) << "\" stroke=\"" << color << "\" stroke-width=\"1.2\"/>\n";
    };
    for (const auto& [a, b] : chart.h0)
        edge(a, b, "#000");
    for (const auto& [a, b] : chart.h1)
        edge(a, b, "#666");
    for (const auto& c : chart.classes)
        os << "  <circle cx=\"" << x_of(c) << "\" cy=\"" << y_of(c) << "\" r=\"" << r << "\"/>\n";
    os << "</svg>\n";
    return os.str();
}

inline std::string group_to_string(const std::vector<GroupFactor>& factors, const std::string& sep = "x")
{
    if (factors.empty())
        return "0";
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i)
            s += sep;
        s += factors[i].to_string();
    }
    return s;
}

inline ordered_json homotopy_to_json(const HomotopyReport& rep)
{
    ordered_json j;
    j["spectrum"] = rep.label;
    j["collapse_certified"] = rep.collapse_certified;
    j["assumed_collapse"] = rep.assumed_collapse;
    j["stems"] = ordered_json::array();
    for (const auto& g : rep.groups) {
        ordered_json factors = ordered_json::array();
        for (const auto& f : g.factors)
            factors.push_back(f.to_string());
        j["stems"].push_back(ordered_json{{"n", g.stem},
                                          {"group", factors},
                                          {"flags", ordered_json{{"exotic_extension_possible", g.exotic_extension_possible},
                                                                 {"tower_height_assumed", g.tower_height_assumed}}}});
    }
    return j;
}

inline ordered_json anderson_to_json(const AndersonReport& rep)
{
    ordered_json j;
    j["spectrum"] = rep.label;
    j["degrees"] = ordered_json::array();
    for (const auto& d : rep.degrees) {
        ordered_json torsion = ordered_json::array();
        for (const auto& f : d.torsion)
            torsion.push_back(f.to_string());
        ordered_json entry;
        entry["n"] = d.degree;
        entry["torsion"] = torsion;
        if (d.free_rank_known)
            entry["free_rank"] = d.free_rank;
        else
            entry["free_rank"] = "unknown";
        j["degrees"].push_back(entry);
    }
    return j;
}

// Expected-table rows: CSV `label,n,group` with group grammar
// `0 | Z | Z/2^k | <group>x<group>`.
struct ExpectedRow {
    std::string label;
    int stem;
    std::vector<GroupFactor> factors;
};

inline std::vector<GroupFactor> parse_group(const std::string& text_in)
{
    std::string text;
    for (char c : text_in)
        if (!std::isspace(static_cast<unsigned char>(c)))
            text += c;
    std::vector<GroupFactor> out;
    if (text == "0" || text.empty())
        return out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto next = text.find('x', pos);
        std::string piece = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        GroupFactor f;
        if (piece == "Z") {
            f.infinite = true;
        }
        else if (piece.rfind("Z/", 0) == 0) {
            long v = std::stol(piece.substr(2));
            if (v < 2 || (v & (v - 1)) != 0)
                throw std::invalid_argument("group factor must be Z or Z/2^k, got '" + piece + "'");
            while (v > 1) {
                v /= 2;
                ++f.exponent;
            }
        }
        else {
            throw std::invalid_argument("bad group factor '" + piece + "'");
        }
        out.push_back(f);
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return out;
}

// Comparison is by multisets of factors; Z matches Z (2-complete).
inline bool groups_match(std::vector<GroupFactor> a, std::vector<GroupFactor> b)
{
    auto key = [](const GroupFactor& f) { return f.infinite ? -1 : f.exponent; };
    std::vector<int> ka, kb;
    for (const auto& f : a)
        ka.push_back(key(f));
    for (const auto& f : b)
        kb.push_back(key(f));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
}

inline std::vector<ExpectedRow> parse_expected_table(std::istream& in)
{
    std::vector<ExpectedRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c)))
                blank = false;
        if (blank)
            continue;
        auto c1 = line.find(',');
        auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw std::runtime_error("expected-table line " + std::to_string(line_no) +
                                     ": need 'label,n,group'");
        ExpectedRow row;
        row.label = line.substr(0, c1);
        // strip spaces around the label
        while (!row.label.empty() && std::isspace(static_cast<unsigned char>(row.label.back())))
            row.label.pop_back();
        while (!row.label.empty() && std::isspace(static_cast<unsigned char>(row.label.front())))
            row.label.erase(row.label.begin());
        if (row.label == "label")
            continue;  // header row
        row.stem = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
        row.factors = parse_group(line.substr(c2 + 1));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace extcalc
