// Command-line driver: parse modules, build catalog spectra, run
// resolutions, render charts, compute and verify homotopy tables.
//
// Exit codes: 0 success, 1 verification mismatch, 2 input error,
// 3 uncertified collapse.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "extcalc/adams.hpp"
#include "extcalc/chargen.hpp"
#include "extcalc/chart_io.hpp"
#include "extcalc/module.hpp"
#include "extcalc/resolve.hpp"

namespace {

using namespace extcalc;

struct RunConfig {
    std::string input;
    int max_stem = 5;
    int s_max = 24;
    int t_max = -1;  // <0: derive from max_stem + s_max
    std::string format = "ascii";
    std::string expected = "data/expected_table.csv";
    std::string out;
    bool allow_uncertified = false;
    bool anderson = false;
};

bool is_catalog_label(const std::string& s)
{
    for (const auto& [label, desc] : catalog_entries())
        if (label == s)
            return true;
    return false;
}

ModulePresentation load_input(const RunConfig& cfg)
{
    int t_need = cfg.t_max >= 0 ? cfg.t_max : cfg.max_stem + cfg.s_max;
    if (is_catalog_label(cfg.input))
        return catalog(cfg.input, t_need);
    std::ifstream in(cfg.input);
    if (!in)
        throw std::runtime_error("cannot open module file '" + cfg.input + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string label = cfg.input;
    auto slash = label.find_last_of('/');
    if (slash != std::string::npos)
        label = label.substr(slash + 1);
    auto dot = label.rfind('.');
    if (dot != std::string::npos)
        label = label.substr(0, dot);
    return parse_cell_diagram(ss.str(), label);
}

void write_or_print(const RunConfig& cfg, const std::string& text)
{
    if (cfg.out.empty()) {
        std::cout << text;
    }
    else {
        std::ofstream out(cfg.out);
        if (!out)
            throw std::runtime_error("cannot write '" + cfg.out + "'");
        out << text;
    }
}

void print_dimension_table(const ExtChart& chart, std::ostream& os)
{
    int lo = 0;
    for (const auto& c : chart.classes)
        lo = std::min(lo, c.stem);
    os << "dim Ext^{s,t} by (stem t-s, filtration s):\n";
    os << render_ascii(chart);
}

int cmd_resolve(const RunConfig& cfg)
{
    ModulePresentation m = load_input(cfg);
    int t_cap = cfg.t_max >= 0 ? cfg.t_max : cfg.max_stem + cfg.s_max;
    int s_eff = cfg.s_max;
    if (m.trusted_tmax() < t_cap) {
        t_cap = m.trusted_tmax();
        s_eff = t_cap - cfg.max_stem;
        if (s_eff < 0)
            throw std::runtime_error("module data only reaches degree " + std::to_string(m.trusted_tmax()) +
                                     "; cannot cover stems up to " + std::to_string(cfg.max_stem));
        std::cerr << "note: module is a truncation; clamping filtration window to s <= " << s_eff << "\n";
    }
    FreeResolution res = minimal_resolution(m, s_eff, t_cap);
    ExtChart chart = ext_chart(res, cfg.max_stem);
    if (cfg.format == "svg")
        write_or_print(cfg, render_svg(chart));
    else if (cfg.format == "ascii")
        write_or_print(cfg, render_ascii(chart));
    else
        write_or_print(cfg, chart_to_string(chart));
    if (!cfg.out.empty() || cfg.format == "json")
        print_dimension_table(chart, std::cerr);
    return 0;
}

int cmd_chart(const RunConfig& cfg)
{
    std::ifstream in(cfg.input);
    if (!in)
        throw std::runtime_error("cannot open chart file '" + cfg.input + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    ExtChart chart = chart_from_string(ss.str());
    if (cfg.format == "svg")
        write_or_print(cfg, render_svg(chart));
    else if (cfg.format == "json")
        write_or_print(cfg, chart_to_string(chart));
    else
        write_or_print(cfg, render_ascii(chart));
    return 0;
}

HomotopyReport compute_homotopy(const std::string& label, const RunConfig& cfg)
{
    int t_need = cfg.t_max >= 0 ? cfg.t_max : cfg.max_stem + cfg.s_max;
    ModulePresentation x = catalog(label, t_need);
    E2Page page = abp_e2(x, cfg.max_stem, cfg.s_max);
    CollapseCertificate cert = certify_collapse(page);
    return assemble_groups(page, cert, cfg.allow_uncertified);
}

int cmd_homotopy(const RunConfig& cfg)
{
    HomotopyReport rep = compute_homotopy(cfg.input, cfg);
    if (cfg.format == "json") {
        ordered_json j = homotopy_to_json(rep);
        if (cfg.anderson)
            j["anderson"] = anderson_to_json(anderson_groups(rep))["degrees"];
        write_or_print(cfg, j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    os << rep.label << " (2-complete):\n";
    for (const auto& g : rep.groups) {
        os << "  pi_" << g.stem << " = " << group_to_string(g.factors, " x ");
        if (g.exotic_extension_possible)
            os << "   [exotic extension possible]";
        if (g.tower_height_assumed)
            os << "   [tower height assumed]";
        os << "\n";
    }
    os << (rep.collapse_certified ? "collapse certified: no differentials, no exotic extensions possible\n"
                                  : "WARNING: collapse not certified (assembled under override)\n");
    if (cfg.anderson) {
        AndersonReport ar = anderson_groups(rep);
        os << "Anderson dual groups [X, S^n I_Z]:\n";
        for (const auto& d : ar.degrees) {
            os << "  n=" << d.degree << ": torsion " << group_to_string(d.torsion, " x ") << ", free rank ";
            if (d.free_rank_known)
                os << d.free_rank;
            else
                os << "unknown (stem " << d.degree << " not covered)";
            os << "\n";
        }
    }
    write_or_print(cfg, os.str());
    return 0;
}

int cmd_verify(const RunConfig& cfg)
{
    std::ifstream in(cfg.expected);
    if (!in)
        throw std::runtime_error("cannot open expected table '" + cfg.expected + "'");
    auto rows = parse_expected_table(in);
    std::vector<std::string> labels;
    for (const auto& r : rows)
        if ((cfg.input == "all" || cfg.input == r.label) &&
            std::find(labels.begin(), labels.end(), r.label) == labels.end())
            labels.push_back(r.label);
    if (labels.empty())
        throw std::runtime_error("no expected rows for '" + cfg.input + "' in " + cfg.expected);

    int failures = 0;
    for (const auto& label : labels) {
        int need = 0;
        for (const auto& r : rows)
            if (r.label == label)
                need = std::max(need, r.stem);
        RunConfig local = cfg;
        local.max_stem = std::max(cfg.max_stem, need + 1);
        HomotopyReport rep = compute_homotopy(label, local);
        for (const auto& r : rows) {
            if (r.label != label)
                continue;
            if (!rep.covers(r.stem)) {
                std::cout << "FAIL " << label << " pi_" << r.stem << ": not covered\n";
                ++failures;
                continue;
            }
            const auto& got = rep.at(r.stem).factors;
            if (groups_match(got, r.factors)) {
                std::cout << "ok   " << label << " pi_" << r.stem << " = " << group_to_string(got) << "\n";
            }
            else {
                std::cout << "FAIL " << label << " pi_" << r.stem << ": computed " << group_to_string(got)
                          << ", expected " << group_to_string(r.factors) << "\n";
                ++failures;
            }
        }
    }
    if (failures) {
        std::cout << failures << " mismatches\n";
        return 1;
    }
    std::cout << "all rows match\n";
    return 0;
}

int cmd_catalog_list()
{
    for (const auto& [label, desc] : catalog_entries())
        std::cout << label << "\t" << desc << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ext charts over finite subalgebras of the mod-2 Steenrod algebra, "
                 "Adams E2 pages and 2-complete homotopy tables for Thom spectra"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--max-stem", cfg.max_stem, "largest stem computed (default 5)");
        sub->add_option("--smax", cfg.s_max, "largest filtration computed (default 24)");
        sub->add_option("--tmax", cfg.t_max, "override the internal degree cap");
        sub->add_option("--format", cfg.format, "ascii|svg|json");
        sub->add_option("--out", cfg.out, "write output to a file instead of stdout");
    };

    auto* resolve_cmd = app.add_subcommand("resolve", "minimal resolution and Ext chart of a module file or catalog label");
    resolve_cmd->add_option("input", cfg.input, "module file or catalog label")->required();
    add_common(resolve_cmd);

    auto* chart_cmd = app.add_subcommand("chart", "render a chart file");
    chart_cmd->add_option("input", cfg.input, "chart JSON file")->required();
    add_common(chart_cmd);

    auto* homotopy_cmd = app.add_subcommand("homotopy", "2-complete homotopy groups of a catalog spectrum");
    homotopy_cmd->add_option("input", cfg.input, "catalog label")->required();
    homotopy_cmd->add_flag("--allow-uncertified", cfg.allow_uncertified,
                           "assemble groups even when collapse is not certified");
    homotopy_cmd->add_flag("--anderson", cfg.anderson, "also print the Anderson dual groups");
    add_common(homotopy_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "check computed homotopy tables against an expected table");
    verify_cmd->add_option("input", cfg.input, "catalog label or 'all'")->required();
    verify_cmd->add_option("--expected", cfg.expected, "expected-table CSV (label,n,group)");
    verify_cmd->add_flag("--allow-uncertified", cfg.allow_uncertified,
                         "assemble groups even when collapse is not certified");
    add_common(verify_cmd);

    auto* catalog_cmd = app.add_subcommand("catalog", "catalog operations");
    catalog_cmd->add_subcommand("list", "list catalog labels");

    CLI11_PARSE(app, argc, argv);

    try {
        if (resolve_cmd->parsed())
            return cmd_resolve(cfg);
        if (chart_cmd->parsed())
            return cmd_chart(cfg);
        if (homotopy_cmd->parsed())
            return cmd_homotopy(cfg);
        if (verify_cmd->parsed())
            return cmd_verify(cfg);
        if (catalog_cmd->parsed())
            return cmd_catalog_list();
    }
    catch (const extcalc::UncertifiedCollapseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
