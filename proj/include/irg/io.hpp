#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "irg/errors.hpp"
#include "irg/experiment.hpp"
#include "irg/graph.hpp"
#include "irg/kernel.hpp"
#include "irg/partition.hpp"
#include "irg/sampler.hpp"
#include "irg/space.hpp"

namespace irg {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Space and kernel serialization

inline json space_to_json(const SpaceSpec& s) {
    switch (s.kind) {
        case SpaceKind::interval: return json{{"type", "interval"}};
        case SpaceKind::torus: return json{{"type", "torus"}};
        case SpaceKind::finite: {
            json j{{"type", "finite"}, {"weights", s.weights}};
            bool default_labels = true;
            for (std::size_t i = 0; i < s.labels.size(); ++i)
                if (s.labels[i] != std::to_string(i)) default_labels = false;
            if (!default_labels) j["labels"] = s.labels;
            return j;
        }
    }
    throw input_error("unknown space kind");
}

inline SpaceSpec space_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw input_error("space JSON needs a \"type\" field");
    const std::string type = j.at("type").get<std::string>();
    if (type == "interval") return SpaceSpec::interval();
    if (type == "torus") return SpaceSpec::torus();
    if (type == "finite") {
        std::vector<std::string> labels;
        if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
        return SpaceSpec::finite(j.at("weights").get<std::vector<double>>(), std::move(labels));
    }
    throw input_error("unknown space type: " + type);
}

inline json kernel_to_json(const KernelSpec& k) {
    switch (k.kind) {
        case KernelKind::constant: return json{{"type", "constant"}, {"c", k.c}};
        case KernelKind::block: return json{{"type", "block"}, {"matrix", k.matrix}};
        case KernelKind::torus_band:
            return json{{"type", "torusband"}, {"c", k.c}, {"r", k.r}};
        case KernelKind::torus_profile:
            return json{{"type", "torusprofile"},
                        {"breaks", k.profile_breaks},
                        {"values", k.profile_values}};
        case KernelKind::counterexample:
            return json{{"type", "counterexample"}, {"c", k.c}};
        case KernelKind::scaled:
            return json{{"type", "scaled"}, {"factor", k.factor}, {"base", kernel_to_json(*k.base)}};
    }
    throw input_error("unknown kernel kind");
}

inline KernelSpec kernel_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw input_error("kernel JSON needs a \"type\" field");
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") return KernelSpec::constant(j.at("c").get<double>());
    if (type == "block")
        return KernelSpec::block(j.at("matrix").get<std::vector<std::vector<double>>>());
    if (type == "torusband")
        return KernelSpec::torus_band(j.at("c").get<double>(), j.at("r").get<double>());
    if (type == "torusprofile")
        return KernelSpec::torus_profile(j.at("breaks").get<std::vector<double>>(),
                                         j.at("values").get<std::vector<double>>());
    if (type == "counterexample") return KernelSpec::counterexample(j.at("c").get<double>());
    if (type == "scaled")
        return KernelSpec::scaled(kernel_from_json(j.at("base")), j.at("factor").get<double>());
    throw input_error("unknown kernel type: " + type);
}

namespace detail {

// splits "k1=v1,k2=v2" at top-level commas (commas inside brackets stay put)
inline std::vector<std::pair<std::string, std::string>> parse_shorthand_fields(
    const std::string& text) {
    std::vector<std::pair<std::string, std::string>> fields;
    int depth = 0;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        const auto eq = current.find('=');
        if (eq == std::string::npos)
            throw input_error("shorthand field needs key=value: " + current);
        fields.emplace_back(current.substr(0, eq), current.substr(eq + 1));
        current.clear();
    };
    for (char ch : text) {
        if (ch == '[' || ch == '(') ++depth;
        if (ch == ']' || ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            flush();
            continue;
        }
        current.push_back(ch);
    }
    flush();
    return fields;
}

inline double field_as_double(const std::string& v) {
    try {
        std::size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size()) throw input_error("trailing characters in number: " + v);
        return out;
    } catch (const input_error&) {
        throw;
    } catch (...) {
        throw input_error("not a number: " + v);
    }
}

}  // namespace detail

// Accepts either inline JSON or a shorthand such as "constant:c=2",
// "counterexample:c=4", "torusband:c=4,r=0.25",
// "torusprofile:breaks=[0,0.25,0.5],values=[3,1]",
// "block:matrix=[[3,1],[1,3]]", "scaled:factor=0.5,base=[...json...]".
inline KernelSpec parse_kernel(const std::string& text) {
    if (!text.empty() && text.front() == '{') return kernel_from_json(json::parse(text));
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    const auto fields = detail::parse_shorthand_fields(rest);
    auto get = [&](const std::string& key) -> const std::string& {
        for (const auto& [k, v] : fields)
            if (k == key) return v;
        throw input_error("kernel shorthand \"" + name + "\" needs field " + key);
    };
    if (name == "constant") return KernelSpec::constant(detail::field_as_double(get("c")));
    if (name == "counterexample")
        return KernelSpec::counterexample(detail::field_as_double(get("c")));
    if (name == "torusband")
        return KernelSpec::torus_band(detail::field_as_double(get("c")),
                                      detail::field_as_double(get("r")));
    if (name == "torusprofile")
        return KernelSpec::torus_profile(json::parse(get("breaks")).get<std::vector<double>>(),
                                         json::parse(get("values")).get<std::vector<double>>());
    if (name == "block")
        return KernelSpec::block(
            json::parse(get("matrix")).get<std::vector<std::vector<double>>>());
    if (name == "scaled")
        return KernelSpec::scaled(parse_kernel(get("base")),
                                  detail::field_as_double(get("factor")));
    throw input_error("unknown kernel shorthand: " + name);
}

// "interval", "torus", "finite:weights=[0.5,0.5]" or inline JSON.
inline SpaceSpec parse_space(const std::string& text) {
    if (!text.empty() && text.front() == '{') return space_from_json(json::parse(text));
    if (text == "interval") return SpaceSpec::interval();
    if (text == "torus") return SpaceSpec::torus();
    const auto colon = text.find(':');
    if (text.substr(0, colon) == "finite" && colon != std::string::npos) {
        const auto fields = detail::parse_shorthand_fields(text.substr(colon + 1));
        for (const auto& [k, v] : fields)
            if (k == "weights")
                return SpaceSpec::finite(json::parse(v).get<std::vector<double>>());
    }
    throw input_error("unknown space: " + text);
}

// ---------------------------------------------------------------------------
// Result serialization

inline json component_summary_to_json(const ComponentSummary& s) {
    json j{{"n", s.n},
           {"connected", s.is_connected},
           {"sizes", s.component_sizes},
           {"isolated", s.isolated_total}};
    json spectrum = json::object();
    for (const auto& [k, count] : s.size_spectrum) spectrum[std::to_string(k)] = count;
    j["spectrum"] = spectrum;
    if (s.isolated_in_region) j["isolated_in_region"] = *s.isolated_in_region;
    return j;
}

inline json partition_graph_to_json(const PartitionGraph& pg) {
    json cells = json::array();
    for (const auto& cell : pg.partition.cells) {
        const double mu = cell_measure(pg.partition.space, cell);
        if (cell.discrete())
            cells.push_back(json{{"atoms", cell.atoms}, {"measure", mu}});
        else
            cells.push_back(json{{"lo", cell.lo}, {"hi", cell.hi}, {"measure", mu}});
    }
    json edges = json::array();
    for (auto [i, j] : pg.edges) edges.push_back(json::array({i, j}));
    const MainComponent mc = main_component(pg);
    return json{{"m", pg.partition.level},
                {"cells", cells},
                {"edges", edges},
                {"main_component", json{{"cells", mc.cells}, {"measure", mc.covered_measure}}}};
}

inline json probe_report_to_json(const ProbeReport& rep) {
    json levels = json::array();
    for (const auto& lv : rep.levels)
        levels.push_back(json{{"m", lv.m},
                              {"covered_measure", lv.covered_measure},
                              {"gap", lv.gap}});
    return json{{"levels", levels},
                {"verdict", rep.verdict},
                {"compatible_from_level", rep.compatible_from_level},
                {"split", json::array({rep.split_major, rep.split_minor})}};
}

// ---------------------------------------------------------------------------
// Experiment plans and sweep output

inline SampleMode mode_from_string(const std::string& s) {
    if (s == "auto" || s == "automatic") return SampleMode::automatic;
    if (s == "naive") return SampleMode::naive;
    if (s == "accelerated") return SampleMode::accelerated;
    throw input_error("unknown sampling mode: " + s);
}

inline std::string mode_to_string(SampleMode m) {
    switch (m) {
        case SampleMode::automatic: return "auto";
        case SampleMode::naive: return "naive";
        case SampleMode::accelerated: return "accelerated";
    }
    return "auto";
}

inline json plan_to_json(const ExperimentPlan& plan) {
    return json{{"space", space_to_json(plan.space)},
                {"kernel", kernel_to_json(plan.base_kernel)},
                {"scale_grid", plan.scale_grid},
                {"n_grid", plan.n_grid},
                {"replicates", plan.replicates},
                {"master_seed", plan.master_seed},
                {"statistics", plan.statistics},
                {"budget", plan.budget},
                {"mode", mode_to_string(plan.mode)},
                {"workers", plan.workers}};
}

inline ExperimentPlan plan_from_json(const json& j) {
    ExperimentPlan plan;
    plan.space = space_from_json(j.at("space"));
    plan.base_kernel = kernel_from_json(j.at("kernel"));
    plan.scale_grid = j.at("scale_grid").get<std::vector<double>>();
    plan.n_grid = j.at("n_grid").get<std::vector<int>>();
    plan.replicates = j.at("replicates").get<int>();
    plan.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("statistics"))
        plan.statistics = j.at("statistics").get<std::vector<std::string>>();
    if (j.contains("budget")) plan.budget = j.at("budget").get<double>();
    if (j.contains("mode")) plan.mode = mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("workers")) plan.workers = j.at("workers").get<int>();
    validate_plan(plan);
    return plan;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string sweep_csv(const SweepResult& result) {
    std::string out = "c,n,rep,seed,connected,isolated,min_comp,max_comp\n";
    for (const auto& r : result.records) {
        out += format_double(r.c);
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.replicate);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += r.connected ? '1' : '0';
        out += ',';
        out += std::to_string(r.isolated);
        out += ',';
        out += std::to_string(r.min_component);
        out += ',';
        out += std::to_string(r.max_component);
        out += '\n';
    }
    return out;
}

inline json sweep_summary_to_json(const SweepResult& result) {
    json cells = json::array();
    for (const auto& cs : result.cells) {
        json hist = json::object();
        for (const auto& [size, count] : cs.min_component_hist)
            hist[std::to_string(size)] = count;
        cells.push_back(json{{"c", cs.c},
                             {"n", cs.n},
                             {"replicates", cs.replicates},
                             {"connected_count", cs.connected_count},
                             {"connected_fraction", cs.connected_fraction},
                             {"ci95", json::array({cs.connected_ci.lo, cs.connected_ci.hi})},
                             {"mean_isolated", cs.mean_isolated},
                             {"min_component_hist", hist}});
    }
    return json{{"master_seed", result.master_seed}, {"cells", cells}};
}

// ---------------------------------------------------------------------------
// Edge-list file format
//
//   #irg v1
//   #space <json>
//   #kernel <json>
//   #n <int>
//   #seed <int>
//   i j          (1-based, i < j, ascending)
//   ...
//   #pos i value (1-based; atom index or coordinate)

inline std::string edge_list_text(const SampledGraph& g) {
    std::string out;
    out += "#irg v1\n";
    out += "#space " + space_to_json(g.space).dump() + "\n";
    out += "#kernel " + kernel_to_json(g.kernel).dump() + "\n";
    out += "#n " + std::to_string(g.n) + "\n";
    out += "#seed " + std::to_string(g.seed) + "\n";
    for (auto [i, j] : g.edges)
        out += std::to_string(i + 1) + " " + std::to_string(j + 1) + "\n";
    for (int v = 0; v < g.n; ++v) {
        const Point& p = g.positions[static_cast<std::size_t>(v)];
        out += "#pos " + std::to_string(v + 1) + " ";
        out += p.discrete() ? std::to_string(p.index) : format_double(p.coord);
        out += "\n";
    }
    return out;
}

inline void write_edge_list(const SampledGraph& g, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open file for writing: " + path);
    f << edge_list_text(g);
}

inline SampledGraph read_edge_list(std::istream& in) {
    SampledGraph g;
    std::string line;
    bool saw_magic = false, saw_space = false, saw_kernel = false, saw_n = false;
    std::vector<bool> have_pos;
    int pos_seen = 0;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) {
            throw input_error("edge list line " + std::to_string(line_no) + ": " + msg);
        };
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "irg") {
                std::string version;
                ls >> version;
                if (version != "v1") fail("unsupported version " + version);
                saw_magic = true;
            } else if (key == "space") {
                std::string rest;
                std::getline(ls, rest);
                g.space = space_from_json(json::parse(rest));
                saw_space = true;
            } else if (key == "kernel") {
                std::string rest;
                std::getline(ls, rest);
                g.kernel = kernel_from_json(json::parse(rest));
                saw_kernel = true;
            } else if (key == "n") {
                if (!(ls >> g.n) || g.n < 1) fail("bad vertex count");
                have_pos.assign(static_cast<std::size_t>(g.n), false);
                g.positions.assign(static_cast<std::size_t>(g.n), Point{});
                saw_n = true;
            } else if (key == "seed") {
                if (!(ls >> g.seed)) fail("bad seed");
            } else if (key == "pos") {
                if (!saw_n) fail("#pos before #n");
                int v = 0;
                ls >> v;
                if (v < 1 || v > g.n) fail("position vertex out of range");
                if (have_pos[static_cast<std::size_t>(v - 1)]) fail("duplicate position");
                if (g.space.kind == SpaceKind::finite) {
                    int idx = -1;
                    if (!(ls >> idx)) fail("bad atom index");
                    g.positions[static_cast<std::size_t>(v - 1)] = Point::atom(idx);
                } else {
                    double x = 0.0;
                    if (!(ls >> x)) fail("bad coordinate");
                    g.positions[static_cast<std::size_t>(v - 1)] = Point::at(x);
                }
                check_point(g.space, g.positions[static_cast<std::size_t>(v - 1)]);
                have_pos[static_cast<std::size_t>(v - 1)] = true;
                ++pos_seen;
            } else {
                fail("unknown header " + key);
            }
            continue;
        }
        if (!saw_n) fail("edge before #n header");
        std::istringstream ls(line);
        int i = 0, j = 0;
        if (!(ls >> i >> j)) fail("bad edge line");
        if (i < 1 || j <= i || j > g.n) fail("edge endpoints must satisfy 1 <= i < j <= n");
        const std::pair<int, int> e{i - 1, j - 1};
        if (!g.edges.empty() && !(g.edges.back() < e)) fail("edges must be ascending");
        g.edges.push_back(e);
    }
    if (!saw_magic) throw input_error("missing #irg v1 header");
    if (!saw_space || !saw_kernel || !saw_n)
        throw input_error("missing #space, #kernel or #n header");
    if (pos_seen != g.n) throw input_error("expected one #pos line per vertex");
    check_kernel_space(g.kernel, g.space);
    return g;
}

inline SampledGraph read_edge_list_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open file: " + path);
    return read_edge_list(f);
}

// ---------------------------------------------------------------------------
// Native SVG line chart: Pr[connected] vs c, one polyline per n, with the
// Wilson interval as a shaded band.

inline std::string sweep_svg(const SweepResult& result) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 30, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double c_lo = 1e300, c_hi = -1e300;
    std::vector<int> sizes;
    for (const auto& cs : result.cells) {
        c_lo = std::min(c_lo, cs.c);
        c_hi = std::max(c_hi, cs.c);
        if (std::find(sizes.begin(), sizes.end(), cs.n) == sizes.end()) sizes.push_back(cs.n);
    }
    if (c_hi <= c_lo) {
        c_lo -= 0.5;
        c_hi += 0.5;
    }
    auto sx = [&](double c) { return ml + (c - c_lo) / (c_hi - c_lo) * pw; };
    auto sy = [&](double p) { return mt + (1.0 - p) * ph; };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int grid = 0; grid <= 4; ++grid) {
        const double p = grid / 4.0;
        svg << "<line x1=\"" << ml << "\" y1=\"" << sy(p) << "\" x2=\"" << ml + pw
            << "\" y2=\"" << sy(p) << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << sy(p) + 4
            << "\" text-anchor=\"end\" font-size=\"12\">" << p << "</text>\n";
    }
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const int n = sizes[si];
        const char* color = palette[si % 6];
        std::ostringstream line, band_up, band_down;
        for (const auto& cs : result.cells) {
            if (cs.n != n) continue;
            line << sx(cs.c) << "," << sy(cs.connected_fraction) << " ";
            band_up << sx(cs.c) << "," << sy(cs.connected_ci.hi) << " ";
        }
        for (auto it = result.cells.rbegin(); it != result.cells.rend(); ++it) {
            if (it->n != n) continue;
            band_down << sx(it->c) << "," << sy(it->connected_ci.lo) << " ";
        }
        svg << "<polygon points=\"" << band_up.str() << band_down.str() << "\" fill=\"" << color
            << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * static_cast<double>(si)
            << "\" fill=\"" << color << "\" font-size=\"12\">n = " << n << "</text>\n";
    }
    for (const auto& cs : result.cells) {
        svg << "<text x=\"" << sx(cs.c) << "\" y=\"" << height - mb + 18
            << "\" text-anchor=\"middle\" font-size=\"12\">" << cs.c << "</text>\n";
    }
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">kernel scale c</text>\n";
    svg << "<text x=\"18\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << mt + ph / 2 << ")\">Pr[connected]</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open file for writing: " + path);
    f << text;
}

}  // namespace irg
