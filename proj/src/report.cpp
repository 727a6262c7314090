#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "censel/harness.hpp"

namespace censel {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

CellId cell_from_labels(const std::string& selector, const std::string& aggregator,
                        const std::string& threshold) {
    CellId cell;
    cell.selector = selector_from_string(selector);
    if (aggregator != "individual") cell.aggregator = aggregator_from_string(aggregator);
    cell.threshold = ThresholdKind::parse(threshold);
    return cell;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
    if (!out) throw ValidationError("write failed for " + path.string());
}

}  // namespace

std::string report_csv(const std::vector<ModelResult>& results) {
    std::ostringstream out;
    out << "selector,aggregator,threshold,mean_cindex,cw_rel,distance,n_failed_folds\n";
    for (const auto& r : results) {
        out << to_string(r.cell.selector) << ',' << r.cell.aggregator_label() << ','
            << r.cell.threshold.label() << ',' << fmt(r.mean_cindex) << ',' << fmt(r.cw_rel) << ','
            << fmt(r.distance) << ',' << r.n_failed_folds << '\n';
    }
    return out.str();
}

std::string report_json(const ExperimentResult& experiment) {
    json doc;
    doc["format"] = "censel-report/1";
    doc["feature_names"] = experiment.feature_names;
    doc["results"] = json::array();
    for (const auto& r : experiment.results) {
        json cell;
        cell["selector"] = to_string(r.cell.selector);
        cell["aggregator"] = r.cell.aggregator_label();
        cell["threshold"] = r.cell.threshold.label();
        cell["mean_cindex"] = r.mean_cindex;
        cell["cw_rel"] = r.cw_rel;
        cell["distance"] = r.distance;
        cell["n_failed_folds"] = r.n_failed_folds;
        cell["failed"] = r.failed;
        cell["all_empty"] = r.all_empty;
        cell["folds"] = json::array();
        for (const auto& f : r.folds) {
            cell["folds"].push_back({{"cindex", f.cindex},
                                     {"failed", f.failed},
                                     {"flag", f.flag},
                                     {"error", f.error},
                                     {"subset", f.subset}});
        }
        doc["results"].push_back(std::move(cell));
    }
    return doc.dump(1) + "\n";
}

ExperimentResult parse_report_json(const std::string& text) {
    ExperimentResult out;
    try {
        const json doc = json::parse(text);
        if (!doc.is_object() || !doc.contains("results") || !doc.at("results").is_array())
            throw ParseError("report JSON lacks a results array");
        out.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        for (const auto& cell : doc.at("results")) {
            ModelResult r;
            r.cell = cell_from_labels(cell.at("selector").get<std::string>(),
                                      cell.at("aggregator").get<std::string>(),
                                      cell.at("threshold").get<std::string>());
            r.mean_cindex = cell.at("mean_cindex").get<double>();
            r.cw_rel = cell.at("cw_rel").get<double>();
            r.distance = cell.at("distance").get<double>();
            r.n_failed_folds = cell.at("n_failed_folds").get<int>();
            r.failed = cell.at("failed").get<bool>();
            r.all_empty = cell.at("all_empty").get<bool>();
            for (const auto& f : cell.at("folds")) {
                FoldRecord rec;
                rec.cindex = f.at("cindex").get<double>();
                rec.failed = f.at("failed").get<bool>();
                rec.flag = f.at("flag").get<std::string>();
                rec.error = f.at("error").get<std::string>();
                rec.subset = f.at("subset").get<std::vector<int>>();
                r.folds.push_back(std::move(rec));
            }
            out.results.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed report JSON: ") + e.what());
    } catch (const ValidationError& e) {
        throw ParseError(std::string("malformed report JSON: ") + e.what());
    }
    return out;
}

std::string scatter_svg(const std::vector<ModelResult>& results) {
    constexpr double width = 720, height = 520, left = 70, right = 200, top = 30, bottom = 60;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::map<std::string, std::string> colour;
    for (const auto& r : results) {
        const auto label = r.cell.threshold.label();
        if (!colour.count(label)) colour[label] = palette[colour.size() % 10];
    }
    auto px = [&](double stability) { return left + std::clamp(stability, 0.0, 1.0) * plot_w; };
    auto py = [&](double cindex) { return top + (1.0 - std::clamp(cindex, 0.0, 1.0)) * plot_h; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 10; t += 2) {
        const double v = t / 10.0;
        s << "<text x=\"" << px(v) << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\">" << v
          << "</text>\n";
        s << "<text x=\"" << left - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << v
          << "</text>\n";
    }
    s << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\">stability (relative weighted consistency)</text>\n";
    s << "<text transform=\"translate(18," << top + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">C-index</text>\n";

    auto shape = [&](std::ostringstream& o, const std::string& agg, double x, double y, const std::string& fill) {
        const double r = 5;
        if (agg == "MR") {
            o << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"" << fill << "\"/>";
        } else if (agg == "MW") {
            o << "<rect x=\"" << x - r << "\" y=\"" << y - r << "\" width=\"" << 2 * r << "\" height=\"" << 2 * r
              << "\" fill=\"" << fill << "\"/>";
        } else if (agg == "RRA") {
            o << "<polygon points=\"" << x << ',' << y - r << ' ' << x - r << ',' << y + r << ' ' << x + r << ','
              << y + r << "\" fill=\"" << fill << "\"/>";
        } else if (agg == "TA") {
            o << "<polygon points=\"" << x << ',' << y - r << ' ' << x + r << ',' << y << ' ' << x << ','
              << y + r << ' ' << x - r << ',' << y << "\" fill=\"" << fill << "\"/>";
        } else if (agg == "MA") {
            o << "<path d=\"M" << x - r << ',' << y - r << " L" << x + r << ',' << y + r << " M" << x + r << ','
              << y - r << " L" << x - r << ',' << y + r << "\" stroke=\"" << fill << "\" stroke-width=\"2\"/>";
        } else {  // star for the individual form
            o << "<polygon points=\"";
            for (int k = 0; k < 10; ++k) {
                const double a = -1.5707963267948966 + k * 0.6283185307179586;
                const double rr = k % 2 ? r * 0.45 : r * 1.3;
                o << x + rr * std::cos(a) << ',' << y + rr * std::sin(a) << ' ';
            }
            o << "\" fill=\"" << fill << "\" stroke=\"#000\" stroke-width=\"0.5\"/>";
        }
    };

    for (const auto& r : results) {
        const auto agg = r.cell.aggregator_label();
        s << "<g class=\"marker\" data-cell=\"" << r.cell.label() << "\"><title>" << r.cell.label()
          << " C=" << fmt(r.mean_cindex) << " CWrel=" << fmt(r.cw_rel) << "</title>";
        shape(s, agg, px(r.cw_rel), py(r.mean_cindex), colour[r.cell.threshold.label()]);
        s << "</g>\n";
    }

    double ly = top + 10;
    const double lx = left + plot_w + 20;
    for (const auto& agg : {"MR", "MW", "RRA", "TA", "MA", "individual"}) {
        s << "<g class=\"legend\">";
        shape(s, agg, lx, ly, "#555");
        s << "<text x=\"" << lx + 12 << "\" y=\"" << ly + 4 << "\">" << agg << "</text></g>\n";
        ly += 18;
    }
    ly += 10;
    for (const auto& [label, fill] : colour) {
        s << "<g class=\"legend\"><rect x=\"" << lx - 5 << "\" y=\"" << ly - 5
          << "\" width=\"10\" height=\"10\" fill=\"" << fill << "\"/><text x=\"" << lx + 12 << "\" y=\""
          << ly + 4 << "\">" << label << "</text></g>\n";
        ly += 18;
    }
    s << "</svg>\n";
    return s.str();
}

void emit_report(const ExperimentResult& experiment, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path) {
    write_text(csv_path, report_csv(experiment.results));
    write_text(json_path, report_json(experiment));
}

void emit_scatter(const std::vector<ModelResult>& results, const std::filesystem::path& path) {
    write_text(path, scatter_svg(results));
}

}  // namespace censel
