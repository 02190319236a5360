#include "isorec/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "isorec/error.hpp"

namespace isorec {

namespace {

[[noreturn]] void bad_config(const std::string& what)
{
    throw Error(ErrorCode::kInvalidConfig, what);
}

Point point_from_json(const Json& j, const char* field)
{
    if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxDim)) {
        bad_config(std::string("'") + field + "' must be an array of 1 to 4 numbers");
    }
    Point p(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            bad_config(std::string("'") + field + "' must contain numbers");
        }
        p[static_cast<int>(i)] = j[i].get<double>();
    }
    return p;
}

const Json& field(const Json& j, const char* name)
{
    if (!j.contains(name)) {
        bad_config(std::string("body is missing '") + name + "'");
    }
    return j.at(name);
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v, int digits = 2)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

ConvexBody body_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        bad_config("body must be an object with a string 'type'");
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "box") {
        return ConvexBody::box(point_from_json(field(j, "lo"), "lo"), point_from_json(field(j, "hi"), "hi"));
    }
    if (type == "ball") {
        const Json& r = field(j, "radius");
        if (!r.is_number()) bad_config("'radius' must be a number");
        return ConvexBody::ball(point_from_json(field(j, "center"), "center"), r.get<double>());
    }
    if (type == "polygon") {
        const Json& vs = field(j, "vertices");
        if (!vs.is_array()) bad_config("'vertices' must be an array");
        std::vector<Point> pts;
        for (const Json& v : vs) pts.push_back(point_from_json(v, "vertices"));
        return ConvexBody::polygon(std::move(pts));
    }
    bad_config("unknown body type '" + type + "'");
}

Json body_to_json(const ConvexBody& body)
{
    Json j;
    if (const auto* b = std::get_if<Box>(&body.variant())) {
        j["type"] = "box";
        j["lo"] = to_json(b->lo);
        j["hi"] = to_json(b->hi);
    } else if (const auto* b = std::get_if<Ball>(&body.variant())) {
        j["type"] = "ball";
        j["center"] = to_json(b->center);
        j["radius"] = b->radius;
    } else {
        j["type"] = "polygon";
        j["vertices"] = Json::array();
        for (const Point& v : std::get<Polygon2D>(body.variant()).vertices) j["vertices"].push_back(to_json(v));
    }
    return j;
}

ConvexBody read_body_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::kIo, "cannot open body file " + path.string());
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        bad_config("body file " + path.string() + " is not valid JSON: " + e.what());
    }
    return body_from_json(j);
}

void write_nodes_csv(std::ostream& os, const NodeSet& xi)
{
    for (int i = 0; i < xi.dim; ++i) os << (i ? "," : "") << 'x' << i + 1;
    os << '\n';
    for (const Point& p : xi.points) {
        for (int i = 0; i < xi.dim; ++i) os << (i ? "," : "") << fmt(p[i]);
        os << '\n';
    }
}

NodeSet read_nodes_csv(std::istream& is)
{
    NodeSet xi;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (xi.dim == 0 && !cells.empty() && !cells[0].empty() && cells[0][0] == 'x') {
            xi.dim = static_cast<int>(cells.size());
            continue;
        }
        if (xi.dim == 0) xi.dim = static_cast<int>(cells.size());
        if (static_cast<int>(cells.size()) != xi.dim || xi.dim > kMaxDim) {
            throw Error(ErrorCode::kIo, "node CSV line " + std::to_string(lineno) + ": expected " +
                                            std::to_string(xi.dim) + " columns");
        }
        Point p(xi.dim);
        for (int i = 0; i < xi.dim; ++i) {
            char* end = nullptr;
            const std::string& c = cells[static_cast<std::size_t>(i)];
            p[i] = std::strtod(c.c_str(), &end);
            if (end == c.c_str() || *end != '\0' || !std::isfinite(p[i])) {
                throw Error(ErrorCode::kIo, "node CSV line " + std::to_string(lineno) + ": bad number '" + c + "'");
            }
        }
        xi.points.push_back(p);
    }
    return xi;
}

NodeSet read_nodes_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::kIo, "cannot open node file " + path.string());
    }
    return read_nodes_csv(in);
}

Json number(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json to_json(const Point& p)
{
    Json a = Json::array();
    for (double c : p.coords()) a.push_back(c);
    return a;
}

Json to_json(const NodeSet& xi)
{
    Json a = Json::array();
    for (const Point& p : xi.points) a.push_back(to_json(p));
    return a;
}

Json to_json(const OperatorClass& op)
{
    const OperatorSpec c = op.coefficients();
    Json j;
    j["p"] = c.p;
    j["q"] = c.q;
    j["form"] = op.describe();
    j["delta"] = number(monotonicity_threshold(op));
    return j;
}

Json to_json(const DistanceEstimate& e)
{
    Json j;
    j["value"] = e.value;
    j["gap"] = e.gap;
    j["argmax"] = to_json(e.argmax);
    return j;
}

Json to_json(const ErrorReport& r)
{
    Json j;
    j["e_omega"] = to_json(r.e_omega);
    j["e_boundary"] = to_json(r.e_boundary);
    j["upper"] = r.upper;
    j["lower"] = r.lower ? Json(*r.lower) : Json(nullptr);
    j["exact"] = r.exact;
    j["boundary_condition_ok"] = r.boundary_condition_ok;
    j["delta_margin"] = number(r.delta_margin);
    j["upper_form"] = r.form == UpperBoundForm::kRadius ? "radius" : "halved";
    return j;
}

Json to_json(const NodeGenReport& r)
{
    Json j;
    j["n"] = r.nodes.size();
    j["dim"] = r.nodes.dim;
    j["k_n"] = r.k_n;
    j["theta"] = r.theta;
    j["seed"] = r.seed;
    j["resolution"] = r.resolution;
    j["h"] = r.h;
    j["e_omega"] = to_json(r.e_omega);
    j["e_boundary"] = to_json(r.e_boundary);
    j["boundary_layer_ok"] = r.boundary_layer_ok;
    return j;
}

Json to_json(const StudyRow& row)
{
    Json j;
    j["n"] = row.n;
    j["k_n"] = row.k_n;
    j["e_omega"] = row.report.e_omega.value;
    j["e_omega_gap"] = row.report.e_omega.gap;
    j["lower"] = row.report.lower ? Json(*row.report.lower) : Json(nullptr);
    j["upper"] = row.report.upper;
    j["exact"] = row.report.exact;
    j["normalized"] = row.normalized;
    j["boundary_layer_ok"] = row.boundary_layer_ok;
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::kIo, "cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error(ErrorCode::kIo, "write failed for " + path.string());
    }
}

std::string render_svg(const PlotSpec& spec)
{
    constexpr double kW = 640;
    constexpr double kH = 440;
    constexpr double kLeft = 80;
    constexpr double kRight = 20;
    constexpr double kTop = 40;
    constexpr double kBottom = 60;
    static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (const PlotSeries& s : spec.series)
        for (auto [x, y] : s.points) {
            if (!std::isfinite(tx(x)) || !std::isfinite(ty(y))) continue;
            x0 = std::min(x0, tx(x));
            x1 = std::max(x1, tx(x));
            y0 = std::min(y0, ty(y));
            y1 = std::max(y1, ty(y));
        }
    for (const auto& [v, label] : spec.reference_lines) {
        if (!std::isfinite(ty(v))) continue;
        y0 = std::min(y0, ty(v));
        y1 = std::max(y1, ty(v));
    }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 - x0 <= 0) x1 = x0 + 1;
    if (y1 - y0 <= 0) y1 = y0 + 1;
    const double pad_y = 0.05 * (y1 - y0);
    y0 -= pad_y;
    y1 += pad_y;
    double pw = kW - kLeft - kRight;
    double ph = kH - kTop - kBottom;
    if (spec.equal_aspect) {
        const double s = std::min(pw / (x1 - x0), ph / (y1 - y0));
        pw = s * (x1 - x0);
        ph = s * (y1 - y0);
    }
    auto px = [&](double v) { return kLeft + (tx(v) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return kTop + ph - (ty(v) - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << escape_xml(spec.title) << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << fixed(pw) << "\" height=\"" << fixed(ph)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    // Five ticks per axis, labelled in data units.
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4;
        const double fy = y0 + (y1 - y0) * i / 4;
        const double gx = kLeft + pw * i / 4;
        const double gy = kTop + ph - ph * i / 4;
        const double lx = spec.log_x ? std::pow(10.0, fx) : fx;
        const double ly = spec.log_y ? std::pow(10.0, fy) : fy;
        char bx[32];
        char by[32];
        std::snprintf(bx, sizeof bx, "%.3g", lx);
        std::snprintf(by, sizeof by, "%.3g", ly);
        o << "<line x1=\"" << fixed(gx) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(gx) << "\" y2=\""
          << fixed(kTop + ph + 5) << "\" stroke=\"#444\"/>\n"
          << "<text x=\"" << fixed(gx) << "\" y=\"" << fixed(kTop + ph + 18)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << bx << "</text>\n"
          << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(gy) << "\" x2=\"" << kLeft << "\" y2=\""
          << fixed(gy) << "\" stroke=\"#444\"/>\n"
          << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(gy + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << by << "</text>\n";
    }
    o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kH - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(spec.x_label)
      << "</text>\n"
      << "<text x=\"18\" y=\"" << fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" transform=\"rotate(-90 18 " << fixed(kTop + ph / 2) << ")\">" << escape_xml(spec.y_label)
      << "</text>\n";

    for (const auto& [v, label] : spec.reference_lines) {
        if (!std::isfinite(ty(v))) continue;
        o << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(py(v)) << "\" x2=\"" << fixed(kLeft + pw) << "\" y2=\""
          << fixed(py(v)) << "\" stroke=\"#777\" stroke-dasharray=\"6 4\"/>\n"
          << "<text x=\"" << fixed(kLeft + pw - 4) << "\" y=\"" << fixed(py(v) - 5)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\">" << escape_xml(label)
          << "</text>\n";
    }
    std::size_t ci = 0;
    for (const PlotSeries& s : spec.series) {
        const char* color = kColors[ci++ % std::size(kColors)];
        if (s.markers) {
            for (auto [x, y] : s.points) {
                if (!std::isfinite(tx(x)) || !std::isfinite(ty(y))) continue;
                o << "<circle cx=\"" << fixed(px(x)) << "\" cy=\"" << fixed(py(y)) << "\" r=\"2.5\" fill=\"" << color
                  << "\"/>\n";
            }
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (auto [x, y] : s.points) {
                if (!std::isfinite(tx(x)) || !std::isfinite(ty(y))) continue;
                o << (first ? "" : " ") << fixed(px(x)) << ',' << fixed(py(y));
                first = false;
            }
            o << "\"/>\n";
        }
    }
    // Legend, top right inside the frame.
    double ly = kTop + 16;
    ci = 0;
    for (const PlotSeries& s : spec.series) {
        const char* color = kColors[ci++ % std::size(kColors)];
        if (s.label.empty()) continue;
        o << "<rect x=\"" << fixed(kLeft + 10) << "\" y=\"" << fixed(ly - 9) << "\" width=\"12\" height=\"3\" fill=\""
          << color << "\"/>\n"
          << "<text x=\"" << fixed(kLeft + 28) << "\" y=\"" << fixed(ly - 4)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label) << "</text>\n";
        ly += 16;
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace isorec
