#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "isorec/covering.hpp"
#include "isorec/geometry.hpp"
#include "isorec/operators.hpp"
#include "isorec/recovery.hpp"

namespace isorec {

using Json = nlohmann::ordered_json;

/// {"type":"box","lo":[..],"hi":[..]}, {"type":"ball","center":[..],"radius":r},
/// {"type":"polygon","vertices":[[x,y],..]}. Throws invalid-config on bad input.
ConvexBody body_from_json(const Json& j);
Json body_to_json(const ConvexBody& body);
ConvexBody read_body_file(const std::filesystem::path& path);

/// Header x1,...,xd then one point per row at full precision.
void write_nodes_csv(std::ostream& os, const NodeSet& xi);
NodeSet read_nodes_csv(std::istream& is);
NodeSet read_nodes_file(const std::filesystem::path& path);

/// JSON numbers, with non-finite values as null.
Json number(double v);

Json to_json(const Point& p);
Json to_json(const NodeSet& xi);
Json to_json(const OperatorClass& op);
Json to_json(const DistanceEstimate& e);
Json to_json(const ErrorReport& r);
/// Report without the node list, which goes to CSV.
Json to_json(const NodeGenReport& r);
Json to_json(const StudyRow& row);

void write_text_file(const std::filesystem::path& path, const std::string& text);

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool markers = false;  // scatter instead of polyline
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    bool equal_aspect = false;
    std::vector<PlotSeries> series;
    /// Horizontal reference lines (value, label).
    std::vector<std::pair<double, std::string>> reference_lines;
};

/// Standalone SVG 1.1 document.
std::string render_svg(const PlotSpec& spec);

}  // namespace isorec
