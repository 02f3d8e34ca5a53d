#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "weightlab/error.hpp"
#include "weightlab/space.hpp"

namespace weightlab {

/// A space plus named weight vectors, as persisted on disk.
struct SpaceDocument {
    FiniteMetricMeasureSpace space;
    std::map<std::string, std::vector<double>> weights;

    bool operator==(const SpaceDocument&) const = default;
};

// Layout:
//   { "points":    [ {"id": 0, "coords": [..]}, ... ],
//     "metric":    "euclidean" | "l1" | "linf" | "graph-shortest-path" | "explicit-matrix",
//     "distances": [[..], ..],          optional when coords are present
//     "measure":   [..],
//     "weights":   { "name": [..], .. } }
// nlohmann/json prints doubles in shortest round-trip form, so distances and
// measures reload bit-exactly.
inline nlohmann::json to_json(const SpaceDocument& doc)
{
    const auto& s = doc.space;
    nlohmann::json j;
    j["points"] = nlohmann::json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        nlohmann::json p;
        p["id"] = i;
        if (s.has_coordinates())
            p["coords"] = s.coordinates()[i];
        j["points"].push_back(std::move(p));
    }
    j["metric"] = std::string(to_string(s.metric()));
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto r = s.row(PointId(i));
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["distances"] = std::move(rows);
    j["measure"] = std::vector<double>(s.measure().begin(), s.measure().end());
    j["weights"] = nlohmann::json::object();
    for (const auto& [name, w] : doc.weights)
        j["weights"][name] = w;
    return j;
}

inline std::string dump_document(const SpaceDocument& doc) { return to_json(doc).dump(1) + "\n"; }

namespace detail {

[[noreturn]] inline void field_error(const std::string& field, const std::string& what)
{
    throw Error(ErrorKind::ParseError, "field '" + field + "': " + what);
}

inline std::vector<double> number_array(const nlohmann::json& j, const std::string& field)
{
    if (!j.is_array())
        field_error(field, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            field_error(field + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

inline std::size_t line_of(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n')
            ++line;
    return line;
}

} // namespace detail

inline SpaceDocument from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw Error(ErrorKind::ParseError, "document root must be an object");
    if (!j.contains("measure"))
        detail::field_error("measure", "missing");
    if (!j.contains("metric") || !j["metric"].is_string())
        detail::field_error("metric", "missing or not a string");
    std::vector<double> measure = detail::number_array(j["measure"], "measure");
    MetricKind kind;
    try {
        kind = parse_metric_kind(j["metric"].get<std::string>());
    } catch (const Error& e) {
        detail::field_error("metric", e.what());
    }

    std::vector<std::vector<double>> coords;
    if (j.contains("points")) {
        const auto& pts = j["points"];
        if (!pts.is_array())
            detail::field_error("points", "expected an array");
        if (pts.size() != measure.size())
            detail::field_error("points", "has " + std::to_string(pts.size()) + " entries but measure has " +
                                              std::to_string(measure.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string f = "points[" + std::to_string(i) + "]";
            if (!pts[i].is_object() || !pts[i].contains("id") || !pts[i]["id"].is_number_integer() ||
                pts[i]["id"].get<long long>() != static_cast<long long>(i))
                detail::field_error(f + ".id", "ids must be 0, 1, ... in order");
            if (pts[i].contains("coords"))
                coords.push_back(detail::number_array(pts[i]["coords"], f + ".coords"));
        }
        if (!coords.empty() && coords.size() != pts.size())
            detail::field_error("points", "coords must be given for all points or none");
    }

    std::vector<double> matrix;
    bool have_matrix = false;
    if (j.contains("distances")) {
        const auto& rows = j["distances"];
        if (!rows.is_array() || rows.size() != measure.size())
            detail::field_error("distances", "expected " + std::to_string(measure.size()) + " rows");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto r = detail::number_array(rows[i], "distances[" + std::to_string(i) + "]");
            if (r.size() != measure.size())
                detail::field_error("distances[" + std::to_string(i) + "]", "wrong row length");
            matrix.insert(matrix.end(), r.begin(), r.end());
        }
        have_matrix = true;
    }

    SpaceDocument doc;
    try {
        if (is_coordinate_metric(kind) && !coords.empty()) {
            doc.space = FiniteMetricMeasureSpace::from_coordinates(coords, kind, measure);
            if (have_matrix && !std::equal(matrix.begin(), matrix.end(), doc.space.distances().begin()))
                detail::field_error("distances", "inconsistent with coords under metric '" +
                                                     std::string(to_string(kind)) + "'");
        } else if (have_matrix) {
            doc.space = FiniteMetricMeasureSpace::from_matrix(std::move(matrix), std::move(measure), kind);
            if (!coords.empty())
                doc.space = FiniteMetricMeasureSpace::trusted(
                    {doc.space.distances().begin(), doc.space.distances().end()},
                    {doc.space.measure().begin(), doc.space.measure().end()}, kind, std::move(coords));
        } else {
            detail::field_error("distances", "missing and no coordinates to derive them from");
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError)
            throw;
        throw Error(ErrorKind::ParseError, std::string("invalid space: ") + e.what());
    }

    if (j.contains("weights")) {
        const auto& ws = j["weights"];
        if (!ws.is_object())
            detail::field_error("weights", "expected an object of named vectors");
        for (auto it = ws.begin(); it != ws.end(); ++it) {
            auto w = detail::number_array(it.value(), "weights." + it.key());
            if (w.size() != doc.space.size())
                detail::field_error("weights." + it.key(), "length differs from point count");
            doc.weights.emplace(it.key(), std::move(w));
        }
    }
    return doc;
}

inline SpaceDocument parse_document(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::ostringstream os;
        os << "line " << detail::line_of(text, e.byte) << ": " << e.what();
        throw Error(ErrorKind::ParseError, os.str());
    }
    return from_json(j);
}

inline void save_document(const SpaceDocument& doc, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::InvalidParams, "cannot write '" + path + "'");
    out << dump_document(doc);
    if (!out)
        throw Error(ErrorKind::InvalidParams, "write to '" + path + "' failed");
}

inline SpaceDocument load_document(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::ParseError, "cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_document(buf.str());
}

} // namespace weightlab
