#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fhl/expansion.hpp"
#include "fhl/geometry.hpp"
#include "fhl/mellin.hpp"
#include "fhl/series.hpp"
#include "fhl/zeta.hpp"

namespace fhl::io {

using json = nlohmann::json;

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& s);

/// Two-column CSV with a header row.
void write_series_csv(const std::string& path, const TimeSeries& s, const std::string& t_name = "t",
                      const std::string& v_name = "value");
TimeSeries read_series_csv(const std::string& path);

void write_polyline_csv(const std::string& path, const geometry::Polyline& p);
/// The result is closed when the last vertex repeats the first or `closed` is set.
geometry::Polyline read_polyline_csv(const std::string& path, bool closed = true);

/// Binary PGM of the interior mask (255 inside, row 0 at the top) plus
/// `path + ".json"` holding {h, origin, area, nx, ny}.
void write_grid_pgm(const std::string& path, const geometry::GridDomain& g);

json to_json(const zeta::ComplexDimensionSet& d);
zeta::ComplexDimensionSet dims_from_json(const json& j);
/// One pole per row: re,im,mult,res_re,res_im.
void write_dims_csv(const std::string& path, const zeta::ComplexDimensionSet& d);

json to_json(const expansion::ExpansionFit& f, const std::string& residual_csv_path);

/// `path` gets t,value; `path + ".json"` gets {sigma0, t_max, description}.
void write_sampled_function(const std::string& path, const mellin::SampledFunction& f);
mellin::SampledFunction read_sampled_function(const std::string& path);

void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

struct Curve {
    std::string label;
    TimeSeries data;
    std::string colour = "#1f77b4";
    bool dashed = false;
};

/// Log-log line plot; non-positive values are plotted by magnitude.
void svg_loglog(const std::string& path, const std::string& title, const std::vector<Curve>& curves,
                const std::string& x_label = "t", const std::string& y_label = "");

/// Scatter of poles in the complex plane with the window outline.
void svg_poles(const std::string& path, const std::string& title,
               const zeta::ComplexDimensionSet& d);

}  // namespace fhl::io
