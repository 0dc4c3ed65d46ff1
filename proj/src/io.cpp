#include "fhl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fhl/error.hpp"

namespace fhl::io {

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot open " + path + " for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    return out;
}

// Rows of numbers after the header; `cols` columns each.
std::vector<std::vector<double>> read_table(const std::string& path, std::size_t cols) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DomainError(path + ": empty file");
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = split(line, ',');
        if (cells.size() < cols)
            throw DomainError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(cols) + " columns");
        std::vector<double> row;
        for (std::size_t c = 0; c < cols; ++c) row.push_back(parse_double(cells[c]));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double x = 0.0;
    const char* b = s.data();
    if (!s.empty() && s.front() == '+') ++b;
    auto r = std::from_chars(b, s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw DomainError("not a number: '" + s + "'");
    return x;
}

void write_series_csv(const std::string& path, const TimeSeries& s, const std::string& t_name,
                      const std::string& v_name) {
    s.validate();
    auto out = open_out(path);
    out << t_name << ',' << v_name << '\n';
    for (std::size_t k = 0; k < s.size(); ++k)
        out << format_double(s.t[k]) << ',' << format_double(s.v[k]) << '\n';
}

TimeSeries read_series_csv(const std::string& path) {
    TimeSeries s;
    for (auto& row : read_table(path, 2)) {
        s.t.push_back(row[0]);
        s.v.push_back(row[1]);
    }
    s.validate();
    return s;
}

void write_polyline_csv(const std::string& path, const geometry::Polyline& p) {
    auto out = open_out(path);
    out << "x,y\n";
    for (auto v : p.vertices) out << format_double(v.x) << ',' << format_double(v.y) << '\n';
}

geometry::Polyline read_polyline_csv(const std::string& path, bool closed) {
    geometry::Polyline p;
    for (auto& row : read_table(path, 2)) p.vertices.push_back({row[0], row[1]});
    if (p.vertices.size() > 1 && p.vertices.front() == p.vertices.back()) {
        p.vertices.pop_back();
        closed = true;
    }
    p.closed = closed;
    return p;
}

void write_grid_pgm(const std::string& path, const geometry::GridDomain& g) {
    auto out = open_out(path, true);
    out << "P5\n" << g.nx() << ' ' << g.ny() << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(g.nx()));
    for (int j = g.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx(); ++i) row[i] = g.interior(i, j) ? static_cast<char>(255) : 0;
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    write_json(path + ".json", {{"h", g.h()},
                                {"origin", {g.origin().x, g.origin().y}},
                                {"area", g.area()},
                                {"nx", g.nx()},
                                {"ny", g.ny()}});
}

json to_json(const zeta::ComplexDimensionSet& d) {
    json poles = json::array();
    for (const auto& p : d.poles) {
        json e{{"re", p.omega.real()}, {"im", p.omega.imag()}, {"mult", p.multiplicity}};
        if (p.residue) {
            e["res_re"] = p.residue->real();
            e["res_im"] = p.residue->imag();
        }
        poles.push_back(e);
    }
    json undecided = json::array();
    for (const auto& b : d.undecided)
        undecided.push_back({{"re_min", b.re_min}, {"re_max", b.re_max}, {"im_min", b.im_min},
                             {"im_max", b.im_max}, {"count", b.count}});
    return {{"window", {{"sigma_min", d.window.sigma_min}, {"sigma_max", d.window.sigma_max},
                        {"T", d.window.T}}},
            {"method", zeta::to_string(d.method)},
            {"poles", poles},
            {"undecided", undecided}};
}

zeta::ComplexDimensionSet dims_from_json(const json& j) {
    zeta::ComplexDimensionSet d;
    try {
        const auto& w = j.at("window");
        d.window = {w.at("sigma_min").get<double>(), w.at("sigma_max").get<double>(),
                    w.at("T").get<double>()};
        const auto method = j.at("method").get<std::string>();
        d.method = method == zeta::to_string(zeta::PoleMethod::ArgumentPrinciple)
                       ? zeta::PoleMethod::ArgumentPrinciple
                       : zeta::PoleMethod::LatticePolynomial;
        for (const auto& e : j.at("poles")) {
            zeta::Pole p;
            p.omega = {e.at("re").get<double>(), e.at("im").get<double>()};
            p.multiplicity = e.value("mult", 1);
            if (e.contains("res_re"))
                p.residue = zeta::cplx(e.at("res_re").get<double>(), e.at("res_im").get<double>());
            d.poles.push_back(p);
        }
        if (j.contains("undecided"))
            for (const auto& b : j.at("undecided"))
                d.undecided.push_back({b.at("re_min").get<double>(), b.at("re_max").get<double>(),
                                       b.at("im_min").get<double>(), b.at("im_max").get<double>(),
                                       b.at("count").get<int>()});
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed dimension set: ") + e.what());
    }
    return d;
}

void write_dims_csv(const std::string& path, const zeta::ComplexDimensionSet& d) {
    auto out = open_out(path);
    out << "re,im,mult,res_re,res_im\n";
    for (const auto& p : d.poles) {
        out << format_double(p.omega.real()) << ',' << format_double(p.omega.imag()) << ','
            << p.multiplicity << ',';
        if (p.residue)
            out << format_double(p.residue->real()) << ',' << format_double(p.residue->imag());
        else
            out << ',';
        out << '\n';
    }
}

json to_json(const expansion::ExpansionFit& f, const std::string& residual_csv_path) {
    json poles = json::array();
    for (const auto& t : f.terms)
        poles.push_back({{"re", t.omega.real()},
                         {"im", t.omega.imag()},
                         {"res_re", t.residue.real()},
                         {"res_im", t.residue.imag()},
                         {"source", t.source}});
    return {{"N", f.N},
            {"k", f.k},
            {"T", f.T},
            {"delta", f.delta},
            {"poles", poles},
            {"max_relative_residual", f.max_relative_residual},
            {"residual_csv_path", residual_csv_path}};
}

void write_sampled_function(const std::string& path, const mellin::SampledFunction& f) {
    write_series_csv(path, TimeSeries{f.t(), f.values()}, "t", "value");
    write_json(path + ".json",
               {{"sigma0", f.sigma0()}, {"t_max", f.t_max()}, {"description", f.description()}});
}

mellin::SampledFunction read_sampled_function(const std::string& path) {
    auto s = read_series_csv(path);
    auto meta = read_json(path + ".json");
    return mellin::SampledFunction(std::move(s.t), std::move(s.v), meta.at("sigma0").get<double>(),
                                   meta.value("description", std::string{}));
}

void write_json(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError(path + ": " + e.what());
    }
}

}  // namespace fhl::io
