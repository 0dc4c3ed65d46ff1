#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fhl/error.hpp"
#include "fhl/io.hpp"

namespace fhl::io {

namespace {

constexpr double W = 720, H = 480, L = 80, R = 180, T = 40, B = 60;

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo, hi;
    double px0, px1;
    double map(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

void header(std::ostream& o, const std::string& title) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
      << "</text>\n"
      << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

}  // namespace

void svg_loglog(const std::string& path, const std::string& title, const std::vector<Curve>& curves,
                const std::string& x_label, const std::string& y_label) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (const auto& c : curves) {
        for (std::size_t k = 0; k < c.data.size(); ++k) {
            const double x = c.data.t[k], y = std::abs(c.data.v[k]);
            if (!(x > 0) || !(y > 0) || !std::isfinite(y)) continue;
            xlo = std::min(xlo, std::log10(x));
            xhi = std::max(xhi, std::log10(x));
            ylo = std::min(ylo, std::log10(y));
            yhi = std::max(yhi, std::log10(y));
        }
    }
    if (!(xhi >= xlo)) xlo = -1, xhi = 0, ylo = -1, yhi = 0;
    xlo = std::floor(xlo), xhi = std::max(std::ceil(xhi), xlo + 1);
    ylo = std::floor(ylo), yhi = std::max(std::ceil(yhi), ylo + 1);
    const Axis ax{xlo, xhi, L, W - R}, ay{ylo, yhi, H - B, T};

    std::ofstream o(path);
    if (!o) throw Error("cannot open " + path + " for writing");
    header(o, title);
    const int xstep = std::max(1, static_cast<int>((xhi - xlo) / 8));
    for (int e = static_cast<int>(xlo); e <= static_cast<int>(xhi); e += xstep) {
        const double px = ax.map(e);
        o << "<line x1=\"" << px << "\" y1=\"" << T << "\" x2=\"" << px << "\" y2=\"" << H - B
          << "\" stroke=\"#ddd\"/>\n<text x=\"" << px << "\" y=\"" << H - B + 16
          << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
    }
    const int ystep = std::max(1, static_cast<int>((yhi - ylo) / 8));
    for (int e = static_cast<int>(ylo); e <= static_cast<int>(yhi); e += ystep) {
        const double py = ay.map(e);
        o << "<line x1=\"" << L << "\" y1=\"" << py << "\" x2=\"" << W - R << "\" y2=\"" << py
          << "\" stroke=\"#ddd\"/>\n<text x=\"" << L - 6 << "\" y=\"" << py + 4
          << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">"
      << esc(x_label) << "</text>\n";
    o << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (T + H - B) / 2 << ")\">" << esc(y_label) << "</text>\n";

    int legend = 0;
    for (const auto& c : curves) {
        o << "<polyline fill=\"none\" stroke=\"" << c.colour << "\" stroke-width=\"1.5\""
          << (c.dashed ? " stroke-dasharray=\"6 3\"" : "") << " points=\"";
        for (std::size_t k = 0; k < c.data.size(); ++k) {
            const double x = c.data.t[k], y = std::abs(c.data.v[k]);
            if (!(x > 0) || !(y > 0) || !std::isfinite(y)) continue;
            o << ax.map(std::log10(x)) << ',' << ay.map(std::log10(y)) << ' ';
        }
        o << "\"/>\n";
        const double ly = T + 14 + 18 * legend++;
        o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 34 << "\" y2=\""
          << ly << "\" stroke=\"" << c.colour << "\" stroke-width=\"2\""
          << (c.dashed ? " stroke-dasharray=\"6 3\"" : "") << "/>\n<text x=\"" << W - R + 40
          << "\" y=\"" << ly + 4 << "\">" << esc(c.label) << "</text>\n";
    }
    o << "</svg>\n";
}

void svg_poles(const std::string& path, const std::string& title, const zeta::ComplexDimensionSet& d) {
    double xlo = d.window.sigma_min, xhi = d.window.sigma_max, ylo = -d.window.T, yhi = d.window.T;
    for (const auto& p : d.poles) {
        xlo = std::min(xlo, p.omega.real());
        xhi = std::max(xhi, p.omega.real());
    }
    const double padx = 0.05 * (xhi - xlo + 1e-9), pady = 0.05 * (yhi - ylo + 1e-9);
    const Axis ax{xlo - padx, xhi + padx, L, W - R}, ay{ylo - pady, yhi + pady, H - B, T};

    std::ofstream o(path);
    if (!o) throw Error("cannot open " + path + " for writing");
    header(o, title);
    o << "<rect x=\"" << ax.map(d.window.sigma_min) << "\" y=\"" << ay.map(d.window.T) << "\" width=\""
      << ax.map(d.window.sigma_max) - ax.map(d.window.sigma_min) << "\" height=\""
      << ay.map(-d.window.T) - ay.map(d.window.T)
      << "\" fill=\"#f4f4ff\" stroke=\"#99c\" stroke-dasharray=\"4 3\"/>\n";
    if (ylo < 0 && yhi > 0)
        o << "<line x1=\"" << L << "\" y1=\"" << ay.map(0) << "\" x2=\"" << W - R << "\" y2=\""
          << ay.map(0) << "\" stroke=\"#bbb\"/>\n";
    for (double v : {ax.lo, 0.5 * (ax.lo + ax.hi), ax.hi})
        o << "<text x=\"" << ax.map(v) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
          << fmt(v) << "</text>\n";
    for (double v : {ay.lo, 0.0, ay.hi})
        o << "<text x=\"" << L - 6 << "\" y=\"" << ay.map(v) + 4 << "\" text-anchor=\"end\">" << fmt(v)
          << "</text>\n";
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16
      << "\" text-anchor=\"middle\">Re</text>\n<text x=\"18\" y=\"" << (T + H - B) / 2
      << "\" text-anchor=\"middle\">Im</text>\n";
    for (const auto& p : d.poles)
        o << "<circle cx=\"" << ax.map(p.omega.real()) << "\" cy=\"" << ay.map(p.omega.imag())
          << "\" r=\"" << (p.multiplicity > 1 ? 5 : 3.5) << "\" fill=\""
          << (p.multiplicity > 1 ? "#d62728" : "#1f77b4") << "\"/>\n";
    for (const auto& b : d.undecided)
        o << "<rect x=\"" << ax.map(b.re_min) << "\" y=\"" << ay.map(b.im_max) << "\" width=\""
          << ax.map(b.re_max) - ax.map(b.re_min) << "\" height=\"" << ay.map(b.im_min) - ay.map(b.im_max)
          << "\" fill=\"none\" stroke=\"#ff7f0e\"/>\n";
    o << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 14 << "\">" << d.poles.size()
      << " poles</text>\n<text x=\"" << W - R + 10 << "\" y=\"" << T + 32 << "\">"
      << esc(zeta::to_string(d.method)) << "</text>\n</svg>\n";
}

}  // namespace fhl::io
