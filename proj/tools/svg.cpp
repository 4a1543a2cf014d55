#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace subriem::svg {

namespace {

constexpr double kW = 640.0, kH = 420.0;
constexpr double kL = 70.0, kR = 20.0, kT = 40.0, kB = 50.0;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

}  // namespace

std::string tail_plot(const mc::TailCurve& curve, const std::optional<Eigen::ArrayXd>& bound,
                      const std::string& title) {
    const Eigen::Index n = curve.ts.size();
    const double floor_p = std::max(0.5 / std::max<long>(1, curve.trials), 1e-8);
    double lo = 0.0;  // log10 of smallest plotted value
    for (Eigen::Index j = 0; j < n; ++j) {
        if (curve.p_hat[j] > floor_p) lo = std::min(lo, std::log10(curve.p_hat[j]));
    }
    lo = std::floor(lo) - 1.0;
    const double t_min = 0.0, t_max = curve.ts[n - 1];

    auto x_of = [&](double t) { return kL + (t - t_min) / (t_max - t_min) * (kW - kL - kR); };
    auto y_of = [&](double p) {
        const double lp = std::log10(std::max(p, floor_p * 0.5));
        return kT + (0.0 - lp) / (0.0 - lo) * (kH - kT - kB);
    };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
         "font-family=\"sans-serif\">" << title << "</text>\n";

    // axes and log-decade grid
    s << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\""
      << kH - kB << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
      << "\" stroke=\"black\"/>\n";
    for (double d = 0.0; d >= lo; d -= 1.0) {
        const double y = y_of(std::pow(10.0, d));
        s << "<line x1=\"" << kL << "\" y1=\"" << fmt(y) << "\" x2=\"" << kW - kR << "\" y2=\""
          << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
        s << "<text x=\"" << kL - 8 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\" "
             "font-size=\"11\" font-family=\"sans-serif\">1e" << fmt_g(d) << "</text>\n";
    }
    const int xticks = 6;
    for (int i = 0; i <= xticks; ++i) {
        const double t = t_min + (t_max - t_min) * i / xticks;
        s << "<text x=\"" << fmt(x_of(t)) << "\" y=\"" << kH - kB + 18
          << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt_g(t)
          << "</text>\n";
    }
    s << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">t</text>\n";

    auto polyline = [&](const Eigen::ArrayXd& ys, const char* color, const char* dash) {
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (dash[0] != '\0') s << " stroke-dasharray=\"" << dash << "\"";
        s << " points=\"";
        for (Eigen::Index j = 0; j < n; ++j) {
            s << fmt(x_of(curve.ts[j])) << ',' << fmt(y_of(ys[j])) << ' ';
        }
        s << "\"/>\n";
    };

    // confidence band
    s << "<polygon fill=\"#a6c8ff\" fill-opacity=\"0.4\" stroke=\"none\" points=\"";
    for (Eigen::Index j = 0; j < n; ++j) {
        s << fmt(x_of(curve.ts[j])) << ',' << fmt(y_of(curve.ci_upper[j])) << ' ';
    }
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        s << fmt(x_of(curve.ts[j])) << ',' << fmt(y_of(curve.ci_lower[j])) << ' ';
    }
    s << "\"/>\n";

    polyline(curve.p_hat, "#1f4e9c", "");
    s << "<text x=\"" << kW - kR - 10 << "\" y=\"" << kT + 16
      << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#1f4e9c\" "
         "font-family=\"sans-serif\">P(tau &gt; t)</text>\n";
    if (bound) {
        polyline(*bound, "#b03030", "6,4");
        s << "<text x=\"" << kW - kR - 10 << "\" y=\"" << kT + 32
          << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#b03030\" "
             "font-family=\"sans-serif\">bound</text>\n";
    }
    if (curve.fitted_rate && curve.fitted_rate->n_points >= 2) {
        s << "<text x=\"" << kL + 10 << "\" y=\"" << kT + 16
          << "\" font-size=\"12\" font-family=\"sans-serif\">c_hat = "
          << fmt_g(curve.fitted_rate->c_hat) << ", R^2 = " << fmt(curve.fitted_rate->r_squared)
          << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace subriem::svg
