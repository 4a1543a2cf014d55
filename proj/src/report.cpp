#include "subriem/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subriem::report {

namespace {

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const json& doc) {
    write_text_atomic(path, doc.dump(2) + "\n");
}

std::string tail_curve_csv(const mc::TailCurve& curve) {
    std::ostringstream out;
    out << "t,p_hat,ci_lower,ci_upper\n";
    for (Eigen::Index j = 0; j < curve.ts.size(); ++j) {
        out << format_double(curve.ts[j]) << ',' << format_double(curve.p_hat[j]) << ','
            << format_double(curve.ci_lower[j]) << ',' << format_double(curve.ci_upper[j]) << '\n';
    }
    return out.str();
}

json tail_curve_json(const mc::TailCurve& curve) {
    json j;
    j["trials"] = curve.trials;
    j["n_censored"] = curve.n_censored;
    j["ts"] = std::vector<double>(curve.ts.data(), curve.ts.data() + curve.ts.size());
    j["p_hat"] = std::vector<double>(curve.p_hat.data(), curve.p_hat.data() + curve.p_hat.size());
    j["ci_lower"] =
        std::vector<double>(curve.ci_lower.data(), curve.ci_lower.data() + curve.ci_lower.size());
    j["ci_upper"] =
        std::vector<double>(curve.ci_upper.data(), curve.ci_upper.data() + curve.ci_upper.size());
    if (curve.fitted_rate) {
        j["fitted_rate"] = {{"c_hat", curve.fitted_rate->c_hat},
                            {"C_hat", curve.fitted_rate->C_hat},
                            {"r_squared", curve.fitted_rate->r_squared},
                            {"n_points", curve.fitted_rate->n_points}};
    }
    return j;
}

RunManifest::RunManifest(std::string command, json config) : config_(std::move(config)) {
    doc_["command"] = std::move(command);
    doc_["version"] = kVersion;
    doc_["started_at"] = iso_now();
    doc_["outputs"] = json::array();
}

void RunManifest::add_output(const std::filesystem::path& p) {
    doc_["outputs"].push_back(p.filename().string());
}

void RunManifest::finish() { doc_["finished_at"] = iso_now(); }

void RunManifest::write(const std::filesystem::path& path) const {
    json full = doc_;
    full["config"] = config_;
    write_json(path, full);
}

}  // namespace subriem::report
