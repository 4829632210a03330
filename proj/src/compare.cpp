#include "vlsim/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vlsim/raster.hpp"

namespace vlsim {

namespace {

namespace fs = std::filesystem;

constexpr double kEps = 1e-9;

[[noreturn]] void fail(const fs::path& p, const std::string& msg) {
    throw std::runtime_error(p.string() + ": " + msg);
}

// Years y with density_total_<y>.asc present.
std::vector<std::int32_t> map_years(const fs::path& dir) {
    std::vector<std::int32_t> years;
    if (!fs::is_directory(dir)) fail(dir, "not a run directory");
    const std::string prefix = "density_total_";
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".asc") continue;
        const std::string num = name.substr(prefix.size(), name.size() - prefix.size() - 4);
        try {
            years.push_back(static_cast<std::int32_t>(std::stol(num)));
        } catch (const std::exception&) {
            // stray file; not ours to judge
        }
    }
    std::sort(years.begin(), years.end());
    return years;
}

double mean_cell_rel_diff(const AsciiRaster& a, const AsciiRaster& b, const fs::path& where) {
    if (a.rows != b.rows || a.cols != b.cols) fail(where, "raster geometry mismatch");
    double sum = 0.0;
    std::int64_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.nulls[i] != b.nulls[i]) fail(where, "null masks differ");
        if (a.nulls[i]) continue;
        const double va = a.values[i], vb = b.values[i];
        const double denom = std::max(std::max(std::fabs(va), std::fabs(vb)), kEps);
        sum += std::fabs(va - vb) / denom;
        ++n;
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

struct Trajectory {
    std::vector<std::int32_t> years;
    std::array<std::vector<double>, 6> totals;  // by Variable
};

Trajectory read_trajectory(const fs::path& dir) {
    const fs::path p = dir / "trajectory.csv";
    std::ifstream in(p);
    if (!in) fail(p, "cannot open");
    Trajectory t;
    std::string line;
    if (!std::getline(in, line)) fail(p, "empty file");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string tok;
        if (!std::getline(row, tok, ',')) fail(p, "short row");
        t.years.push_back(static_cast<std::int32_t>(std::stol(tok)));
        for (std::size_t v = 0; v < 6; ++v) {
            if (!std::getline(row, tok, ',')) fail(p, "short row");
            t.totals[v].push_back(std::stod(tok));
        }
    }
    if (t.years.empty()) fail(p, "no data rows");
    return t;
}

// Total seconds from timings.csv; 0 when absent.
double read_runtime(const fs::path& dir) {
    std::ifstream in(dir / "timings.csv");
    if (!in) return 0.0;
    std::string line;
    std::getline(in, line);  // header
    double total_ms = 0.0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        total_ms += std::stod(line.substr(comma + 1));
    }
    return total_ms / 1000.0;
}

}  // namespace

ComparisonReport compare_runs(const fs::path& dir_a, const fs::path& dir_b) {
    ComparisonReport rep;
    rep.years = map_years(dir_a);
    if (rep.years != map_years(dir_b))
        throw std::runtime_error(dir_a.string() + " and " + dir_b.string() +
                                 ": map year sets differ");

    for (const std::int32_t year : rep.years) {
        for (const Variable v : kAllVariables) {
            const std::string name =
                std::string(variable_name(v)) + "_total_" + std::to_string(year) + ".asc";
            const AsciiRaster a = read_raster(dir_a / name);
            const AsciiRaster b = read_raster(dir_b / name);
            rep.rel_diff[static_cast<std::size_t>(v)].push_back(
                mean_cell_rel_diff(a, b, dir_a / name));
        }
    }
    for (std::size_t v = 0; v < 6; ++v) {
        const auto& series = rep.rel_diff[v];
        double sum = 0.0;
        for (const double x : series) sum += x;
        rep.mean_rel_diff[v] = series.empty() ? 0.0 : sum / static_cast<double>(series.size());
    }

    const Trajectory ta = read_trajectory(dir_a);
    const Trajectory tb = read_trajectory(dir_b);
    if (ta.years != tb.years)
        throw std::runtime_error(dir_a.string() + " and " + dir_b.string() +
                                 ": trajectory year sets differ");
    const std::size_t density = static_cast<std::size_t>(Variable::density);
    const std::size_t basal = static_cast<std::size_t>(Variable::basal_area);
    rep.final_density_a = ta.totals[density].back();
    rep.final_density_b = tb.totals[density].back();
    rep.final_basal_area_a = ta.totals[basal].back();
    rep.final_basal_area_b = tb.totals[basal].back();
    for (std::size_t i = 0; i < ta.years.size(); ++i) {
        const double a = ta.totals[basal][i], b = tb.totals[basal][i];
        if (a <= 0.0 && b <= 0.0) continue;
        const double lo = std::max(std::min(a, b), kEps);
        const double hi = std::max(a, b);
        rep.max_basal_area_ratio = std::max(rep.max_basal_area_ratio, hi / lo);
    }

    rep.runtime_a = read_runtime(dir_a);
    rep.runtime_b = read_runtime(dir_b);
    rep.runtime_ratio = rep.runtime_a > 0.0 ? rep.runtime_b / rep.runtime_a : 0.0;
    return rep;
}

std::string ComparisonReport::to_string() const {
    std::string out;
    char buf[160];
    out += "mean relative difference per variable (averaged over years):\n";
    for (const Variable v : kAllVariables) {
        std::snprintf(buf, sizeof buf, "  %-13s %.6g\n", variable_name(v),
                      mean_rel_diff[static_cast<std::size_t>(v)]);
        out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "final density     A %.6g  B %.6g\n"
                  "final basal area  A %.6g  B %.6g\n"
                  "max basal-area ratio over years: %.4g\n",
                  final_density_a, final_density_b, final_basal_area_a, final_basal_area_b,
                  max_basal_area_ratio);
    out += buf;
    std::snprintf(buf, sizeof buf, "runtime  A %.3fs  B %.3fs  ratio B/A %.4g\n", runtime_a,
                  runtime_b, runtime_ratio);
    out += buf;
    return out;
}

}  // namespace vlsim
