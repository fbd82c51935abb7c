#include "pcd/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pcd {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && p == end;
}

} // namespace

std::vector<Point2> parse_points_csv(std::string_view text, const std::string& origin) {
    std::vector<Point2> pts;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#') continue;

        const size_t comma = line.find(',');
        if (comma == std::string_view::npos)
            fail(errc::data_error, origin + ":" + std::to_string(line_no) + ": expected x,y");
        double x, y;
        const bool ok = parse_double(line.substr(0, comma), x) &&
                        parse_double(line.substr(comma + 1), y);
        if (!ok) {
            if (line_no == 1 || pts.empty()) continue; // header row
            fail(errc::data_error, origin + ":" + std::to_string(line_no) + ": bad number");
        }
        if (!std::isfinite(x) || !std::isfinite(y))
            fail(errc::data_error, origin + ":" + std::to_string(line_no) + ": non-finite value");
        pts.push_back({x, y});
    }
    if (pts.empty()) fail(errc::data_error, origin + ": no points");
    return pts;
}

std::vector<Point2> read_points_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::data_error, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_points_csv(buf.str(), path);
}

void write_points_csv(const std::string& path, std::span<const Point2> pts,
                      const std::string& meta_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::data_error, "cannot open " + path + " for writing");
    if (!meta_comment.empty()) out << "# " << meta_comment << "\n";
    out << "x,y\n";
    char line[80];
    for (const Point2& p : pts) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", p.x, p.y);
        out << line;
    }
    if (!out) fail(errc::data_error, "failed writing " + path);
}

nlohmann::json triangulation_json(const Triangulation& tri) {
    nlohmann::json j;
    auto& pts = j["points"] = nlohmann::json::array();
    for (const Point2& p : tri.y_points) pts.push_back({p.x, p.y});
    auto& ts = j["triangles"] = nlohmann::json::array();
    for (const auto& t : tri.triangles) ts.push_back({t[0], t[1], t[2]});
    j["hull"] = tri.hull;
    if (!tri.warnings.empty()) j["warnings"] = tri.warnings;
    return j;
}

nlohmann::json domination_json(const DominationResult& dom) {
    nlohmann::json j;
    j["gamma_total"] = dom.gamma_total;
    j["g_bar"] = dom.g_bar;
    j["j_m"] = dom.j_m;
    j["n_inside"] = dom.n_inside;
    j["n_outside"] = dom.n_outside;
    auto& per = j["per_triangle"] = nlohmann::json::array();
    for (const auto& t : dom.per_triangle)
        per.push_back({{"tri", t.tri}, {"n_j", t.n_j}, {"gamma", t.gamma}});
    return j;
}

nlohmann::json test_result_json(const TestResult& r) {
    nlohmann::json j;
    j["statistic"] = statistic_name(r.statistic);
    j["alternative"] = alternative_name(r.alternative);
    j["alpha"] = r.alpha;
    j["statistic_raw"] = r.statistic_raw;
    j["statistic_final"] = r.statistic_final;
    j["p_value"] = r.p_value;
    j["critical_value"] = r.critical_value;
    j["reject"] = r.reject;
    j["null_params"] = {{"r", r.null_params.r},
                        {"p_r", r.null_params.p_r},
                        {"regime", regime_name(r.null_params.regime)},
                        {"mu", r.null_params.mu},
                        {"sigma2", r.null_params.sigma2},
                        {"j_m", r.null_params.j_m}};
    j["counts"] = {{"n", r.counts.n},           {"m", r.counts.m},
                   {"j_m", r.counts.j_m},       {"n_inside", r.counts.n_inside},
                   {"n_outside", r.counts.n_outside}, {"min_n_j", r.counts.min_n_j}};
    if (r.hull)
        j["hull_correction"] = {{"p_out", r.hull->p_out},
                                {"expected_pi_out", r.hull->expected_pi_out},
                                {"c_ch", r.hull->c_ch}};
    j["corrections_applied"] = r.corrections_applied;
    j["warnings"] = r.warnings;
    j["domination"] = domination_json(r.domination);
    return j;
}

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace pcd
