#include "qfilter/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "qfilter/csv.hpp"
#include "qfilter/riccati.hpp"

namespace qfilter {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, std::size_t line) {
    const std::string s(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(line, "malformed number '" + s + "'");
}

std::uint64_t parse_unsigned(std::string_view text, std::size_t line) {
    const std::string s(text);
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
        }
    }
    throw ParseError(line, "malformed non-negative integer '" + s + "'");
}

bool parse_bool(std::string_view text, std::size_t line) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ParseError(line, "malformed boolean '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view text, std::size_t line) {
    std::vector<double> out;
    for (const auto& cell : split_csv_line(text)) out.push_back(parse_real(trim(cell), line));
    return out;
}

RealVector expand(const std::vector<double>& values, std::size_t dim, const char* key) {
    if (values.size() == 1) return RealVector(dim, values[0]);
    if (values.size() != dim)
        throw InvalidParameter(key, "expected 1 or " + std::to_string(dim) + " values, got " +
                                        std::to_string(values.size()));
    RealVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = values[i];
    return v;
}

std::string render_vector(const RealVector& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

}  // namespace

Config parse_config(std::string_view text) {
    Config cfg;
    double mass = 1.0, hbar = 1.0, lambda = 1.0;
    std::uint64_t dim = 1;
    std::vector<double> q{0.0}, p{0.0};

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");

        if (key == "params.mass") mass = parse_real(value, line_no);
        else if (key == "params.hbar") hbar = parse_real(value, line_no);
        else if (key == "params.lambda") lambda = parse_real(value, line_no);
        else if (key == "params.dim") dim = parse_unsigned(value, line_no);
        else if (key == "packet.q") q = parse_list(value, line_no);
        else if (key == "packet.p") p = parse_list(value, line_no);
        else if (key == "packet.sigma_q2") cfg.packet.sigma_q2 = parse_real(value, line_no);
        else if (key == "run.dt") cfg.run.dt = parse_real(value, line_no);
        else if (key == "run.t_end") cfg.run.t_end = parse_real(value, line_no);
        else if (key == "run.seed") cfg.run.seed = parse_unsigned(value, line_no);
        else if (key == "run.n_traj") cfg.run.n_traj = parse_unsigned(value, line_no);
        else if (key == "run.record_every") cfg.run.record_every = parse_unsigned(value, line_no);
        else if (key == "run.workers") cfg.run.workers = parse_unsigned(value, line_no);
        else if (key == "grid.x_min") cfg.grid.x_min = parse_real(value, line_no);
        else if (key == "grid.x_max") cfg.grid.x_max = parse_real(value, line_no);
        else if (key == "grid.n_points") cfg.grid.n_points = parse_unsigned(value, line_no);
        else if (key == "grid.snapshot_every") cfg.grid.snapshot_every = parse_unsigned(value, line_no);
        else if (key == "riccati.t_end") cfg.riccati_t_end = parse_real(value, line_no);
        else if (key == "compare.tolerance") cfg.compare_tolerance = parse_real(value, line_no);
        else if (key == "outputs.dir") cfg.outputs.dir = std::string(value);
        else if (key == "outputs.record_w") cfg.outputs.record_w = parse_bool(value, line_no);
        else throw UnknownKey(std::string(key));
    }

    cfg.params = make_params(mass, hbar, lambda, static_cast<std::size_t>(dim));
    cfg.packet.q = expand(q, cfg.params.dim, "packet.q");
    cfg.packet.p = expand(p, cfg.params.dim, "packet.p");
    if (!(cfg.packet.sigma_q2 > 0.0)) throw InvalidParameter("packet.sigma_q2", "must be positive");
    if (!(cfg.run.dt > 0.0)) throw InvalidParameter("run.dt", "must be positive");
    if (!(cfg.run.t_end >= cfg.run.dt)) throw InvalidParameter("run.t_end", "must be at least run.dt");
    if (cfg.run.n_traj < 1) throw InvalidParameter("run.n_traj", "must be at least 1");
    if (cfg.run.record_every < 1) throw InvalidParameter("run.record_every", "must be at least 1");
    if (cfg.grid.n_points < 16) throw InvalidParameter("grid.n_points", "must be at least 16");
    if (cfg.grid.x_min && cfg.grid.x_max && !(*cfg.grid.x_max > *cfg.grid.x_min))
        throw InvalidParameter("grid.x_max", "must exceed grid.x_min");
    if (cfg.riccati_t_end < 0.0) throw InvalidParameter("riccati.t_end", "must be non-negative");
    if (!(cfg.compare_tolerance > 0.0)) throw InvalidParameter("compare.tolerance", "must be positive");
    if (cfg.outputs.dir.empty()) throw InvalidParameter("outputs.dir", "must not be empty");
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_env_overrides(Config& config) {
    if (const char* seed = std::getenv("QFILTER_SEED"); seed != nullptr && *seed != '\0') {
        try {
            config.run.seed = parse_unsigned(seed, 0);
        } catch (const ParseError&) {
            throw InvalidParameter("QFILTER_SEED", "not a non-negative integer: '" + std::string(seed) + "'");
        }
    }
}

std::string render_config(const Config& c) {
    std::ostringstream os;
    os << "params.mass=" << format_double(c.params.m) << '\n'
       << "params.hbar=" << format_double(c.params.hbar) << '\n'
       << "params.lambda=" << format_double(c.params.lambda) << '\n'
       << "params.dim=" << c.params.dim << '\n'
       << "packet.q=" << render_vector(c.packet.q) << '\n'
       << "packet.p=" << render_vector(c.packet.p) << '\n'
       << "packet.sigma_q2=" << format_double(c.packet.sigma_q2) << '\n'
       << "run.dt=" << format_double(c.run.dt) << '\n'
       << "run.t_end=" << format_double(c.run.t_end) << '\n'
       << "run.seed=" << c.run.seed << '\n'
       << "run.n_traj=" << c.run.n_traj << '\n'
       << "run.record_every=" << c.run.record_every << '\n'
       << "run.workers=" << c.run.workers << '\n';
    if (c.grid.x_min) os << "grid.x_min=" << format_double(*c.grid.x_min) << '\n';
    if (c.grid.x_max) os << "grid.x_max=" << format_double(*c.grid.x_max) << '\n';
    os << "grid.n_points=" << c.grid.n_points << '\n'
       << "grid.snapshot_every=" << c.grid.snapshot_every << '\n'
       << "riccati.t_end=" << format_double(c.riccati_t_end) << '\n'
       << "compare.tolerance=" << format_double(c.compare_tolerance) << '\n'
       << "outputs.dir=" << c.outputs.dir << '\n'
       << "outputs.record_w=" << (c.outputs.record_w ? "true" : "false") << '\n';
    return os.str();
}

GridSpec resolve_grid(const Config& c) {
    const PhysParams& pp = c.params;
    const double q = c.packet.q[0];
    const double p = c.packet.p[0];
    const double t_end = c.run.t_end;
    const double sigma = std::sqrt(c.packet.sigma_q2);

    double width = sigma;
    double diffusive = 0.0;
    if (pp.lambda > 0.0) {
        width = std::max(width, std::sqrt(asymptotic_dispersions(pp).tau_q2));
        // Four standard deviations of the noise-driven drift of the mean.
        diffusive = 4.0 * pp.hbar * std::sqrt(0.5 * pp.lambda * t_end) * t_end / (pp.m * std::sqrt(3.0));
    } else {
        const double spread = pp.hbar * t_end / (2.0 * pp.m * c.packet.sigma_q2);
        width = sigma * std::sqrt(1.0 + spread * spread);
    }
    const double ballistic = std::abs(p) * t_end / (2.0 * pp.m);
    const double center = q + p * t_end / (2.0 * pp.m);
    const double half = 20.0 * width + ballistic + diffusive;
    return make_grid_spec(c.grid.x_min.value_or(center - half), c.grid.x_max.value_or(center + half),
                          c.grid.n_points);
}

}  // namespace qfilter
