#include "rgglab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <cctype>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "rgglab/detection.hpp"
#include "rgglab/distance_kernels.hpp"
#include "rgglab/posterior.hpp"
#include "rgglab/prng.hpp"
#include "rgglab/recovery.hpp"

namespace rgglab {

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Gen: return "gen";
        case ExperimentKind::Spectrum: return "spectrum";
        case ExperimentKind::Detect: return "detect";
        case ExperimentKind::Recover: return "recover";
        case ExperimentKind::Posterior: return "posterior";
        case ExperimentKind::Distance: return "distance";
        case ExperimentKind::Sweep: return "sweep";
    }
    return "?";
}

namespace {

std::optional<ExperimentKind> kind_from_name(const std::string& name) {
    for (ExperimentKind k : {ExperimentKind::Gen, ExperimentKind::Spectrum,
                             ExperimentKind::Detect, ExperimentKind::Recover,
                             ExperimentKind::Posterior, ExperimentKind::Distance,
                             ExperimentKind::Sweep})
        if (kind_name(k) == name) return k;
    return std::nullopt;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// "8, 16, 32" or "geom(8, 1024, 1.5)"
std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    const std::string body = trim(text);
    if (body.rfind("geom(", 0) == 0 && body.back() == ')') {
        std::istringstream iss(body.substr(5, body.size() - 6));
        std::string token;
        std::vector<double> args;
        while (std::getline(iss, token, ',')) args.push_back(std::stod(trim(token)));
        if (args.size() != 3 || args[0] < 1 || args[1] < args[0] || args[2] <= 1.0)
            throw std::invalid_argument("geom(lo,hi,ratio) needs lo>=1, hi>=lo, ratio>1");
        double x = args[0];
        int last = -1;
        while (x <= args[1] * (1.0 + 1e-12)) {
            const int v = static_cast<int>(std::lround(x));
            if (v != last) values.push_back(v);
            last = v;
            x *= args[2];
        }
        return values;
    }
    std::istringstream iss(body);
    std::string token;
    while (std::getline(iss, token, ',')) {
        const std::string t = trim(token);
        std::size_t pos = 0;
        const long v = std::stol(t, &pos);
        if (pos != t.size() || v < 1) throw std::invalid_argument("bad list entry '" + t + "'");
        values.push_back(static_cast<int>(v));
    }
    if (values.empty()) throw std::invalid_argument("empty list");
    return values;
}

}  // namespace

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    ExperimentConfig config;
    bool kind_seen = false;
    bool seed_seen = false;
    bool kernel_seen = false;
    bool n_seen = false;
    bool d_seen = false;
    auto fail = [&](int line, const std::string& message) {
        result.errors.push_back({line, message});
    };

    std::istringstream iss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(iss, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                fail(line_no, "unterminated section header");
                continue;
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            const auto kind = kind_from_name(name);
            if (!kind) {
                fail(line_no, "unknown experiment kind '" + name + "'");
                continue;
            }
            if (kind_seen) {
                fail(line_no, "multiple section headers; one experiment per config");
                continue;
            }
            config.kind = *kind;
            kind_seen = true;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(line_no, "expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!kind_seen) {
            fail(line_no, "key '" + key + "' appears before the [kind] section header");
            continue;
        }
        try {
            if (key == "kernel") {
                kernel_seen = true;
                if (value.rfind("distance(", 0) == 0)
                    parse_distance_kernel(value);  // validate
                else
                    parse_kernel(value);  // validate
                config.kernel_text = value;
            } else if (key == "n") {
                n_seen = true;
                config.n_values = parse_int_list(value);
            } else if (key == "d") {
                d_seen = true;
                config.d_values = parse_int_list(value);
            } else if (key == "trials") {
                config.trials = std::stoi(value);
                if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
            } else if (key == "alpha") {
                config.alpha = std::stod(value);
                if (!(config.alpha > 0.0 && config.alpha <= 0.5))
                    throw std::invalid_argument("alpha must lie in (0, 0.5]");
            } else if (key == "seed") {
                config.seed = std::stoull(value);
                seed_seen = true;
            } else if (key == "out") {
                config.out_dir = value;
            } else if (key == "workers") {
                config.workers = std::stoi(value);
                if (config.workers < 1) throw std::invalid_argument("workers must be >= 1");
            } else if (key == "draws") {
                config.draws = std::stoll(value);
            } else if (key == "replicates") {
                config.replicates = std::stoi(value);
            } else if (key == "timing") {
                config.timing = value == "on" || value == "true" || value == "1";
            } else {
                fail(line_no, "unknown key '" + key + "'");
            }
        } catch (const std::exception& e) {
            fail(line_no, "key '" + key + "': " + e.what());
        }
    }

    if (!kind_seen) fail(0, "missing [kind] section header");
    if (!seed_seen) fail(0, "missing required key 'seed' (no wall-clock defaults)");
    if (kind_seen && config.kind != ExperimentKind::Spectrum && !n_seen)
        fail(0, "missing required key 'n'");
    if (kind_seen && !kernel_seen) fail(0, "missing required key 'kernel'");
    if (kind_seen && !d_seen) fail(0, "missing required key 'd'");

    if (result.errors.empty()) result.config = std::move(config);
    return result;
}

namespace {

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\n") != std::string::npos;
}

std::string quote(const std::string& field) {
    if (!needs_quoting(field)) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* kCsvHeader = "kind,kernel,n,d,trial,seed,statistic,value,decision,seconds";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

bool record_less(const ExperimentRecord& a, const ExperimentRecord& b) {
    auto key = [](const ExperimentRecord& r) {
        return std::tie(r.kind, r.kernel, r.n, r.d, r.trial, r.statistic);
    };
    return key(a) < key(b);
}

}  // namespace

std::string emit_records_csv(const std::vector<ExperimentRecord>& records,
                             const std::vector<std::string>& meta_comments) {
    std::vector<ExperimentRecord> sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(), record_less);
    std::string out;
    for (const auto& comment : meta_comments) out += "# " + comment + "\n";
    out += kCsvHeader;
    out += '\n';
    for (const auto& r : sorted) {
        out += quote(r.kind);
        out += ',';
        out += quote(r.kernel);
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.d);
        out += ',';
        out += std::to_string(r.trial);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += quote(r.statistic);
        out += ',';
        out += format_double(r.value);
        out += ',';
        out += quote(r.decision);
        out += ',';
        out += format_double(r.seconds);
        out += '\n';
    }
    return out;
}

std::vector<ExperimentRecord> parse_records_csv(const std::string& text) {
    std::vector<ExperimentRecord> records;
    std::istringstream iss(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(iss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw std::runtime_error("records CSV: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 10)
            throw std::runtime_error("records CSV: expected 10 fields, got " +
                                     std::to_string(fields.size()));
        ExperimentRecord r;
        r.kind = fields[0];
        r.kernel = fields[1];
        r.n = std::stoi(fields[2]);
        r.d = std::stoi(fields[3]);
        r.trial = std::stoi(fields[4]);
        r.seed = std::stoull(fields[5]);
        r.statistic = fields[6];
        r.value = std::strtod(fields[7].c_str(), nullptr);
        r.decision = fields[8];
        r.seconds = std::strtod(fields[9].c_str(), nullptr);
        records.push_back(std::move(r));
    }
    if (!header_seen) throw std::runtime_error("records CSV: missing header");
    return records;
}

std::uint64_t derive_trial_seed(std::uint64_t master, ExperimentKind kind,
                                const std::string& kernel_text, int n, int d, int trial) {
    std::uint64_t h = master;
    h = hash_combine(h, static_cast<std::uint64_t>(kind) + 1);
    h = hash_str(h, kernel_text);
    h = hash_combine(h, static_cast<std::uint64_t>(n));
    h = hash_combine(h, static_cast<std::uint64_t>(d));
    h = hash_combine(h, static_cast<std::uint64_t>(trial));
    return h;
}

void parallel_for(int count, int workers, const std::function<void(int)>& task) {
    if (count <= 0) return;
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct Cell {
    int n = 0;
    int d = 0;
};

double elapsed_or_zero(bool timing, std::chrono::steady_clock::time_point start) {
    if (!timing) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<ExperimentRecord> run_detect_cell(const ExperimentConfig& config, Cell cell) {
    const KernelSpec kernel = parse_kernel(config.kernel_text);
    const double p = edge_density(kernel, cell.d);
    const StandardizedKernel sk = standardize(kernel, cell.d);
    const KernelSpectrum spectrum = gegenbauer_coefficients(sk, 40);
    const TriangleTheory theory = triangle_theory(spectrum, cell.n, p);
    const MotifTest test = make_test(theory, config.alpha);
    const std::string kind = kind_name(config.kind);

    std::vector<ExperimentRecord> rows;
    rows.reserve(static_cast<std::size_t>(config.trials) * 2);
    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t seed = derive_trial_seed(config.seed, config.kind,
                                                     config.kernel_text, cell.n, cell.d, trial);
        const auto start = std::chrono::steady_clock::now();
        const PointCloud cloud = sample_sphere_points(cell.n, cell.d, hash_combine(seed, 1));
        const Graph g = sample_rgg(kernel, cloud, hash_combine(seed, 2));
        const double t_rgg = signed_triangle_count(g, p);
        rows.push_back({kind, config.kernel_text, cell.n, cell.d, trial, seed, "T_rgg",
                        t_rgg, test.rejects(t_rgg) ? "RGG" : "ER",
                        elapsed_or_zero(config.timing, start)});
        const Graph g0 = sample_er(cell.n, p, hash_combine(seed, 3));
        const double t_er = signed_triangle_count(g0, p);
        rows.push_back({kind, config.kernel_text, cell.n, cell.d, trial, seed, "T_er",
                        t_er, test.rejects(t_er) ? "RGG" : "ER", 0.0});
    }
    return rows;
}

std::vector<ExperimentRecord> run_recover_cell(const ExperimentConfig& config, Cell cell) {
    const KernelSpec kernel = parse_kernel(config.kernel_text);
    const std::string kind = kind_name(config.kind);
    std::vector<ExperimentRecord> rows;
    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t seed = derive_trial_seed(config.seed, config.kind,
                                                     config.kernel_text, cell.n, cell.d, trial);
        const auto start = std::chrono::steady_clock::now();
        const RecoveryTrial r = recovery_trial(kernel, cell.n, cell.d, seed);
        const double seconds = elapsed_or_zero(config.timing, start);
        rows.push_back({kind, config.kernel_text, cell.n, cell.d, trial, seed,
                        "relative_mse", r.mse, "", seconds});
        rows.push_back({kind, config.kernel_text, cell.n, cell.d, trial, seed, "gap_d",
                        r.gap_d, "", 0.0});
        rows.push_back({kind, config.kernel_text, cell.n, cell.d, trial, seed, "gap_d1",
                        r.gap_d1, "", 0.0});
    }
    return rows;
}

std::vector<ExperimentRecord> run_posterior_cell(const ExperimentConfig& config, Cell cell) {
    const KernelSpec kernel = parse_kernel(config.kernel_text);
    const std::string kind = kind_name(config.kind);
    const std::uint64_t seed = derive_trial_seed(config.seed, config.kind,
                                                 config.kernel_text, cell.n, cell.d, 0);
    std::vector<ExperimentRecord> rows;
    const StandardizedKernel sk = standardize(kernel, cell.d);
    rows.push_back({kind, config.kernel_text, cell.n, cell.d, 0, seed,
                    "single_edge_mean_a1", single_edge_posterior_mean(sk, 1), "", 0.0});
    rows.push_back({kind, config.kernel_text, cell.n, cell.d, 0, seed,
                    "single_edge_mean_a0", single_edge_posterior_mean(sk, 0), "", 0.0});
    const G2Result g2 = g2_estimate(kernel, cell.n, cell.d, config.replicates,
                                    config.draws, seed);
    for (int rep = 0; rep < static_cast<int>(g2.replicate_estimates.size()); ++rep)
        rows.push_back({kind, config.kernel_text, cell.n, cell.d, rep, seed, "g2_replicate",
                        g2.replicate_estimates[rep], "", 0.0});
    rows.push_back({kind, config.kernel_text, cell.n, cell.d, 0, seed, "g2_mean",
                    g2.estimate, "", 0.0});
    rows.push_back({kind, config.kernel_text, cell.n, cell.d, 0, seed, "g2_se",
                    g2.std_error, "", 0.0});
    rows.push_back({kind, config.kernel_text, cell.n, cell.d, 0, seed, "ess",
                    g2.mean_ess, "", 0.0});
    return rows;
}

std::vector<ExperimentRecord> run_distance_cell(const ExperimentConfig& config, Cell cell) {
    const DistanceKernelSpec kernel = parse_distance_kernel(config.kernel_text);
    const std::string kind = kind_name(config.kind);
    const std::uint64_t seed = derive_trial_seed(config.seed, config.kind,
                                                 config.kernel_text, cell.n, cell.d, 0);
    const WedgeExperimentResult r = wedge_nonuniversality_experiment(
        kernel.gamma, kernel.beta, cell.n, cell.d, config.trials, config.alpha, seed);
    std::vector<ExperimentRecord> rows;
    for (int trial = 0; trial < static_cast<int>(r.w_values.size()); ++trial) {
        rows.push_back({kind, config.kernel_text, cell.n, cell.d, trial, seed, "W_rgg",
                        r.w_values[trial], "", 0.0});
        rows.push_back({kind, config.kernel_text, cell.n, cell.d, trial, seed, "T_rgg",
                        r.t_values[trial], "", 0.0});
        rows.push_back({kind, config.kernel_text, cell.n, cell.d, trial, seed, "W_er",
                        r.w_null_values[trial], "", 0.0});
    }
    rows.push_back({kind, config.kernel_text, cell.n, cell.d, 0, seed, "W_theory",
                    r.w_theory, "", 0.0});
    rows.push_back({kind, config.kernel_text, cell.n, cell.d, 0, seed, "W_power",
                    r.w_power, "", 0.0});
    rows.push_back({kind, config.kernel_text, cell.n, cell.d, 0, seed, "T_power",
                    r.t_power, "", 0.0});
    return rows;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
    if (config.kind == ExperimentKind::Gen || config.kind == ExperimentKind::Spectrum)
        throw std::invalid_argument("run_sweep: gen/spectrum are direct CLI commands");

    std::vector<Cell> cells;
    for (int n : config.n_values)
        for (int d : config.d_values) cells.push_back({n, d});

    std::vector<std::vector<ExperimentRecord>> per_cell(cells.size());
    std::vector<std::string> cell_errors(cells.size());
    parallel_for(static_cast<int>(cells.size()), config.workers, [&](int i) {
        try {
            switch (config.kind) {
                case ExperimentKind::Detect:
                case ExperimentKind::Sweep:
                    per_cell[i] = run_detect_cell(config, cells[i]);
                    break;
                case ExperimentKind::Recover:
                    per_cell[i] = run_recover_cell(config, cells[i]);
                    break;
                case ExperimentKind::Posterior:
                    per_cell[i] = run_posterior_cell(config, cells[i]);
                    break;
                case ExperimentKind::Distance:
                    per_cell[i] = run_distance_cell(config, cells[i]);
                    break;
                default: break;
            }
        } catch (const std::exception& e) {
            cell_errors[i] = e.what();
        }
    });

    SweepResult result;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cell_errors[i].empty()) {
            ++result.cell_failures;
            result.records.push_back({kind_name(config.kind), config.kernel_text,
                                      cells[i].n, cells[i].d, 0,
                                      derive_trial_seed(config.seed, config.kind,
                                                        config.kernel_text, cells[i].n,
                                                        cells[i].d, 0),
                                      "error", 0.0, cell_errors[i], 0.0});
            continue;
        }
        result.records.insert(result.records.end(), per_cell[i].begin(), per_cell[i].end());
    }
    std::stable_sort(result.records.begin(), result.records.end(), record_less);

    std::ostringstream summary;
    summary << kind_name(config.kind) << " sweep: " << cells.size() << " cells, "
            << result.records.size() << " rows, " << result.cell_failures << " failures";
    if (config.kind == ExperimentKind::Sweep) {
        const PowerCurves curves = curves_from_records(result.records, "T_rgg", true);
        const ThresholdFit fit = fit_threshold(curves, 0.5, true, 1000, config.seed);
        if (fit.ok) {
            summary << "; threshold exponent " << fit.exponent << " CI [" << fit.ci_lo
                    << ", " << fit.ci_hi << "]";
        } else {
            summary << "; threshold fit aborted (fewer than 3 usable n)";
        }
    }
    result.summary = summary.str();
    return result;
}

PowerCurves curves_from_records(const std::vector<ExperimentRecord>& records,
                                const std::string& statistic,
                                bool value_is_rgg_decision) {
    PowerCurves curves;
    for (const auto& r : records) {
        if (r.statistic != statistic) continue;
        const double v = value_is_rgg_decision ? (r.decision == "RGG" ? 1.0 : 0.0) : r.value;
        curves.values[r.n][r.d].push_back(v);
    }
    return curves;
}

namespace {

// Pool-adjacent-violators for a weighted non-increasing fit.
std::vector<double> isotonic_decreasing(const std::vector<double>& means,
                                        const std::vector<double>& weights) {
    struct Block {
        double sum;
        double weight;
        int count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < means.size(); ++i) {
        blocks.push_back({means[i] * weights[i], weights[i], 1});
        while (blocks.size() >= 2) {
            const auto& b = blocks.back();
            const auto& a = blocks[blocks.size() - 2];
            if (a.sum / a.weight >= b.sum / b.weight) break;  // already decreasing
            Block merged{a.sum + b.sum, a.weight + b.weight, a.count + b.count};
            blocks.pop_back();
            blocks.pop_back();
            blocks.push_back(merged);
        }
    }
    std::vector<double> fitted;
    for (const auto& b : blocks)
        fitted.insert(fitted.end(), b.count, b.sum / b.weight);
    return fitted;
}

std::optional<double> crossing_log_d(const std::vector<int>& ds,
                                     const std::vector<double>& fitted, double level) {
    for (std::size_t i = 0; i + 1 < fitted.size(); ++i) {
        const double a = fitted[i], b = fitted[i + 1];
        if ((a >= level && b < level) || (a > level && b <= level)) {
            const double la = std::log(static_cast<double>(ds[i]));
            const double lb = std::log(static_cast<double>(ds[i + 1]));
            const double frac = a == b ? 0.5 : (a - level) / (a - b);
            return la + frac * (lb - la);
        }
    }
    return std::nullopt;
}

struct FitLine {
    double slope;
    double intercept;
};

std::optional<FitLine> least_squares(const std::vector<double>& xs,
                                     const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 3) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) return std::nullopt;
    FitLine line;
    line.slope = (n * sxy - sx * sy) / denom;
    line.intercept = (sy - line.slope * sx) / n;
    return line;
}

struct CurveArrays {
    std::vector<int> ds;
    std::vector<std::vector<double>> trials;  // per d
};

std::optional<double> curve_crossing(const CurveArrays& curve, double level,
                                     bool decreasing,
                                     const std::vector<std::vector<double>>* resampled) {
    // rising curves are handled by negating both the values and the level,
    // which turns the crossing into the falling pattern
    std::vector<double> means, weights;
    for (std::size_t i = 0; i < curve.ds.size(); ++i) {
        const auto& values = resampled ? (*resampled)[i] : curve.trials[i];
        double sum = 0;
        for (double v : values) sum += v;
        const double mean = sum / static_cast<double>(values.size());
        means.push_back(decreasing ? mean : -mean);
        weights.push_back(static_cast<double>(values.size()));
    }
    const std::vector<double> fitted = isotonic_decreasing(means, weights);
    return crossing_log_d(curve.ds, fitted, decreasing ? level : -level);
}

}  // namespace

ThresholdFit fit_threshold(const PowerCurves& curves, double level, bool decreasing,
                           int bootstrap_resamples, std::uint64_t seed) {
    ThresholdFit fit;
    std::vector<int> ns;
    std::vector<CurveArrays> arrays;
    for (const auto& [n, by_d] : curves.values) {
        CurveArrays curve;
        for (const auto& [d, values] : by_d) {
            curve.ds.push_back(d);
            curve.trials.push_back(values);
        }
        ns.push_back(n);
        arrays.push_back(std::move(curve));
    }

    std::vector<double> log_n, log_d;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto crossing = curve_crossing(arrays[i], level, decreasing, nullptr);
        if (!crossing) {
            fit.skipped_n.push_back(ns[i]);
            continue;
        }
        fit.crossings.emplace_back(ns[i], std::exp(*crossing));
        log_n.push_back(std::log(static_cast<double>(ns[i])));
        log_d.push_back(*crossing);
    }
    const auto line = least_squares(log_n, log_d);
    if (!line) return fit;  // fewer than 3 usable n values
    fit.ok = true;
    fit.exponent = line->slope;
    fit.intercept = line->intercept;

    // Bootstrap over trial resampling within each (n, d) cell.
    std::vector<double> exponents;
    Prng rng(hash_combine(seed, 0xB00757ULL));
    for (int b = 0; b < bootstrap_resamples; ++b) {
        std::vector<double> bx, by;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            std::vector<std::vector<double>> resampled(arrays[i].ds.size());
            for (std::size_t j = 0; j < arrays[i].ds.size(); ++j) {
                const auto& pool = arrays[i].trials[j];
                resampled[j].resize(pool.size());
                for (std::size_t t = 0; t < pool.size(); ++t)
                    resampled[j][t] =
                        pool[static_cast<std::size_t>(rng.next_double() * pool.size())];
            }
            const auto crossing = curve_crossing(arrays[i], level, decreasing, &resampled);
            if (!crossing) continue;
            bx.push_back(std::log(static_cast<double>(ns[i])));
            by.push_back(*crossing);
        }
        const auto bline = least_squares(bx, by);
        if (bline) exponents.push_back(bline->slope);
    }
    if (!exponents.empty()) {
        std::sort(exponents.begin(), exponents.end());
        const auto at = [&](double q) {
            const double pos = q * (exponents.size() - 1);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, exponents.size() - 1);
            return exponents[lo] + (pos - lo) * (exponents[hi] - exponents[lo]);
        };
        fit.ci_lo = std::min(at(0.025), fit.exponent);
        fit.ci_hi = std::max(at(0.975), fit.exponent);
    } else {
        fit.ci_lo = fit.ci_hi = fit.exponent;
    }
    return fit;
}

namespace {

std::string slugify(const std::string& text) {
    std::string out;
    for (char c : text)
        if (std::isalnum(static_cast<unsigned char>(c))) out += c;
    return out.empty() ? "x" : out;
}

std::string render_svg(const std::vector<std::pair<double, double>>& points,
                       const std::string& title) {
    const int width = 640, height = 480, margin = 60;
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<line x1='" << margin << "' y1='" << height - margin << "' x2='"
        << width - margin << "' y2='" << height - margin << "' stroke='black'/>\n";
    svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << height - margin << "' stroke='black'/>\n";
    svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle'>" << title
        << "</text>\n";
    if (points.empty()) {
        svg << "<text x='" << width / 2 << "' y='" << height / 2
            << "' text-anchor='middle'>no data</text>\n";
        svg << "</svg>\n";
        return svg.str();
    }
    double x_lo = 1e300, x_hi = -1e300, y_lo = 0.0, y_hi = -1e300;
    for (auto [x, y] : points) {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    auto px = [&](double x) {
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2.0 * margin);
    };
    auto py = [&](double y) {
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2.0 * margin);
    };
    svg << "<polyline fill='none' stroke='steelblue' stroke-width='2' points='";
    for (auto [x, y] : points) svg << px(x) << "," << py(y) << " ";
    svg << "'/>\n";
    for (auto [x, y] : points)
        svg << "<circle cx='" << px(x) << "' cy='" << py(y)
            << "' r='3' fill='steelblue'/>\n";
    svg << "<text x='" << width - margin << "' y='" << height - margin + 32
        << "' text-anchor='end'>log2 d</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace

std::vector<std::string> emit_plots(const std::vector<ExperimentRecord>& records,
                                    const std::string& statistic,
                                    bool value_is_rgg_decision,
                                    const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    std::vector<std::string> written;

    // Group per (kind, kernel, n).
    std::map<std::tuple<std::string, std::string, int>,
             std::map<int, std::pair<double, int>>> groups;
    for (const auto& r : records) {
        if (r.statistic != statistic) continue;
        const double v = value_is_rgg_decision ? (r.decision == "RGG" ? 1.0 : 0.0) : r.value;
        auto& cell = groups[{r.kind, r.kernel, r.n}][r.d];
        cell.first += v;
        cell.second += 1;
    }

    if (groups.empty()) {
        const fs::path path = fs::path(directory) / ("plot_" + slugify(statistic) + "_empty.svg");
        std::ofstream out(path);
        out << render_svg({}, statistic + " (no data)");
        written.push_back(path.string());
        return written;
    }
    for (const auto& [key, by_d] : groups) {
        const auto& [kind, kernel, n] = key;
        std::vector<std::pair<double, double>> points;
        for (const auto& [d, acc] : by_d)
            points.emplace_back(std::log2(static_cast<double>(d)), acc.first / acc.second);
        std::ostringstream name;
        name << kind << "_" << slugify(kernel) << "_n" << n << "_" << slugify(statistic)
             << ".svg";
        const fs::path path = fs::path(directory) / name.str();
        std::ofstream out(path);
        out << render_svg(points, kind + " " + kernel + " n=" + std::to_string(n));
        written.push_back(path.string());
    }
    return written;
}

}  // namespace rgglab
