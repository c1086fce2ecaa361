// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids
//
// Config-driven experiment runner. Subcommands: spark | identify | necessity
// | cover. Flags override [section] entries of the key=value config file.
// Exit codes: 0 ok, 2 config error, 3 budget exceeded, 4 rank deficient,
// 5 plan not overspread, 6 no cover found, 7 packing failed.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spreadid/errors.hpp"
#include "spreadid/geometry.hpp"
#include "spreadid/ident.hpp"
#include "spreadid/linalg.hpp"
#include "spreadid/necessity.hpp"
#include "spreadid/rng.hpp"
#include "spreadid/spark.hpp"

namespace fs = std::filesystem;
using namespace spreadid;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Section = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::map<std::string, Section> parse_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::map<std::string, Section> sections;
    std::string line, current = "";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            current = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key = value");
        sections[current][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return sections;
}

// typed getters; flag overrides (when set) win over config entries
class Params {
  public:
    Params(Section section, fs::path base) : kv_(std::move(section)), base_(std::move(base)) {}

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }
    std::string str_required(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing config key: " + key);
        return it->second;
    }
    long long integer(const std::string& key, long long fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            size_t pos = 0;
            const long long v = std::stoll(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
        }
    }
    double real(const std::string& key, double fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' is not a number: " + it->second);
        }
    }
    std::vector<int> int_list(const std::string& key, const std::vector<int>& fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::vector<int> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                out.push_back(std::stoi(trim(item)));
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "' is not an int list");
            }
        }
        if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
        return out;
    }
    fs::path resolve(const std::string& rel) const {
        fs::path p(rel);
        return p.is_absolute() ? p : base_ / p;
    }

  private:
    Section kv_;
    fs::path base_;
};

struct Csv {
    explicit Csv(const fs::path& path) : out(path) {
        if (!out) throw ConfigError("cannot open output file: " + path.string());
        out.precision(17);
    }
    template <typename... Args>
    void row(const Args&... args) {
        bool first = true;
        ((out << (first ? "" : ","), out << args, first = false), ...);
        out << '\n';
    }
    std::ofstream out;
};

std::string cells_to_string(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ';';
        s += std::to_string(v[i]);
    }
    return s;
}

// plan file: "M N K L" header, optional "offsets ..." line, then per
// subchannel "sub m n count" followed by count "cm cn" lines
geom::MimoSupportPlan read_plan(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open plan file: " + path.string());
    int m = 0, n = 0, k = 0, l = 0;
    if (!(in >> m >> n >> k >> l)) throw ConfigError("plan: expected 'M N K L' header");
    if (m < 1 || n < 1 || k < 1 || l < 1) throw ConfigError("plan: bad dimensions");
    std::vector<geom::GridSupport> supports(m * n, geom::GridSupport(k, l));
    std::vector<int> offsets;
    std::string tok;
    while (in >> tok) {
        if (tok == "offsets") {
            offsets.resize(n);
            for (int i = 0; i < n; ++i) {
                if (!(in >> offsets[i])) throw ConfigError("plan: truncated offsets line");
            }
        } else if (tok == "sub") {
            int sm = 0, sn = 0, count = 0;
            if (!(in >> sm >> sn >> count)) throw ConfigError("plan: malformed sub header");
            if (sm < 0 || sm >= m || sn < 0 || sn >= n) throw ConfigError("plan: sub out of range");
            for (int t = 0; t < count; ++t) {
                int cm = 0, cn = 0;
                if (!(in >> cm >> cn)) throw ConfigError("plan: truncated cell list");
                supports[sm * n + sn].cells.insert({mod(cm, k), mod(cn, l)});
            }
        } else {
            throw ConfigError("plan: unexpected token '" + tok + "'");
        }
    }
    if (offsets.empty()) return geom::pack_offsets(supports, m, n);

    geom::MimoSupportPlan plan;
    plan.M = m;
    plan.N = n;
    plan.K = k;
    plan.L = l;
    plan.supports = supports;
    plan.offsets = offsets;
    for (int row = 0; row < m; ++row) {
        geom::GridSupport merged(k, l);
        size_t expect = 0;
        for (int col = 0; col < n; ++col) {
            const geom::GridSupport shifted = geom::shift_freq(supports[row * n + col], offsets[col]);
            expect += shifted.cells.size();
            merged.cells.insert(shifted.cells.begin(), shifted.cells.end());
        }
        if (merged.cells.size() != expect)
            throw PackingFailed("plan offsets do not separate row " + std::to_string(row));
        plan.merged.push_back(std::move(merged));
    }
    return plan;
}

// ---------------------------------------------------------------------------

int run_spark(const Params& p, uint64_t seed, const fs::path& out_dir) {
    const int l = static_cast<int>(p.integer("L", 5));
    const int k = static_cast<int>(p.integer("K", 1));
    const std::string mode_str = p.str("mode", "exhaustive");
    if (mode_str != "exhaustive" && mode_str != "sampled")
        throw ConfigError("spark: mode must be exhaustive or sampled");
    const auto mode =
        mode_str == "exhaustive" ? spark::SparkMode::exhaustive : spark::SparkMode::sampled;
    const uint64_t budget = static_cast<uint64_t>(p.integer("budget", 100000));
    const int trials = static_cast<int>(p.integer("trials", 10));

    if (!spark::is_prime(l)) std::fprintf(stderr, "warning: L = %d is not prime\n", l);

    auto [c, rep] = spark::search_identifier(l, k, trials, seed, mode, budget);
    const spark::IdentMatrix a = spark::build_A(c, k);
    const double threshold = 1e-10 * linalg::fro_norm(a.A);

    Csv report(out_dir / "spark_report.csv");
    report.row("L", "K", "mode", "trials", "subsets_checked", "min_sigma_min", "threshold",
               "witness");
    report.row(l, k, mode_str, trials, rep.subsets_checked, rep.min_sigma_min, threshold,
               cells_to_string(rep.witness));

    if (mode == spark::SparkMode::exhaustive) {
        Csv subsets(out_dir / "spark_subsets.csv");
        subsets.row("subset_index", "columns", "sigma_min");
        uint64_t idx = 0;
        spark::full_spark_check(c, k, mode, budget, seed,
                                [&](const std::vector<int>& j, double s) {
                                    subsets.row(idx, cells_to_string(j), s);
                                    ++idx;
                                });
    }

    const bool pass = rep.min_sigma_min > threshold;
    std::printf("spark: L=%d K=%d %s subsets=%llu min_sigma_min=%.6g threshold=%.3g -> %s\n", l,
                k, mode_str.c_str(), static_cast<unsigned long long>(rep.subsets_checked),
                rep.min_sigma_min, threshold, pass ? "full spark" : "NOT full spark");
    return pass ? 0 : 1;
}

int run_identify(const Params& p, uint64_t seed, const fs::path& out_dir) {
    const geom::MimoSupportPlan plan = read_plan(p.resolve(p.str_required("plan")));
    const int trials = static_cast<int>(p.integer("trials", 100));
    const double noise = p.real("noise", 0.0);
    const int search_trials = static_cast<int>(p.integer("search_trials", 10));
    const uint64_t budget = static_cast<uint64_t>(p.integer("budget", 100000));

    const auto mode = spark::binomial(plan.K * plan.L, plan.L) <= budget
                          ? spark::SparkMode::exhaustive
                          : spark::SparkMode::sampled;
    auto [c, rep] = spark::search_identifier(plan.L, plan.K, search_trials,
                                             Rng::stream(seed, 1).u64(), mode, budget);
    const ident::PilotSet pilot{c, plan.K, plan.offsets};

    Csv csv(out_dir / "identify_trials.csv");
    csv.row("trial", "m", "n", "cell_m", "cell_n", "re", "im", "residual");

    double worst_rel = 0.0;
    double a_est = 0.0, b_est = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const ident::MimoChannel ch =
            ident::random_channel(plan, Rng::stream(seed, 1000 + trial));
        const auto y = ident::simulate_output(ch, pilot, noise, Rng::stream(seed, 5000 + trial));
        const ident::IdentificationResult res = ident::recover(y, plan, c, plan.K);
        a_est = res.A_est;
        b_est = res.B_est;

        double num = 0.0, den = 0.0;
        for (int m = 0; m < plan.M; ++m) {
            for (int n = 0; n < plan.N; ++n) {
                const CVec& rec = res.recovered[m * plan.N + n];
                const CVec& truth = ch.coeffs[m * plan.N + n];
                int idx = 0;
                for (const geom::Cell& cell : plan.support(m, n).cells) {
                    csv.row(trial, m, n, cell.first, cell.second, rec[idx].real(),
                            rec[idx].imag(), res.residual[m]);
                    num += std::norm(rec[idx] - truth[idx]);
                    den += std::norm(truth[idx]);
                    ++idx;
                }
            }
        }
        worst_rel = std::max(worst_rel, den > 0 ? std::sqrt(num / den) : std::sqrt(num));
    }

    Csv summary(out_dir / "identify_summary.csv");
    summary.row("trials", "noise", "worst_rel_error", "A_est", "B_est");
    summary.row(trials, noise, worst_rel, a_est, b_est);

    std::printf("identify: %d trials noise=%.6g worst_rel_error=%.6g A_est=%.6g B_est=%.6g\n",
                trials, noise, worst_rel, a_est, b_est);
    if (noise == 0.0 && worst_rel > 1e-10) return 1;
    return 0;
}

int run_necessity(const Params& p, uint64_t seed, const fs::path& out_dir) {
    const std::string experiment = p.str("experiment", "slanted");
    if (experiment == "slanted") {
        necessity::SlantedMatrixSpec spec;
        spec.lambda = p.real("lambda", 2.0);
        spec.poly_degree = static_cast<int>(p.integer("poly_degree", 1));
        spec.decay_power = static_cast<int>(p.integer("decay_power", 4));
        const std::vector<int> k1s = p.int_list("k1_list", {1, 2, 3, 4});

        Csv curve(out_dir / "necessity_curve.csv");
        curve.row("k1", "section_rows", "section_cols", "norm_mx", "bound_rhs");
        bool decreasing = true, dominated = true;
        double prev = std::numeric_limits<double>::infinity();
        for (int k1 : k1s) {
            spec.k1 = k1;
            const necessity::KernelVectorResult res = necessity::kernel_vector(spec);
            const int nt = res.ntilde_radius, n = res.n_radius;
            curve.row(k1, (2 * nt + 1) * (2 * nt + 1), (2 * n + 1) * (2 * n + 1), res.norm_mx,
                      res.bound);
            decreasing = decreasing && res.norm_mx < prev;
            dominated = dominated && res.norm_mx * res.norm_mx <= res.bound;
            prev = res.norm_mx;
        }

        Csv tails(out_dir / "necessity_tails.csv");
        tails.row("k1", "tail_sum");
        const std::vector<double> ts =
            necessity::tail_sum(spec.decay_power, spec.poly_degree, k1s);
        for (size_t i = 0; i < k1s.size(); ++i) tails.row(k1s[i], ts[i]);

        std::printf("necessity slanted: norm_Mx %s, tail bound %s\n",
                    decreasing ? "strictly decreasing" : "NOT decreasing",
                    dominated ? "dominates" : "VIOLATED");
        return (decreasing && dominated) ? 0 : 1;
    }
    if (experiment == "composition") {
        const geom::MimoSupportPlan plan = read_plan(p.resolve(p.str_required("plan")));
        if (plan.M != 1) throw ConfigError("composition: plan must be MISO (M = 1)");
        necessity::CompositionSpec spec;
        spec.P = static_cast<int>(p.integer("P", 300));
        spec.K = plan.K;
        spec.L = plan.L;
        spec.lambda = p.real("lambda", 1.05);
        spec.input_offsets = plan.offsets;
        for (int n = 0; n < plan.N; ++n) {
            const geom::GridSupport shifted = geom::shift_freq(plan.support(0, n), plan.offsets[n]);
            for (const geom::Cell& cell : shifted.cells)
                spec.cells.push_back({cell.first, cell.second, n});
        }
        spec.analysis_j = static_cast<int>(p.integer("analysis_j", 0));
        const std::vector<int> radii = p.int_list("sections", {1, 2, 3});
        spec.sections.clear();
        for (int r : radii) spec.sections.push_back({r, r});
        const int search_trials = static_cast<int>(p.integer("search_trials", 10));
        spec.c = spark::search_identifier(plan.L, plan.K, search_trials,
                                          Rng::stream(seed, 2).u64())
                     .first;

        const necessity::CompositionCurve curve = necessity::composition_instability(spec);

        Csv csv(out_dir / "necessity_curve.csv");
        csv.row("section_size", "sigma_min", "sigma_max", "bound_rhs");
        bool decreasing = true;
        for (size_t i = 0; i < curve.section_cols.size(); ++i) {
            csv.row(curve.section_cols[i], curve.sigma_min[i], curve.sigma_max[i],
                    1e-3 * curve.sigma_max[i]);
            if (i > 0) decreasing = decreasing && curve.sigma_min[i] < curve.sigma_min[i - 1];
        }
        const bool collapsed = curve.sigma_min.back() < 1e-3 * curve.sigma_max.back();
        std::printf("necessity composition: sigma_min %s, final ratio %.3e -> %s\n",
                    decreasing ? "decreasing" : "NOT decreasing",
                    curve.sigma_min.back() / curve.sigma_max.back(),
                    collapsed ? "instability" : "no collapse");
        return (decreasing && collapsed) ? 0 : 1;
    }
    throw ConfigError("necessity: experiment must be slanted or composition");
}

int run_cover(const Params& p, uint64_t /*seed*/, const fs::path& out_dir) {
    // rects = row1col1,row1col2 ; row2col1,row2col2
    const std::string spec = p.str_required("rects");
    std::vector<std::vector<std::string>> grid;
    std::stringstream rows(spec);
    std::string row;
    while (std::getline(rows, row, ';')) {
        std::vector<std::string> cols;
        std::stringstream cs(row);
        std::string col;
        while (std::getline(cs, col, ',')) cols.push_back(trim(col));
        if (cols.empty()) throw ConfigError("cover: empty row in rects");
        grid.push_back(cols);
    }
    const int m = static_cast<int>(grid.size());
    const int n = static_cast<int>(grid[0].size());
    for (const auto& g : grid)
        if (static_cast<int>(g.size()) != n) throw ConfigError("cover: ragged rects grid");

    std::vector<geom::RectUnion> unions;
    for (const auto& grow : grid) {
        for (const std::string& file : grow) {
            std::ifstream in(p.resolve(file));
            if (!in) throw ConfigError("cover: cannot open " + file);
            unions.push_back(geom::read_rect_union(in));
        }
    }

    const int k_max = static_cast<int>(p.integer("K_max", 10));
    const int l_max = static_cast<int>(p.integer("L_max", 101));
    const geom::CoverResult res = geom::best_cover(unions, k_max, l_max, m, n);
    const geom::MimoSupportPlan plan = geom::pack_offsets(res.covers, m, n);

    Csv csv(out_dir / "cover_report.csv");
    csv.row("m", "n", "K", "L", "cells", "measure", "offset");
    for (int mm = 0; mm < m; ++mm)
        for (int nn = 0; nn < n; ++nn)
            csv.row(mm, nn, res.K, res.L, res.covers[mm * n + nn].cells.size(),
                    geom::measure(res.covers[mm * n + nn]), plan.offsets[nn]);
    for (int mm = 0; mm < m; ++mm) {
        for (int nn = 0; nn < n; ++nn) {
            std::ofstream gs(out_dir / ("cover_" + std::to_string(mm) + "_" +
                                        std::to_string(nn) + ".txt"));
            geom::write_text(gs, res.covers[mm * n + nn]);
        }
    }

    std::printf("cover: K=%d L=%d offsets=", res.K, res.L);
    for (int nn = 0; nn < n; ++nn) std::printf("%d ", plan.offsets[nn]);
    std::printf("\n");
    for (int mm = 0; mm < m; ++mm) {
        double sum = 0.0;
        for (int nn = 0; nn < n; ++nn) sum += geom::measure(res.covers[mm * n + nn]);
        std::printf("  row %d cover measure %.6g\n", mm, sum);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite time-frequency channel identification experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::optional<uint64_t> seed_flag;
    std::optional<long long> trials_flag;
    std::optional<double> noise_flag;
    std::optional<int> l_flag, k_flag;
    std::optional<std::string> mode_flag, plan_flag, experiment_flag;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--seed", seed_flag, "master 64-bit seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--trials", trials_flag, "trial count");
        sub->add_option("--noise", noise_flag, "noise sigma");
    };

    CLI::App* sp = app.add_subcommand("spark", "full-spark certification of A(c)");
    add_common(sp);
    sp->add_option("--L", l_flag, "sequence period (prime recommended)");
    sp->add_option("--K", k_flag, "number of blocks");
    sp->add_option("--mode", mode_flag, "exhaustive or sampled");

    CLI::App* id = app.add_subcommand("identify", "pilot recovery experiment");
    add_common(id);
    id->add_option("--plan", plan_flag, "support plan file");

    CLI::App* ne = app.add_subcommand("necessity", "instability experiments");
    add_common(ne);
    ne->add_option("--experiment", experiment_flag, "slanted or composition");
    ne->add_option("--plan", plan_flag, "support plan file (composition)");

    CLI::App* co = app.add_subcommand("cover", "grid covers for rectangle unions");
    add_common(co);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        Section section;
        fs::path base = fs::current_path();
        if (!config_path.empty()) {
            const auto sections = parse_config(config_path);
            if (auto it = sections.find(sub); it != sections.end()) section = it->second;
            base = fs::absolute(fs::path(config_path)).parent_path();
        }
        Params params(section, base);
        if (l_flag) params.set("L", std::to_string(*l_flag));
        if (k_flag) params.set("K", std::to_string(*k_flag));
        if (mode_flag) params.set("mode", *mode_flag);
        if (plan_flag) params.set("plan", *plan_flag);
        if (experiment_flag) params.set("experiment", *experiment_flag);
        if (trials_flag) params.set("trials", std::to_string(*trials_flag));
        if (noise_flag) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", *noise_flag);
            params.set("noise", buf);
        }
        const uint64_t seed = seed_flag.value_or(
            static_cast<uint64_t>(params.integer("seed", 20260809)));

        fs::create_directories(out_dir);

        if (sub == "spark") return run_spark(params, seed, out_dir);
        if (sub == "identify") return run_identify(params, seed, out_dir);
        if (sub == "necessity") return run_necessity(params, seed, out_dir);
        if (sub == "cover") return run_cover(params, seed, out_dir);
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const BudgetExceeded& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const RankDeficient& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const PlanNotOverspread& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const NoCoverFound& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 6;
    } catch (const PackingFailed& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 7;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
