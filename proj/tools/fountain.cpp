// fountain -- command-line front end for the fountain-code library.
//
// Subcommands:
//   simulate   Monte Carlo failure-rate sweep over a (distribution, q,
//              overhead) grid; writes CSV and optionally a gnuplot script.
//   analytic   closed-form random-linear failure curve on the same grid,
//              written with the same CSV schema.
//   dist dump  print a degree distribution as two columns.
//   roundtrip  encode, serialize, parse back, decode, and compare.
//
// Exit codes: 0 on success, 1 for usage errors (bad flags, bad config
// values), 2 for runtime failures (I/O, internal errors).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fountain/analytic.hpp"
#include "fountain/codec.hpp"
#include "fountain/decode.hpp"
#include "fountain/degree.hpp"
#include "fountain/gf.hpp"
#include "fountain/rng.hpp"
#include "fountain/simulate.hpp"

namespace {

using namespace fountain;

// --- small parsing helpers (full-string, so "12x" is rejected) -------------

std::uint64_t to_u64(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + what + ": '" + s + "'");
    }
}

std::uint32_t to_u32(const std::string& s, const std::string& what) {
    const std::uint64_t v = to_u64(s, what);
    if (v > 0xffffffffull)
        throw std::invalid_argument(what + " out of range: '" + s + "'");
    return static_cast<std::uint32_t>(v);
}

double to_f64(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for " + what + ": '" + s + "'");
    }
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Splits a distribution list on top-level commas only, so
// "robust(0.05,0.01),raptor" yields two tokens.
std::vector<std::string> split_dist_list(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    int depth = 0;
    for (char ch : text) {
        if (ch == '(')
            ++depth;
        else if (ch == ')')
            --depth;
        if (ch == ',' && depth == 0) {
            if (!trim(current).empty())
                tokens.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    if (!trim(current).empty())
        tokens.push_back(trim(current));
    return tokens;
}

std::vector<std::uint32_t> parse_q_list(const std::string& text) {
    std::vector<std::uint32_t> qs;
    std::istringstream in(text);
    std::string field;
    while (std::getline(in, field, ','))
        if (!trim(field).empty())
            qs.push_back(to_u32(trim(field), "q"));
    if (qs.empty())
        throw std::invalid_argument("empty q list");
    return qs;
}

DecodeMode parse_mode(const std::string& text) {
    if (text == "square")
        return DecodeMode::SquareReplace;
    if (text == "rect")
        return DecodeMode::Rectangular;
    throw std::invalid_argument("mode must be 'square' or 'rect', got '" + text + "'");
}

TailMode parse_tail_mode(const std::string& text) {
    if (text == "per-symbol")
        return TailMode::PerSymbol;
    if (text == "per-session")
        return TailMode::PerSession;
    throw std::invalid_argument("tail-mode must be 'per-symbol' or 'per-session', got '" +
                                text + "'");
}

// --- flat "key = value" config files ---------------------------------------

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read config file '" + path + "'");
    static const char* known[] = {"k",    "q",    "dist",      "eps-max", "eps-step",
                                  "trials", "seed", "mode",    "tail-mode", "threads",
                                  "out",  "plot"};
    std::map<std::string, std::string> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty())
            continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        values[key] = value;
    }
    return values;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string config_path;
    std::string k, q, dist, eps_max, eps_step, trials, seed, mode, tail_mode, threads;
    std::string out, plot;
};

int run_simulate(const SimulateArgs& args, const CLI::App& cmd) {
    std::map<std::string, std::string> file;
    if (cmd.count("--config"))
        file = read_config_file(args.config_path);

    // Precedence: explicit flag, then config file entry, then default.
    auto pick = [&](const char* flag, const std::string& cli_value,
                    const char* key) -> std::string {
        if (cmd.count(flag))
            return cli_value;
        const auto it = file.find(key);
        return it == file.end() ? std::string() : it->second;
    };

    ExperimentConfig cfg;
    std::string v;
    if (!(v = pick("--k", args.k, "k")).empty())
        cfg.K = to_u32(v, "k");
    if (!(v = pick("--q", args.q, "q")).empty())
        cfg.q_list = parse_q_list(v);
    if (!(v = pick("--eps-max", args.eps_max, "eps-max")).empty())
        cfg.eps_max = to_f64(v, "eps-max");
    if (!(v = pick("--eps-step", args.eps_step, "eps-step")).empty())
        cfg.eps_step = to_f64(v, "eps-step");
    if (!(v = pick("--trials", args.trials, "trials")).empty())
        cfg.trials = to_u32(v, "trials");
    if (!(v = pick("--seed", args.seed, "seed")).empty())
        cfg.seed = to_u64(v, "seed");
    if (!(v = pick("--mode", args.mode, "mode")).empty())
        cfg.decode_mode = parse_mode(v);
    if (!(v = pick("--threads", args.threads, "threads")).empty())
        cfg.threads = to_u32(v, "threads");

    TailMode tail = TailMode::PerSymbol;
    bool tail_given = false;
    if (!(v = pick("--tail-mode", args.tail_mode, "tail-mode")).empty()) {
        tail = parse_tail_mode(v);
        tail_given = true;
    }

    if (!(v = pick("--dist", args.dist, "dist")).empty()) {
        cfg.distributions.clear();
        for (const std::string& token : split_dist_list(v)) {
            DistSpec spec = DistSpec::parse(token);
            // A bare "novel" token inherits --tail-mode; explicit
            // novel-per-* suffixes stand on their own.
            if (spec.kind == DistKind::Novel && token.rfind("novel-per-", 0) != 0)
                spec.tail_mode = tail;
            cfg.distributions.push_back(spec);
        }
        if (cfg.distributions.empty())
            throw std::invalid_argument("empty distribution list");
    } else if (tail_given) {
        for (DistSpec& spec : cfg.distributions)
            if (spec.kind == DistKind::Novel)
                spec.tail_mode = tail;
    }

    const std::string out_path = pick("--out", args.out, "out");
    if (out_path.empty())
        throw std::invalid_argument("simulate needs an output CSV path (--out)");
    const std::string plot_path = pick("--plot", args.plot, "plot");

    cfg.validate();
    const ExperimentResult res = run_experiment(cfg);
    write_csv_file(res.rows, out_path);
    if (!plot_path.empty())
        emit_plot_script_file(res.rows, out_path, plot_path);

    std::cerr << "wrote " << res.rows.size() << " rows to " << out_path;
    if (!plot_path.empty())
        std::cerr << " and a plot script to " << plot_path;
    std::cerr << "\n";
    if (res.mismatched_symbols != 0) {
        std::cerr << "internal error: " << res.mismatched_symbols
                  << " recovered symbols disagreed with their sources\n";
        return 2;
    }
    return 0;
}

// --- analytic ---------------------------------------------------------------

int run_analytic(std::uint32_t K, const std::string& q_text, double eps_max,
                 double eps_step, const std::string& out_path) {
    ExperimentConfig grid; // reuse only its epsilon grid construction
    grid.eps_max = eps_max;
    grid.eps_step = eps_step;
    if (eps_max < 0.0 || (eps_step <= 0.0 && eps_max > 0.0))
        throw std::invalid_argument("bad overhead grid");

    std::vector<ResultRow> rows;
    for (std::uint32_t q : parse_q_list(q_text)) {
        for (const OverheadPoint& pt : failure_curve(K, q, grid.epsilon_grid())) {
            ResultRow row;
            row.distribution = "random-linear-analytic";
            row.q = q;
            row.K = K;
            row.epsilon = pt.epsilon;
            row.n = pt.n;
            row.trials = 0;
            row.failures = 0;
            row.failure_rate = pt.F;
            row.std_err = 0.0;
            row.decode_mode = "analytic";
            row.seed = 0;
            rows.push_back(std::move(row));
        }
    }
    write_csv_file(rows, out_path);
    std::cerr << "wrote " << rows.size() << " rows to " << out_path << "\n";
    return 0;
}

// --- dist dump ---------------------------------------------------------------

int run_dist_dump(const std::string& name, std::uint32_t K, double c, double delta,
                  std::uint32_t q, std::uint64_t seed, bool seed_given) {
    DegreePmf pmf;
    if (name == "ideal") {
        pmf = ideal_soliton(K);
    } else if (name == "robust") {
        pmf = robust_soliton(RobustSolitonParams(K, c, delta));
    } else if (name == "raptor") {
        pmf = raptor_omega(K);
    } else if (name == "novel") {
        if (q == 0)
            throw std::invalid_argument("the novel distribution needs --q");
        Rng rng(seed);
        pmf = novel_omega(q, K, seed_given ? TailMode::PerSession : TailMode::PerSymbol,
                          rng);
    } else {
        throw std::invalid_argument("unknown distribution name '" + name +
                                    "' (expected ideal, robust, raptor, or novel)");
    }
    for (std::size_t i = 0; i < pmf.degrees.size(); ++i)
        std::printf("%u %.9f\n", pmf.degrees[i], pmf.probs[i]);
    return 0;
}

// --- roundtrip ---------------------------------------------------------------

int run_roundtrip(std::uint32_t K, std::uint32_t q, const std::string& dist_text,
                  std::int64_t n, std::uint64_t seed) {
    if (n < 1)
        throw std::invalid_argument("n must be >= 1");
    const Field field(q);
    const DistSpec dist = DistSpec::parse(dist_text);

    Rng rng(seed);
    const SourceBlock block = SourceBlock::random(K, 1, field, rng);

    DegreePmf pmf;
    switch (dist.kind) {
    case DistKind::RobustSoliton:
        pmf = robust_soliton(RobustSolitonParams(K, dist.c, dist.delta));
        break;
    case DistKind::Raptor:
        pmf = raptor_omega(K);
        break;
    case DistKind::Novel:
        pmf = novel_omega(q, K, dist.tail_mode, rng);
        break;
    case DistKind::RandomLinear:
        break;
    }

    std::vector<EncodedSymbol> received;
    std::uint64_t parse_diffs = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        EncodedSymbol sym = dist.kind == DistKind::RandomLinear
                                ? encode_random_linear(block, field, rng)
                                : encode_lt(block, pmf, field, rng);
        const std::string line = to_line(sym);
        EncodedSymbol back = parse_line(line);
        if (back.degree != sym.degree || back.indices != sym.indices ||
            back.coefficients != sym.coefficients || back.payload != sym.payload)
            ++parse_diffs;
        received.push_back(std::move(back));
    }
    if (parse_diffs != 0)
        throw std::runtime_error("serialization corrupted " + std::to_string(parse_diffs) +
                                 " symbols");

    const DecodeReport report = ge_decode(LinearSystem::from_symbols(received, K, field));
    std::printf("roundtrip: K=%u q=%u dist=%s n=%lld seed=%llu\n", K, q,
                dist.label().c_str(), static_cast<long long>(n),
                static_cast<unsigned long long>(seed));
    std::printf("serialized %lld symbols, parse-back identical\n",
                static_cast<long long>(n));
    std::printf("decode: %s\n", decode_status_name(report.status));
    if (report.success()) {
        std::uint32_t mism = 0;
        for (std::uint32_t i = 0; i < K; ++i)
            mism += report.recovered[i] != block.symbols[i];
        std::printf("mismatched symbols: %u\n", mism);
    } else {
        std::printf("mismatched symbols: n/a (resolved %u of %u)\n", report.pivot_count,
                    K);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rateless fountain codes over GF(q): simulation and analysis"};
    app.require_subcommand(1);

    // simulate
    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo failure-rate sweep");
    simulate->add_option("--config", sim.config_path, "flat key = value config file");
    simulate->add_option("--k", sim.k, "source symbols per block (default 100)");
    simulate->add_option("--q", sim.q, "comma-separated field orders (default 4,8,16,32)");
    simulate->add_option("--dist", sim.dist,
                         "comma-separated distributions: random-linear, raptor, novel, "
                         "robust, robust(DELTA), robust(C,DELTA)");
    simulate->add_option("--eps-max", sim.eps_max, "largest overhead (default 0.05)");
    simulate->add_option("--eps-step", sim.eps_step, "overhead step (default 0.01)");
    simulate->add_option("--trials", sim.trials, "trials per grid point (default 10000)");
    simulate->add_option("--seed", sim.seed, "master seed (default 1)");
    simulate->add_option("--mode", sim.mode, "decoder: square | rect (default square)");
    simulate->add_option("--tail-mode", sim.tail_mode,
                         "novel tail: per-symbol | per-session (default per-symbol)");
    simulate->add_option("--threads", sim.threads, "worker threads (default 1)");
    simulate->add_option("--out", sim.out, "output CSV path");
    simulate->add_option("--plot", sim.plot, "also write a gnuplot script here");

    // analytic
    std::uint32_t an_k = 100;
    std::string an_q = "4,8,16,32";
    double an_eps_max = 0.05, an_eps_step = 0.01;
    std::string an_out;
    CLI::App* analytic =
        app.add_subcommand("analytic", "closed-form random-linear failure curve");
    analytic->add_option("--k", an_k, "source symbols per block")->required();
    analytic->add_option("--q", an_q, "comma-separated field orders")->required();
    analytic->add_option("--eps-max", an_eps_max, "largest overhead")->required();
    analytic->add_option("--eps-step", an_eps_step, "overhead step")->required();
    analytic->add_option("--out", an_out, "output CSV path")->required();

    // dist dump
    CLI::App* dist = app.add_subcommand("dist", "degree distribution utilities");
    dist->require_subcommand(1);
    std::string dd_name;
    std::uint32_t dd_k = 100, dd_q = 0;
    double dd_c = 0.05, dd_delta = 0.01;
    std::uint64_t dd_seed = 0;
    CLI::App* dump = dist->add_subcommand("dump", "print degree, probability columns");
    dump->add_option("--name", dd_name, "ideal | robust | raptor | novel")->required();
    dump->add_option("--k", dd_k, "source symbols per block (default 100)");
    dump->add_option("--c", dd_c, "robust-soliton c (default 0.05)");
    dump->add_option("--delta", dd_delta, "robust-soliton delta (default 0.01)");
    dump->add_option("--q", dd_q, "field order (novel only)");
    dump->add_option("--seed", dd_seed,
                     "draw one per-session novel realization with this seed");

    // roundtrip
    std::uint32_t rt_k = 0, rt_q = 0;
    std::string rt_dist;
    std::int64_t rt_n = 0;
    std::uint64_t rt_seed = 1;
    CLI::App* roundtrip =
        app.add_subcommand("roundtrip", "encode, serialize, parse back, decode, compare");
    roundtrip->add_option("--k", rt_k, "source symbols per block")->required();
    roundtrip->add_option("--q", rt_q, "field order")->required();
    roundtrip->add_option("--dist", rt_dist, "distribution name")->required();
    roundtrip->add_option("--n", rt_n, "received symbols")->required();
    roundtrip->add_option("--seed", rt_seed, "seed (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*simulate)
            return run_simulate(sim, *simulate);
        if (*analytic)
            return run_analytic(an_k, an_q, an_eps_max, an_eps_step, an_out);
        if (*dump)
            return run_dist_dump(dd_name, dd_k, dd_c, dd_delta, dd_q, dd_seed,
                                 dump->count("--seed") > 0);
        if (*roundtrip)
            return run_roundtrip(rt_k, rt_q, rt_dist, rt_n, rt_seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
