// simulate.hpp -- Monte Carlo harness: failure rate vs overhead across a
// (distribution, field order, epsilon) grid. Every trial owns a generator
// seeded purely from (master seed, distribution label, q, n, trial index),
// so trials are reproducible in isolation and aggregate counts cannot depend
// on worker count or execution order.

#pragma once

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fountain/analytic.hpp"
#include "fountain/codec.hpp"
#include "fountain/decode.hpp"
#include "fountain/degree.hpp"
#include "fountain/gf.hpp"
#include "fountain/rng.hpp"

namespace fountain {

enum class DistKind { RobustSoliton, Raptor, Novel, RandomLinear };
enum class DecodeMode { SquareReplace, Rectangular };

inline const char* decode_mode_name(DecodeMode mode) {
    return mode == DecodeMode::SquareReplace ? "square-replace" : "rectangular";
}

struct DistSpec {
    DistKind kind = DistKind::RandomLinear;
    double c = 0.05;                          // robust soliton only
    double delta = 0.01;                      // robust soliton only
    TailMode tail_mode = TailMode::PerSymbol; // randomized tail only

    std::string label() const {
        switch (kind) {
        case DistKind::RandomLinear:
            return "random-linear";
        case DistKind::Raptor:
            return "raptor";
        case DistKind::Novel:
            return std::string("novel-") + tail_mode_name(tail_mode);
        case DistKind::RobustSoliton: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "robust-soliton-c%g-d%g", c, delta);
            return buf;
        }
        }
        return "?";
    }

    // Accepts: random-linear | raptor | novel | novel-per-session |
    // robust | robust(DELTA) | robust(C,DELTA)  (robust-soliton... likewise).
    static DistSpec parse(const std::string& text) {
        DistSpec spec;
        std::string name = text, args;
        const auto open = text.find('(');
        if (open != std::string::npos) {
            if (text.back() != ')')
                throw std::invalid_argument("bad distribution '" + text + "'");
            name = text.substr(0, open);
            args = text.substr(open + 1, text.size() - open - 2);
        }
        auto parse_reals = [&args, &text]() {
            std::vector<double> vals;
            std::istringstream in(args);
            std::string field;
            while (std::getline(in, field, ',')) {
                try {
                    std::size_t pos = 0;
                    vals.push_back(std::stod(field, &pos));
                    if (pos != field.size())
                        throw std::invalid_argument(field);
                } catch (const std::exception&) {
                    throw std::invalid_argument("bad distribution argument in '" + text + "'");
                }
            }
            return vals;
        };
        if (name == "random-linear" || name == "rl") {
            spec.kind = DistKind::RandomLinear;
        } else if (name == "raptor") {
            spec.kind = DistKind::Raptor;
        } else if (name == "novel" || name == "novel-per-symbol") {
            spec.kind = DistKind::Novel;
            spec.tail_mode = TailMode::PerSymbol;
        } else if (name == "novel-per-session") {
            spec.kind = DistKind::Novel;
            spec.tail_mode = TailMode::PerSession;
        } else if (name == "robust" || name == "robust-soliton") {
            spec.kind = DistKind::RobustSoliton;
            const auto vals = parse_reals();
            if (vals.size() == 1) {
                spec.delta = vals[0];
            } else if (vals.size() == 2) {
                spec.c = vals[0];
                spec.delta = vals[1];
            } else if (!vals.empty()) {
                throw std::invalid_argument("robust takes (delta) or (c,delta): '" + text +
                                            "'");
            }
        } else {
            throw std::invalid_argument("unknown distribution '" + text + "'");
        }
        if (spec.kind != DistKind::RobustSoliton && open != std::string::npos)
            throw std::invalid_argument("distribution '" + name + "' takes no arguments");
        return spec;
    }
};

struct ExperimentConfig {
    std::uint32_t K = 100;
    std::vector<std::uint32_t> q_list = {4, 8, 16, 32};
    std::vector<DistSpec> distributions = {
        DistSpec{DistKind::RobustSoliton, 0.05, 0.01, TailMode::PerSymbol},
        DistSpec{DistKind::RobustSoliton, 0.05, 0.001, TailMode::PerSymbol},
        DistSpec{DistKind::Raptor},
        DistSpec{DistKind::Novel},
    };
    double eps_max = 0.05;
    double eps_step = 0.01;
    std::uint32_t trials = 10000;
    std::uint64_t seed = 1;
    DecodeMode decode_mode = DecodeMode::SquareReplace;
    unsigned threads = 1;

    std::vector<double> epsilon_grid() const {
        std::vector<double> grid;
        for (std::uint32_t i = 0;; ++i) {
            const double eps = i * eps_step;
            if (eps > eps_max + 1e-9)
                break;
            grid.push_back(eps);
            if (eps_step <= 0.0)
                break; // a zero step degenerates to the single point 0
        }
        return grid;
    }

    void validate() const {
        if (trials < 1)
            throw std::invalid_argument("trials must be >= 1");
        if (eps_max < 0.0)
            throw std::invalid_argument("eps-max must be >= 0");
        if (eps_step <= 0.0 && eps_max > 0.0)
            throw std::invalid_argument("eps-step must be > 0");
        if (threads < 1)
            throw std::invalid_argument("threads must be >= 1");
        if (q_list.empty())
            throw std::invalid_argument("q list is empty");
        if (distributions.empty())
            throw std::invalid_argument("distribution list is empty");
        for (std::uint32_t q : q_list) {
            Field probe(q); // throws when q is not a supported prime power
            for (const DistSpec& dist : distributions) {
                switch (dist.kind) {
                case DistKind::RobustSoliton:
                    (void)RobustSolitonParams(K, dist.c, dist.delta);
                    break;
                case DistKind::Raptor:
                    if (K < 66)
                        throw std::invalid_argument("raptor distribution needs K >= 66");
                    break;
                case DistKind::Novel:
                    if (q < 4)
                        throw std::invalid_argument(
                            "the randomized-tail distribution needs q >= 4");
                    if (K < q)
                        throw std::invalid_argument(
                            "the randomized-tail distribution needs K >= q");
                    break;
                case DistKind::RandomLinear:
                    break;
                }
            }
        }
    }
};

struct ResultRow {
    std::string distribution;
    std::uint32_t q = 0;
    std::uint32_t K = 0;
    double epsilon = 0.0;
    std::int64_t n = 0;
    std::uint32_t trials = 0;
    std::uint32_t failures = 0;
    double failure_rate = 0.0;
    double std_err = 0.0;
    std::string decode_mode;
    std::uint64_t seed = 0;
    std::string tail_mode; // empty unless the distribution randomizes its tail
};

struct TrialOutcome {
    bool decoded = false;
    std::uint32_t mismatched_symbols = 0; // recovered-vs-source diff count
};

namespace simdetail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace simdetail

// One slice of the grid: a distribution over one field at one received count.
struct TrialSlice {
    DistSpec dist;
    const Field* field = nullptr;
    std::uint32_t K = 0;
    std::int64_t n = 0;
    DecodeMode mode = DecodeMode::SquareReplace;
    const DegreePmf* pmf = nullptr; // cached; null for random-linear and
                                    // for the per-session randomized tail
};

// Runs one independent trial. Generator consumption order: source block
// fill, then (per-session tail only) the eight tail draws, then the n
// symbols, then the square-replace slot draws. The decode mode is kept out
// of the seed so both modes see identical symbol streams.
inline TrialOutcome run_trial(const TrialSlice& slice, std::uint64_t trial_index,
                              std::uint64_t master_seed) {
    const Field& f = *slice.field;
    Rng rng(seed_mix({master_seed, simdetail::fnv1a(slice.dist.label()), f.q(),
                      static_cast<std::uint64_t>(slice.n), trial_index}));
    SourceBlock block = SourceBlock::random(slice.K, 1, f, rng);

    DegreePmf session_pmf;
    const DegreePmf* pmf = slice.pmf;
    if (slice.dist.kind == DistKind::Novel && slice.dist.tail_mode == TailMode::PerSession) {
        session_pmf = novel_omega(f.q(), slice.K, TailMode::PerSession, rng);
        pmf = &session_pmf;
    }

    std::vector<EncodedSymbol> symbols;
    symbols.reserve(static_cast<std::size_t>(slice.n));
    for (std::int64_t i = 0; i < slice.n; ++i) {
        if (slice.dist.kind == DistKind::RandomLinear)
            symbols.push_back(encode_random_linear(block, f, rng));
        else
            symbols.push_back(encode_lt(block, *pmf, f, rng));
    }

    DecodeReport report;
    if (slice.mode == DecodeMode::SquareReplace)
        report = ge_square_replace(symbols, slice.K, f, rng);
    else
        report = ge_decode(LinearSystem::from_symbols(symbols, slice.K, f));

    TrialOutcome out;
    out.decoded = report.success();
    if (out.decoded)
        for (std::uint32_t k = 0; k < slice.K; ++k)
            out.mismatched_symbols += report.recovered[k] != block.symbols[k];
    return out;
}

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::uint64_t successes = 0;          // decoded trials across the grid
    std::uint64_t mismatched_symbols = 0; // roundtrip violations (must be 0)
};

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentResult result;
    const std::vector<double> grid = config.epsilon_grid();

    std::vector<Field> fields;
    fields.reserve(config.q_list.size());
    for (std::uint32_t q : config.q_list)
        fields.emplace_back(q);

    for (std::size_t qi = 0; qi < fields.size(); ++qi) {
        const Field& field = fields[qi];
        for (const DistSpec& dist : config.distributions) {
            // PMFs depend only on (distribution, q, K): hoist out of trials.
            DegreePmf cached;
            bool has_pmf = false;
            switch (dist.kind) {
            case DistKind::RobustSoliton:
                cached = robust_soliton(RobustSolitonParams(config.K, dist.c, dist.delta));
                has_pmf = true;
                break;
            case DistKind::Raptor:
                cached = raptor_omega(config.K);
                has_pmf = true;
                break;
            case DistKind::Novel:
                if (dist.tail_mode == TailMode::PerSymbol) {
                    Rng unused(0);
                    cached = novel_omega(field.q(), config.K, TailMode::PerSymbol, unused);
                    has_pmf = true;
                }
                break;
            case DistKind::RandomLinear:
                break;
            }

            for (double eps : grid) {
                TrialSlice slice;
                slice.dist = dist;
                slice.field = &field;
                slice.K = config.K;
                slice.n = std::llround(static_cast<double>(config.K) * (1.0 + eps));
                slice.mode = config.decode_mode;
                slice.pmf = has_pmf ? &cached : nullptr;

                const unsigned workers =
                    std::max(1u, std::min<unsigned>(config.threads, config.trials));
                std::vector<std::uint64_t> fail_by(workers, 0), ok_by(workers, 0),
                    mismatch_by(workers, 0);
                std::vector<std::exception_ptr> errors(workers);
                auto body = [&](unsigned w) {
                    try {
                        for (std::uint64_t t = w; t < config.trials; t += workers) {
                            const TrialOutcome out = run_trial(slice, t, config.seed);
                            if (out.decoded)
                                ++ok_by[w];
                            else
                                ++fail_by[w];
                            mismatch_by[w] += out.mismatched_symbols;
                        }
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                };
                if (workers == 1) {
                    body(0);
                } else {
                    std::vector<std::thread> pool;
                    pool.reserve(workers);
                    for (unsigned w = 0; w < workers; ++w)
                        pool.emplace_back(body, w);
                    for (auto& th : pool)
                        th.join();
                }
                std::uint64_t failures = 0;
                for (unsigned w = 0; w < workers; ++w) {
                    if (errors[w])
                        std::rethrow_exception(errors[w]);
                    failures += fail_by[w];
                    result.successes += ok_by[w];
                    result.mismatched_symbols += mismatch_by[w];
                }

                ResultRow row;
                row.distribution = dist.label();
                row.q = field.q();
                row.K = config.K;
                row.epsilon = eps;
                row.n = slice.n;
                row.trials = config.trials;
                row.failures = static_cast<std::uint32_t>(failures);
                row.failure_rate = static_cast<double>(failures) / config.trials;
                row.std_err = std::sqrt(row.failure_rate * (1.0 - row.failure_rate) /
                                        config.trials);
                row.decode_mode = decode_mode_name(config.decode_mode);
                row.seed = config.seed;
                row.tail_mode =
                    dist.kind == DistKind::Novel ? tail_mode_name(dist.tail_mode) : "";
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

inline const char* csv_header() {
    return "distribution,q,K,epsilon,n,trials,failures,failure_rate,std_err,"
           "decode_mode,seed,tail_mode";
}

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << csv_header() << '\n';
    char buf[256];
    for (const ResultRow& r : rows) {
        std::snprintf(buf, sizeof buf,
                      "%s,%u,%u,%.6g,%" PRId64 ",%u,%u,%.6g,%.6g,%s,%" PRIu64 ",%s",
                      r.distribution.c_str(), r.q, r.K, r.epsilon, r.n, r.trials,
                      r.failures, r.failure_rate, r.std_err, r.decode_mode.c_str(), r.seed,
                      r.tail_mode.c_str());
        out << buf << '\n';
    }
}

inline void write_csv_file(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(rows, out);
    if (!out.good())
        throw std::runtime_error("write failed on '" + path + "'");
}

inline std::vector<ResultRow> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != csv_header())
        throw std::invalid_argument("unrecognized CSV header");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ','))
            f.push_back(field);
        if (f.size() == 11)
            f.push_back(""); // empty trailing tail_mode
        if (f.size() != 12)
            throw std::invalid_argument("CSV row with " + std::to_string(f.size()) +
                                        " fields");
        ResultRow r;
        r.distribution = f[0];
        r.q = static_cast<std::uint32_t>(std::stoul(f[1]));
        r.K = static_cast<std::uint32_t>(std::stoul(f[2]));
        r.epsilon = std::stod(f[3]);
        r.n = std::stoll(f[4]);
        r.trials = static_cast<std::uint32_t>(std::stoul(f[5]));
        r.failures = static_cast<std::uint32_t>(std::stoul(f[6]));
        r.failure_rate = std::stod(f[7]);
        r.std_err = std::stod(f[8]);
        r.decode_mode = f[9];
        r.seed = std::stoull(f[10]);
        r.tail_mode = f[11];
        rows.push_back(std::move(r));
    }
    return rows;
}

// Gnuplot script: one panel per field order, log-scale failure rate against
// overhead, marker conventions fixed per distribution family (triangles for
// the robust-soliton variants, circle for raptor, star for the randomized
// tail, plus for random-linear; the analytic curve draws as a dashed line).
inline void emit_plot_script(const std::vector<ResultRow>& rows, const std::string& csv_path,
                             std::ostream& out) {
    if (rows.empty())
        throw std::invalid_argument("no rows to plot");
    std::vector<std::uint32_t> qs;
    std::vector<std::string> series;
    for (const ResultRow& r : rows) {
        if (std::find(qs.begin(), qs.end(), r.q) == qs.end())
            qs.push_back(r.q);
        if (std::find(series.begin(), series.end(), r.distribution) == series.end())
            series.push_back(r.distribution);
    }

    auto style_for = [robust_seen = 0](const std::string& label) mutable -> std::string {
        if (label.rfind("robust-soliton", 0) == 0)
            return "with linespoints pt " + std::string(++robust_seen == 1 ? "8" : "10");
        if (label.rfind("raptor", 0) == 0)
            return "with linespoints pt 6";
        if (label.rfind("novel", 0) == 0)
            return "with linespoints pt 3";
        if (label.rfind("random-linear-analytic", 0) == 0)
            return "with lines dashtype 2";
        return "with linespoints pt 1";
    };
    std::vector<std::string> styles;
    for (const std::string& s : series)
        styles.push_back(style_for(s));

    const int cols = qs.size() > 1 ? 2 : 1;
    const int rows_ = static_cast<int>((qs.size() + cols - 1) / cols);
    out << "# failure rate vs overhead, one panel per field order\n"
        << "set datafile separator \",\"\n"
        << "set terminal pngcairo size 1200,900 enhanced\n"
        << "set output \"failure_rates.png\"\n"
        << "set multiplot layout " << rows_ << "," << cols << "\n"
        << "set logscale y\n"
        << "set xlabel \"overhead\"\n"
        << "set ylabel \"failure rate\"\n"
        << "set key bottom left font \",8\"\n";
    for (std::uint32_t q : qs) {
        out << "set title \"GF(" << q << ")\"\n";
        out << "plot";
        for (std::size_t s = 0; s < series.size(); ++s) {
            if (s > 0)
                out << ",";
            out << " \\\n  \"" << csv_path << "\" using ((strcol(1) eq \"" << series[s]
                << "\" && $2==" << q << " && $8>0) ? $4 : NaN):8 " << styles[s] << " title \""
                << series[s] << "\"";
        }
        out << "\n";
    }
    out << "unset multiplot\n";
}

inline void emit_plot_script_file(const std::vector<ResultRow>& rows,
                                  const std::string& csv_path, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    emit_plot_script(rows, csv_path, out);
}

} // namespace fountain
