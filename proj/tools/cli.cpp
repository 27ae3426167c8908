#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "trellis/analysis.hpp"
#include "trellis/channel.hpp"
#include "trellis/codes.hpp"
#include "trellis/distribution.hpp"
#include "trellis/errors.hpp"
#include "trellis/figures.hpp"
#include "trellis/moments.hpp"
#include "trellis/oracle/oracle.hpp"
#include "trellis/trellis_io.hpp"

namespace trellis::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json number(double x)
{
    if (std::isfinite(x)) {
        if (x == std::trunc(x) && std::abs(x) < 0x1p53) return static_cast<std::int64_t>(x);
        return x;
    }
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

json numbers(const std::vector<double>& xs)
{
    json out = json::array();
    for (double x : xs) out.push_back(number(x));
    return out;
}

template <class V>
json carrier(V x)
{
    if constexpr (std::is_same_v<V, bool>)
        return x;
    else
        return number(x);
}

template <class V>
json carriers(const std::vector<V>& xs)
{
    json out = json::array();
    for (const auto& x : xs) out.push_back(carrier(static_cast<V>(x)));
    return out;
}

void diagnose(std::ostream& err, std::string message)
{
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << "trellis: " << message << '\n';
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

std::ofstream open_output(const std::string& path)
{
    std::ofstream file(path);
    if (!file) throw Error("cannot open '" + path + "' for writing");
    return file;
}

/// --g clabel | zero | correlation:<word file> | edges:<value file>
DepthFunctionTable depth_function(const Trellis& t, const std::string& spec)
{
    if (spec == "clabel") return DepthFunctionTable::from_clabels(t);
    if (spec == "zero") return DepthFunctionTable::zeros(t);
    const auto colon = spec.find(':');
    const auto kind = spec.substr(0, colon);
    if (colon != std::string::npos && kind == "correlation") {
        const auto word = load_reals(spec.substr(colon + 1));
        if (word.size() != static_cast<std::size_t>(t.rank()))
            throw Error("correlation word has " + std::to_string(word.size()) + " entries, trellis rank is " +
                        std::to_string(t.rank()));
        return DepthFunctionTable::correlation(t, word);
    }
    if (colon != std::string::npos && kind == "edges") {
        auto values = load_reals(spec.substr(colon + 1));
        if (values.size() != t.num_edges())
            throw Error("edge value file has " + std::to_string(values.size()) + " entries, trellis has " +
                        std::to_string(t.num_edges()) + " edges");
        return DepthFunctionTable(std::move(values));
    }
    throw UsageError("--g must be clabel, zero, correlation:<file> or edges:<file>, got '" + spec + "'");
}

double path_count(const Trellis& t)
{
    const std::vector<double> ones(t.num_edges(), 1.0);
    const Trellis unit = t.with_lambdas(ones);
    return forward_numerators<RealSemiring>(unit, DepthFunctionTable::zeros(unit), 0).at(unit.sink(), 0);
}

void require_oracle_size(const Trellis& t)
{
    const double paths = path_count(t);
    if (paths > static_cast<double>(oracle::path_cap()))
        throw UsageError("--oracle needs at most " + std::to_string(oracle::path_cap()) + " paths, trellis has " +
                         format_real(paths) + " (raise TRELLIS_PATH_CAP to allow more)");
}

std::optional<SymbolConstraint> constraint_of(const std::optional<int>& depth, const std::optional<double>& symbol)
{
    if (depth.has_value() != symbol.has_value()) throw UsageError("--symbol-depth and --symbol go together");
    if (!depth) return std::nullopt;
    return SymbolConstraint{*depth, *symbol};
}

struct ReceivedWord {
    std::vector<double> received;
    std::optional<std::vector<double>> codeword;
};

ReceivedWord received_word(const Trellis& t, const ChannelModel& channel, const std::optional<std::string>& file,
                           const std::optional<std::uint64_t>& seed)
{
    if (file.has_value() == seed.has_value()) throw UsageError("give exactly one of --received and --seed");
    if (file) return {load_reals(*file), std::nullopt};
    auto tx = simulate_transmission(t, channel, *seed);
    return {std::move(tx.received), std::move(tx.codeword)};
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
    std::string trellis;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out)
{
    const Trellis t = load_trellis(a.trellis);
    const auto report = validate(t);
    json j;
    j["valid"] = report.ok();
    j["rank"] = t.rank();
    j["vertices"] = t.num_vertices();
    j["edges"] = t.num_edges();
    json violations = json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"kind", std::string(to_string(v.kind))}, {"subject", v.subject}, {"message", v.message}});
    j["violations"] = violations;
    if (report.ok()) j["paths"] = number(path_count(t));
    emit(out, j);
    return report.ok() ? 0 : 1;
}

struct BuildArgs {
    std::string code;
    std::optional<int> n;
    std::optional<std::string> generators;
    std::optional<int> info_len;
    bool unterminated = false;
    std::optional<std::string> out;
};

int cmd_build(const BuildArgs& a, std::ostream& out)
{
    Trellis t;
    json j;
    if (a.code == "spc") {
        if (!a.n) throw UsageError("--code spc needs --n");
        if (a.generators || a.info_len || a.unterminated)
            throw UsageError("--generators, --info-len and --unterminated apply to --code conv only");
        t = build_spc_trellis(*a.n);
        j["code"] = "spc";
        j["n"] = *a.n;
    } else {
        if (!a.generators || !a.info_len) throw UsageError("--code conv needs --generators and --info-len");
        if (a.n) throw UsageError("--n applies to --code spc only");
        const auto code = parse_generators(*a.generators);
        t = build_conv_trellis(code, *a.info_len, !a.unterminated);
        j["code"] = "conv";
        j["generators"] = *a.generators;
        j["memory"] = code.memory;
        j["info_len"] = *a.info_len;
        j["terminated"] = !a.unterminated;
    }
    if (!a.out) {
        write_trellis(out, t);
        return 0;
    }
    save_trellis(*a.out, t);
    j["rank"] = t.rank();
    j["vertices"] = t.num_vertices();
    j["edges"] = t.num_edges();
    j["out"] = *a.out;
    emit(out, j);
    return 0;
}

struct LabelArgs {
    std::string trellis;
    std::string channel;
    std::optional<std::string> received;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> received_out;
};

int cmd_label(const LabelArgs& a, std::ostream& out)
{
    const Trellis t = load_trellis(a.trellis);
    require_valid(t);
    const auto channel = parse_channel(a.channel);
    const auto word = received_word(t, channel, a.received, a.seed);
    const Trellis labeled = channel_lambda_labels(t, channel, word.received);
    if (a.received_out) {
        auto file = open_output(*a.received_out);
        write_reals(file, word.received);
    }
    if (!a.out) {
        write_trellis(out, labeled);
        return 0;
    }
    save_trellis(*a.out, labeled);
    json j;
    j["channel"] = channel.to_string();
    j["rank"] = t.rank();
    if (a.seed) j["seed"] = *a.seed;
    j["received"] = numbers(word.received);
    if (word.codeword) j["codeword"] = numbers(*word.codeword);
    j["out"] = *a.out;
    emit(out, j);
    return 0;
}

struct MomentsArgs {
    std::string trellis;
    std::string g = "clabel";
    unsigned max_order = 2;
    std::string semiring = "real";
    int threads = 1;
    std::optional<int> symbol_depth;
    std::optional<double> symbol;
    bool all_symbols = false;
    bool vertices = false;
    bool oracle = false;
    bool count_ops = false;
    bool normalized = false;
};

template <Semiring S>
json moments_for(const Trellis& t, const DepthFunctionTable& g, const MomentsArgs& a)
{
    const RunOptions options{a.threads};
    const LiftedLabels<S> labels(t, g, a.max_order);
    const auto forward = run_numerators<S>(t, labels, Direction::forward, options);
    const auto theta = trellis_moments<S>(t, forward);

    json j;
    j["numerators"] = carriers(theta.numerators);
    j["normalized"] = theta.normalized ? numbers(*theta.normalized) : json(nullptr);

    std::vector<std::pair<int, double>> wanted;
    if (a.all_symbols)
        for (int i = 1; i <= t.rank(); ++i)
            for (double x : symbols_at_depth(t, i)) wanted.emplace_back(i, x);
    else if (a.symbol_depth)
        wanted.emplace_back(*a.symbol_depth, *a.symbol);

    std::optional<MomentState<S>> backward;
    if (!wanted.empty() || a.vertices) backward = run_numerators<S>(t, labels, Direction::backward, options);
    if (!wanted.empty()) {
        json symbols = json::array();
        for (const auto& [i, x] : wanted) {
            const auto s = symbol_moments<S>(t, labels, forward, *backward, i, x);
            symbols.push_back({{"depth", i},
                               {"symbol", number(x)},
                               {"numerators", carriers(s.numerators)},
                               {"normalized", s.normalized ? numbers(*s.normalized) : json(nullptr)}});
        }
        j["symbols"] = symbols;
    }
    if (a.vertices) {
        json rows = json::array();
        for (VertexId v = 0; v < t.num_vertices(); ++v)
            rows.push_back({{"vertex", v},
                            {"depth", t.depth(v)},
                            {"forward", carriers(forward.row(v))},
                            {"backward", carriers(backward->row(v))}});
        j["vertex_numerators"] = rows;
    }
    if (a.oracle) {
        json o;
        std::vector<typename S::value_type> want;
        for (unsigned m = 0; m <= a.max_order; ++m) want.push_back(oracle::moment<S>(t, g, m));
        o["paths"] = number(path_count(t));
        o["numerators"] = carriers(want);
        if constexpr (std::is_same_v<typename S::value_type, double>) {
            double worst = 0.0;
            for (unsigned m = 0; m <= a.max_order; ++m) {
                const double got = theta.numerators[m];
                if (got == want[m]) continue;
                double scale = std::abs(want[m]);
                if constexpr (std::is_same_v<S, RealSemiring>) scale = oracle::real_moment(t, g, m).magnitude;
                worst = std::max(worst, std::abs(got - want[m]) / std::max(scale, 1e-300));
            }
            o["max_relative_error"] = number(worst);
            o["agree"] = worst <= 1e-9;
        } else {
            bool agree = true;
            for (unsigned m = 0; m <= a.max_order; ++m) agree = agree && theta.numerators[m] == want[m];
            o["agree"] = agree;
        }
        j["oracle"] = o;
    }
    return j;
}

int cmd_moments(const MomentsArgs& a, std::ostream& out)
{
    const auto id = parse_semiring(a.semiring);
    if (!id) throw UsageError("unknown semiring '" + a.semiring + "' (real, logreal, tropical, maxprod, boolean)");
    if (a.symbol_depth.has_value() != a.symbol.has_value())
        throw UsageError("--symbol-depth and --symbol go together");
    if (a.all_symbols && a.symbol_depth) throw UsageError("--all-symbols excludes --symbol-depth");
    if (a.normalized && *id != SemiringId::real) throw UsageError("--normalized needs --semiring real");
    if (a.threads < 1) throw UsageError("--threads must be at least 1");

    const Trellis t = load_trellis(a.trellis);
    require_valid(t);
    const auto g = depth_function(t, a.g);
    if (a.oracle) require_oracle_size(t);

    json j;
    j["semiring"] = std::string(to_string(*id));
    j["max_order"] = a.max_order;
    j["rank"] = t.rank();
    j["vertices"] = t.num_vertices();
    j["edges"] = t.num_edges();
    j.update(dispatch_semiring(*id, [&]<class S>(S) { return moments_for<S>(t, g, a); }));

    if (a.normalized) {
        const auto state = normalized_states(t, g, a.max_order, Direction::forward, {a.threads});
        const auto m = normalized_trellis_moments(t, state);
        j["log_flow"] = number(m.log_flow);
        j["normalized_log_domain"] = numbers(m.moments);
    }
    if (a.count_ops) {
        const auto run = counted_run(t, g, a.max_order, {a.threads});
        const auto symbol_ops = counted_symbol_pass(t, g, a.max_order);
        const double M = a.max_order;
        const double E = static_cast<double>(t.num_edges());
        j["ops"] = {
            {"multiplications", run.ops.multiplications},
            {"additions", run.ops.additions},
            {"recursion_total", run.ops.recursion_total()},
            {"power_multiplications", run.ops.power_multiplications},
            {"bracket", {number((1.5 * M * M + 3.5 * M + 1) * E), number((1.5 * M * M + 4.5 * M + 2) * E)}},
            {"symbol_pass_multiplications", symbol_ops.multiplications},
            {"symbol_pass_additions", symbol_ops.additions},
            {"symbol_pass_multiplication_bound", number(E * (M * M + 3 * M + 2))},
        };
    }
    emit(out, j);
    return 0;
}

struct DistributionArgs {
    std::string trellis;
    std::string g = "clabel";
    std::string mode = "auto";
    std::optional<int> bins;
    std::optional<double> width;
    std::optional<std::string> anchor;
    std::optional<int> cut;
    std::optional<int> symbol_depth;
    std::optional<double> symbol;
    std::optional<std::string> out;
    int threads = 1;
};

int cmd_distribution(const DistributionArgs& a, std::ostream& out)
{
    const bool binned_flags = a.bins || a.width || a.anchor;
    if (a.mode == "exact" && binned_flags) throw UsageError("--bins, --width and --anchor need quantized mode");
    if (a.cut && a.symbol_depth) throw UsageError("--cut does not apply to symbol distributions");
    if (a.bins && *a.bins < 0) throw UsageError("--bins must be nonnegative");
    if (a.width && !(*a.width > 0.0)) throw UsageError("--width must be positive");
    if (a.threads < 1) throw UsageError("--threads must be at least 1");
    Anchor anchor = Anchor::mean;
    if (a.anchor) {
        if (*a.anchor == "lattice")
            anchor = Anchor::lattice;
        else if (*a.anchor != "mean")
            throw UsageError("--anchor must be mean or lattice");
    }
    const auto constraint = constraint_of(a.symbol_depth, a.symbol);

    const Trellis t = load_trellis(a.trellis);
    require_valid(t);
    const auto g = depth_function(t, a.g);
    const int cut = a.cut.value_or(t.rank());
    if (cut < 0 || cut > t.rank()) throw Error("cut depth " + std::to_string(cut) + " outside [0, rank]");
    const RunOptions options{a.threads};

    std::optional<Lattice> lattice;
    if (a.mode == "exact") {
        lattice = detect_lattice(t, g);
        if (!lattice) throw Error("g takes no common lattice of at most 1e6 points; use --mode quantized");
    } else if (a.mode == "auto" && !binned_flags) {
        lattice = detect_lattice(t, g);
    }

    // Matched moments for the Gaussian column.
    const auto fs = normalized_states(t, g, 2, Direction::forward, options);
    LogMoments moments;
    if (constraint) {
        const auto bs = normalized_states(t, g, 2, Direction::backward, options);
        moments = normalized_symbol_moments(t, g, fs, bs, constraint->depth, constraint->symbol);
    } else {
        moments = normalized_trellis_moments(t, fs);
    }
    const double mean = moments.moments.empty() ? 0.0 : moments.moments[1];
    const double variance = moments.moments.empty() ? 0.0 : moments.moments[2] - mean * mean;

    json j;
    std::vector<std::pair<double, double>> points;
    double total = 0.0;
    double step = 0.0;
    if (lattice) {
        const auto fwd = exact_distributions(t, g, *lattice, Direction::forward, options);
        const auto bwd = exact_distributions(t, g, *lattice, Direction::backward, options);
        const auto d = constraint ? symbol_distribution(t, g, fwd, bwd, constraint->depth, constraint->symbol)
                                  : trellis_distribution(t, fwd, bwd, cut);
        points = d.points();
        total = d.total();
        step = d.step();
        j["mode"] = "exact";
        j["lattice"] = {{"unit", number(lattice->unit)}, {"step", number(lattice->step())}};
    } else {
        if (a.mode != "auto" && a.mode != "quantized") throw UsageError("--mode must be exact, quantized or auto");
        auto params = default_quantization(t, g);
        if (a.bins) params.half_bins = *a.bins;
        if (a.width) params.bin_width = *a.width;
        params.anchor = anchor;
        const auto fwd = quantized_distributions(t, g, Direction::forward, params, options);
        const auto bwd = quantized_distributions(t, g, Direction::backward, params, options);
        const auto d = constraint ? symbol_distribution(t, g, fwd, bwd, constraint->depth, constraint->symbol)
                                  : trellis_distribution(t, fwd, bwd, cut);
        points = d.points();
        total = d.total();
        step = d.width;
        j["mode"] = "quantized";
        j["half_bins"] = params.half_bins;
        j["bin_width"] = number(params.bin_width);
        j["anchor"] = params.anchor == Anchor::lattice ? "lattice" : "mean";
    }
    if (constraint)
        j["symbol"] = {{"depth", constraint->depth}, {"symbol", number(constraint->symbol)}};
    else
        j["cut"] = cut;
    const auto rows = distribution_rows(points, total, mean, variance, step);
    j["total"] = number(total);
    j["mean"] = number(mean);
    j["variance"] = number(variance);
    j["points"] = points.size();
    j["tv_distance"] = number(total_variation(rows));

    if (!a.out) {
        write_distribution_csv(out, rows);
        return 0;
    }
    auto file = open_output(*a.out);
    write_distribution_csv(file, rows);
    j["out"] = *a.out;
    emit(out, j);
    return 0;
}

struct EntropyArgs {
    std::string trellis;
    std::string channel;
    std::optional<std::string> received;
    std::optional<std::uint64_t> seed;
    std::optional<int> symbol_depth;
    std::optional<double> symbol;
    bool all_subcodes = false;
    bool oracle = false;
    std::optional<unsigned> moments;
    int threads = 1;
};

json entropy_json(const EntropyResult& r)
{
    return {{"entropy", number(r.entropy)},
            {"mean_correlation", number(r.mean_correlation)},
            {"log2_flow", number(r.log2_flow)},
            {"k1a", number(r.constants.k1a)},
            {"k1b", number(r.constants.k1b)},
            {"k2", number(r.constants.k2)}};
}

int cmd_entropy(const EntropyArgs& a, std::ostream& out)
{
    if (a.all_subcodes && a.symbol_depth) throw UsageError("--all-subcodes excludes --symbol-depth");
    if (a.threads < 1) throw UsageError("--threads must be at least 1");
    const auto constraint = constraint_of(a.symbol_depth, a.symbol);
    const Trellis t = load_trellis(a.trellis);
    require_valid(t);
    const auto channel = parse_channel(a.channel);
    const auto word = received_word(t, channel, a.received, a.seed);
    const auto& r = word.received;
    if (a.oracle) require_oracle_size(t);
    const RunOptions options{a.threads};

    std::optional<std::vector<std::vector<double>>> words;
    if (a.oracle) words = oracle::codewords(t);
    auto with_oracle = [&](json j, std::optional<SymbolConstraint> c) {
        if (!words) return j;
        std::optional<oracle::Constraint> oc;
        if (c) oc = oracle::Constraint{c->depth, c->symbol};
        const double want = oracle::posterior_entropy(*words, channel, r, oc);
        j["oracle_entropy"] = number(want);
        j["oracle_abs_error"] = number(std::abs(j["entropy"].get<double>() - want));
        return j;
    };

    json j;
    j["channel"] = channel.to_string();
    j["rank"] = t.rank();
    if (a.seed) j["seed"] = *a.seed;
    j["received"] = numbers(r);
    if (word.codeword) j["codeword"] = numbers(*word.codeword);
    if (constraint) j["symbol"] = {{"depth", constraint->depth}, {"symbol", number(constraint->symbol)}};
    j.update(with_oracle(entropy_json(conditional_entropy(t, channel, r, constraint, options)), constraint));
    if (a.moments)
        j["uncertainty_moments"] = numbers(uncertainty_moments(t, channel, r, *a.moments, constraint));
    if (a.all_subcodes) {
        json subs = json::array();
        for (int i = 1; i <= t.rank(); ++i)
            for (double x : symbols_at_depth(t, i)) {
                const SymbolConstraint c{i, x};
                json s = {{"depth", i}, {"symbol", number(x)}};
                s.update(with_oracle(entropy_json(conditional_entropy(t, channel, r, c, options)), c));
                subs.push_back(s);
            }
        j["subcodes"] = subs;
    }
    emit(out, j);
    return 0;
}

struct FiguresArgs {
    int which = 0;
    std::string out = ".";
    std::uint64_t seed = 0;
    FigureConfig config;
};

int cmd_figures(const FiguresArgs& a, std::ostream& out)
{
    FigureConfig config = a.config;
    config.seed = a.seed;
    if (config.threads < 1) throw UsageError("--threads must be at least 1");
    std::filesystem::create_directories(a.out);
    const auto path = (std::filesystem::path(a.out) / ("figure" + std::to_string(a.which) + ".csv")).string();

    json j;
    j["figure"] = a.which;
    j["generators"] = config.generators;
    j["info_len"] = config.info_len;
    j["seed"] = config.seed;
    if (a.which == 1) {
        const auto fig = symbol_figure(config);
        auto file = open_output(path);
        write_symbol_figure_csv(file, fig);
        j["rank"] = fig.rank;
        j["channel"] = fig.channel;
        j["depth"] = fig.depth;
        j["sum_plus"] = number(fig.sum_plus);
        j["sum_minus"] = number(fig.sum_minus);
        j["bcjr_plus"] = number(fig.bcjr_plus);
        j["bcjr_minus"] = number(fig.bcjr_minus);
        j["ratio_min"] = number(fig.ratio_min);
        j["ratio_max"] = number(fig.ratio_max);
        j["rows"] = fig.rows.size();
    } else {
        const auto fig = trellis_figure(config);
        auto file = open_output(path);
        write_distribution_csv(file, fig.rows);
        j["rank"] = fig.rank;
        j["channel"] = fig.channel;
        j["mean"] = number(fig.mean);
        j["variance"] = number(fig.variance);
        j["tv_distance"] = number(fig.tv_distance);
        j["rows"] = fig.rows.size();
    }
    j["csv"] = path;
    emit(out, j);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Moment, distribution and entropy computations on trellises", "trellis"};
    app.require_subcommand(1);

    ValidateArgs validate_args;
    auto* validate_cmd = app.add_subcommand("validate", "Check a trellis file for structural violations");
    validate_cmd->add_option("--trellis", validate_args.trellis, "Trellis file")->required();

    BuildArgs build_args;
    auto* build_cmd = app.add_subcommand("build-code", "Write the trellis of a parity-check or convolutional code");
    build_cmd->add_option("--code", build_args.code, "spc or conv")->required()->check(CLI::IsMember({"spc", "conv"}));
    build_cmd->add_option("--n", build_args.n, "Length of the single parity check code");
    build_cmd->add_option("--generators", build_args.generators, "Octal generators, e.g. 7,5");
    build_cmd->add_option("--info-len", build_args.info_len, "Information bits");
    build_cmd->add_flag("--unterminated", build_args.unterminated, "Omit the zero tail");
    build_cmd->add_option("--out", build_args.out, "Output trellis file (default: stdout)");

    LabelArgs label_args;
    auto* label_cmd = app.add_subcommand("label", "Replace lambda labels with channel likelihoods");
    label_cmd->add_option("--trellis", label_args.trellis, "Code trellis file")->required();
    label_cmd->add_option("--channel", label_args.channel, "bsc:<p> or awgn:<sigma2>")->required();
    label_cmd->add_option("--received", label_args.received, "Received word, one value per line");
    label_cmd->add_option("--seed", label_args.seed, "Simulate a transmission with this seed");
    label_cmd->add_option("--out", label_args.out, "Output trellis file (default: stdout)");
    label_cmd->add_option("--received-out", label_args.received_out, "Also write the received word here");

    MomentsArgs moments_args;
    auto* moments_cmd = app.add_subcommand("moments", "Trellis and symbol moments over a semiring");
    moments_cmd->add_option("--trellis", moments_args.trellis, "Trellis file")->required();
    moments_cmd->add_option("--g", moments_args.g, "clabel, zero, correlation:<file> or edges:<file>");
    moments_cmd->add_option("--max-order", moments_args.max_order, "Highest moment order");
    moments_cmd->add_option("--semiring", moments_args.semiring, "real, logreal, tropical, maxprod or boolean");
    moments_cmd->add_option("--threads", moments_args.threads, "Worker threads");
    moments_cmd->add_option("--symbol-depth", moments_args.symbol_depth, "Depth i of a symbol moment");
    moments_cmd->add_option("--symbol", moments_args.symbol, "C-label x of a symbol moment");
    moments_cmd->add_flag("--all-symbols", moments_args.all_symbols, "Symbol moments at every depth and c-label");
    moments_cmd->add_flag("--vertices", moments_args.vertices, "Per-vertex forward and backward numerators");
    moments_cmd->add_flag("--oracle", moments_args.oracle, "Cross-check against path enumeration");
    moments_cmd->add_flag("--count-ops", moments_args.count_ops, "Count recursion operations");
    moments_cmd->add_flag("--normalized", moments_args.normalized, "Also run the log-flow normalized recursion");

    DistributionArgs dist_args;
    auto* dist_cmd = app.add_subcommand("distribution", "Distribution of the path function as CSV");
    dist_cmd->add_option("--trellis", dist_args.trellis, "Trellis file")->required();
    dist_cmd->add_option("--g", dist_args.g, "clabel, zero, correlation:<file> or edges:<file>");
    dist_cmd->add_option("--mode", dist_args.mode, "exact, quantized or auto")
        ->check(CLI::IsMember({"exact", "quantized", "auto"}));
    dist_cmd->add_option("--bins", dist_args.bins, "Half bin count N (2N+1 bins)");
    dist_cmd->add_option("--width", dist_args.width, "Bin width");
    dist_cmd->add_option("--anchor", dist_args.anchor, "mean or lattice");
    dist_cmd->add_option("--cut", dist_args.cut, "Cut depth (default: rank)");
    dist_cmd->add_option("--symbol-depth", dist_args.symbol_depth, "Restrict to paths with c_i = x at this depth");
    dist_cmd->add_option("--symbol", dist_args.symbol, "C-label x");
    dist_cmd->add_option("--out", dist_args.out, "CSV file (default: stdout)");
    dist_cmd->add_option("--threads", dist_args.threads, "Worker threads");

    EntropyArgs entropy_args;
    auto* entropy_cmd = app.add_subcommand("entropy", "Conditional entropy of a code given a received word");
    entropy_cmd->add_option("--trellis", entropy_args.trellis, "Code trellis file")->required();
    entropy_cmd->add_option("--channel", entropy_args.channel, "bsc:<p> or awgn:<sigma2>")->required();
    entropy_cmd->add_option("--received", entropy_args.received, "Received word, one value per line");
    entropy_cmd->add_option("--seed", entropy_args.seed, "Simulate a transmission with this seed");
    entropy_cmd->add_option("--symbol-depth", entropy_args.symbol_depth, "Subcode depth i");
    entropy_cmd->add_option("--symbol", entropy_args.symbol, "Subcode symbol x");
    entropy_cmd->add_flag("--all-subcodes", entropy_args.all_subcodes, "Entropy of every subcode");
    entropy_cmd->add_flag("--oracle", entropy_args.oracle, "Cross-check against codeword enumeration");
    entropy_cmd->add_option("--moments", entropy_args.moments, "Uncertainty moments up to this order");
    entropy_cmd->add_option("--threads", entropy_args.threads, "Worker threads");

    FiguresArgs fig_args;
    auto* fig_cmd = app.add_subcommand("figures", "Write figure datasets as CSV");
    fig_cmd->add_option("--which", fig_args.which, "1: symbol distributions, 3: trellis distribution")
        ->required()
        ->check(CLI::IsMember({1, 3}));
    fig_cmd->add_option("--seed", fig_args.seed, "Transmission seed")->required();
    fig_cmd->add_option("--out", fig_args.out, "Output directory");
    fig_cmd->add_option("--generators", fig_args.config.generators, "Octal generators");
    fig_cmd->add_option("--info-len", fig_args.config.info_len, "Information bits");
    fig_cmd->add_option("--crossover", fig_args.config.crossover, "BSC crossover probability");
    fig_cmd->add_option("--depth", fig_args.config.depth, "Symbol depth for figure 1");
    fig_cmd->add_option("--threads", fig_args.config.threads, "Worker threads");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        diagnose(err, e.what());
        return 2;
    }

    try {
        if (*validate_cmd) return cmd_validate(validate_args, out);
        if (*build_cmd) return cmd_build(build_args, out);
        if (*label_cmd) return cmd_label(label_args, out);
        if (*moments_cmd) return cmd_moments(moments_args, out);
        if (*dist_cmd) return cmd_distribution(dist_args, out);
        if (*entropy_cmd) return cmd_entropy(entropy_args, out);
        if (*fig_cmd) return cmd_figures(fig_args, out);
    } catch (const UsageError& e) {
        diagnose(err, e.what());
        return 2;
    } catch (const std::exception& e) {
        diagnose(err, e.what());
        return 1;
    }
    return 2;
}

} // namespace trellis::cli
