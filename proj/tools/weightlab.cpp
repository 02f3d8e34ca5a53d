// weightlab: generate spaces, analyze weights, run the verification suite,
// factor weights, time the kernels.
//
// Exit codes: 0 success, 1 a hard check failed, 2 bad input or usage.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weightlab.hpp"

using namespace weightlab;
using nlohmann::json;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string input, output, csv, weight = "w", multiplier;
    double p = 2.0, s = 2.0, alpha = 1.0;
    std::optional<double> r_min;
    std::optional<std::uint64_t> seed;
    std::size_t count = 200, max_n = 64;
    std::string tolerance;
    bool dedupe = true;
    unsigned jobs = 1;
    bool random = false, self_test = false;

    // gen
    std::string kind = "grid", shape, metric = "euclidean", measure = "uniform", base;
    std::string weight_law = "uniform-log";
    std::size_t n = 0, dim = 2;
    double eps = 1.0;

    // factor
    int starts = 8, sweeps = 100;
    std::string document_out;

    // bench
    std::string sizes;
    int repeat = 3;
};

Tolerances parse_tolerances(const std::string& text)
{
    Tolerances t;
    if (text.empty())
        return t;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || !(v > 0.0) || !std::isfinite(v))
            throw InputError("tolerance must be a positive number, got '" + s + "'");
        return v;
    };
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        t.inequality = t.equality = t.relaxed_equality = number(text);
    } else {
        t.inequality = number(text.substr(0, colon));
        t.equality = number(text.substr(colon + 1));
        t.relaxed_equality = std::max(t.equality, t.inequality);
    }
    return t;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw InputError("cannot write '" + path + "'");
}

std::vector<double> named_weight(const SpaceDocument& doc, const std::string& name)
{
    auto it = doc.weights.find(name);
    if (it == doc.weights.end()) {
        std::string have;
        for (const auto& [k, v] : doc.weights)
            have += (have.empty() ? "" : ", ") + k;
        throw InputError("weight '" + name + "' not found in document (available: " +
                         (have.empty() ? "none" : have) + ")");
    }
    return it->second;
}

SpaceDocument load_input(const RunConfig& c)
{
    if (c.input.empty())
        throw InputError("--input is required");
    return load_document(c.input);
}

json ball_json(const BallFamily& fam, BallRef b)
{
    return {{"center", b.center}, {"rank", b.rank}, {"radius", fam.radius(b)}};
}

// ---------------------------------------------------------------------------

int cmd_gen(const RunConfig& c)
{
    GeneratorParams g;
    g.kind = parse_space_kind(c.kind);
    g.metric = parse_metric_kind(c.metric);
    g.measure = parse_measure_law(c.measure);
    g.n = c.n;
    g.dim = c.dim;
    g.epsilon = c.eps;
    SpaceDocument base;
    const bool randomized = g.measure == MeasureLaw::Random || g.kind == SpaceKind::Path ||
                            g.kind == SpaceKind::Tree || g.kind == SpaceKind::RandomPoints;
    if (randomized && !c.seed)
        throw InputError("--seed is required for randomized generators");
    const std::uint64_t seed = c.seed.value_or(0);

    if (g.kind == SpaceKind::Grid) {
        if (!c.shape.empty()) {
            std::stringstream ss(c.shape);
            std::string part;
            while (std::getline(ss, part, 'x'))
                g.shape.push_back(std::stoul(part));
        } else {
            g.shape = {c.n};
        }
    }
    if (g.kind == SpaceKind::Snowflake) {
        if (c.base.empty())
            throw InputError("snowflake needs --base");
        base = load_document(c.base);
        g.base = &base.space;
    }

    SpaceDocument doc;
    doc.space = generate(g, seed);
    if (g.kind == SpaceKind::Snowflake) {
        doc.weights = base.weights;
    } else {
        WeightLaw law;
        if (c.weight_law == "power-law")
            law = WeightLaw::PowerLaw;
        else if (c.weight_law == "exp-bmo")
            law = WeightLaw::ExpBmo;
        else if (c.weight_law == "uniform-log")
            law = WeightLaw::UniformLog;
        else
            throw InputError("unknown weight law '" + c.weight_law + "'");
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        doc.weights[c.weight] = random_weight(doc.space, law, rng);
    }

    const std::string text = dump_document(doc);
    if (c.output.empty())
        std::cout << text;
    else
        write_text(c.output, text);
    const auto dbl = doubling_constant(doc.space);
    std::cerr << "n=" << doc.space.size() << " diameter=" << doc.space.diameter() << " C_d=" << dbl.value << '\n';
    return 0;
}

int cmd_analyze(const RunConfig& c)
{
    const auto doc = load_input(c);
    const auto w = named_weight(doc, c.weight);
    const BallFamily fam(doc.space, c.jobs);
    const auto lw = transform(w, Transform::log());

    struct Row {
        std::string name;
        FunctionalResult r;
    };
    const std::vector<Row> rows{
        {"ap", ap_constant(fam, w, c.p)},          {"a1", a1_constant(fam, w)},
        {"ainf", ainf_constant(fam, w)},           {"rhs", rhs_constant(fam, w, c.s)},
        {"rhinf", rhinf_constant(fam, w)},         {"bmo_log_w", bmo_norm(fam, lw)},
        {"blo_log_w", blo_norm(fam, lw)},          {"buo_log_w", buo_norm(fam, lw)},
    };
    const auto dbl = doubling_constant(fam);
    const auto ann = annular_decay_constant(fam, c.alpha, c.r_min.value_or(std::max(doc.space.diameter(), 1e-300)));

    json out;
    out["input"] = c.input;
    out["weight"] = c.weight;
    out["n"] = doc.space.size();
    out["balls"] = enumerate_balls(fam, c.dedupe).size();
    out["dedupe_balls"] = c.dedupe;
    out["constants"] = json::array();
    std::ostringstream csv;
    csv << "name,parameter,value,center,rank,point\n";
    for (const auto& [name, r] : rows) {
        json j{{"name", name}, {"value", r.value}, {"witness", ball_json(fam, r.ball)}};
        if (!std::isnan(r.parameter))
            j["parameter"] = r.parameter;
        if (r.point)
            j["witness"]["point"] = *r.point;
        out["constants"].push_back(j);
        csv << name << ',' << detail::csv_number(r.parameter) << ',' << detail::csv_number(r.value) << ','
            << r.ball.center << ',' << r.ball.rank << ',' << (r.point ? std::to_string(*r.point) : "") << '\n';
    }
    out["doubling"] = {{"value", dbl.value}, {"center", dbl.center}, {"radius", dbl.radius}};
    out["annular"] = {{"alpha", ann.alpha}, {"r_min", ann.r_min},   {"value", ann.constant},
                      {"center", ann.center}, {"radius", ann.radius}, {"delta", ann.delta}};
    csv << "doubling,," << detail::csv_number(dbl.value) << ',' << dbl.center << ",,\n";
    csv << "annular," << detail::csv_number(ann.alpha) << ',' << detail::csv_number(ann.constant) << ','
        << ann.center << ",,\n";

    if (c.output.empty()) {
        std::cout << out.dump(1) << '\n';
    } else {
        write_text(c.output, out.dump(1) + "\n");
        write_text(c.csv.empty() ? c.output + ".csv" : c.csv, csv.str());
    }
    if (!c.csv.empty() && c.output.empty())
        write_text(c.csv, csv.str());
    return 0;
}

struct VerifyTotals {
    std::size_t hard = 0, failed = 0, soft = 0;
};

int cmd_verify(const RunConfig& c)
{
    SuiteOptions opt;
    opt.tolerances = parse_tolerances(c.tolerance);
    opt.jobs = c.jobs;
    if (c.self_test)
        opt.corrupt = "harnack.i";

    std::vector<CheckReport> all;
    if (c.random) {
        if (!c.seed)
            throw InputError("--random needs --seed");
        if (c.max_n < 2)
            throw InputError("--max-n must be at least 2");
        opt.factorization = batch_factor_options(*c.seed);
        for (const auto& inst : random_batch(*c.seed, c.count, c.max_n)) {
            auto rs = run_suite(inst, opt);
            all.insert(all.end(), rs.begin(), rs.end());
        }
    } else {
        const auto doc = load_input(c);
        TheoremInput in;
        in.weight = named_weight(doc, c.weight);
        if (!c.multiplier.empty())
            in.multiplier = named_weight(doc, c.multiplier);
        detail::check_exponent(c.p, "p");
        detail::check_exponent(c.s, "s");
        detail::check_positive(in.weight);
        detail::check_positive(in.multiplier, "multiplier");
        in.p = c.p;
        in.s = c.s;
        opt.factorization.descent.seed = c.seed.value_or(0);
        all = run_suite(doc.space, in, c.input + ":" + c.weight, opt);
    }

    std::ostringstream lines;
    write_json_lines(lines, all);
    if (c.output.empty())
        std::cout << lines.str();
    else
        write_text(c.output, lines.str());
    if (!c.csv.empty()) {
        std::ostringstream csv;
        write_csv_summary(csv, all);
        write_text(c.csv, csv.str());
    }

    VerifyTotals t;
    for (const auto& r : all) {
        if (r.hard())
            ++t.hard;
        else
            ++t.soft;
        if (r.failed()) {
            ++t.failed;
            std::cerr << "FAIL " << r.id << " [" << r.label << "] lhs=" << r.lhs << " rhs=" << r.rhs
                      << " margin=" << r.margin << (r.note.empty() ? "" : " " + r.note) << '\n';
        }
    }
    std::cerr << t.hard << " hard checks, " << t.failed << " failed, " << t.soft << " soft reports\n";
    return t.failed == 0 ? 0 : 1;
}

int cmd_factor(const RunConfig& c)
{
    const auto doc = load_input(c);
    const auto w = named_weight(doc, c.weight);
    detail::check_positive(w);
    detail::check_exponent(c.p, "p");
    detail::check_exponent(c.s, "s");
    const BallFamily fam(doc.space, c.jobs);
    JonesOptions jo;
    jo.descent.seed = c.seed.value_or(0);
    jo.descent.starts = c.starts;
    jo.descent.max_sweeps = c.sweeps;
    jo.descent.jobs = c.jobs;
    const auto fp = refined_jones(fam, w, c.p, c.s, jo);

    CheckOptions co;
    co.tolerances = parse_tolerances(c.tolerance);
    co.label = c.input + ":" + c.weight;
    co.digest = Digest().add(doc.space).add(w).hex();
    const auto reports = verify_factorization(fam, w, fp, co);

    const auto& cert = fp.certificates;
    json out{{"p", fp.p},
             {"s", fp.s},
             {"q", fp.q},
             {"v1", fp.v1},
             {"v2", fp.v2},
             {"w1", fp.w1},
             {"w2", fp.w2},
             {"objective", fp.objective},
             {"initial_objective", fp.initial_objective},
             {"stalled", fp.stalled},
             {"certificates",
              {{"a1_v1", cert.a1_v1},
               {"a1_v2", cert.a1_v2},
               {"a1_w1", cert.a1_w1},
               {"rhs_w1", cert.rhs_w1},
               {"ap_w2", cert.ap_w2},
               {"rhinf_w2", cert.rhinf_w2}}}};
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        worst = std::max(worst, std::abs(fp.w1[i] * fp.w2[i] - w[i]) / w[i]);
    out["reconstruction_max_relative_error"] = worst;
    out["verification"] = json::array();
    for (const auto& r : reports)
        out["verification"].push_back(to_json(r));

    if (c.output.empty())
        std::cout << out.dump(1) << '\n';
    else
        write_text(c.output, out.dump(1) + "\n");
    if (!c.document_out.empty()) {
        SpaceDocument d = doc;
        d.weights[c.weight + ".w1"] = fp.w1;
        d.weights[c.weight + ".w2"] = fp.w2;
        d.weights[c.weight + ".v1"] = fp.v1;
        d.weights[c.weight + ".v2"] = fp.v2;
        save_document(d, c.document_out);
    }
    if (fp.stalled)
        std::cerr << "note: optimizer stalled; certificates are for the best point found\n";
    return all_hard_pass(reports) ? 0 : 1;
}

int cmd_bench(const RunConfig& c)
{
    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); };
    std::mt19937_64 rng(c.seed.value_or(1));
    std::ostringstream csv;
    csv << "n,balls,build_s,maximal_s,suite_s\n";
    bool agree = true;
    std::vector<std::size_t> sizes;
    {
        std::stringstream ss(c.sizes);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (part.find_first_not_of(" \t") == std::string::npos)
                continue;
            std::size_t used = 0;
            long long v = 0;
            try {
                v = std::stoll(part, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || part.find_first_not_of(" \t", used) != std::string::npos || v < 1)
                throw InputError("bad size '" + part + "'");
            sizes.push_back(std::size_t(v));
        }
    }
    for (std::size_t n : sizes) {
        const auto space = make_grid({n}, MetricKind::Euclidean, MeasureLaw::Uniform, 0);
        std::vector<double> f(n);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (auto& v : f)
            v = u(rng);

        if (n <= 100) {
            const BallFamily fam(space);
            for (bool mx : {true, false}) {
                const auto fast = mx ? natural_maximal(fam, f).values : natural_minimal(fam, f).values;
                const auto slow = naive_natural_extremal(space, f, mx);
                for (std::size_t i = 0; i < n; ++i)
                    if (std::abs(fast[i] - slow[i]) > 1e-12 * std::max(1.0, std::abs(slow[i])))
                        agree = false;
            }
        }

        double build = INFINITY, maxi = INFINITY, suite = std::nan("");
        std::size_t balls = 0;
        for (int k = 0; k < std::max(1, c.repeat); ++k) {
            auto t0 = clock::now();
            const BallFamily fam(space, c.jobs);
            build = std::min(build, seconds(t0));
            balls = fam.ball_count();
            t0 = clock::now();
            const auto out = maximal(fam, f, c.jobs);
            maxi = std::min(maxi, seconds(t0));
            if (out.values.size() != n)
                agree = false;
        }
        if (n <= 300) {
            const BallFamily fam(space);
            std::vector<double> w(n);
            for (std::size_t i = 0; i < n; ++i)
                w[i] = std::exp(f[i]);
            const auto t0 = clock::now();
            theorem_checks(fam, {w, {}, c.p, c.s});
            suite = seconds(t0);
        }
        csv << n << ',' << balls << ',' << detail::csv_number(build) << ',' << detail::csv_number(maxi) << ','
            << detail::csv_number(suite) << '\n';
    }
    if (c.output.empty())
        std::cout << csv.str();
    else
        write_text(c.output, csv.str());
    if (!agree) {
        std::cerr << "fast and naive maximal functions disagree\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    RunConfig c;
    CLI::App app{"weightlab: Muckenhoupt weights on finite metric measure spaces"};
    app.require_subcommand(1);

    if (const char* env = std::getenv("WEIGHTLAB_TOLERANCE"))
        c.tolerance = env;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", c.input, "space document");
        sub->add_option("--output", c.output, "output path (default stdout)");
        sub->add_option("--weight", c.weight, "weight name in the document")->capture_default_str();
        sub->add_option("--p", c.p, "A_p exponent, > 1")->capture_default_str();
        sub->add_option("--s", c.s, "reverse Hoelder exponent, > 1")->capture_default_str();
        sub->add_option("--seed", c.seed, "seed for randomized modes");
        sub->add_option("--tolerance", c.tolerance,
                        "relative tolerance, or INEQ:EQ (default 1e-9:1e-12, env WEIGHTLAB_TOLERANCE)");
        sub->add_option("--jobs", c.jobs, "worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
    };

    auto* gen = app.add_subcommand("gen", "generate a space document");
    add_common(gen);
    gen->add_option("--kind", c.kind, "grid | path | tree | random-points | snowflake")->capture_default_str();
    gen->add_option("--n", c.n, "number of points (grid: 1-D length)");
    gen->add_option("--shape", c.shape, "grid shape, e.g. 4x4");
    gen->add_option("--dim", c.dim, "random-points dimension")->capture_default_str();
    gen->add_option("--metric", c.metric, "euclidean | l1 | linf")->capture_default_str();
    gen->add_option("--measure", c.measure, "uniform | random")->capture_default_str();
    gen->add_option("--eps", c.eps, "snowflake exponent in (0, 1]");
    gen->add_option("--base", c.base, "snowflake base document");
    gen->add_option("--weight-law", c.weight_law, "power-law | exp-bmo | uniform-log")->capture_default_str();

    auto* analyze = app.add_subcommand("analyze", "constants, norms and geometry of one weight");
    add_common(analyze);
    analyze->add_option("--csv", c.csv, "CSV table path (default OUTPUT.csv)");
    analyze->add_option("--alpha", c.alpha, "annular decay exponent in [0, 1]")->capture_default_str();
    analyze->add_option("--r-min", c.r_min, "annular decay radius cutoff (default: diameter)");
    analyze->add_option("--dedupe-balls", c.dedupe, "count coinciding balls once")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run the theorem checks");
    add_common(verify);
    verify->add_option("--csv", c.csv, "CSV summary path");
    verify->add_option("--multiplier", c.multiplier, "weight name used as multiplier (default: the weight)");
    verify->add_flag("--random", c.random, "seeded random batch instead of --input");
    verify->add_option("--count", c.count, "random batch size")->capture_default_str();
    verify->add_option("--max-n", c.max_n, "largest random space")->capture_default_str();
    verify->add_flag("--self-test", c.self_test, "invert one check; the run must fail");
    verify->add_option("--dedupe-balls", c.dedupe, "accepted for symmetry; checks use every ball");

    auto* factor = app.add_subcommand("factor", "refined Jones factorization of one weight");
    add_common(factor);
    factor->add_option("--starts", c.starts, "optimizer restarts")->capture_default_str();
    factor->add_option("--sweeps", c.sweeps, "sweep budget per restart")->capture_default_str();
    factor->add_option("--save-document", c.document_out, "write the document with the factors added");

    auto* bench = app.add_subcommand("bench", "time ball enumeration, M and the theorem checks");
    add_common(bench);
    bench->add_option("--sizes", c.sizes, "comma separated sizes (may be empty)");
    bench->add_option("--repeat", c.repeat, "best of this many runs")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*gen)
            return cmd_gen(c);
        if (*analyze)
            return cmd_analyze(c);
        if (*verify)
            return cmd_verify(c);
        if (*factor)
            return cmd_factor(c);
        if (*bench)
            return cmd_bench(c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (...) {
        std::cerr << "error: unknown failure\n";
        return 2;
    }
    return 2;
}
