#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "weightlab/factorization.hpp"
#include "weightlab/families.hpp"
#include "weightlab/theorems.hpp"

namespace weightlab {

struct SuiteOptions {
    Tolerances tolerances;
    JonesOptions factorization;
    bool factor = true;
    bool context = true;   // doubling and annular constants as soft entries
    unsigned jobs = 1;
    std::string corrupt;   // self-test: swap lhs and rhs of this check id before judging it
};

/// Optimizer budget used by the batch suite; a full 8-start search per
/// instance is left to the `factor` command.
inline JonesOptions batch_factor_options(std::uint64_t seed)
{
    JonesOptions o;
    o.descent.starts = 2;
    o.descent.max_sweeps = 6;
    o.descent.line_tol = 1e-6;
    o.descent.seed = seed;
    return o;
}

/// Every check on one instance. Per-check errors become failed entries.
inline std::vector<CheckReport> run_suite(const FiniteMetricMeasureSpace& space, const TheoremInput& input,
                                          const std::string& label, const SuiteOptions& options = {})
{
    CheckOptions opt;
    opt.tolerances = options.tolerances;
    opt.label = label;
    opt.jobs = options.jobs;
    Digest dg;
    dg.add(space).add(input.weight).add(input.multiplier).add(input.p).add(input.s);
    opt.digest = dg.hex();

    const BallFamily family(space, options.jobs);
    auto out = theorem_checks(family, input, opt);

    if (options.factor)
        run_guarded(out, "factorization", opt, [&] {
            const auto fp = refined_jones(family, input.weight, input.p, input.s, options.factorization);
            return verify_factorization(family, input.weight, fp, opt);
        });

    if (options.context)
        run_guarded(out, "context", opt, [&] {
            std::vector<CheckReport> ctx;
            auto r = detail::new_report("context", opt);
            r.relation = Relation::Soft;
            r.verdict = Verdict::Soft;
            r.lhs = r.rhs = r.margin = r.tolerance = std::nan("");
            const auto dbl = doubling_constant(family);
            const auto ann = annular_decay_constant(family, 1.0, std::max(space.diameter(), 1e-300));
            r.terms = {{"n", double(space.size())},
                       {"diameter", space.diameter()},
                       {"doubling", dbl.value},
                       {"annular_alpha1_rmin_diameter", ann.constant},
                       {"dynamic_range", dynamic_range(input.weight)}};
            ctx.push_back(std::move(r));
            return ctx;
        });

    if (!options.corrupt.empty())
        for (auto& r : out)
            if (r.id == options.corrupt && r.hard()) {
                std::swap(r.lhs, r.rhs);
                Comparison::settle(r, r.relation == Relation::Equal ? opt.tolerances.equality
                                                                    : opt.tolerances.inequality);
                r.note = "self-test: lhs and rhs swapped";
            }
    return out;
}

inline std::vector<CheckReport> run_suite(const RandomInstance& inst, const SuiteOptions& options = {})
{
    return run_suite(inst.space, {inst.weight, inst.multiplier, inst.p, inst.s}, inst.label, options);
}

} // namespace weightlab
