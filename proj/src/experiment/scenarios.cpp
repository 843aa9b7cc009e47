#include "nmpinv/experiment/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nmpinv/errors.hpp"
#include "nmpinv/log.hpp"
#include "nmpinv/random.hpp"

namespace nmpinv::experiment {

plantsim::Trajectory sine_sum(const std::vector<SineTerm>& terms, double duration, double dt, bool start_at_rest)
{
    if (!(duration > 0.0) || !(dt > 0.0)) throw std::invalid_argument("duration and dt must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
    std::vector<double> p(steps, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = dt * static_cast<double>(k);
        double v       = 0.0;
        for (const auto& s : terms) v += s.amplitude * std::sin(2.0 * std::numbers::pi * t / s.period + s.phase);
        if (start_at_rest && t < kOnsetSeconds) v *= 0.5 * (1.0 - std::cos(std::numbers::pi * t / kOnsetSeconds));
        p[k] = v;
    }
    return plantsim::Trajectory::from_positions(dt, std::move(p));
}

std::vector<plantsim::Trajectory> synthesize_drawings(const DrawingSpec& spec, std::uint64_t seed, double dt)
{
    Rng rng(seed);
    std::vector<plantsim::Trajectory> out;
    for (int i = 0; i < spec.count; ++i) {
        const int components = rng.integer(spec.min_components, spec.max_components);
        std::vector<SineTerm> terms;
        for (int c = 0; c < components; ++c) {
            const double a     = rng.uniform(spec.min_amplitude, spec.max_amplitude);
            const double T     = rng.uniform(spec.min_period, spec.max_period);
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            terms.push_back({a, T, phase});
        }
        out.push_back(sine_sum(terms, spec.duration, dt, true));
    }
    return out;
}

std::vector<ExperimentResult> evaluate_methods(const std::string& scenario, const plantsim::Trajectory& desired,
                                               const plantsim::BaselineSystem& baseline, const MethodList& methods,
                                               double eval_from, std::uint64_t seed)
{
    std::vector<ExperimentResult> out;
    const plantsim::DesiredReference identity;
    out.push_back(make_result(scenario, method::kBaseline, desired,
                              plantsim::simulate_closed_loop(baseline, identity, desired), eval_from, seed));
    for (const auto& [tag, source] : methods) {
        ExperimentResult r =
            make_result(scenario, tag, desired, plantsim::simulate_closed_loop(baseline, *source, desired), eval_from, seed);
        if (r.diverged) spdlog::info("{} / {}: diverged at t = {:.2f} s", scenario, tag, r.divergence_time);
        out.push_back(std::move(r));
    }
    for (const auto& r : out)
        if (!r.diverged) spdlog::debug("{} / {}: rms {:.6g}", scenario, r.method, r.rms);
    return out;
}

namespace {

const invlearn::ReferenceGenerator& need(const std::optional<invlearn::ReferenceGenerator>& g, const char* what)
{
    if (!g) throw ConfigError(std::string("artifact bundle has no ") + what + " generator");
    return *g;
}

std::string period_id(const std::string& prefix, double T)
{
    std::ostringstream os;
    os << prefix << "_T" << T;
    return os.str();
}

std::string drawing_id(const std::string& prefix, int i)
{
    std::ostringstream os;
    os << prefix << "_d" << (i < 10 ? "0" : "") << i;
    return os.str();
}

void append(std::vector<ExperimentResult>& to, std::vector<ExperimentResult> from)
{
    for (auto& r : from) to.push_back(std::move(r));
}

std::vector<ExperimentResult> sweep(const ScenarioContext& ctx, const SweepSpec& s, const std::string& prefix,
                                    const MethodList& methods, double eval_from)
{
    std::vector<ExperimentResult> out;
    for (double T : s.periods) {
        const plantsim::Trajectory d = sine_sum({{s.amplitude, T, 0.0}}, s.duration, ctx.setup.dt, false);
        append(out, evaluate_methods(period_id(prefix, T), d, *ctx.setup.baseline, methods, eval_from, ctx.cfg.seed));
    }
    return out;
}

std::vector<ExperimentResult> drawings(const ScenarioContext& ctx, const std::string& prefix, const MethodList& methods)
{
    std::vector<ExperimentResult> out;
    const auto ds = synthesize_drawings(ctx.cfg.drawings, ctx.cfg.drawing_seed(), ctx.setup.dt);
    for (std::size_t i = 0; i < ds.size(); ++i)
        append(out, evaluate_methods(drawing_id(prefix, static_cast<int>(i)), ds[i], *ctx.setup.baseline, methods,
                                     ctx.cfg.eval_skip, ctx.cfg.seed));
    return out;
}

}  // namespace

std::vector<ExperimentResult> run_pendulum_sweep(const ScenarioContext& ctx, const SweepSpec& s)
{
    return sweep(ctx, s, "fig3", {{method::kApprox, &need(ctx.artifacts.approx, "approximate-inverse")}}, ctx.cfg.eval_skip);
}

std::vector<ExperimentResult> run_ablation(const ScenarioContext& ctx, const SweepSpec& s)
{
    return sweep(ctx, s, "fig4",
                 {{method::kApprox, &need(ctx.artifacts.approx, "approximate-inverse")},
                  {method::kAblation, &need(ctx.artifacts.ablation, "past-reference ablation")}},
                 0.0);
}

std::vector<ExperimentResult> run_drawings(const ScenarioContext& ctx)
{
    MethodList methods;
    std::optional<plantsim::TransferFunctionReference> zos;
    if (ctx.artifacts.zos) {
        zos.emplace(*ctx.artifacts.zos, method::kZos);
        methods.emplace_back(method::kZos, &*zos);
    }
    methods.emplace_back(method::kApprox, &need(ctx.artifacts.approx, "approximate-inverse"));
    return drawings(ctx, "fig5", methods);
}

std::vector<ExperimentResult> run_three_way(const ScenarioContext& ctx)
{
    if (!ctx.artifacts.zos) throw ConfigError("artifact bundle has no ZOS inverse");
    const plantsim::TransferFunctionReference zos(*ctx.artifacts.zos, method::kZos);
    return drawings(ctx, "threeway",
                    {{method::kExact, &need(ctx.artifacts.exact, "exact-inverse")},
                     {method::kZos, &zos},
                     {method::kApprox, &need(ctx.artifacts.approx, "approximate-inverse")}});
}

std::vector<ExperimentResult> run_custom(const ScenarioContext& ctx)
{
    MethodList methods;
    std::optional<plantsim::TransferFunctionReference> zos;
    if (ctx.artifacts.zos) {
        zos.emplace(*ctx.artifacts.zos, method::kZos);
        methods.emplace_back(method::kZos, &*zos);
    }
    methods.emplace_back(method::kApprox, &need(ctx.artifacts.approx, "approximate-inverse"));
    std::vector<ExperimentResult> out;
    for (const auto& c : ctx.cfg.custom) {
        const plantsim::Trajectory d = sine_sum(c.terms, c.duration, ctx.setup.dt, false);
        append(out, evaluate_methods("custom_" + c.name, d, *ctx.setup.baseline, methods, ctx.cfg.eval_skip, ctx.cfg.seed));
    }
    return out;
}

std::vector<ExperimentResult> run_scenario(const ScenarioContext& ctx, const std::string& name)
{
    spdlog::info("running scenario {}", name);
    if (name == "fig3") return run_pendulum_sweep(ctx, ctx.cfg.fig3);
    if (name == "fig4") return run_ablation(ctx, ctx.cfg.fig4);
    if (name == "fig5") return run_drawings(ctx);
    if (name == "threeway") return run_three_way(ctx);
    if (name == "custom") return run_custom(ctx);
    throw ConfigError("config error at /run: unknown scenario '" + name + "'");
}

std::vector<ExperimentResult> run_scenarios(const ScenarioContext& ctx, const std::vector<std::string>& names)
{
    std::vector<ExperimentResult> out;
    for (const auto& n : names) append(out, run_scenario(ctx, n));
    attach_reductions(out);
    return out;
}

}  // namespace nmpinv::experiment
