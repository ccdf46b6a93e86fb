// qcap: command-line front end for the queue-channel capacity library.
//
// Subcommands: capacity, sweep, optimize, code-test, simulate. JSON results
// follow the schemas under schemas/; CSVs use 17-significant-digit floats and
// LF line endings, so identical flags and seed give byte-identical output.

#include <CLI11.hpp>

#include "qcap/qcap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Output and unit plumbing
// ---------------------------------------------------------------------------

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output path '" + path + "'");
    out << text << std::flush;
    if (!out) throw std::runtime_error("short write to '" + path + "'");
}

void emit_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// The library works at unit mean service time. --mu (services per unit of
// physical time) converts at the boundary: rates divide by mu on the way in,
// times multiply by mu on the way in, and the reverse on the way out.
struct Units {
    double mu = 1.0;
    double rate_in(double r) const { return r / mu; }
    double time_in(double t) const { return t * mu; }
    double rate_out(double r) const { return r * mu; }
    double time_out(double t) const { return t / mu; }
};

Units make_units(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw qcap::ValidationError("mu", "service rate must be positive and finite");
    return Units{mu};
}

// Convert one estimate back to physical units and render it.
json finish_estimate(qcap::CapacityEstimate e, const Units& u, double lambda_physical) {
    e.value = u.rate_out(e.value);
    e.std_error = u.rate_out(e.std_error);
    e.context.lambda = lambda_physical;
    return qcap::to_json(e);
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

bool is_unit_exp(const qcap::DistributionSpec& s) {
    const auto* e = std::get_if<qcap::Exponential>(&s.raw());
    return e != nullptr && std::abs(e->rate - 1.0) <= 1e-9;
}

qcap::WaitingConvention convention_from(const std::string& s) {
    return s == "sojourn" ? qcap::WaitingConvention::Sojourn : qcap::WaitingConvention::Delay;
}

std::string exp_decay_tag(double kappa) {
    return "exp-decay(kappa=" + std::to_string(kappa) + ")";
}

const char* mm1_law_tag(qcap::WaitingConvention c) {
    return c == qcap::WaitingConvention::Delay ? "mm1-delay" : "mm1-sojourn";
}

// --p-table accepts inline JSON (an object, or a bare [[w,p],...] array) or a
// path to a file holding the same.
qcap::PMap parse_p_map_text(const std::string& text) {
    json j;
    const auto first = text.find_first_not_of(" \t\r\n");
    const char lead = first == std::string::npos ? '\0' : text[first];
    if (lead == '{' || lead == '[') {
        j = json::parse(text, nullptr, false);
        if (j.is_discarded()) throw qcap::ValidationError("p-table", "inline JSON does not parse");
    } else {
        std::ifstream in(text);
        if (!in) throw qcap::ValidationError("p-table", "cannot open '" + text + "'");
        j = json::parse(in, nullptr, false);
        if (j.is_discarded())
            throw qcap::ValidationError("p-table", "'" + text + "' is not valid JSON");
    }
    if (j.is_array()) j = json{{"kind", "table"}, {"points", j}};
    return qcap::p_map_from_json(j);
}

// Knot positions and decay rates arrive in physical time; rescale to the
// library's unit-service-time clock.
qcap::PMap p_map_to_internal(const qcap::PMap& pm, const Units& u) {
    if (u.mu == 1.0) return pm;
    if (const auto* t = std::get_if<qcap::PTable>(&pm.raw())) {
        qcap::PTable scaled = *t;
        for (auto& knot : scaled.points) knot.first = u.time_in(knot.first);
        return qcap::PMap(std::move(scaled));
    }
    if (const auto* e = std::get_if<qcap::ExpDecay>(&pm.raw()))
        return qcap::PMap(qcap::ExpDecay{u.rate_in(e->kappa)});
    return pm;
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

struct CapacityOpts {
    std::string noise;
    double lambda = 0.0;
    std::string service = "exp";
    double kappa = 0.0;
    std::string p_table;
    double p_const = 0.0;
    int d = 2;
    bool timing_known = true;
    std::string waiting = "delay";
    double mu = 1.0;
    std::string out = "-";
    std::string config;
};

void run_capacity(const CapacityOpts& o, bool has_kappa, bool has_table, bool has_const) {
    if (int(has_kappa) + int(has_table) + int(has_const) != 1)
        throw qcap::ValidationError("kappa", "give exactly one of --kappa, --p-table, --p-const");
    const Units u = make_units(o.mu);
    const double li = u.rate_in(o.lambda);
    if (!(li > 0.0)) throw qcap::ValidationError("lambda", "arrival rate must be positive");
    const bool erasure = o.noise == "erasure";
    const auto conv = convention_from(o.waiting);
    const auto alt_conv = conv == qcap::WaitingConvention::Delay ? qcap::WaitingConvention::Sojourn
                                                                 : qcap::WaitingConvention::Delay;
    const qcap::DistributionSpec service = qcap::distribution_from_shorthand(o.service);

    // Classify the decoherence map: constant maps need no queue at all,
    // exponential decay has the transform closed form, and any other table
    // runs the general-map M/M/1 route.
    std::optional<double> const_p;
    std::optional<qcap::PMap> table;
    double kappa_phys = 0.0;
    if (has_const) {
        if (!(o.p_const >= 0.0 && o.p_const <= 1.0))
            throw qcap::ValidationError("p-const", "probability must lie in [0,1]");
        const_p = o.p_const;
    } else if (has_kappa) {
        if (!(o.kappa >= 0.0) || !std::isfinite(o.kappa))
            throw qcap::ValidationError("kappa", "decoherence rate must be finite and >= 0");
        if (o.kappa == 0.0) const_p = 0.0; // p(w) identically zero
        else kappa_phys = o.kappa;
    } else {
        qcap::PMap pm = parse_p_map_text(o.p_table);
        if (const auto* t = std::get_if<qcap::PTable>(&pm.raw()); t != nullptr && t->points.size() == 1)
            const_p = t->points.front().second;
        else if (const auto* e = std::get_if<qcap::ExpDecay>(&pm.raw()))
            kappa_phys = e->kappa;
        else
            table = std::move(pm);
    }

    // Waiting-independent noise: the channel does not see the queue, so any
    // positive arrival rate is admissible (no stability constraint).
    if (const_p) {
        const double c = *const_p;
        qcap::CapacityContext ctx;
        ctx.timing_known = o.timing_known;
        ctx.p_map = "const(p=" + qcap::format_double(c) + ")";
        ctx.waiting_law = "constant-p";
        if (erasure) {
            emit_json(o.out,
                      finish_estimate(qcap::qudit_capacities(li, o.d, qcap::NoiseKind::Erasure,
                                                             1.0 - c, ctx),
                                      u, o.lambda));
            return;
        }
        if (!o.timing_known) {
            if (o.d != 2)
                throw qcap::ValidationError("no-timing",
                                            "timing-blind bounds are implemented for d=2 only");
            const double phi = 0.5 * c;
            auto [lo, hi] = qcap::bsc_bounds_no_timing(li, phi, qcap::binary_entropy(phi), ctx);
            json j = finish_estimate(lo, u, o.lambda);
            j["bounds"] = json{{"lower", finish_estimate(lo, u, o.lambda)},
                               {"upper", finish_estimate(hi, u, o.lambda)}};
            emit_json(o.out, j);
            return;
        }
        const double chi = qcap::qudit_depolarizing_chi(c, o.d);
        emit_json(o.out,
                  finish_estimate(qcap::qudit_capacities(li, o.d, qcap::NoiseKind::Depolarizing,
                                                         chi, ctx),
                                  u, o.lambda));
        return;
    }

    // Waiting-dependent noise needs a stationary queue.
    if (!(li < 1.0))
        throw qcap::ValidationError(
            "lambda", "waiting-time noise needs a stable queue: lambda/mu must lie in (0,1)");

    if (erasure && !table) {
        // Exponential decay, any unit-mean service law: survival moments of
        // both waiting conventions come from the delay transform
        // (1-rho)/(1-alpha rho) and its service-smoothed sojourn variant.
        const double ki = u.rate_in(kappa_phys);
        const double alpha = qcap::mg1_alpha(service, ki);
        const double s_delay = (1.0 - li) / (1.0 - alpha * li);
        const double s_sojourn = s_delay * service.laplace(ki);
        auto mk = [&](double survival, const char* law) {
            qcap::CapacityContext ctx;
            ctx.timing_known = o.timing_known;
            ctx.service = service.describe();
            ctx.p_map = exp_decay_tag(kappa_phys);
            ctx.waiting_law = law;
            return o.d == 2 ? qcap::erasure_capacity_general(li, survival, ctx)
                            : qcap::qudit_capacities(li, o.d, qcap::NoiseKind::Erasure, survival,
                                                     ctx);
        };
        const bool delay_first = conv == qcap::WaitingConvention::Delay;
        json j = finish_estimate(mk(delay_first ? s_delay : s_sojourn,
                                    delay_first ? "pk-delay" : "pk-sojourn"),
                                 u, o.lambda);
        j["alternate"] = finish_estimate(mk(delay_first ? s_sojourn : s_delay,
                                            delay_first ? "pk-sojourn" : "pk-delay"),
                                         u, o.lambda);
        emit_json(o.out, j);
        return;
    }

    // Remaining routes ride on M/M/1 waiting laws.
    if (!is_unit_exp(service))
        throw qcap::ValidationError(
            "service", erasure ? "table p-maps use the M/M/1 route; --service must be exp"
                               : "waiting-dependent depolarizing noise uses the M/M/1 route; "
                                 "--service must be exp");

    const qcap::PMap pmi = table ? p_map_to_internal(*table, u)
                                 : qcap::PMap(qcap::ExpDecay{u.rate_in(kappa_phys)});
    const std::string map_tag = table ? table->describe() : exp_decay_tag(kappa_phys);

    if (erasure) {
        // Primary: the transform closed form under the posited waiting law
        // W ~ Exp((1-lambda)/lambda). Alternate: the true M/M/1 stationary
        // law under the requested convention.
        const double u0 = (1.0 - li) / li;
        const double surv_posited = clamp01(1.0 - u0 * qcap::p_laplace(pmi, u0));
        const double surv_true = clamp01(qcap::mm1_waiting_expectation(
            [&](double w) { return 1.0 - pmi(w); }, li, conv));
        auto mk = [&](double survival, const std::string& law) {
            qcap::CapacityContext ctx;
            ctx.timing_known = o.timing_known;
            ctx.service = "exp(rate=1)";
            ctx.p_map = map_tag;
            ctx.waiting_law = law;
            return o.d == 2 ? qcap::erasure_capacity_general(li, survival, ctx)
                            : qcap::qudit_capacities(li, o.d, qcap::NoiseKind::Erasure, survival,
                                                     ctx);
        };
        json j = finish_estimate(mk(surv_posited, "exp((1-lambda)/lambda)"), u, o.lambda);
        j["alternate"] = finish_estimate(mk(surv_true, mm1_law_tag(conv)), u, o.lambda);
        emit_json(o.out, j);
        return;
    }

    if (!o.timing_known) {
        if (o.d != 2)
            throw qcap::ValidationError("no-timing",
                                        "timing-blind bounds are implemented for d=2 only");
        const double mean_phi = qcap::mm1_waiting_expectation(
            [&](double w) { return 0.5 * pmi(w); }, li, conv);
        // Jensen guarantees E[h(phi)] <= h(E[phi]); trim quadrature noise so
        // the pair always passes the library's consistency check.
        const double mean_ent =
            std::min(qcap::binary_entropy(mean_phi),
                     clamp01(qcap::mm1_waiting_expectation(
                         [&](double w) { return qcap::binary_entropy(0.5 * pmi(w)); }, li, conv)));
        qcap::CapacityContext ctx;
        ctx.service = "exp(rate=1)";
        ctx.p_map = map_tag;
        ctx.waiting_law = mm1_law_tag(conv);
        auto [lo, hi] = qcap::bsc_bounds_no_timing(li, mean_phi, mean_ent, ctx);
        json j = finish_estimate(lo, u, o.lambda);
        j["bounds"] = json{{"lower", finish_estimate(lo, u, o.lambda)},
                           {"upper", finish_estimate(hi, u, o.lambda)}};
        emit_json(o.out, j);
        return;
    }

    auto mk = [&](qcap::WaitingConvention c) {
        qcap::CapacityContext ctx;
        ctx.service = "exp(rate=1)";
        ctx.p_map = map_tag;
        ctx.waiting_law = mm1_law_tag(c);
        if (o.d == 2) {
            const double mean_ent = clamp01(qcap::mm1_waiting_expectation(
                [&](double w) { return qcap::binary_entropy(0.5 * pmi(w)); }, li, c));
            return qcap::depolarizing_capacity(li, mean_ent, ctx);
        }
        const double log2d = std::log2(double(o.d));
        const double mean_chi = std::clamp(
            qcap::mm1_waiting_expectation(
                [&](double w) { return qcap::qudit_depolarizing_chi(pmi(w), o.d); }, li, c),
            0.0, log2d);
        return qcap::qudit_capacities(li, o.d, qcap::NoiseKind::Depolarizing, mean_chi, ctx);
    };
    json j = finish_estimate(mk(conv), u, o.lambda);
    j["alternate"] = finish_estimate(mk(alt_conv), u, o.lambda);
    emit_json(o.out, j);
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOpts {
    std::vector<double> kappas;
    std::vector<double> lambdas;
    std::string service = "exp";
    bool mc = false;
    double symbols = 1e6;
    std::int64_t warmup = -1;
    std::uint64_t seed = 0;
    double mu = 1.0;
    std::string out = "-";
    std::string config;
};

void run_sweep(SweepOpts o) {
    const Units u = make_units(o.mu);
    if (o.kappas.empty()) throw qcap::ValidationError("kappas", "need at least one kappa");
    if (o.lambdas.empty())
        for (int i = 1; i < 100; ++i) o.lambdas.push_back(double(i) / 100.0);
    std::sort(o.lambdas.begin(), o.lambdas.end());
    const qcap::DistributionSpec service = qcap::distribution_from_shorthand(o.service);

    std::vector<double> alpha(o.kappas.size());
    for (std::size_t i = 0; i < o.kappas.size(); ++i)
        alpha[i] = qcap::mg1_alpha(service, u.rate_in(o.kappas[i]));
    for (double l : o.lambdas)
        if (!(u.rate_in(l) > 0.0 && u.rate_in(l) < 1.0))
            throw qcap::ValidationError(
                "lambdas", "arrival rates must satisfy 0 < lambda/mu < 1, got " + qcap::format_double(l));

    std::int64_t nsym = 0;
    if (o.mc) {
        if (!(o.symbols >= 2.0) || !std::isfinite(o.symbols))
            throw qcap::ValidationError("symbols", "need a finite symbol count >= 2");
        nsym = std::llround(o.symbols);
        if (o.warmup >= nsym)
            throw qcap::ValidationError("warmup", "warmup must be smaller than --symbols");
    }

    const std::size_t nl = o.lambdas.size();
    const std::size_t rows = o.kappas.size() * nl;
    std::vector<std::string> lines(rows);
    qcap::parallel_for(rows, [&](std::size_t r) {
        const std::size_t ik = r / nl;
        const double lambda = o.lambdas[r % nl];
        const double kappa = o.kappas[ik];
        const double li = u.rate_in(lambda);
        const double analytic = u.rate_out(qcap::mg1_closed_form(li, alpha[ik]).value);
        std::string line = qcap::format_double(lambda) + "," + qcap::format_double(kappa) + "," +
                           qcap::format_double(analytic);
        if (o.mc) {
            const qcap::QueueConfig qc{li,
                                       qcap::DistributionSpec(qcap::Exponential{li}),
                                       service,
                                       qcap::WaitingConvention::Delay,
                                       nsym,
                                       o.warmup,
                                       qcap::derive_seed(o.seed, r)};
            const qcap::EventTrace trace = qcap::simulate(qc);
            const qcap::DecoherenceModel model(qcap::PMap(qcap::ExpDecay{u.rate_in(kappa)}),
                                               qcap::NoiseKind::Erasure, 2);
            const qcap::CapacityEstimate mc = qcap::mc_capacity(trace, model, li).primary;
            line += "," + qcap::format_double(u.rate_out(mc.value)) + "," +
                    qcap::format_double(u.rate_out(mc.std_error));
        } else {
            line += ",,";
        }
        lines[r] = std::move(line);
    });

    std::string csv = "lambda,kappa,capacity_analytic,capacity_mc,mc_stderr\n";
    for (const auto& l : lines) {
        csv += l;
        csv += '\n';
    }
    write_text(o.out, csv);
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

struct OptimizeOpts {
    double kappa = 0.0;
    std::string p_table;
    double p_const = 0.0;
    std::string service = "exp";
    double mu = 1.0;
    std::string out = "-";
    std::string config;
};

void run_optimize(const OptimizeOpts& o, bool has_kappa, bool has_table, bool has_const) {
    if (int(has_kappa) + int(has_table) + int(has_const) != 1)
        throw qcap::ValidationError("kappa", "give exactly one of --kappa, --p-table, --p-const");
    const Units u = make_units(o.mu);
    const qcap::DistributionSpec service = qcap::distribution_from_shorthand(o.service);

    json j;
    if (has_kappa) {
        if (!(o.kappa >= 0.0) || !std::isfinite(o.kappa))
            throw qcap::ValidationError("kappa", "decoherence rate must be finite and >= 0");
        // kappa = 0 is the noiseless channel: capacity is lambda itself and
        // the supremum sits on the stability boundary.
        qcap::OptimalLambda r{1.0, true};
        double cstar = 1.0;
        if (o.kappa > 0.0) {
            const double alpha = qcap::mg1_alpha(service, u.rate_in(o.kappa));
            r = qcap::mg1_optimal_lambda(alpha);
            cstar = r.boundary ? 1.0 : qcap::mg1_closed_form(r.lambda_star, alpha).value;
        }
        j = json{{"lambda_star", u.rate_out(r.lambda_star)},
                 {"capacity_at_star", u.rate_out(cstar)},
                 {"boundary", r.boundary},
                 {"evaluations", 0},
                 {"route", "mg1-closed-form"},
                 {"context",
                  json{{"kappa", o.kappa}, {"service", service.describe()}, {"mu", o.mu}}}};
    } else {
        if (!is_unit_exp(service))
            throw qcap::ValidationError(
                "service", "p-map optimization uses the M/M/1 route; --service must be exp");
        std::string map_tag;
        std::optional<qcap::PMap> pm;
        if (has_const) {
            if (!(o.p_const >= 0.0 && o.p_const <= 1.0))
                throw qcap::ValidationError("p-const", "probability must lie in [0,1]");
            pm.emplace(qcap::PTable{{{0.0, o.p_const}}});
            map_tag = "const(p=" + qcap::format_double(o.p_const) + ")";
        } else {
            const qcap::PMap phys = parse_p_map_text(o.p_table);
            map_tag = phys.describe();
            pm.emplace(p_map_to_internal(phys, u));
        }
        const qcap::GeneralPOptimum r = qcap::mm1_optimal_lambda_general_p(*pm);
        j = json{{"lambda_star", u.rate_out(r.lambda_star)},
                 {"capacity_at_star", u.rate_out(r.capacity)},
                 {"boundary", r.boundary},
                 {"evaluations", r.evaluations},
                 {"route", "general-p"},
                 {"context", json{{"p_map", map_tag}, {"service", "exp(rate=1)"}, {"mu", o.mu}}}};
    }
    emit_json(o.out, j);
}

// ---------------------------------------------------------------------------
// code-test
// ---------------------------------------------------------------------------

struct CodeTestOpts {
    std::int64_t n = 0;
    std::vector<double> multipliers;
    int trials = 100;
    double lambda = 0.5;
    double kappa = 1.0;
    std::string service = "exp";
    double symbols = 0.0;
    std::uint64_t seed = 0;
    std::string out = "-";
    std::string json_out;
    std::string config;
};

void run_code_test(const CodeTestOpts& o) {
    if (o.n < 1) throw qcap::ValidationError("n", "block length must be >= 1");
    if (o.multipliers.empty())
        throw qcap::ValidationError("multipliers", "need at least one rate multiplier");
    if (!(o.lambda > 0.0 && o.lambda < 1.0))
        throw qcap::ValidationError("lambda", "need 0 < lambda < 1");
    if (!(o.kappa > 0.0) || !std::isfinite(o.kappa))
        throw qcap::ValidationError("kappa", "decoherence rate must be positive");
    const qcap::DistributionSpec service = qcap::distribution_from_shorthand(o.service);

    std::int64_t nsym = 0;
    if (o.symbols > 0.0) {
        if (!std::isfinite(o.symbols))
            throw qcap::ValidationError("symbols", "symbol count must be finite");
        nsym = std::llround(o.symbols);
    } else {
        nsym = 10000 + o.n; // default warmup plus exactly n post-warmup symbols
    }

    const qcap::QueueConfig qc{o.lambda,
                               qcap::DistributionSpec(qcap::Exponential{o.lambda}),
                               service,
                               qcap::WaitingConvention::Delay,
                               nsym,
                               -1,
                               o.seed};
    const qcap::EventTrace trace = qcap::simulate(qc);
    const qcap::DecoherenceModel model(qcap::PMap(qcap::ExpDecay{o.kappa}),
                                       qcap::NoiseKind::Erasure, 2);
    const auto reports =
        qcap::rate_sweep(std::size_t(o.n), o.multipliers, trace, model, o.trials, o.seed);

    std::string csv = "multiplier,k,trials,successes\n";
    for (const auto& r : reports)
        csv += qcap::format_double(r.multiplier) + "," + std::to_string(r.k) + "," +
               std::to_string(r.trials) + "," + std::to_string(r.successes) + "\n";
    write_text(o.out, csv);

    if (!o.json_out.empty()) {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(qcap::to_json(r));
        emit_json(o.json_out, arr);
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::string arrival;
    std::string service = "exp";
    double lambda = 0.0;
    std::int64_t warmup = -1;
    std::string waiting = "delay";
    double mu = 1.0;
    std::string out = "-";
    std::string config;
};

void run_simulate(const SimulateOpts& o, bool has_lambda, bool has_arrival) {
    const Units u = make_units(o.mu);
    const qcap::DistributionSpec service = qcap::distribution_from_shorthand(o.service);

    std::optional<qcap::DistributionSpec> arrival;
    double li = 0.0;
    if (has_arrival) {
        arrival.emplace(qcap::distribution_from_shorthand(o.arrival));
        li = has_lambda ? u.rate_in(o.lambda) : 1.0 / arrival->mean();
    } else {
        if (!has_lambda) throw qcap::ValidationError("lambda", "give --lambda, --arrival, or both");
        li = u.rate_in(o.lambda);
        if (!(li > 0.0)) throw qcap::ValidationError("lambda", "arrival rate must be positive");
        arrival.emplace(qcap::Exponential{li});
    }

    const qcap::QueueConfig qc{li,      *arrival, service, convention_from(o.waiting),
                               o.n,     o.warmup, o.seed};
    qcap::EventTrace trace = qcap::simulate(qc);
    if (o.mu != 1.0) {
        for (auto* v : {&trace.arrival, &trace.service, &trace.departure, &trace.waiting})
            for (double& x : *v) x = u.time_out(x);
    }
    std::ostringstream ss;
    qcap::write_trace_csv(ss, trace);
    write_text(o.out, ss.str());
}

// ---------------------------------------------------------------------------
// --config: a JSON object of default flag values, applied wherever the flag
// is absent from the command line (the command line wins).
// ---------------------------------------------------------------------------

std::string config_path_from(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            if (i + 1 >= args.size())
                throw qcap::ValidationError("config", "missing file path after --config");
            return args[i + 1];
        }
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return {};
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

void inject_config(std::vector<std::string>& args) {
    const std::string path = config_path_from(args);
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw qcap::ValidationError("config", "cannot open '" + path + "'");
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw qcap::ValidationError("config", "'" + path + "' must hold a JSON object");
    for (const auto& [key, val] : j.items()) {
        const std::string flag = "--" + key;
        if (flag_present(args, flag)) continue;
        if (val.is_boolean()) {
            if (val.get<bool>()) args.push_back(flag);
            continue;
        }
        std::string text;
        if (val.is_array()) {
            for (std::size_t i = 0; i < val.size(); ++i) {
                if (i) text += ',';
                text += val[i].is_string() ? val[i].get<std::string>() : val[i].dump();
            }
        } else {
            text = val.is_string() ? val.get<std::string>() : val.dump();
        }
        args.push_back(flag + "=" + text);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacities of queues whose symbols decohere while they wait", "qcap"};
    app.require_subcommand(1);

    CapacityOpts co;
    auto* cap = app.add_subcommand("capacity", "closed-form capacity at one operating point");
    cap->add_option("--noise", co.noise, "noise model")
        ->required()
        ->check(CLI::IsMember({"erasure", "depolarizing"}));
    cap->add_option("--lambda", co.lambda, "arrival rate")->required();
    cap->add_option("--service", co.service, "unit-mean service law shorthand")
        ->capture_default_str();
    auto* co_kappa =
        cap->add_option("--kappa", co.kappa, "exponential decoherence rate: p(w)=1-exp(-kappa w)");
    auto* co_table = cap->add_option("--p-table", co.p_table,
                                     "piecewise-linear p(w): inline JSON or a file path");
    auto* co_const =
        cap->add_option("--p-const", co.p_const, "waiting-independent decoherence probability");
    cap->add_option("--d", co.d, "symbol alphabet size")->capture_default_str();
    cap->add_flag("--timing-known,!--no-timing", co.timing_known,
                  "receiver sees symbol timing (default: known)");
    cap->add_option("--waiting", co.waiting, "waiting-time convention")
        ->capture_default_str()
        ->check(CLI::IsMember({"delay", "sojourn"}));
    cap->add_option("--mu", co.mu, "physical service rate (unit conversions only)")
        ->capture_default_str();
    cap->add_option("--out", co.out, "output path ('-' = stdout)")->capture_default_str();
    cap->add_option("--config", co.config, "JSON file of default flag values");
    cap->callback([&co, co_kappa, co_table, co_const] {
        run_capacity(co, co_kappa->count() > 0, co_table->count() > 0, co_const->count() > 0);
    });

    SweepOpts so;
    auto* sw = app.add_subcommand("sweep", "capacity grid over (lambda, kappa) as CSV");
    sw->add_option("--kappas", so.kappas, "decoherence rates")->required()->delimiter(',');
    sw->add_option("--lambdas", so.lambdas, "arrival rates (default: 0.01..0.99 step 0.01)")
        ->delimiter(',');
    sw->add_option("--service", so.service, "unit-mean service law shorthand")
        ->capture_default_str();
    sw->add_flag("--mc", so.mc, "add Monte Carlo columns");
    sw->add_option("--symbols", so.symbols, "symbols per Monte Carlo run")->capture_default_str();
    sw->add_option("--warmup", so.warmup, "warmup symbols discarded per run (-1 = auto)");
    sw->add_option("--seed", so.seed, "base RNG seed")->capture_default_str();
    sw->add_option("--mu", so.mu, "physical service rate (unit conversions only)")
        ->capture_default_str();
    sw->add_option("--out", so.out, "output path ('-' = stdout)")->capture_default_str();
    sw->add_option("--config", so.config, "JSON file of default flag values");
    sw->callback([&so] { run_sweep(so); });

    OptimizeOpts oo;
    auto* op = app.add_subcommand("optimize", "capacity-maximizing arrival rate");
    auto* oo_kappa = op->add_option("--kappa", oo.kappa, "exponential decoherence rate");
    auto* oo_table = op->add_option("--p-table", oo.p_table,
                                    "piecewise-linear p(w): inline JSON or a file path");
    auto* oo_const =
        op->add_option("--p-const", oo.p_const, "waiting-independent decoherence probability");
    op->add_option("--service", oo.service, "unit-mean service law shorthand")
        ->capture_default_str();
    op->add_option("--mu", oo.mu, "physical service rate (unit conversions only)")
        ->capture_default_str();
    op->add_option("--out", oo.out, "output path ('-' = stdout)")->capture_default_str();
    op->add_option("--config", oo.config, "JSON file of default flag values");
    op->callback([&oo, oo_kappa, oo_table, oo_const] {
        run_optimize(oo, oo_kappa->count() > 0, oo_table->count() > 0, oo_const->count() > 0);
    });

    CodeTestOpts go;
    auto* ct = app.add_subcommand("code-test",
                                  "random-linear-code erasure experiments on a simulated queue");
    ct->add_option("--n", go.n, "code block length")->required();
    ct->add_option("--multipliers", go.multipliers, "rate multipliers m: k = round(m n (1-e))")
        ->required()
        ->delimiter(',');
    ct->add_option("--trials", go.trials, "independent trials per multiplier")
        ->capture_default_str();
    ct->add_option("--lambda", go.lambda, "arrival rate")->capture_default_str();
    ct->add_option("--kappa", go.kappa, "exponential decoherence rate")->capture_default_str();
    ct->add_option("--service", go.service, "unit-mean service law shorthand")
        ->capture_default_str();
    ct->add_option("--symbols", go.symbols, "simulated trace length (0 = warmup + n)");
    ct->add_option("--seed", go.seed, "base RNG seed")->capture_default_str();
    ct->add_option("--out", go.out, "CSV output path ('-' = stdout)")->capture_default_str();
    ct->add_option("--json", go.json_out, "also write full per-multiplier reports to this file");
    ct->add_option("--config", go.config, "JSON file of default flag values");
    ct->callback([&go] { run_code_test(go); });

    SimulateOpts mo;
    auto* sim = app.add_subcommand("simulate", "emit one FCFS queue event trace as CSV");
    sim->add_option("--n", mo.n, "number of symbols")->required();
    sim->add_option("--seed", mo.seed, "RNG seed")->capture_default_str();
    auto* sim_arr = sim->add_option("--arrival", mo.arrival, "inter-arrival law shorthand");
    sim->add_option("--service", mo.service, "unit-mean service law shorthand")
        ->capture_default_str();
    auto* sim_lam =
        sim->add_option("--lambda", mo.lambda, "arrival rate (default: 1/mean inter-arrival)");
    sim->add_option("--warmup", mo.warmup, "warmup marker stored in the trace (-1 = auto)");
    sim->add_option("--waiting", mo.waiting, "waiting-time convention")
        ->capture_default_str()
        ->check(CLI::IsMember({"delay", "sojourn"}));
    sim->add_option("--mu", mo.mu, "physical service rate (unit conversions only)")
        ->capture_default_str();
    sim->add_option("--out", mo.out, "output path ('-' = stdout)")->capture_default_str();
    sim->add_option("--config", mo.config, "JSON file of default flag values");
    sim->callback([&mo, sim_arr, sim_lam] {
        run_simulate(mo, sim_lam->count() > 0, sim_arr->count() > 0);
    });

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        inject_config(args);
        std::reverse(args.begin(), args.end()); // CLI11's vector overload wants reversed args
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const qcap::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const qcap::StabilityError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const qcap::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
