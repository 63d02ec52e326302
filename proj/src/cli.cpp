#include "suslab/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "suslab/dist.hpp"
#include "suslab/errors.hpp"

namespace suslab::cli {

namespace {

using intensity::ConditionId;
using intensity::EpsilonFamily;
using intensity::TailFamily;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Typed access to one JSON object; finish() rejects keys that were never read.
class Reader {
  public:
    Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const Json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const Json& v = raw(key);
        if (!v.is_number()) fail(key, "a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(key, "a finite number");
        return x;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        if (!has(key)) return fallback;
        return as_integer(raw(key), key);
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const Json& v = raw(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        const std::int64_t x = as_integer(v, key);
        if (x < 0) fail(key, "a nonnegative integer");
        return static_cast<std::uint64_t>(x);
    }

    std::string string(const std::string& key, std::string fallback) {
        if (!has(key)) return fallback;
        const Json& v = raw(key);
        if (!v.is_string()) fail(key, "a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        const Json& v = raw(key);
        if (!v.is_array()) fail(key, "an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number() || !std::isfinite(x.get<double>())) fail(key, "an array of finite numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<std::int64_t> integers(const std::string& key, std::vector<std::int64_t> fallback) {
        if (!has(key)) return fallback;
        const Json& v = raw(key);
        if (!v.is_array()) fail(key, "an array of integers");
        std::vector<std::int64_t> out;
        for (const auto& x : v) out.push_back(as_integer(x, key));
        return out;
    }

    std::string path(const std::string& key) const { return where_ + "." + key; }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& expected) const {
        throw ConfigError(path(key) + ": expected " + expected);
    }

  private:
    std::int64_t as_integer(const Json& v, const std::string& key) const {
        if (v.is_number_integer()) return v.get<std::int64_t>();
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15) return static_cast<std::int64_t>(x);
        }
        fail(key, "an integer");
    }

    const Json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

TailFamily tail_from_json(const Json& j, const std::string& where) {
    Reader r(j, where);
    const std::string kind = r.string("kind", "");
    TailFamily out;
    if (kind == "zero") {
        out = intensity::ZeroEps{};
    } else if (kind == "power") {
        const auto sign = r.integer("sign", -1);
        out = intensity::PowerEps{r.number("gamma", 0.5), static_cast<int>(std::clamp<std::int64_t>(sign, -2, 2))};
    } else if (kind == "step") {
        out = intensity::StepEps{r.number("left", 0.0), r.number("right", 0.0)};
    } else {
        throw ConfigError(where + ".kind: expected one of zero, power, step, explicit");
    }
    r.finish();
    return out;
}

EpsilonFamily epsilon_from_json(const Json& j, const std::string& where) {
    if (j.is_object() && j.contains("kind") && j.at("kind") == "explicit") {
        Reader r(j, where);
        r.string("kind", "");
        intensity::ExplicitEps ex;
        if (r.has("table")) {
            const Json& table = r.raw("table");
            if (!table.is_array()) r.fail("table", "an array of [n, eps] pairs");
            for (const auto& row : table) {
                if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() || !row[1].is_number()) {
                    r.fail("table", "an array of [n, eps] pairs");
                }
                ex.table[row[0].get<std::int64_t>()] = row[1].get<double>();
            }
        }
        if (r.has("tail")) ex.tail = tail_from_json(r.raw("tail"), where + ".tail");
        r.finish();
        return ex;
    }
    return std::visit([](const auto& t) -> EpsilonFamily { return t; }, tail_from_json(j, where));
}

Json tail_to_json(const TailFamily& t) {
    return std::visit(Overloaded{
                          [](const intensity::ZeroEps&) { return Json{{"kind", "zero"}}; },
                          [](const intensity::PowerEps& p) {
                              return Json{{"kind", "power"}, {"gamma", p.gamma}, {"sign", p.sign}};
                          },
                          [](const intensity::StepEps& s) {
                              return Json{{"kind", "step"}, {"left", s.left}, {"right", s.right}};
                          },
                      },
                      t);
}

Json epsilon_to_json(const EpsilonFamily& e) {
    if (const auto* ex = std::get_if<intensity::ExplicitEps>(&e)) {
        Json j{{"kind", "explicit"}};
        Json table = Json::array();
        for (const auto& [n, v] : ex->table) table.push_back(Json::array({n, v}));
        j["table"] = table;
        j["tail"] = ex->tail ? tail_to_json(*ex->tail) : Json(nullptr);
        return j;
    }
    if (const auto* z = std::get_if<intensity::ZeroEps>(&e)) return tail_to_json(*z);
    if (const auto* p = std::get_if<intensity::PowerEps>(&e)) return tail_to_json(*p);
    return tail_to_json(std::get<intensity::StepEps>(e));
}

// ----------------------------------------------------------------- params

criteria::FitOptions fit_from(Reader& r) {
    criteria::FitOptions f;
    f.n_min = r.integer("n_min", f.n_min);
    f.n_max = r.integer("n_max", f.n_max);
    f.tol = r.number("tol", f.tol);
    f.margin_sigmas = r.number("margin_sigmas", f.margin_sigmas);
    f.series_terms = r.integer("series_terms", f.series_terms);
    if (f.n_min < 1 || f.n_max < f.n_min * 8) throw ConfigError("params: need 1 <= n_min and n_max >= 8 n_min");
    if (!(f.tol > 0.0)) throw ConfigError("params.tol: must be > 0");
    if (!(f.margin_sigmas >= 0.0)) throw ConfigError("params.margin_sigmas: must be >= 0");
    if (f.series_terms < 1) throw ConfigError("params.series_terms: must be >= 1");
    return f;
}

Json fit_to_json(const criteria::FitOptions& f) {
    return Json{{"n_min", f.n_min}, {"n_max", f.n_max}, {"tol", f.tol}, {"margin_sigmas", f.margin_sigmas},
                {"series_terms", f.series_terms}};
}

sim::HopfOptions hopf_from(Reader& r) {
    sim::HopfOptions h;
    h.N = r.integer("N", h.N);
    h.samples = r.integer("samples", h.samples);
    h.beta = r.number("beta", h.beta);
    h.tail_factor = r.integer("tail_factor", h.tail_factor);
    return h;
}

Json hopf_to_json(const sim::HopfOptions& h) {
    return Json{{"N", h.N}, {"samples", h.samples}, {"beta", h.beta}, {"tail_factor", h.tail_factor}};
}

std::vector<double> density_vector(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) throw ConfigError(where + ": expected numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Params params_from(Command command, const Json& j) {
    Reader r(j, "params");
    Params out;
    switch (command) {
        case Command::check: {
            CheckParams p;
            if (r.has("conditions")) {
                p.conditions.clear();
                const Json& list = r.raw("conditions");
                if (!list.is_array()) r.fail("conditions", "an array of condition ids");
                for (const auto& c : list) {
                    const auto id = c.is_string() ? intensity::condition_from_string(c.get<std::string>())
                                                  : std::nullopt;
                    if (!id) r.fail("conditions", "condition ids among eq3_1, eq3_4, aut1, chi_zero");
                    p.conditions.push_back(*id);
                }
            }
            p.deficit_N = r.integer("deficit_N", p.deficit_N);
            p.mixing_n = r.integers("mixing_n", p.mixing_n);
            out = p;
            break;
        }
        case Command::asymptotics: {
            AsymptoticsParams p;
            if (r.has("kinds")) {
                p.kinds.clear();
                const Json& list = r.raw("kinds");
                if (!list.is_array()) r.fail("kinds", "an array");
                for (const auto& k : list) {
                    if (k == "rn_square_integral") {
                        p.kinds.push_back(criteria::SlopeKind::rn_square_integral);
                    } else if (k == "hellinger_growth") {
                        p.kinds.push_back(criteria::SlopeKind::hellinger_growth);
                    } else {
                        r.fail("kinds", "rn_square_integral or hellinger_growth");
                    }
                }
            }
            p.fit = fit_from(r);
            out = p;
            break;
        }
        case Command::classify: {
            ClassifyParams p;
            p.fit = fit_from(r);
            p.density_N = r.integer("density_N", p.density_N);
            if (r.has("densities")) {
                Reader d(r.raw("densities"), "params.densities");
                criteria::DensityProfile dp;
                dp.left_tail = density_vector(d.raw("left_tail"), d.path("left_tail"));
                dp.right_tail = density_vector(d.raw("right_tail"), d.path("right_tail"));
                if (d.has("window")) {
                    const Json& w = d.raw("window");
                    if (!w.is_array()) d.fail("window", "an array of density vectors");
                    for (const auto& cell : w) dp.window.push_back(density_vector(cell, d.path("window")));
                }
                d.finish();
                p.densities = std::move(dp);
            }
            out = p;
            break;
        }
        case Command::bracket: {
            criteria::BracketOptions b;
            b.fit = fit_from(r);
            b.t_min = r.number("t_min", b.t_min);
            b.t_max = r.number("t_max", b.t_max);
            b.grid_points = static_cast<int>(r.integer("grid_points", b.grid_points));
            b.rel_tol = r.number("rel_tol", b.rel_tol);
            if (!(b.rel_tol > 0.0)) throw ConfigError("params.rel_tol: must be > 0");
            out = b;
            break;
        }
        case Command::clt: {
            sim::CltOptions c;
            c.n = r.integer("n", c.n);
            c.samples = r.integer("samples", c.samples);
            c.checkpoints = r.integers("checkpoints", c.checkpoints);
            c.p_levels = r.numbers("p_levels", c.p_levels);
            c.alpha = r.number("alpha", c.alpha);
            out = c;
            break;
        }
        case Command::claim2: {
            sim::Claim2Options c;
            c.n_list = r.integers("n_list", c.n_list);
            c.samples = r.integer("samples", c.samples);
            out = c;
            break;
        }
        case Command::stopping: {
            sim::StoppingOptions s;
            s.r = r.number("r", s.r);
            s.eps = r.number("eps", s.eps);
            s.M = r.integer("M", s.M);
            s.N = r.integer("N", s.N);
            s.samples = r.integer("samples", s.samples);
            out = s;
            break;
        }
        case Command::hopf:
            out = hopf_from(r);
            break;
        case Command::scan: {
            sim::ScanOptions s;
            s.t_grid = r.numbers("t_grid", s.t_grid);
            s.hopf = hopf_from(r);
            s.monotone_tol = r.number("monotone_tol", s.monotone_tol);
            out = s;
            break;
        }
        case Command::tails: {
            TailsParams t;
            t.a = r.number("a", t.a);
            t.b = r.number("b", t.b);
            t.L = r.integer("L", t.L);
            if (r.has("threshold_A") && !r.raw("threshold_A").is_null()) {
                t.threshold_A = r.number("threshold_A", 1.0);
            }
            out = t;
            break;
        }
    }
    r.finish();
    return out;
}

Json params_to_json(const Params& params) {
    return std::visit(
        Overloaded{
            [](const CheckParams& p) {
                Json conditions = Json::array();
                for (auto c : p.conditions) conditions.push_back(intensity::to_string(c));
                return Json{{"conditions", conditions}, {"deficit_N", p.deficit_N}, {"mixing_n", p.mixing_n}};
            },
            [](const AsymptoticsParams& p) {
                Json kinds = Json::array();
                for (auto k : p.kinds) kinds.push_back(criteria::to_string(k));
                Json j{{"kinds", kinds}};
                j.update(fit_to_json(p.fit));
                return j;
            },
            [](const ClassifyParams& p) {
                Json j = fit_to_json(p.fit);
                j["density_N"] = p.density_N;
                if (p.densities) {
                    j["densities"] = Json{{"left_tail", p.densities->left_tail},
                                          {"right_tail", p.densities->right_tail},
                                          {"window", p.densities->window}};
                }
                return j;
            },
            [](const criteria::BracketOptions& b) {
                Json j = fit_to_json(b.fit);
                j.update(Json{{"t_min", b.t_min}, {"t_max", b.t_max}, {"grid_points", b.grid_points},
                              {"rel_tol", b.rel_tol}});
                return j;
            },
            [](const sim::CltOptions& c) {
                return Json{{"n", c.n},
                            {"samples", c.samples},
                            {"checkpoints", c.checkpoints},
                            {"p_levels", c.p_levels},
                            {"alpha", c.alpha}};
            },
            [](const sim::Claim2Options& c) { return Json{{"n_list", c.n_list}, {"samples", c.samples}}; },
            [](const sim::StoppingOptions& s) {
                return Json{{"r", s.r}, {"eps", s.eps}, {"M", s.M}, {"N", s.N}, {"samples", s.samples}};
            },
            [](const sim::HopfOptions& h) { return hopf_to_json(h); },
            [](const sim::ScanOptions& s) {
                Json j{{"t_grid", s.t_grid}};
                j.update(hopf_to_json(s.hopf));
                j["monotone_tol"] = s.monotone_tol;
                return j;
            },
            [](const TailsParams& t) {
                Json j{{"a", t.a}, {"b", t.b}, {"L", t.L}};
                j["threshold_A"] = t.threshold_A ? Json(*t.threshold_A) : Json(nullptr);
                return j;
            },
        },
        params);
}

// ----------------------------------------------------------------- serialization

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Non-finite doubles become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json evidence_to_json(const intensity::ConditionVerdict& v) {
    Json evidence = Json::array();
    for (const auto& e : v.evidence) {
        Json point{{"n", e.n}, {"partial", num(e.partial)}};
        if (e.secondary) point["secondary"] = num(*e.secondary);
        evidence.push_back(point);
    }
    return Json{{"condition", intensity::to_string(v.condition)}, {"holds", to_string(v.holds)}, {"evidence", evidence}};
}

Json interval_to_json(const intensity::Interval& i) { return Json::array({i.lo, i.hi}); }

Json limit_sets_to_json(const intensity::LimitSets& s) {
    return Json{{"minus", interval_to_json(s.minus)}, {"plus", interval_to_json(s.plus)}, {"disjoint", s.disjoint()}};
}

Json slope_fit_to_json(const criteria::SlopeFit& f) {
    Json points = Json::array();
    for (std::size_t i = 0; i < f.n.size(); ++i) points.push_back(Json{{"n", f.n[i]}, {"y", num(f.y[i])}});
    return Json{{"kind", criteria::to_string(f.kind)},
                {"slope", num(f.slope)},
                {"intercept", num(f.intercept)},
                {"correction", num(f.correction)},
                {"slope_stderr", num(f.slope_stderr)},
                {"residual", num(f.residual)},
                {"n_range", Json::array({f.n_min, f.n_max})},
                {"points", points}};
}

Json certificate_to_json(const criteria::Certificate& c) {
    return std::visit(Overloaded{
                          [](const std::monostate&) { return Json(nullptr); },
                          [](const criteria::HellingerSeries& s) {
                              return Json{{"type", "lemma3_9_series"},
                                          {"partial", num(s.partial)},
                                          {"exponent", num(s.exponent)},
                                          {"fit", slope_fit_to_json(s.fit)}};
                          },
                          [](const criteria::BetaCertificate& b) {
                              return Json{{"type", "prop3_4_beta"},     {"beta", num(b.beta)},
                                          {"c", num(b.c)},              {"c_upper", num(b.c_upper)},
                                          {"series_partial", num(b.series_partial)},
                                          {"fit", slope_fit_to_json(b.fit)}};
                          },
                          [](const criteria::LimitSetsDisjoint& l) {
                              return Json{{"type", "prop3_3_limit_sets"}, {"sets", limit_sets_to_json(l.sets)}};
                          },
                          [](const criteria::ChiNonzero& c) {
                              return Json{{"type", "chi_nonzero"}, {"chi", num(c.chi)}};
                          },
                      },
                      c);
}

Json classification_to_json(const criteria::ClassificationReport& r) {
    return Json{{"verdict", criteria::to_string(r.verdict)},
                {"certificate", certificate_to_json(r.certificate)},
                {"profile", profile_to_json(r.profile)},
                {"chi", opt(r.chi)},
                {"dissipativity_fit", r.dissipativity_fit ? slope_fit_to_json(*r.dissipativity_fit) : Json(nullptr)},
                {"conservativity_fit",
                 r.conservativity_fit ? slope_fit_to_json(*r.conservativity_fit) : Json(nullptr)}};
}

std::string fmt_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ----------------------------------------------------------------- commands

struct Outcome {
    Json body;
    std::optional<std::string> csv;
    bool anomaly = false;
};

Outcome run_check(const RunConfig& cfg, const CheckParams& p) {
    Json conditions = Json::array();
    for (auto id : p.conditions) conditions.push_back(evidence_to_json(intensity::check_condition(cfg.profile, id)));
    const auto sets = intensity::limit_sets(cfg.profile);
    Json mixing = Json::array();
    if (sets && sets->disjoint()) {
        for (auto n : p.mixing_n) {
            const auto m = criteria::mixing_bound(cfg.profile, n);
            mixing.push_back(Json{{"n", n},
                                  {"full_product", num(m.full_product)},
                                  {"window_product", num(m.window_product)},
                                  {"delta", num(m.delta)},
                                  {"bound", num(m.bound)},
                                  {"window_within_bound", m.window_product <= m.bound}});
        }
    }
    Json body{{"command", "check"}, {"profile", profile_to_json(cfg.profile)}, {"conditions", conditions}};
    body["chi"] = opt(intensity::chi(cfg.profile));
    body["limit_sets"] = sets ? limit_sets_to_json(*sets) : Json(nullptr);
    body["nonsingularity_deficit"] =
        Json{{"N", p.deficit_N}, {"value", num(criteria::nonsingularity_deficit(cfg.profile, p.deficit_N))}};
    body["mixing"] = mixing;
    return {body, std::nullopt, false};
}

Outcome run_asymptotics(const RunConfig& cfg, const AsymptoticsParams& p) {
    Json fits = Json::array();
    std::ostringstream csv;
    csv << "kind,n,value\n";
    for (auto kind : p.kinds) {
        const auto f = criteria::fit_growth(cfg.profile, kind, p.fit);
        fits.push_back(slope_fit_to_json(f));
        for (std::size_t i = 0; i < f.n.size(); ++i) {
            csv << criteria::to_string(kind) << ',' << f.n[i] << ',' << fmt_double(f.y[i]) << '\n';
        }
    }
    Json body{{"command", "asymptotics"}, {"profile", profile_to_json(cfg.profile)}, {"fits", fits}};
    return {body, csv.str(), false};
}

Outcome run_classify(const RunConfig& cfg, const ClassifyParams& p) {
    Json body{{"command", "classify"}};
    body.update(classification_to_json(criteria::classify(cfg.profile, p.fit)));
    if (p.densities) {
        const auto c = criteria::continuous_base_bound(*p.densities, p.density_N);
        body["continuous_base"] = Json{{"chi", num(c.chi)},
                                       {"D", num(c.D)},
                                       {"ratio", num(c.ratio)},
                                       {"series_partial", num(c.series_partial)},
                                       {"N", p.density_N},
                                       {"dissipative", to_string(c.dissipative)}};
    }
    return {body, std::nullopt, false};
}

Outcome run_bracket(const RunConfig& cfg, const criteria::BracketOptions& b) {
    const auto r = criteria::bifurcation_bracket(cfg.profile, b);
    Json scan = Json::array();
    std::ostringstream csv;
    csv << "t,verdict\n";
    for (const auto& [t, v] : r.scan) {
        scan.push_back(Json{{"t", t}, {"verdict", criteria::to_string(v)}});
        csv << fmt_double(t) << ',' << criteria::to_string(v) << '\n';
    }
    Json body{{"command", "bracket"},
              {"profile", profile_to_json(cfg.profile)},
              {"t_lower", num(r.t_lower)},
              {"t_upper", num(r.t_upper)},
              {"scan", scan}};
    body["lower_report"] = r.t_lower > 0.0 ? classification_to_json(r.lower_report) : Json(nullptr);
    body["upper_report"] = std::isfinite(r.t_upper) ? classification_to_json(r.upper_report) : Json(nullptr);
    return {body, csv.str(), false};
}

Outcome run_clt(const RunConfig& cfg, const sim::CltOptions& o) {
    const auto s = sim::clt_experiment(cfg.profile, o, cfg.rng);
    Json checkpoints = Json::array();
    for (const auto& c : s.checkpoints) {
        Json freq = Json::array();
        for (std::size_t i = 0; i < c.freq_above.size(); ++i) {
            freq.push_back(Json{{"p", o.p_levels[i]}, {"freq", c.freq_above[i]}});
        }
        checkpoints.push_back(Json{{"n", c.n},
                                   {"beta_n", num(c.beta_n)},
                                   {"drift", num(c.drift)},
                                   {"mean", num(c.mean)},
                                   {"variance", num(c.variance)},
                                   {"variance_stderr", num(c.variance_stderr)},
                                   {"target_variance", num(c.target_variance)},
                                   {"exact_variance", num(c.exact_variance)},
                                   {"variance_within_3sigma", c.variance_within_3sigma},
                                   {"ks", num(c.ks)},
                                   {"ks_critical", num(c.ks_critical)},
                                   {"ks_pass", c.ks_pass},
                                   {"freq_above", freq}});
    }
    Json body{{"command", "clt"}, {"profile", profile_to_json(cfg.profile)}, {"samples", o.samples},
              {"checkpoints", checkpoints}};
    return {body, std::nullopt, false};
}

Outcome run_claim2(const RunConfig& cfg, const sim::Claim2Options& o) {
    const auto s = sim::claim2_decay(cfg.profile, o, cfg.rng);
    Json points = Json::array();
    for (const auto& p : s.points) {
        points.push_back(Json{{"n", p.n},
                              {"eps", num(p.eps)},
                              {"threshold", num(p.threshold)},
                              {"L", p.L},
                              {"exact", num(p.exact)},
                              {"bound", num(p.bound)},
                              {"eps4", num(p.eps4)},
                              {"mc_freq", num(p.mc_freq)},
                              {"mc_sigma", num(p.mc_sigma)},
                              {"mc_within_3sigma", p.mc_within_3sigma},
                              {"beats_eps4", p.beats_eps4},
                              {"past_threshold", p.past_threshold}});
    }
    Json body{{"command", "claim2"}, {"profile", profile_to_json(cfg.profile)}, {"samples", o.samples},
              {"rate_max", num(s.rate_max)}};
    body["L_star"] = s.L_star ? Json(*s.L_star) : Json(nullptr);
    body["points"] = points;
    return {body, std::nullopt, false};
}

Outcome run_stopping(const RunConfig& cfg, const sim::StoppingOptions& o) {
    const auto s = sim::stopping_time_experiment(cfg.profile, o, cfg.rng);
    Json body{{"command", "stopping"},
              {"profile", profile_to_json(cfg.profile)},
              {"samples", o.samples},
              {"successes", s.successes},
              {"success_freq", num(s.success_freq)},
              {"small_suffix", s.small_suffix},
              {"conditional_successes", s.conditional_successes},
              {"conditional_overshoot_ok", s.conditional_overshoot_ok},
              {"conditional_fraction", num(s.conditional_fraction)},
              {"overshoot_bounded_by_step", s.overshoot_bounded_by_step},
              {"bullet_fraction", num(s.bullet_fraction)},
              {"overshoot_median", num(s.overshoot_median)},
              {"overshoot_max", num(s.overshoot_max)},
              {"crossing_index_median", num(s.crossing_index_median)}};
    return {body, std::nullopt, false};
}

Outcome run_hopf(const RunConfig& cfg, const sim::HopfOptions& o) {
    const auto s = sim::hopf_diagnostic(cfg.profile, o, cfg.rng);
    Json series = Json::array();
    std::ostringstream csv;
    csv << "n,median_partial,q10_partial,q90_partial,markov_freq,markov_bound\n";
    for (const auto& p : s.series) {
        series.push_back(Json{{"n", p.n},
                              {"median_partial", num(p.median_partial)},
                              {"q10_partial", num(p.q10_partial)},
                              {"q90_partial", num(p.q90_partial)},
                              {"markov_freq", num(p.markov_freq)},
                              {"markov_bound", p.markov_bound ? num(*p.markov_bound) : Json(nullptr)}});
        csv << p.n << ',' << fmt_double(p.median_partial) << ',' << fmt_double(p.q10_partial) << ','
            << fmt_double(p.q90_partial) << ',' << fmt_double(p.markov_freq) << ','
            << (p.markov_bound ? fmt_double(*p.markov_bound) : "") << '\n';
    }
    Json body{{"command", "hopf"},
              {"label", "HEURISTIC"},
              {"profile", profile_to_json(cfg.profile)},
              {"samples", o.samples},
              {"window", Json::array({s.window_lo, s.window_hi})},
              {"growth_exponent", num(s.growth_exponent)},
              {"indicator", s.indicator},
              {"markov_violations", s.markov_violations},
              {"series", series}};
    return {body, csv.str(), false};
}

Outcome run_scan(const RunConfig& cfg, const sim::ScanOptions& o) {
    const auto s = sim::scan_intensity(cfg.profile, o, cfg.rng);
    Json points = Json::array();
    std::ostringstream csv;
    csv << "t,growth_exponent,indicator,final_median\n";
    for (const auto& p : s.points) {
        points.push_back(Json{{"t", p.t},
                              {"growth_exponent", num(p.growth_exponent)},
                              {"indicator", p.indicator},
                              {"final_median", num(p.final_median)}});
        csv << fmt_double(p.t) << ',' << fmt_double(p.growth_exponent) << ',' << p.indicator << ','
            << fmt_double(p.final_median) << '\n';
    }
    Json body{{"command", "scan"},
              {"label", "HEURISTIC"},
              {"profile", profile_to_json(cfg.profile)},
              {"samples", o.hopf.samples},
              {"points", points},
              {"monotone", s.monotone},
              {"anomaly", s.anomaly},
              {"anomalies", s.anomalies}};
    return {body, csv.str(), s.anomaly};
}

Outcome run_tails(const TailsParams& p) {
    const dist::SkellamLaw law{p.a, p.b};
    const auto tail = dist::skellam_tail(law, p.L);
    const auto m = dist::skellam_moments(law);
    Json body{{"command", "tails"},
              {"law", Json{{"a", p.a}, {"b", p.b}}},
              {"L", p.L},
              {"exact_tail", num(tail.exact_tail)},
              {"bound", num(tail.bound)},
              {"exact_le_bound", tail.exact_tail <= tail.bound},
              {"moments", Json{{"mean", m.mean}, {"variance", m.variance}}},
              {"cutoff", dist::skellam_cutoff(law)}};
    if (p.threshold_A) {
        const auto L_star = dist::tail_threshold(*p.threshold_A);
        body["threshold"] = Json{{"A", *p.threshold_A}, {"L_star", L_star ? Json(*L_star) : Json(nullptr)}};
    } else {
        body["threshold"] = nullptr;
    }
    return {body, std::nullopt, false};
}

}  // namespace

std::string_view to_string(Command c) {
    switch (c) {
        case Command::check: return "check";
        case Command::asymptotics: return "asymptotics";
        case Command::classify: return "classify";
        case Command::bracket: return "bracket";
        case Command::clt: return "clt";
        case Command::claim2: return "claim2";
        case Command::stopping: return "stopping";
        case Command::hopf: return "hopf";
        case Command::scan: return "scan";
        case Command::tails: return "tails";
    }
    return "check";
}

std::optional<Command> command_from_string(std::string_view name) {
    for (auto c : {Command::check, Command::asymptotics, Command::classify, Command::bracket, Command::clt,
                   Command::claim2, Command::stopping, Command::hopf, Command::scan, Command::tails}) {
        if (name == to_string(c)) return c;
    }
    return std::nullopt;
}

bool supports_csv(Command command) {
    return command == Command::asymptotics || command == Command::bracket || command == Command::hopf ||
           command == Command::scan;
}

intensity::IntensityProfile profile_from_json(const Json& j) {
    Reader r(j, "profile");
    intensity::IntensityProfile p;
    p.base = r.number("base", 1.0);
    p.scale = r.number("scale", 1.0);
    if (r.has("epsilon")) p.epsilon = epsilon_from_json(r.raw("epsilon"), "profile.epsilon");
    r.finish();
    try {
        intensity::validate(p);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("profile: ") + e.what());
    }
    return p;
}

Json profile_to_json(const intensity::IntensityProfile& profile) {
    return Json{{"base", profile.base}, {"scale", profile.scale}, {"epsilon", epsilon_to_json(profile.epsilon)}};
}

RunConfig parse_config(const Json& doc, Command command) {
    Reader r(doc, "config");
    RunConfig cfg;
    cfg.command = command;
    if (r.has("command")) {
        const auto named = r.string("command", "");
        if (named != to_string(command)) {
            throw ConfigError("config.command '" + named + "' does not match the requested command '" +
                              std::string(to_string(command)) + "'");
        }
    }
    if (r.has("profile")) cfg.profile = profile_from_json(r.raw("profile"));
    if (r.has("rng")) {
        Reader g(r.raw("rng"), "rng");
        cfg.rng.seed = g.unsigned_integer("seed", 0);
        cfg.rng.stream = g.unsigned_integer("stream", 0);
        g.finish();
    }
    if (r.has("output")) {
        Reader o(r.raw("output"), "output");
        const auto format = o.string("format", "json");
        if (format == "json") {
            cfg.format = Format::json;
        } else if (format == "csv") {
            cfg.format = Format::csv;
        } else {
            o.fail("format", "json or csv");
        }
        if (o.has("path") && !o.raw("path").is_null()) cfg.out_path = o.string("path", "");
        o.finish();
    }
    cfg.params = params_from(command, r.has("params") ? r.raw("params") : Json::object());
    r.finish();
    return cfg;
}

Json config_echo(const RunConfig& config) {
    Json output{{"format", config.format == Format::json ? "json" : "csv"}};
    output["path"] = config.out_path ? Json(*config.out_path) : Json(nullptr);
    return Json{{"command", to_string(config.command)},
                {"profile", profile_to_json(config.profile)},
                {"rng", Json{{"seed", config.rng.seed}, {"stream", config.rng.stream}}},
                {"output", output},
                {"params", params_to_json(config.params)}};
}

RunResult run(const RunConfig& config) {
    if (config.format == Format::csv && !supports_csv(config.command)) {
        throw ConfigError("csv output is not available for '" + std::string(to_string(config.command)) + "'");
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome = std::visit(
        Overloaded{
            [&](const CheckParams& p) { return run_check(config, p); },
            [&](const AsymptoticsParams& p) { return run_asymptotics(config, p); },
            [&](const ClassifyParams& p) { return run_classify(config, p); },
            [&](const criteria::BracketOptions& p) { return run_bracket(config, p); },
            [&](const sim::CltOptions& p) { return run_clt(config, p); },
            [&](const sim::Claim2Options& p) { return run_claim2(config, p); },
            [&](const sim::StoppingOptions& p) { return run_stopping(config, p); },
            [&](const sim::HopfOptions& p) { return run_hopf(config, p); },
            [&](const sim::ScanOptions& p) { return run_scan(config, p); },
            [&](const TailsParams& p) { return run_tails(p); },
        },
        config.params);
    RunResult result;
    result.body = std::move(outcome.body);
    result.csv = std::move(outcome.csv);
    result.anomaly = outcome.anomaly;
    result.workers = sim::default_workers();
    result.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

Json make_report(const RunConfig& config, const RunResult& result, std::string timestamp) {
    Json header{{"artifact", "suspension-lab"},
                {"version", kVersion},
                {"schema_version", kSchemaVersion},
                {"command", to_string(config.command)},
                {"timestamp", std::move(timestamp)},
                {"runtime_seconds", result.runtime_seconds},
                {"workers", result.workers},
                {"rng", Json{{"seed", config.rng.seed}, {"stream", config.rng.stream}}},
                {"config", config_echo(config)}};
    return Json{{"header", header}, {"body", result.body}};
}

int exit_code_for(const std::exception_ptr& error) {
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError&) {
        return kConfig;
    } catch (const DomainError&) {
        return kConfig;
    } catch (const Json::exception&) {
        return kConfig;
    } catch (const PreconditionError&) {
        return kPrecondition;
    } catch (const CoverageError&) {
        return kCoverage;
    } catch (const AnomalyError&) {
        return kAnomaly;
    } catch (...) {
        return kInternal;
    }
}

}  // namespace suslab::cli
