#pragma once

// Command-line front end.  One subcommand per process: parse, drive the
// library, emit machine-readable output, map exceptions to exit codes
// (0 success, 2 rejected input, 3 precision budget exceeded).
//
// Output conventions: series go to CSV with a single header line, scalar
// results go to a JSON report.  With --out the CSV lands in the file and
// the report on stdout; without it the CSV takes stdout and the report
// moves to stderr so the two stay separable in pipelines.  Commands that
// produce only a report (periods, single-n fruit, dioph construction)
// write it to --out or stdout.  All floating-point fields are printed
// with 17 significant digits, so equal doubles print equal bytes and
// reruns at the same precision level diff clean.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ellorbit/curve.hpp"
#include "ellorbit/diophantine.hpp"
#include "ellorbit/distribution.hpp"
#include "ellorbit/errors.hpp"
#include "ellorbit/fruit.hpp"
#include "ellorbit/orbit.hpp"
#include "ellorbit/periods.hpp"
#include "ellorbit/spacing.hpp"
#include "ellorbit/weierstrass.hpp"

namespace ellorbit {

using ordered_json = nlohmann::ordered_json;

struct RunConfig {
    std::string command;
    std::string curve_spec;
    std::string point_spec;
    std::string offset_spec;    // second point: density ball centre, spacing offset
    std::string interval_spec;  // density x-window, "lo:hi"
    std::string family_spec;    // fruit n, "n" or "lo:hi"
    std::string alpha_spec;     // dioph rotation number
    std::string psi;            // dioph approximation rate preset
    std::string out_path;
    std::string precision = "standard";
    std::int64_t n_max = 1000;
    double trim = 0.1;
    double eps = 0.0;
    int threads = 0;  // 0 = all cores
    int bins = 200;
    std::size_t depth = 6;  // dioph construction depth
};

namespace io_detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON has no quiet representation for non-finite numbers; null is the
// honest stand-in and keeps reports parseable.
inline ordered_json json_num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline double parse_number(const std::string& text, const char* what) {
    try {
        return static_cast<double>(bigreal(curve_detail::parse_rational(text)));
    } catch (const validation_error&) {
        throw validation_error(std::string(what) + ": cannot parse number '" + text + "'");
    }
}

inline std::pair<double, double> parse_point_text(const std::string& text, const char* what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
        throw validation_error(std::string(what) + " must be 'x,y' (got '" + text + "')");
    return {parse_number(text.substr(0, comma), what),
            parse_number(text.substr(comma + 1), what)};
}

inline std::pair<double, double> parse_interval_text(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || text.find(':', colon + 1) != std::string::npos)
        throw validation_error("interval must be 'lo:hi' (got '" + text + "')");
    const double lo = parse_number(text.substr(0, colon), "interval");
    const double hi = parse_number(text.substr(colon + 1), "interval");
    if (!(lo < hi))
        throw validation_error("interval needs lo < hi (got '" + text + "')");
    return {lo, hi};
}

// fruit accepts one index or an inclusive sweep "lo:hi"
inline std::pair<std::int64_t, std::int64_t> parse_family_text(const std::string& text) {
    auto parse_int = [&](const std::string& piece) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(piece, &used);
            if (used != piece.size()) throw std::invalid_argument(piece);
            return static_cast<std::int64_t>(v);
        } catch (const std::exception&) {
            throw validation_error("fruit index must be an integer (got '" + piece + "')");
        }
    };
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const std::int64_t n = parse_int(text);
        return {n, n};
    }
    const std::int64_t lo = parse_int(text.substr(0, colon));
    const std::int64_t hi = parse_int(text.substr(colon + 1));
    if (lo > hi)
        throw validation_error("fruit sweep needs lo <= hi (got '" + text + "')");
    return {lo, hi};
}

inline void check_precision_level(const std::string& level) {
    if (level != "standard" && level != "high")
        throw validation_error("precision level must be 'standard' or 'high' (got '" +
                               level + "')");
}

inline int resolve_threads(int requested) {
    if (requested < 0)
        throw validation_error("thread count must be nonnegative");
    if (requested == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }
    return std::min(requested, 64);
}

// Output plumbing per the header comment: series and report streams plus
// the owned file handle when --out is in play.
struct Sinks {
    std::ofstream file;
    std::ostream* series = nullptr;
    std::ostream* report = nullptr;
};

inline Sinks open_sinks(const RunConfig& cfg, bool has_series,
                        std::ostream& out, std::ostream& err) {
    Sinks s;
    if (!cfg.out_path.empty()) {
        s.file.open(cfg.out_path, std::ios::binary | std::ios::trunc);
        if (!s.file)
            throw validation_error("cannot open output file '" + cfg.out_path + "'");
        if (has_series) {
            s.series = &s.file;
            s.report = &out;
        } else {
            s.report = &s.file;
        }
    } else if (has_series) {
        s.series = &out;
        s.report = &err;
    } else {
        s.report = &out;
    }
    return s;
}

inline void emit_report(const Sinks& s, const ordered_json& j) {
    *s.report << j.dump(2) << '\n';
}

inline ordered_json curve_json(const Curve& c) {
    ordered_json j;
    j["form"] = c.form;
    j["g2"] = c.g2;
    j["g3"] = c.g3;
    j["two_components"] = c.two_components;
    j["roots"] = c.roots;
    return j;
}

inline ordered_json point_json(const RealPoint& p) {
    ordered_json j;
    j["x"] = json_num(p.x);
    j["y"] = json_num(p.y);
    j["component"] = p.component == Component::bounded ? "bounded" : "unbounded";
    return j;
}

// Chunked orbit walk: [1, n_max] is cut into one contiguous range per
// thread, each worker owns a State, and the caller folds the states in
// range order.  The torus additions make a chained scan bit-identical to
// a direct multiplication, so the fold reproduces the single-thread
// result byte for byte whatever the thread count.
template <typename State, typename Visit>
std::vector<State> partitioned_scan(const Orbit& orb, std::int64_t n_max, int threads,
                                    const Visit& visit) {
    const auto chunks = static_cast<std::int64_t>(
        std::max(1, std::min<std::int64_t>(threads, n_max)));
    std::vector<State> states(static_cast<std::size_t>(chunks));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(chunks));
    const std::int64_t step = n_max / chunks;
    const std::int64_t extra = n_max % chunks;
    std::int64_t first = 1;
    for (std::int64_t i = 0; i < chunks; ++i) {
        const std::int64_t last = first + step - 1 + (i < extra ? 1 : 0);
        State* state = &states[static_cast<std::size_t>(i)];
        pool.emplace_back([&orb, &visit, state, first, last] {
            orbit_scan(orb, first, last,
                       [&](const OrbitSample& s) { visit(*state, s); });
        });
        first = last + 1;
    }
    for (auto& t : pool) t.join();
    return states;
}

inline Curve parse_curve_spec(const RunConfig& cfg) {
    if (cfg.curve_spec.empty())
        throw validation_error("this command needs --curve");
    return parse_curve(cfg.curve_spec);
}

inline RealPoint parse_point_on(const Curve& c, const std::string& spec, const char* what) {
    const auto [x, y] = parse_point_text(spec, what);
    return make_point(c, x, y);
}

// ---------------------------------------------------------------------------
// periods

inline int cmd_periods(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Curve c = parse_curve_spec(cfg);
    const Lattice lat = compute_periods(c);
    Sinks sinks = open_sinks(cfg, false, out, err);

    ordered_json j;
    j["command"] = "periods";
    j["curve"] = curve_json(c);
    j["omega1"] = lat.omega1;
    j["omega2_re"] = lat.omega2_re;
    j["omega2_im"] = lat.omega2_im;
    j["shape"] = lat.shape == LatticeShape::rectangular ? "rectangular" : "rhombic";
    j["nome_q"] = lat.q;

    const double axis = omega1_by_quadrature(c);
    double max_gap = std::abs(axis - lat.omega1) / lat.omega1;
    ordered_json check;
    check["omega1_axis"] = axis;
    if (c.two_components) {
        const double loop = omega1_by_bounded_loop(c);
        const double gap = omega2_im_by_quadrature(c);
        check["omega1_loop"] = loop;
        check["omega2_im_gap"] = gap;
        max_gap = std::max(max_gap, std::abs(loop - lat.omega1) / lat.omega1);
        max_gap = std::max(max_gap, std::abs(gap - lat.omega2_im) / lat.omega2_im);
    }
    check["max_rel_gap"] = max_gap;
    j["quadrature_check"] = check;

    if (cfg.precision == "high") {
        j["omega1_extended"] = lat.omega1_hi.str(25);
        j["omega2_im_extended"] = lat.omega2_im_hi.str(25);
    }
    emit_report(sinks, j);
    return 0;
}

// ---------------------------------------------------------------------------
// orbit

inline int cmd_orbit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Curve c = parse_curve_spec(cfg);
    if (cfg.point_spec.empty())
        throw validation_error("orbit needs --point");
    if (cfg.n_max < 0)
        throw validation_error("orbit needs --nmax >= 0");
    const RealPoint base = parse_point_on(c, cfg.point_spec, "--point");
    const Orbit orb = make_orbit(c, base);
    const int threads = resolve_threads(cfg.threads);
    Sinks sinks = open_sinks(cfg, true, out, err);

    *sinks.series << "n,x,y,logx2\n";
    std::int64_t pole_hits = 0;
    if (cfg.n_max >= 1) {
        struct Chunk {
            std::string rows;
            std::int64_t poles = 0;
        };
        const auto chunks = partitioned_scan<Chunk>(
            orb, cfg.n_max, threads, [&](Chunk& ch, const OrbitSample& s) {
                ch.rows += std::to_string(s.n);
                ch.rows += ',';
                if (s.at_infinity) {
                    // pole-guard sample: magnitude is certified, value is not
                    ch.rows += "inf,inf,inf";
                    ++ch.poles;
                } else {
                    const auto [x, y] = c.input_map.from_canonical(s.x, s.y);
                    ch.rows += fmt(x);
                    ch.rows += ',';
                    ch.rows += fmt(y);
                    ch.rows += ',';
                    ch.rows += fmt(std::log(x + 2.0));
                }
                ch.rows += '\n';
            });
        for (const auto& ch : chunks) {
            *sinks.series << ch.rows;
            pole_hits += ch.poles;
        }
    }

    ordered_json j;
    j["command"] = "orbit";
    j["curve"] = curve_json(c);
    j["base"] = point_json(base);
    j["n_max"] = cfg.n_max;
    j["omega1"] = orb.lattice.omega1;
    j["pole_guard_hits"] = pole_hits;

    if (cfg.n_max >= 1) {
        const GrowthReport rep = growth_witnesses(orb, cfg.n_max);
        ordered_json g;
        g["coordinates"] = "canonical";
        g["coeff_x"] = rep.coeff_x;
        g["coeff_y"] = rep.coeff_y;
        g["cx"] = rep.cx;
        g["cy"] = rep.cy;
        g["stride"] = rep.stride;
        g["witness_count"] = rep.witnesses.size();
        ordered_json ws = ordered_json::array();
        for (const GrowthWitness& w : rep.witnesses) {
            ordered_json one;
            one["n"] = w.n;
            one["x"] = json_num(w.x);
            one["x_bound"] = json_num(w.x_bound);
            one["y_abs"] = json_num(w.y_abs);
            one["y_bound"] = json_num(w.y_bound);
            one["y_ok"] = w.y_ok;
            one["hurwitz"] = w.hurwitz;
            ws.push_back(one);
        }
        g["witnesses"] = ws;
        j["growth"] = g;
    }
    emit_report(sinks, j);
    return 0;
}

// ---------------------------------------------------------------------------
// density

inline int cmd_density(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Curve c = parse_curve_spec(cfg);
    if (cfg.point_spec.empty())
        throw validation_error("density needs --point");
    if (cfg.n_max < 1)
        throw validation_error("density needs --nmax >= 1");
    if (cfg.bins < 8 || cfg.bins > 100000)
        throw validation_error("density needs --bins in 8..100000");
    const RealPoint base = parse_point_on(c, cfg.point_spec, "--point");
    const Orbit orb = make_orbit(c, base);
    const DensityModel model = make_density_model(c, orb.lattice);
    const Component base_comp = orb.bounded_base() ? Component::bounded : Component::unbounded;
    const int threads = resolve_threads(cfg.threads);

    // optional targets
    const bool has_interval = !cfg.interval_spec.empty();
    double ilo = 0.0, ihi = 0.0;
    if (has_interval) {
        const auto [lo, hi] = parse_interval_text(cfg.interval_spec);
        ilo = c.input_map.to_canonical(lo, 0.0).first;
        ihi = c.input_map.to_canonical(hi, 0.0).first;
    }
    const bool has_ball = !cfg.offset_spec.empty();
    RealPoint center;
    if (has_ball) {
        if (!(cfg.eps > 0.0))
            throw validation_error("a density ball needs --eps > 0");
        center = parse_point_on(c, cfg.offset_spec, "--offset");
    } else if (cfg.eps > 0.0) {
        throw validation_error("--eps needs a ball centre in --offset");
    }

    // Bin edges over the support of the limiting law, in canonical x.  The
    // unbounded piece is cut at its 99th percentile so the edge histogram
    // stays informative; the leftover tail gets one explicit final row.
    std::vector<double> edges;
    std::size_t lobe_bins = 0;
    {
        const double q_target = base_comp == Component::bounded ? 0.995 : 0.99;
        double lo = c.e_max();
        double hi = model.axis_split;
        while (theoretical_x_cdf(model, base_comp, hi).value < q_target)
            hi = c.e_max() + 2.0 * (hi - c.e_max());
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (theoretical_x_cdf(model, base_comp, mid).value < q_target ? lo : hi) = mid;
        }
        const double axis_cap = hi;

        if (base_comp == Component::bounded) {
            // half the mass sits on the lobe; give each piece its own bins
            lobe_bins = static_cast<std::size_t>(cfg.bins);
            for (std::size_t i = 0; i <= lobe_bins; ++i)
                edges.push_back(c.e_min() + (c.e_mid() - c.e_min()) *
                                                static_cast<double>(i) / lobe_bins);
        }
        const auto axis_bins = static_cast<std::size_t>(
            base_comp == Component::bounded ? std::max(8, cfg.bins / 2) : cfg.bins);
        for (std::size_t i = 0; i <= axis_bins; ++i)
            edges.push_back(c.e_max() + (axis_cap - c.e_max()) *
                                            static_cast<double>(i) / axis_bins);
    }

    // one pass: bin counts plus interval and ball hit counts
    struct Counts {
        std::vector<std::int64_t> bins;
        std::int64_t interval_hits = 0;
        std::int64_t ball_hits = 0;
        std::int64_t poles = 0;
    };
    const auto chunks = partitioned_scan<Counts>(
        orb, cfg.n_max, threads, [&](Counts& ct, const OrbitSample& s) {
            if (ct.bins.empty()) ct.bins.assign(edges.size() - 1, 0);
            if (s.at_infinity) {
                ++ct.poles;
                return;
            }
            const auto it = std::upper_bound(edges.begin(), edges.end(), s.x);
            if (it != edges.begin() && it != edges.end()) {
                const auto idx = static_cast<std::size_t>(it - edges.begin()) - 1;
                // the lobe/axis boundary is a gap, not a bin edge
                if (lobe_bins == 0 || idx != lobe_bins || s.x <= edges[lobe_bins])
                    ++ct.bins[idx];
            }
            if (has_interval && s.x >= ilo && s.x <= ihi) ++ct.interval_hits;
            if (has_ball &&
                std::hypot(s.x - center.x, s.y - center.y) <= cfg.eps)
                ++ct.ball_hits;
        });
    Counts total;
    total.bins.assign(edges.size() - 1, 0);
    for (const auto& ct : chunks) {
        if (!ct.bins.empty())
            for (std::size_t i = 0; i < total.bins.size(); ++i) total.bins[i] += ct.bins[i];
        total.interval_hits += ct.interval_hits;
        total.ball_hits += ct.ball_hits;
        total.poles += ct.poles;
    }

    Sinks sinks = open_sinks(cfg, true, out, err);
    *sinks.series << "x_lo,x_hi,model_prob,count,empirical_frac\n";
    const auto n_maxd = static_cast<double>(cfg.n_max);
    std::int64_t binned = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (lobe_bins != 0 && i == lobe_bins) continue;  // the seam row is not a bin
        const CdfValue below = theoretical_x_cdf(model, base_comp, edges[i]);
        const CdfValue above = theoretical_x_cdf(model, base_comp, edges[i + 1]);
        const auto [xl, yl_unused] = c.input_map.from_canonical(edges[i], 0.0);
        const auto [xh, yh_unused] = c.input_map.from_canonical(edges[i + 1], 0.0);
        (void)yl_unused;
        (void)yh_unused;
        *sinks.series << fmt(xl) << ',' << fmt(xh) << ','
                      << fmt(std::max(0.0, above.value - below.value)) << ','
                      << total.bins[i] << ','
                      << fmt(static_cast<double>(total.bins[i]) / n_maxd) << '\n';
        binned += total.bins[i];
    }
    {
        // tail row: everything past the percentile cap
        const double cap = edges.back();
        const CdfValue below = theoretical_x_cdf(model, base_comp, cap);
        const std::int64_t rest = cfg.n_max - binned - total.poles - total.interval_hits * 0;
        const auto [xl, y_unused] = c.input_map.from_canonical(cap, 0.0);
        (void)y_unused;
        std::int64_t tail_count = rest;
        // pole-guard samples sit at astronomically large x, hence in the tail
        tail_count += total.poles;
        *sinks.series << fmt(xl) << ",inf," << fmt(std::max(0.0, 1.0 - below.value))
                      << ',' << tail_count << ','
                      << fmt(static_cast<double>(tail_count) / n_maxd) << '\n';
    }

    ordered_json j;
    j["command"] = "density";
    j["curve"] = curve_json(c);
    j["base"] = point_json(base);
    j["n_max"] = cfg.n_max;
    j["omega1"] = orb.lattice.omega1;
    j["normalization_residual"] = model.norm_residual;
    j["pole_guard_hits"] = total.poles;
    j["sup_cdf_distance"] = empirical_vs_theoretical(orb, model, cfg.n_max);
    if (has_interval) {
        const double rho = region_density(model, base_comp, region_x_slice(ilo, ihi));
        ordered_json r;
        r["x_lo"] = parse_interval_text(cfg.interval_spec).first;
        r["x_hi"] = parse_interval_text(cfg.interval_spec).second;
        r["model_density"] = rho;
        r["count"] = total.interval_hits;
        r["empirical_density"] = static_cast<double>(total.interval_hits) / n_maxd;
        r["abs_gap"] = std::abs(static_cast<double>(total.interval_hits) / n_maxd - rho);
        j["interval"] = r;
    }
    if (has_ball) {
        const PointDensity pd = point_density(model, center, base_comp, cfg.eps);
        ordered_json b;
        b["center"] = point_json(center);
        b["eps"] = cfg.eps;
        b["model_density"] = pd.value;
        b["model_order_eps2"] = pd.order_eps2;
        b["count"] = total.ball_hits;
        b["empirical_density"] = static_cast<double>(total.ball_hits) / n_maxd;
        j["ball"] = b;
    }
    emit_report(sinks, j);
    return 0;
}

// ---------------------------------------------------------------------------
// spacing

inline int cmd_spacing(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Curve c = parse_curve_spec(cfg);
    if (cfg.point_spec.empty())
        throw validation_error("spacing needs --point");
    const RealPoint base = parse_point_on(c, cfg.point_spec, "--point");
    const RealPoint offset = cfg.offset_spec.empty()
                                 ? base
                                 : parse_point_on(c, cfg.offset_spec, "--offset");
    const Orbit orb = make_orbit(c, base);
    const SpacingProblem pr = make_spacing_problem(c, offset);
    const Component base_comp = orb.bounded_base() ? Component::bounded : Component::unbounded;

    const EmpiricalDistribution hist =
        empirical_spacing(orb, offset, cfg.n_max, cfg.trim, cfg.bins);
    const SpacingFit fit = spacing_fit(pr, base_comp, hist);

    Sinks sinks = open_sinks(cfg, true, out, err);
    *sinks.series << "d_lo,d_hi,empirical,model\n";
    for (std::size_t i = 0; i + 1 < fit.edges.size(); ++i)
        *sinks.series << fmt(fit.edges[i]) << ',' << fmt(fit.edges[i + 1]) << ','
                      << fmt(fit.empirical[i]) << ',' << fmt(fit.model[i]) << '\n';

    ordered_json j;
    j["command"] = "spacing";
    j["curve"] = curve_json(c);
    j["base"] = point_json(base);
    j["offset"] = point_json(offset);
    j["n_max"] = cfg.n_max;
    j["trim"] = cfg.trim;
    j["bins"] = cfg.bins;
    j["window"] = {json_num(fit.edges.front()), json_num(fit.edges.back())};
    j["sup_abs"] = fit.sup_abs;
    j["peak_density"] = fit.scale;
    j["sup_rel"] = fit.sup_rel;
    j["model_unreliable"] = fit.model_unreliable;
    emit_report(sinks, j);
    return 0;
}

// ---------------------------------------------------------------------------
// fruit

inline ordered_json fruit_instance_json(const FruitInstance& inst, double rel_tol) {
    const BandIntegrals bands = band_measures(inst, rel_tol);
    const BandIntegrals arcs = band_arclengths(inst);
    const double omega1 = compute_periods(inst.depressed).omega1;

    ordered_json j;
    j["n"] = inst.n;
    j["A"] = inst.a2;
    j["B"] = inst.a4;
    j["positivity_unchecked"] = inst.positivity_unchecked;
    ordered_json iv;
    // band endpoints in the coordinates of Y^2 = X^3 + A X^2 + B X
    iv["first"] = {inst.x1_left - inst.shift, inst.x1_right - inst.shift};
    iv["second"] = {inst.x2_left - inst.shift, inst.x2_right - inst.shift};
    j["intervals"] = iv;
    j["density"] = (bands.first + bands.second) / (2.0 * omega1);
    j["conjecture_residual"] = std::abs(bands.first - 0.5 * bands.second) / bands.second;
    ordered_json meas;
    meas["first"] = bands.first;
    meas["second"] = bands.second;
    j["band_measures"] = meas;
    ordered_json arc;
    arc["first"] = arcs.first;
    arc["second"] = arcs.second;
    j["arclengths"] = arc;
    j["omega1"] = omega1;
    return j;
}

inline int cmd_fruit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.family_spec.empty())
        throw validation_error("fruit needs --n (one index or 'lo:hi')");
    const auto [lo, hi] = parse_family_text(cfg.family_spec);
    const double rel_tol = cfg.precision == "high" ? 1e-13 : 1e-12;

    if (lo == hi) {
        const FruitInstance inst = build_instance(lo);
        Sinks sinks = open_sinks(cfg, false, out, err);
        ordered_json j;
        j["command"] = "fruit";
        ordered_json body = fruit_instance_json(inst, rel_tol);
        for (auto& [key, value] : body.items()) j[key] = value;

        if (!cfg.point_spec.empty()) {
            if (cfg.n_max < 1)
                throw validation_error("a fruit generator scan needs --nmax >= 1");
            const RealPoint gen = parse_point_on(inst.curve, cfg.point_spec, "--point");
            const SolutionHits hits = solution_multiples(inst, gen, cfg.n_max);
            ordered_json s;
            s["generator"] = point_json(gen);
            s["n_max"] = cfg.n_max;
            s["base_unbounded"] = hits.base_unbounded;
            s["smallest"] = hits.smallest;
            s["count"] = hits.multiples.size();
            s["empirical_density"] = hits.empirical_density;
            constexpr std::size_t kListCap = 200;
            ordered_json ms = ordered_json::array();
            for (std::size_t i = 0; i < hits.multiples.size() && i < kListCap; ++i)
                ms.push_back(hits.multiples[i]);
            s["multiples"] = ms;
            s["multiples_truncated"] = hits.multiples.size() > kListCap;
            j["solutions"] = s;
        }
        emit_report(sinks, j);
        return 0;
    }

    if (!cfg.point_spec.empty())
        throw validation_error("a generator applies to a single fruit index, not a sweep");
    Sinks sinks = open_sinks(cfg, true, out, err);
    *sinks.series
        << "n,A,B,first_lo,first_hi,second_lo,second_hi,density,conjecture_residual,"
           "positivity_unchecked\n";
    std::int64_t emitted = 0;
    for (std::int64_t n = lo; n <= hi; ++n) {
        const FruitInstance inst = build_instance(n);
        const BandIntegrals bands = band_measures(inst, rel_tol);
        const double omega1 = compute_periods(inst.depressed).omega1;
        *sinks.series << n << ',' << fmt(inst.a2) << ',' << fmt(inst.a4) << ','
                      << fmt(inst.x1_left - inst.shift) << ','
                      << fmt(inst.x1_right - inst.shift) << ','
                      << fmt(inst.x2_left - inst.shift) << ','
                      << fmt(inst.x2_right - inst.shift) << ','
                      << fmt((bands.first + bands.second) / (2.0 * omega1)) << ','
                      << fmt(std::abs(bands.first - 0.5 * bands.second) / bands.second)
                      << ',' << (inst.positivity_unchecked ? 1 : 0) << '\n';
        ++emitted;
    }
    ordered_json j;
    j["command"] = "fruit";
    j["sweep"] = {{"lo", lo}, {"hi", hi}, {"rows", emitted}};
    emit_report(sinks, j);
    return 0;
}

// ---------------------------------------------------------------------------
// dioph

inline int cmd_dioph(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const bool has_alpha = !cfg.alpha_spec.empty();
    const bool has_point = !cfg.point_spec.empty();
    if (has_alpha && has_point)
        throw validation_error("give --alpha or a curve point, not both");

    // construction mode: a rate but no rotation number
    if (!has_alpha && !has_point) {
        if (cfg.psi.empty())
            throw validation_error(
                "dioph needs --alpha or --curve/--point for a witness scan, "
                "or --psi alone to construct a fast-approximable number");
        const PsiPreset psi = psi_from_name(cfg.psi);
        if (cfg.depth < 1 || cfg.depth > 64)
            throw validation_error("construction depth must lie in 1..64");
        const ContinuedFraction cf = construct_fast_approximable(psi, cfg.depth);
        Sinks sinks = open_sinks(cfg, false, out, err);
        ordered_json j;
        j["command"] = "dioph";
        j["mode"] = "construct";
        j["psi"] = psi_name(psi);
        j["depth"] = cfg.depth;
        j["truncated"] = cf.truncated;
        j["alpha"] = json_num(static_cast<double>(cf_value(cf).to_long_double()));
        ordered_json conv = ordered_json::array();
        const std::size_t last = cf.q.size() - 1;
        for (std::size_t k = 0; k < cf.q.size(); ++k) {
            ordered_json one;
            one["k"] = k;
            one["a"] = cf.a[k].str();
            one["p"] = cf.p[k].str();
            one["q"] = cf.q[k].str();
            if (k > 0 && k < last)
                one["bound_holds"] = construction_bound_holds(cf, psi, k);
            conv.push_back(one);
        }
        j["convergents"] = conv;
        emit_report(sinks, j);
        return 0;
    }

    // witness scan mode
    if (cfg.n_max < 1)
        throw validation_error("a witness scan needs --nmax >= 1");
    Frac192 alpha;
    ordered_json source;
    if (has_alpha) {
        alpha = Frac192::from_rational(curve_detail::parse_rational(cfg.alpha_spec));
        source["kind"] = "literal";
        source["text"] = cfg.alpha_spec;
    } else {
        const Curve c = parse_curve_spec(cfg);
        const RealPoint base = parse_point_on(c, cfg.point_spec, "--point");
        const Orbit orb = make_orbit(c, base);
        alpha = orb.zP.t;
        source["kind"] = "orbit";
        source["curve"] = cfg.curve_spec;
        source["point"] = point_json(base);
    }

    std::vector<std::uint64_t> ns;
    std::string rate = "hurwitz";
    if (!cfg.psi.empty()) {
        const PsiPreset psi = psi_from_name(cfg.psi);
        ns = khinchin_scan(alpha, psi, static_cast<std::uint64_t>(cfg.n_max));
        rate = psi_name(psi);
    } else {
        ns = hurwitz_witnesses(alpha, static_cast<std::uint64_t>(cfg.n_max));
    }

    Sinks sinks = open_sinks(cfg, true, out, err);
    const bool hurwitz = cfg.psi.empty();
    *sinks.series << (hurwitz ? "n,frac_dist,sqrt5_n_dist\n" : "n,frac_dist\n");
    for (const std::uint64_t n : ns) {
        const long double d = frac_dist(alpha, n);
        *sinks.series << n << ',' << fmt(static_cast<double>(d));
        if (hurwitz)
            *sinks.series << ','
                          << fmt(static_cast<double>(d * sqrtl(5.0L) *
                                                     static_cast<long double>(n)));
        *sinks.series << '\n';
    }

    ordered_json j;
    j["command"] = "dioph";
    j["mode"] = "scan";
    j["rate"] = rate;
    j["alpha"] = json_num(static_cast<double>(alpha.to_long_double()));
    j["source"] = source;
    j["n_max"] = cfg.n_max;
    j["witness_count"] = ns.size();
    // leading partial quotients give the scan its context: big early
    // quotients mean strong witnesses, all-small means Hurwitz-rare
    const ContinuedFraction cf = continued_fraction_to_budget(alpha, 24);
    ordered_json quot = ordered_json::array();
    for (const bigint& a : cf.a) quot.push_back(a.str());
    j["partial_quotients"] = quot;
    j["quotients_truncated"] = cf.truncated;
    emit_report(sinks, j);
    return 0;
}

}  // namespace io_detail

// Entry point shared by the binary and the test suite.  argv follows main()
// conventions (argv[0] is the program name).
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"distribution, growth and spacing statistics of multiples of a point "
                 "on a real elliptic curve"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool wants_point) {
        sub->add_option("--curve", cfg.curve_spec,
                        "curve spec: short:a,b | classical:g2,g3 | long:a1,a2,a3,a4,a6");
        if (wants_point)
            sub->add_option("--point", cfg.point_spec, "point 'x,y' in the curve's coordinates");
        sub->add_option("--out", cfg.out_path, "write the series (or sole report) here");
        sub->add_option("--precision", cfg.precision, "standard | high");
        sub->add_option("--threads", cfg.threads, "orbit scan threads, 0 = all cores");
        return sub;
    };

    CLI::App* periods = add_common(app.add_subcommand(
        "periods", "lattice periods with a quadrature cross-check"), false);
    (void)periods;

    CLI::App* orbit = add_common(app.add_subcommand(
        "orbit", "multiples CSV plus pole-approach growth witnesses"), true);
    orbit->add_option("--nmax", cfg.n_max, "largest multiple (0 = header only)");

    CLI::App* density = add_common(app.add_subcommand(
        "density", "limiting x-law versus the empirical orbit"), true);
    density->add_option("--nmax", cfg.n_max, "orbit length");
    density->add_option("--bins", cfg.bins, "histogram bins per component piece");
    density->add_option("--interval", cfg.interval_spec, "x-window 'lo:hi' to report on");
    density->add_option("--offset", cfg.offset_spec, "ball centre 'x,y'");
    density->add_option("--eps", cfg.eps, "ball radius (needs --offset)");

    CLI::App* spacing = add_common(app.add_subcommand(
        "spacing", "gap distribution around an offset point"), true);
    spacing->add_option("--nmax", cfg.n_max, "orbit length");
    spacing->add_option("--offset", cfg.offset_spec, "offset point 'x,y' (default: the base)");
    spacing->add_option("--trim", cfg.trim, "mass fraction dropped at each end");
    spacing->add_option("--bins", cfg.bins, "histogram bins");

    CLI::App* fruit = add_common(app.add_subcommand(
        "fruit", "solution bands of the quartic-denominator puzzle family"), true);
    fruit->add_option("--n", cfg.family_spec, "family index, or 'lo:hi' for a sweep CSV");
    fruit->add_option("--nmax", cfg.n_max, "generator scan length (with --point)");

    CLI::App* dioph = add_common(app.add_subcommand(
        "dioph", "rational-approximation witness scans and constructions"), true);
    dioph->add_option("--alpha", cfg.alpha_spec, "rotation number (decimal or p/q)");
    dioph->add_option("--nmax", cfg.n_max, "scan bound");
    dioph->add_option("--psi", cfg.psi, "rate preset: linear | nlog2n | quadratic | exponential");
    dioph->add_option("--depth", cfg.depth, "construction depth (with --psi alone)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 prints help to out and errors to err; fold its error codes
        // into the validation exit code
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        io_detail::check_precision_level(cfg.precision);
        const std::string name = app.get_subcommands().front()->get_name();
        cfg.command = name;
        if (name == "periods") return io_detail::cmd_periods(cfg, out, err);
        if (name == "orbit") return io_detail::cmd_orbit(cfg, out, err);
        if (name == "density") return io_detail::cmd_density(cfg, out, err);
        if (name == "spacing") return io_detail::cmd_spacing(cfg, out, err);
        if (name == "fruit") return io_detail::cmd_fruit(cfg, out, err);
        if (name == "dioph") return io_detail::cmd_dioph(cfg, out, err);
        throw validation_error("unknown command '" + name + "'");
    } catch (const validation_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const precision_error& e) {
        err << "precision error: " << e.what() << '\n';
        return 3;
    }
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("ellorbit");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ellorbit
