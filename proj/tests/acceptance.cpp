// Copyright 2026 The qecopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Acceptance run: one PASS/FAIL line per criterion. The exit status is 0
// whenever every criterion ran to completion, so a FAIL is a reported
// measurement, not a crash; --strict turns FAILs into exit status 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qecopt/qecopt.hpp"

namespace {

using namespace qecopt;
constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string f6(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

std::size_t g_workers = 1;

ThresholdQuery query(const CodeContext& ctx, NoiseFamily f, DecoderMode mode, TieMode ties = TieMode::first) {
    ThresholdQuery q;
    q.ctx = &ctx;
    q.family = std::move(f);
    q.mode = mode;
    q.ties = ties;
    return q;
}

// 1
Outcome group_counts() {
    const std::vector<std::pair<std::string, std::size_t>> want = {
        {"five-qubit", 4}, {"steane", 7}, {"shor-z", 12}, {"surface-17", 67}};
    Outcome o{true, ""};
    for (const auto& [name, expected] : want) {
        StabilizerCode code = builtin_code(name);
        AlphaTable alpha = build_alpha(code);
        auto conds = conditional_channels(code, alpha, PhysicalNoise::uniform(code.n, amplitude_phase_damping(0.17, 0.1)),
                                          symmetric_decoder(code));
        std::size_t got = group_conditionals(conds).size();
        o.pass = o.pass && got == expected;
        o.detail += name + "=" + std::to_string(got) + "(want " + std::to_string(expected) + ") ";
    }
    return o;
}

// 2
Outcome closed_forms() {
    Outcome o{true, ""};
    for (double t : {0.05, 0.1, kPi / 12}) {
        auto c = steane_closed_form_check(t, 1e-10);
        o.pass = o.pass && c.pass;
        o.detail += "theta=" + f6(t) + " dev=" + f6(c.worst) + " ";
    }
    auto r = steane_exact_recovery_check(1e-12);
    o.pass = o.pass && r.pass;
    o.detail += "pi/12 residual=" + f6(r.worst) + " via " + r.detail;
    return o;
}

// 3
Outcome depolarizing_threshold() {
    CodeContext ctx = CodeContext::make(builtin_code("steane"));
    auto fam = NoiseFamily::make(NoiseKind::depolarizing, {}, "p");
    double sym = symmetric_threshold(query(ctx, fam, DecoderMode::symmetric)).threshold;
    double opt = optimized_threshold(query(ctx, fam, DecoderMode::all_transversal)).threshold;
    double exh = optimized_threshold(query(ctx, fam, DecoderMode::all_transversal, TieMode::exhaustive)).threshold;
    return {within(sym, 0.0908, 5e-4), "symmetric p_th=" + f6(sym) + " (want 0.0908+-0.0005); opt-all p_th=" + f6(opt) +
                                           ", exhaustive ties " + f6(exh)};
}

// 4
Outcome correlated_thresholds() {
    CodeContext ctx = CodeContext::make(builtin_code("steane"));
    auto fam = NoiseFamily::make(NoiseKind::correlated_dephasing_mix, {{"p", 0.003}}, "q");
    auto plateau = NoiseFamily::make(NoiseKind::correlated_dephasing_mix, {{"p", 1e-5}}, "q");
    auto sym = symmetric_threshold(query(ctx, fam, DecoderMode::symmetric));
    auto opt = optimized_threshold(query(ctx, fam, DecoderMode::all_transversal));
    auto low = optimized_threshold(query(ctx, plateau, DecoderMode::all_transversal));
    bool pass = within(sym.threshold, 0.0153, 5e-4) && within(opt.threshold, 0.0220, 5e-4) &&
                within(low.threshold, 0.0232, 1e-3);
    return {pass, "symmetric q_th=" + f6(sym.threshold) + " (want 0.0153); opt-all q_th=" + f6(opt.threshold) + " [" +
                      opt.stop + "] (want 0.0220); p=1e-5 opt-all q_th=" + f6(low.threshold) + " [" + low.stop +
                      "] (want 0.0232)"};
}

// 5
Outcome coherent_thresholds() {
    auto x_rot = NoiseFamily::make(NoiseKind::coherent, {{"phi", kPi / 2}, {"gamma", 0}}, "theta");
    auto th = [&](const std::string& code) {
        CodeContext ctx = CodeContext::make(builtin_code(code));
        return optimized_threshold(query(ctx, x_rot, DecoderMode::all_transversal)).threshold;
    };
    double five = th("five-qubit"), steane = th("steane"), shor = th("shor-z");
    bool pass = within(five, kPi / 4, 1e-3) && within(steane, 0.3692, 5e-3) && within(shor, 0.3396, 5e-3);

    CodeContext ctx = CodeContext::make(builtin_code("five-qubit"));
    double phi = std::acos(1.0 / std::sqrt(3.0));
    double worst = 0;
    int below = 0;
    for (int k = 1; k <= 7; ++k) {
        HardDecodeOptions opts;
        opts.max_levels = 3;
        opts.stop_when_correctable = false;
        opts.run_all_levels = true;
        auto r = run_hard_decoder(ctx, PhysicalNoise::uniform(5, coherent_rotation(0.1 * k, phi, kPi / 4)),
                                  DecoderMode::all_transversal, opts);
        double inf = infidelity(r.final_channel());
        worst = std::max(worst, inf);
        if (inf < 1e-12) ++below;
    }
    return {pass && below == 7, "five-qubit=" + f6(five) + " (want pi/4) steane=" + f6(steane) +
                                 " (want 0.3692) shor-z=" + f6(shor) + " (want 0.3396); (1,1,1) axis: " + std::to_string(below) +
                                 " of 7 below 1e-12 at level 3, worst " + f6(worst)};
}

// 6
Outcome tie_sensitivity() {
    CodeContext ctx = CodeContext::make(builtin_code("steane"));
    auto fam = NoiseFamily::make(NoiseKind::amplitude_phase_damping, {{"lambda", 0.1431}}, "p");
    double first = optimized_threshold(query(ctx, fam, DecoderMode::all_transversal, TieMode::first)).threshold;
    double exh = optimized_threshold(query(ctx, fam, DecoderMode::all_transversal, TieMode::exhaustive)).threshold;
    return {within(first, 0.1032, 1e-3) && within(exh, 0.1150, 1e-3),
            "first=" + f6(first) + " (want 0.1032) exhaustive=" + f6(exh) + " (want 0.1150)"};
}

// 7
Outcome twirl_ordering() {
    CodeContext ctx = CodeContext::make(builtin_code("steane"));
    auto fam = NoiseFamily::make(NoiseKind::coherent, {{"gamma", kPi / 4}}, "theta");
    std::vector<double> phis;
    for (int k = 0; k < 9; ++k) phis.push_back(kPi / 2 * k / 8.0);
    auto pts = twirl_compare(ctx, fam, phis, query(ctx, fam, DecoderMode::all_transversal), g_workers);
    bool order = true;
    double ratio = 0;
    const double slack = 1e-4;  // one granularity step
    for (const auto& p : pts) {
        order = order && p.bare_all + slack >= p.twirled_all && p.twirled_pauli + slack >= p.bare_pauli;
        if (p.bare_pauli > 0) ratio = std::max(ratio, p.bare_all / p.bare_pauli);
    }
    return {order && ratio >= 1.5 && ratio <= 1.9,
            std::string("ordering ") + (order ? "holds" : "violated") + " on " + std::to_string(pts.size()) +
                " points; max bare-all/bare-pauli=" + f6(ratio) + " (want [1.5,1.9])"};
}

// 8, 9
Outcome verify_suite(const std::string& suite) {
    VerifyOptions opt;
    opt.suites = {suite};
    auto checks = verify(opt);
    std::size_t n = 0, bad = 0;
    double worst = 0;
    for (const auto& c : checks) {
        if (c.suite != suite) continue;
        ++n;
        if (!c.pass) ++bad;
        worst = std::max(worst, c.worst);
    }
    return {bad == 0 && n > 0, std::to_string(n) + " checks, " + std::to_string(bad) + " failed, worst deviation " + f6(worst)};
}

// 10
Outcome perturbation() {
    CodeContext five = CodeContext::make(builtin_code("five-qubit"));
    PerturbationStudy s;
    s.base = NoiseFamily::make(NoiseKind::coherent, {{"phi", kPi / 2}, {"gamma", 0}}, "theta");
    s.values = {0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3};
    s.f = "sin2/10";
    s.unitaries = 100;
    s.seed = 10;
    s.random_axis = true;
    s.workers = g_workers;
    bool pass = true;
    double worst_small = 0, worst_large = 0;
    for (const auto& r : perturbation_experiment(five, s)) {
        double ratio = r.perturbed_tilde / r.perturbed_sym;
        if (r.value <= 0.1 + 1e-12) {
            worst_small = std::max(worst_small, ratio);
            pass = pass && ratio <= 7;
        }
        if (r.value >= 0.2 - 1e-12) {
            worst_large = std::max(worst_large, ratio);
            pass = pass && ratio < 1;
        }
    }
    CodeContext steane = CodeContext::make(builtin_code("steane"));
    PerturbationStudy a;
    a.base = NoiseFamily::make(NoiseKind::amplitude_phase_damping, {{"p", 0.2}}, "lambda");
    a.values = {0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};
    a.f = "linear/10";
    a.unitaries = 100;
    a.seed = 10;
    a.workers = g_workers;
    double worst_apd = 0;
    for (const auto& r : perturbation_experiment(steane, a)) {
        double ratio = r.perturbed_tilde / r.perturbed_sym;
        worst_apd = std::max(worst_apd, ratio);
        pass = pass && ratio < 1;
    }
    return {pass, "five-qubit tilde/sym: max " + f6(worst_small) + " for theta<=0.1 (want <=7), max " + f6(worst_large) +
                      " for theta>=0.2 (want <1); steane APD max " + f6(worst_apd) + " (want <1)"};
}

// 11
Outcome monotone() {
    const std::vector<std::string> codes = {"bitflip-3", "five-qubit", "steane", "shor-z", "surface-17"};
    std::vector<CodeContext> ctx;
    for (const auto& c : codes) ctx.push_back(CodeContext::make(builtin_code(c)));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    HardDecodeOptions one;
    one.max_levels = 1;
    std::size_t violations = 0;
    double worst = -1;
    for (int i = 0; i < 50; ++i) {
        const CodeContext& c = ctx[i % ctx.size()];
        NoiseFamily f;
        switch ((i / ctx.size()) % 5) {
            case 0:
                f = NoiseFamily::make(NoiseKind::amplitude_phase_damping, {{"p", 0.3 * u(rng)}, {"lambda", 0.3 * u(rng)}});
                break;
            case 1:
                f = NoiseFamily::make(NoiseKind::coherent,
                                      {{"theta", kPi / 2 * u(rng)}, {"phi", std::acos(1 - 2 * u(rng))}, {"gamma", 2 * kPi * u(rng)}});
                break;
            case 2:
                f = NoiseFamily::make(NoiseKind::depolarizing, {{"p", 0.3 * u(rng)}});
                break;
            case 3:
                f = NoiseFamily::make(NoiseKind::correlated_dephasing_mix, {{"p", 0.05 * u(rng)}, {"q", 0.1 * u(rng)}});
                break;
            default:
                f = NoiseFamily::make(NoiseKind::random, {{"seed", static_cast<double>(rng() % 100000)}});
                break;
        }
        PhysicalNoise noise = f.block(c.code.n);
        double sym = infidelity(run_hard_decoder(c, noise, DecoderMode::symmetric, one).final_channel());
        for (auto mode : {DecoderMode::all_transversal, DecoderMode::pauli_only}) {
            double opt = infidelity(run_hard_decoder(c, noise, mode, one).final_channel());
            worst = std::max(worst, opt - sym);
            if (opt > sym + 1e-12) ++violations;
        }
    }
    const CodeContext& s17 = ctx.back();
    std::size_t axis_bad = 0;
    for (int k = 1; k <= 15; ++k) {
        double t = 0.05 * k;
        double y = infidelity(run_hard_decoder(s17, PhysicalNoise::uniform(9, coherent_rotation(t, kPi / 2, kPi / 2)),
                                               DecoderMode::all_transversal, one)
                                  .final_channel());
        double x = infidelity(run_hard_decoder(s17, PhysicalNoise::uniform(9, coherent_rotation(t, kPi / 2, 0)),
                                               DecoderMode::all_transversal, one)
                                  .final_channel());
        if (y > x + 1e-12) ++axis_bad;
    }
    return {violations == 0 && axis_bad == 0,
            std::to_string(violations) + " of 100 optimized-vs-symmetric comparisons violate (max opt-sym " + f6(worst) +
                "); surface-17 y>x at " + std::to_string(axis_bad) + " of 15 theta points"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    g_workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<int> only;
    bool strict = false;
    std::string report;
    app.add_option("--workers", g_workers, "threads for parallel stages");
    app.add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 11));
    app.add_flag("--strict", strict, "exit 1 when any criterion fails");
    app.add_option("--report", report, "also write the result lines to this file");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"distinct conditional counts", group_counts},
        {"steane x-rotation closed forms", closed_forms},
        {"depolarizing threshold", depolarizing_threshold},
        {"correlated dephasing thresholds", correlated_thresholds},
        {"coherent-noise thresholds", coherent_thresholds},
        {"tie sensitivity", tie_sensitivity},
        {"twirl ordering", twirl_ordering},
        {"oracle equivalence", [] { return verify_suite("oracle"); }},
        {"beta consistency", [] { return verify_suite("beta"); }},
        {"perturbation robustness", perturbation},
        {"monotone improvement", monotone},
    };
    std::set<int> chosen(only.begin(), only.end());
    std::size_t failed = 0;
    std::FILE* rep = report.empty() ? nullptr : std::fopen(report.c_str(), "w");
    if (!report.empty() && rep == nullptr) {
        std::fprintf(stderr, "cannot write %s\n", report.c_str());
        return 1;
    }
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        int id = static_cast<int>(i + 1);
        if (!chosen.empty() && !chosen.count(id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o = criteria[i].second();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        char line[1024];
        std::snprintf(line, sizeof line, "criterion %2d %s %-32s [%.1f s] %s\n", id, o.pass ? "PASS" : "FAIL",
                      criteria[i].first.c_str(), secs, o.detail.c_str());
        std::fputs(line, stdout);
        std::fflush(stdout);
        if (rep) std::fputs(line, rep);
    }
    if (rep) std::fclose(rep);
    return strict && failed > 0 ? 1 : 0;
}
