#include "nfield/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nfield/bifurcation.hpp"
#include "nfield/existence.hpp"
#include "nfield/kernel.hpp"
#include "nfield/spectrum.hpp"

namespace nf::cli {
namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::string kernel_path;
    double h = 0.0;
    std::optional<double> T;
    std::string T_range; // "lo:hi:n"
    int n_theta = 4096;
    int grid_n = 2048;
    std::vector<int> q_list;
    std::string format = "csv";
    std::string out_path;
    int candidate = 0;
    double x_tol = 1e-10;
    double f_tol = 1e-9;
    double merge_tol = kMergeTol;
    double stab_tol = kStabTol;
    double series_tol = 1e-12;
    double reg_tol = kRegTol;
    double crit_tol = 1e-4;
};

struct TRange {
    double lo, hi;
    int n;
};

TRange parse_range(const std::string& text) {
    TRange r{};
    char colon1 = 0, colon2 = 0;
    std::istringstream in(text);
    if (!(in >> r.lo >> colon1 >> r.hi >> colon2 >> r.n) || colon1 != ':' ||
        colon2 != ':' || !in.eof())
        throw std::invalid_argument("--T-range must be lo:hi:n, got '" + text + "'");
    if (!(r.lo > 0.0) || r.hi < r.lo || r.n < 1)
        throw std::invalid_argument("--T-range requires 0 < lo <= hi and n >= 1");
    return r;
}

Kernel load_kernel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open kernel config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return kernel_from_json(buf.str());
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
    out << text;
}

json interval_json(const std::vector<Interval>& intervals) {
    json arr = json::array();
    for (const Interval& iv : intervals) arr.push_back({iv.lo, iv.hi});
    return arr;
}

// ---- solve ----------------------------------------------------------------

int cmd_solve(const Options& o) {
    const Kernel k = load_kernel(o.kernel_path);
    const PeriodizedKernel pk(k, *o.T, o.series_tol);
    RootFindOptions ropt{o.grid_n, o.x_tol, o.f_tol};
    const SolveResult res = solve_all(pk, o.h, ropt, 4096, o.reg_tol);
    if (!res.h_in_range)
        std::cerr << "warning: h = " << o.h << " lies outside (0, h0 = " << pk.h0()
                  << ")\n";

    bool any_accepted = false;
    for (const CandidateResult& c : res.candidates)
        any_accepted = any_accepted || c.report.accepted();

    if (o.format == "csv") {
        std::string text = "index,a,regular,c1,c2,c3,margin,du\n";
        for (std::size_t i = 0; i < res.candidates.size(); ++i) {
            const CandidateResult& c = res.candidates[i];
            text += std::to_string(i) + "," + fmt_g12(c.sol.a) + "," +
                    (c.report.is_regular ? "1" : "0") + "," +
                    (c.report.condition1 ? "1" : "0") + "," +
                    (c.report.condition2 ? "1" : "0") + "," +
                    (c.report.condition3 ? "1" : "0") + "," +
                    fmt_g12(c.report.worst_margin) + "," + fmt_g12(c.sol.regularity) +
                    "\n";
        }
        write_text(o.out_path, text);
    } else {
        json j;
        j["h"] = o.h;
        j["T"] = *o.T;
        j["h0"] = pk.h0();
        j["h_in_range"] = res.h_in_range;
        j["candidates"] = json::array();
        for (std::size_t i = 0; i < res.candidates.size(); ++i) {
            const CandidateResult& c = res.candidates[i];
            j["candidates"].push_back(
                {{"index", i},
                 {"a", c.sol.a},
                 {"kind", c.kind == RootKind::tangent ? "tangent" : "simple"},
                 {"regular", c.report.is_regular},
                 {"c1", c.report.condition1},
                 {"c2", c.report.condition2},
                 {"c3", c.report.condition3},
                 {"margin", c.report.worst_margin},
                 {"du", c.sol.regularity}});
        }
        write_text(o.out_path, j.dump(2) + "\n");
    }
    return any_accepted ? kExitOk : kExitNoSolution;
}

// ---- spectrum -------------------------------------------------------------

int cmd_spectrum(const Options& o) {
    const Kernel k = load_kernel(o.kernel_path);
    const PeriodizedKernel pk(k, *o.T, o.series_tol);
    RootFindOptions ropt{o.grid_n, o.x_tol, o.f_tol};
    const SolveResult res = solve_all(pk, o.h, ropt, 4096, o.reg_tol);
    if (o.candidate < 0 || static_cast<std::size_t>(o.candidate) >= res.candidates.size())
        throw std::invalid_argument("--candidate " + std::to_string(o.candidate) +
                                    " out of range (found " +
                                    std::to_string(res.candidates.size()) +
                                    " candidates)");
    const CandidateResult& c = res.candidates[static_cast<std::size_t>(o.candidate)];
    if (!c.report.is_regular) {
        std::cerr << "error: candidate " << o.candidate << " is not regular\n";
        return kExitNotRegular;
    }
    if (!c.report.accepted())
        std::cerr << "warning: candidate " << o.candidate
                  << " fails an existence condition; spectrum computed anyway\n";

    SpectrumOptions sopt;
    sopt.n_theta = o.n_theta;
    sopt.merge_tol = o.merge_tol;
    sopt.stab_tol = o.stab_tol;
    const SpectrumReport rep = spectrum_intervals(c.sol, sopt);

    json summary;
    summary["intervals"] = interval_json(rep.intervals);
    summary["verdict"] = verdict_name(rep.verdict);
    summary["max_lambda"] = rep.max_lambda;

    std::vector<CirculantApprox> circs;
    circs.reserve(o.q_list.size());
    for (int q : o.q_list) circs.push_back(circulant(c.sol, q));

    if (o.format == "csv") {
        std::string table = "theta,lambda1,lambda2\n";
        for (std::size_t j = 0; j < rep.thetas.size(); ++j)
            table += fmt_g12(rep.thetas[j]) + "," + fmt_g12(rep.lambda1[j]) + "," +
                     fmt_g12(rep.lambda2[j]) + "\n";
        write_text(o.out_path, table);
        const std::string summary_text = summary.dump(2) + "\n";
        write_text(o.out_path.empty() ? "" : o.out_path + ".summary.json", summary_text);
        if (!circs.empty()) {
            std::string circ = "q,lambda\n";
            for (const CirculantApprox& ca : circs) {
                std::vector<double> evs;
                evs.reserve(ca.eigenvalues.size());
                for (const auto& ev : ca.eigenvalues) evs.push_back(ev.real());
                std::sort(evs.begin(), evs.end());
                for (double ev : evs)
                    circ += std::to_string(ca.q) + "," + fmt_g12(ev) + "\n";
            }
            write_text(o.out_path.empty() ? "" : o.out_path + ".circ.csv", circ);
        }
    } else {
        json j;
        j["theta"] = rep.thetas;
        j["lambda1"] = rep.lambda1;
        j["lambda2"] = rep.lambda2;
        j["summary"] = summary;
        if (!circs.empty()) {
            json jc = json::object();
            for (const CirculantApprox& ca : circs) {
                std::vector<double> evs;
                evs.reserve(ca.eigenvalues.size());
                for (const auto& ev : ca.eigenvalues) evs.push_back(ev.real());
                std::sort(evs.begin(), evs.end());
                jc[std::to_string(ca.q)] = evs;
            }
            j["circulant"] = jc;
        }
        write_text(o.out_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(const Options& o) {
    const Kernel k = load_kernel(o.kernel_path);
    const TRange r = parse_range(o.T_range);
    const auto records = sweep(k, o.h, r.lo, r.hi, r.n, o.n_theta);

    if (o.format == "csv") {
        std::string text = "T,branch,a,min_l1,max_l1,min_l2,max_l2,verdict\n";
        for (const SweepRecord& rec : records) {
            if (rec.error) {
                std::cerr << "warning: T = " << rec.T << " failed: " << *rec.error << "\n";
                text += fmt_g12(rec.T) + ",0,nan,nan,nan,nan,nan,error\n";
                continue;
            }
            for (std::size_t b = 0; b < rec.branches.size(); ++b) {
                const BranchRecord& br = rec.branches[b];
                text += fmt_g12(rec.T) + "," + std::to_string(b) + "," + fmt_g12(br.a) + ",";
                if (br.has_spectrum)
                    text += fmt_g12(br.min_l1) + "," + fmt_g12(br.max_l1) + "," +
                            fmt_g12(br.min_l2) + "," + fmt_g12(br.max_l2) + "," +
                            verdict_name(br.verdict);
                else
                    text += std::string("nan,nan,nan,nan,") +
                            (br.regular ? "rejected" : "not_regular");
                text += "\n";
            }
        }
        write_text(o.out_path, text);
    } else {
        json j = json::array();
        for (const SweepRecord& rec : records) {
            json jr;
            jr["T"] = rec.T;
            if (rec.error) {
                jr["error"] = *rec.error;
                j.push_back(jr);
                continue;
            }
            jr["branches"] = json::array();
            for (std::size_t b = 0; b < rec.branches.size(); ++b) {
                const BranchRecord& br = rec.branches[b];
                json jb = {{"branch", b},
                           {"a", br.a},
                           {"kind", br.kind == RootKind::tangent ? "tangent" : "simple"},
                           {"regular", br.regular},
                           {"accepted", br.accepted}};
                if (br.has_spectrum) {
                    jb["min_l1"] = br.min_l1;
                    jb["max_l1"] = br.max_l1;
                    jb["min_l2"] = br.min_l2;
                    jb["max_l2"] = br.max_l2;
                    jb["verdict"] = verdict_name(br.verdict);
                }
                jr["branches"].push_back(jb);
            }
            j.push_back(jr);
        }
        write_text(o.out_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

// ---- critical -------------------------------------------------------------

int cmd_critical(const Options& o) {
    const Kernel k = load_kernel(o.kernel_path);
    const TRange r = parse_range(o.T_range);
    if (r.n < 2 || r.lo == r.hi)
        throw std::invalid_argument("critical requires --T-range lo:hi:n with lo < hi, n >= 2");
    const CriticalPeriods cp = find_critical(k, o.h, r.lo, r.hi, r.n, o.crit_tol, o.n_theta);

    json j;
    j["T1"] = cp.T1 ? json(*cp.T1) : json(nullptr);
    j["T2"] = cp.T2 ? json(*cp.T2) : json(nullptr);
    j["extra_events"] = json::array();
    for (const auto& [T, what] : cp.extra_events)
        j["extra_events"].push_back({{"T", T}, {"event", what}});
    write_text(o.out_path, j.dump(2) + "\n");

    const bool any = cp.T1 || cp.T2 || !cp.extra_events.empty();
    return any ? kExitOk : kExitInvalidBracket;
}

} // namespace

std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

Summary parse_summary(const std::string& json_text) {
    const json j = json::parse(json_text);
    Summary s;
    for (const auto& iv : j.at("intervals"))
        s.intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    s.verdict = j.at("verdict").get<std::string>();
    s.max_lambda = j.at("max_lambda").get<double>();
    return s;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"1-bump periodic solutions of the Amari neural field equation: "
                 "existence, spectra, and bifurcation sweeps"};
    app.set_help_flag("--help", "print usage");
    app.require_subcommand(1);

    Options o;
    const auto add_common = [&](CLI::App* sub, bool needs_T, bool needs_range) {
        sub->set_help_flag("--help", "print usage");
        sub->add_option("--kernel", o.kernel_path, "kernel config JSON path")->required();
        sub->add_option("--h", o.h, "firing threshold")->required();
        if (needs_T) sub->add_option("--T", o.T, "period")->required();
        if (needs_range)
            sub->add_option("--T-range", o.T_range, "period range lo:hi:n")->required();
        sub->add_option("--n-theta", o.n_theta, "symbol sample count on [0, pi]");
        sub->add_option("--grid-n", o.grid_n, "root-search grid cells");
        sub->add_option("--format", o.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", o.out_path, "output path (stdout when omitted)");
        sub->add_option("--x-tol", o.x_tol, "root bracket tolerance");
        sub->add_option("--f-tol", o.f_tol, "residual tolerance");
        sub->add_option("--merge-tol", o.merge_tol, "interval merge tolerance");
        sub->add_option("--stab-tol", o.stab_tol, "instability threshold above 1");
        sub->add_option("--series-tol", o.series_tol, "certified lattice-sum tail");
        sub->add_option("--reg-tol", o.reg_tol, "regularity threshold on |u'_p(a)|");
    };

    CLI::App* solve = app.add_subcommand("solve", "find and verify candidates at one T");
    add_common(solve, true, false);
    CLI::App* spectrum = app.add_subcommand("spectrum", "branch curves and intervals");
    add_common(spectrum, true, false);
    spectrum->add_option("--candidate", o.candidate, "candidate index (ascending a)");
    spectrum->add_option("--q", o.q_list, "circulant sizes q (eigenvalue dump)")
        ->delimiter(',');
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "branch spectra over a T range");
    add_common(sweep_cmd, false, true);
    CLI::App* critical = app.add_subcommand("critical", "locate T1, T2 and extra events");
    add_common(critical, false, true);
    critical->add_option("--tol", o.crit_tol, "bisection tolerance in T");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(o);
        if (spectrum->parsed()) return cmd_spectrum(o);
        if (sweep_cmd->parsed()) return cmd_sweep(o);
        if (critical->parsed()) return cmd_critical(o);
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NotRegularError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotRegular;
    } catch (const InvalidBracketError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidBracket;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace nf::cli
