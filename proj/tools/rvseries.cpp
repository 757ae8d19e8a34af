#include "rvs/catalog.hpp"
#include "rvs/expr.hpp"
#include "rvs/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct InputFlags {
    std::string name;
    std::string expr;
    std::string ratio_expr;
    rvs::Index n_max = rvs::kDefaultNMax;
    double tol = rvs::kDefaultTol;
    std::string family;
};

void add_input_flags(CLI::App* cmd, InputFlags& f)
{
    auto* name = cmd->add_option("--name", f.name, "catalog entry");
    auto* expr = cmd->add_option("--expr", f.expr, "term formula in n");
    auto* ratio = cmd->add_option("--ratio-expr", f.ratio_expr, "a_{n+1}/a_n - 1 as a formula in n");
    name->excludes(expr, ratio);
    expr->excludes(ratio);
    cmd->add_option("--nmax", f.n_max, "largest index examined")->capture_default_str();
    cmd->add_option("--tol", f.tol, "limit tolerance")->capture_default_str();
    cmd->add_option("--family", f.family, "weight family for the refined test: log, loglog or power:r");
}

struct Input {
    std::string kind;
    std::string text;
    rvs::TermSource source;
    std::optional<rvs::WeightFamily> default_family;
    std::vector<std::string> warnings;
};

Input resolve(const InputFlags& f)
{
    const int given = !f.name.empty() + !f.expr.empty() + !f.ratio_expr.empty();
    if (given != 1) {
        throw std::invalid_argument("give exactly one of --name, --expr, --ratio-expr");
    }
    if (!f.name.empty()) {
        auto e = rvs::entry_or_throw(f.name);
        return {"name", f.name, e.source, e.family, {}};
    }
    if (!f.expr.empty()) {
        const auto e = rvs::parse(f.expr);
        if (e.uses_x()) {
            throw std::invalid_argument("term formulas use the variable n, not x");
        }
        const rvs::Index first = rvs::first_valid_index(e).value_or(1);
        Input in{"expr", f.expr, rvs::expression_source(e, f.expr, first), std::nullopt, {}};
        if (first > 1) {
            in.warnings.push_back("terms start at n = " + std::to_string(first) +
                                  "; the formula is zero or undefined below");
        }
        return in;
    }
    const auto e = rvs::parse(f.ratio_expr);
    if (e.uses_x()) {
        throw std::invalid_argument("ratio formulas use the variable n, not x");
    }
    return {"ratio_expr", f.ratio_expr, rvs::ratio_expression_source(e, f.ratio_expr), std::nullopt, {}};
}

std::optional<rvs::WeightFamily> family_flag(const InputFlags& f)
{
    if (f.family.empty()) {
        return std::nullopt;
    }
    return rvs::parse_weight_family(f.family);
}

int cmd_analyze(const InputFlags& f, bool json)
{
    const auto in = resolve(f);
    rvs::AnalyzeOptions opt;
    opt.n_max = f.n_max;
    opt.tol = f.tol;
    opt.family = family_flag(f);
    if (!opt.family) {
        opt.family = in.default_family;
    }
    auto report = rvs::analyze(in.kind, in.text, in.source, opt);
    report.warnings.insert(report.warnings.begin(), in.warnings.begin(), in.warnings.end());
    if (json) {
        std::cout << rvs::to_json(report).dump(2) << "\n";
    } else {
        std::cout << rvs::render_text(report);
    }
    return report.verdict.conclusion == rvs::Conclusion::Inconclusive ? 2 : 0;
}

bool contradicts(rvs::Expected expected, rvs::Conclusion got)
{
    return (expected == rvs::Expected::Converges && got == rvs::Conclusion::Diverges) ||
           (expected == rvs::Expected::Diverges && got == rvs::Conclusion::Converges);
}

int cmd_catalog_list(bool json)
{
    if (json) {
        std::cout << rvs::catalog_json().dump(2) << "\n";
        return 0;
    }
    for (const auto& e : rvs::catalog()) {
        std::cout << e.name << "  " << e.formula << "  sum|a|: " << rvs::to_string(e.verdict);
        if (e.alternating) {
            std::cout << "  sum a: " << rvs::to_string(e.alternating_verdict);
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_catalog_verify(const std::string& only, rvs::Index n_max, double tol)
{
    std::vector<rvs::CatalogEntry> entries;
    if (only.empty()) {
        entries = rvs::catalog();
    } else {
        for (const auto& e : rvs::catalog()) {
            if (e.name == only || rvs::base_name(e.name) == only) {
                entries.push_back(e);
            }
        }
        if (entries.empty()) {
            entries.push_back(rvs::entry_or_throw(only));
        }
    }
    int fails = 0;
    for (const auto& e : entries) {
        rvs::LadderConfig lc;
        lc.n_max = n_max;
        lc.tol = tol;
        lc.family = e.family;
        const auto v = rvs::run_ladder(e.source, lc);
        const auto expected = e.alternating ? e.alternating_verdict : e.verdict;
        bool fail = contradicts(expected, v.conclusion);
        if (e.alternating && v.absolute_conclusion) {
            fail = fail || contradicts(e.verdict, *v.absolute_conclusion);
        }
        std::string oracle = "-";
        if (!e.alternating) {
            const auto trace = rvs::partial_sum(e.source, n_max);
            const auto emp = rvs::empirical_verdict(trace);
            oracle = rvs::to_string(emp);
            // The oracle only vetoes a decisive verdict it clearly contradicts.
            if ((v.conclusion == rvs::Conclusion::Converges && emp == rvs::EmpiricalVerdict::LikelyDiverges) ||
                (v.conclusion == rvs::Conclusion::Diverges && emp == rvs::EmpiricalVerdict::LikelyConverges)) {
                fail = true;
            }
        }
        fails += fail;
        std::cout << (fail ? "FAIL " : "pass ") << e.name << "  expected " << rvs::to_string(expected) << ", got "
                  << rvs::to_string(v.conclusion);
        if (!v.decided_by.empty()) {
            std::cout << " (" << v.decided_by << ")";
        }
        if (std::isfinite(v.alpha_hat.value)) {
            std::cout << "  alpha " << rvs::format_double(v.alpha_hat.value);
        }
        std::cout << "  oracle " << oracle << "\n";
    }
    std::cout << entries.size() - fails << "/" << entries.size() << " entries consistent\n";
    return fails == 0 ? 0 : 1;
}

int cmd_plotdata(const InputFlags& f, const std::string& dir)
{
    const auto in = resolve(f);
    const auto grid = rvs::default_grid(in.source.first_index(), f.n_max);
    const auto a = in.source.abs();
    auto diag = rvs::raabe_statistic(a, grid);
    auto family = family_flag(f);
    if (!family) {
        family = in.default_family ? in.default_family : rvs::parse_weight_family("log");
    }
    const auto alpha_hat = rvs::extrapolate_limit(grid, diag.alpha, f.tol);
    const auto beta = rvs::second_order_statistic(a, alpha_hat.value, *family, grid);
    diag.beta = beta.beta;
    diag.family = beta.family;
    const auto doubling = rvs::doubling_ratios(a, grid);
    const auto sums = rvs::partial_sum(in.source, f.n_max);

    std::filesystem::create_directories(dir);
    const auto write = [&](const std::string& file, auto&& body) {
        const auto path = std::filesystem::path(dir) / file;
        std::ofstream os(path);
        if (!os) {
            throw std::runtime_error("cannot write " + path.string());
        }
        body(os);
        if (!os) {
            throw std::runtime_error("write failed for " + path.string());
        }
    };
    write("diagnostics.csv", [&](std::ostream& os) { rvs::write_diagnostics_csv(os, diag, &doubling); });
    write("sums.csv", [&](std::ostream& os) { rvs::write_sums_csv(os, sums); });
    std::cout << "wrote " << (std::filesystem::path(dir) / "diagnostics.csv").string() << " (" << grid.size()
              << " rows) and " << (std::filesystem::path(dir) / "sums.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Convergence tests for real series via regular variation"};
    app.set_version_flag("--version", std::string(rvs::kVersion));
    app.require_subcommand(1);

    InputFlags analyze_flags;
    bool json = false;
    auto* analyze = app.add_subcommand("analyze", "run diagnostics, classification and the test ladder");
    add_input_flags(analyze, analyze_flags);
    analyze->add_flag("--json", json, "print the report as JSON");

    auto* cat = app.add_subcommand("catalog", "built-in sequences");
    cat->require_subcommand(1);
    bool list_json = false;
    auto* list = cat->add_subcommand("list", "list entries");
    list->add_flag("--json", list_json, "print as JSON");
    std::string only;
    rvs::Index verify_nmax = rvs::kDefaultNMax;
    double verify_tol = rvs::kDefaultTol;
    auto* verify = cat->add_subcommand("verify", "run every entry and compare with its documented verdict");
    verify->add_option("--only", only, "entry name or family base name");
    verify->add_option("--nmax", verify_nmax, "largest index examined")->capture_default_str();
    verify->add_option("--tol", verify_tol, "limit tolerance")->capture_default_str();

    InputFlags plot_flags;
    std::string csv_dir = ".";
    auto* plot = app.add_subcommand("plotdata", "write diagnostics.csv and sums.csv");
    add_input_flags(plot, plot_flags);
    plot->add_option("--csv-dir", csv_dir, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*analyze) {
            return cmd_analyze(analyze_flags, json);
        }
        if (*list) {
            return cmd_catalog_list(list_json);
        }
        if (*verify) {
            return cmd_catalog_verify(only, verify_nmax, verify_tol);
        }
        if (*plot) {
            return cmd_plotdata(plot_flags, csv_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
