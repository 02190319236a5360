#include "isorec/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "isorec/covering.hpp"
#include "isorec/io.hpp"
#include "isorec/operators.hpp"
#include "isorec/recovery.hpp"
#include "isorec/verify.hpp"

namespace isorec {

namespace {

struct RunConfig {
    double p = 0.0;
    double q = 0.0;
    std::string op_text;
    bool op_given = false;
    std::string body;
    std::string n;
    double theta = kDefaultTheta;
    unsigned long long seed = 0;
    double resolution = 0.0;
    std::string out_dir;
    std::string formats = "json,csv,svg";

    double t_max = 1.0;
    int steps = 100;
    double a = 0.0;
    std::string nodes;
    bool inject_half_factor = false;
    bool only_kernel = false;
    bool only_l1 = false;
    bool only_bvp = false;
    bool only_membership = false;
    bool only_fooling = false;
    bool only_sandwich = false;
    int points = 200;
    int dirs = 10;
};

std::string csv_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

OperatorClass make_operator(const RunConfig& c)
{
    double p = c.p;
    double q = c.q;
    if (!c.op_text.empty()) {
        p = 0.0;
        q = 0.0;
        std::stringstream ss(c.op_text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            const std::string key = item.substr(0, eq);
            if (eq == std::string::npos || (key != "p" && key != "q")) {
                throw Error(ErrorCode::kInvalidConfig, "--operator expects p=<num>,q=<num>; got '" + c.op_text + "'");
            }
            const std::string val = item.substr(eq + 1);
            char* end = nullptr;
            const double v = std::strtod(val.c_str(), &end);
            if (end == val.c_str() || *end != '\0') {
                throw Error(ErrorCode::kInvalidCoefficients, "not a number in --operator: '" + val + "'");
            }
            (key == "p" ? p : q) = v;
        }
    }
    return classify(OperatorSpec{p, q});
}

ConvexBody make_body(const RunConfig& c)
{
    if (c.body.empty()) return ConvexBody::unit_cube(2);
    if (c.body.front() == '{') {
        try {
            return body_from_json(Json::parse(c.body));
        } catch (const Json::parse_error& e) {
            throw Error(ErrorCode::kInvalidConfig, std::string("inline body is not valid JSON: ") + e.what());
        }
    }
    return read_body_file(c.body);
}

std::vector<int> parse_n_list(const std::string& text)
{
    std::vector<int> ns;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const long v = std::strtol(item.c_str(), &end, 10);
        if (end == item.c_str() || *end != '\0' || v < 1 || v > 100000000) {
            throw Error(ErrorCode::kInvalidParameter, "--n expects positive integers; got '" + item + "'");
        }
        ns.push_back(static_cast<int>(v));
    }
    if (ns.empty()) throw Error(ErrorCode::kInvalidParameter, "--n is required");
    return ns;
}

int single_n(const RunConfig& c)
{
    const std::vector<int> ns = parse_n_list(c.n);
    if (ns.size() != 1) throw Error(ErrorCode::kInvalidParameter, "--n takes a single value here");
    return ns.front();
}

class Emitter {
public:
    explicit Emitter(const RunConfig& c)
    {
        if (!c.out_dir.empty()) {
            dir_ = c.out_dir;
        } else if (const char* env = std::getenv("ISOREC_OUT"); env && *env) {
            dir_ = env;
        } else {
            dir_ = "out";
        }
        std::stringstream ss(c.formats);
        std::string f;
        while (std::getline(ss, f, ',')) {
            if (f != "json" && f != "csv" && f != "svg") {
                throw Error(ErrorCode::kInvalidConfig, "unknown output format '" + f + "'");
            }
            formats_.insert(f);
        }
    }

    bool wants(const std::string& f) const { return formats_.count(f) != 0; }

    void write(const std::string& name, const std::string& format, const std::string& text) const
    {
        if (wants(format)) write_text_file(dir_ / name, text);
    }

private:
    std::filesystem::path dir_;
    std::set<std::string> formats_;
};

std::string dump(const Json& j)
{
    return j.dump(2) + "\n";
}

std::vector<std::pair<double, double>> outline(const ConvexBody& body)
{
    std::vector<std::pair<double, double>> pts;
    if (const auto* b = std::get_if<Box>(&body.variant())) {
        pts = {{b->lo[0], b->lo[1]}, {b->hi[0], b->lo[1]}, {b->hi[0], b->hi[1]}, {b->lo[0], b->hi[1]}};
    } else if (const auto* b = std::get_if<Ball>(&body.variant())) {
        for (int i = 0; i < 200; ++i) {
            const double t = 2 * std::numbers::pi * i / 200;
            pts.emplace_back(b->center[0] + b->radius * std::cos(t), b->center[1] + b->radius * std::sin(t));
        }
    } else {
        for (const Point& v : std::get<Polygon2D>(body.variant()).vertices) pts.emplace_back(v[0], v[1]);
    }
    pts.push_back(pts.front());
    return pts;
}

Json cmd_kernel(const RunConfig& c, const Emitter& em)
{
    const OperatorClass op = make_operator(c);
    if (!(c.t_max > 0) || !std::isfinite(c.t_max)) throw Error(ErrorCode::kInvalidParameter, "--t-max must be positive");
    if (c.steps < 1) throw Error(ErrorCode::kInvalidParameter, "--steps must be at least 1");
    Json rows = Json::array();
    std::string csv = "t,g,dg,G\n";
    PlotSeries g_series{"g", {}};
    PlotSeries big_series{"G", {}};
    for (int i = 0; i <= c.steps; ++i) {
        const double t = c.t_max * i / c.steps;
        const double g = green_kernel(op, t);
        const double dg = green_kernel_derivative(op, t);
        const double big = green_antiderivative(op, t);
        rows.push_back({{"t", t}, {"g", g}, {"dg", dg}, {"G", big}});
        csv += csv_num(t) + "," + csv_num(g) + "," + csv_num(dg) + "," + csv_num(big) + "\n";
        g_series.points.emplace_back(t, g);
        big_series.points.emplace_back(t, big);
    }
    Json j;
    j["command"] = "kernel";
    j["operator"] = to_json(op);
    j["rows"] = rows;
    em.write("kernel.json", "json", dump(j));
    em.write("kernel.csv", "csv", csv);
    em.write("kernel.svg", "svg",
             render_svg({"Green kernel of " + op.describe(), "t", "value", false, false, false,
                         {g_series, big_series}, {}}));
    return j;
}

Json cmd_extremal(const RunConfig& c, const Emitter& em)
{
    const OperatorClass op = make_operator(c);
    const double delta = monotonicity_threshold(op);
    if (!(c.a > 0) || !std::isfinite(c.a)) throw Error(ErrorCode::kDomain, "--a must be positive and finite");
    if (!(c.a < delta)) {
        throw Error(ErrorCode::kOutOfRange, "a = " + csv_num(c.a) + " is not below the monotonicity threshold delta = " +
                                                csv_num(delta) + " of " + op.describe());
    }
    const ExtremalProfile pr = extremal_profile(op, c.a);
    Json j;
    j["command"] = "extremal";
    j["operator"] = to_json(op);
    j["a"] = c.a;
    j["delta"] = number(delta);
    j["t0"] = pr.t0;
    j["ext1"] = pr.ext1;
    j["ext2"] = pr.ext2;
    em.write("extremal.json", "json", dump(j));
    em.write("extremal.csv", "csv",
             "a,delta,t0,ext1,ext2\n" + csv_num(c.a) + "," + csv_num(delta) + "," + csv_num(pr.t0) + "," +
                 csv_num(pr.ext1) + "," + csv_num(pr.ext2) + "\n");
    return j;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

Json cmd_verify(const RunConfig& c, const Emitter& em, bool& ok)
{
    VerifyOptions opt;
    if (c.op_given) opt.op = make_operator(c);
    const bool any = c.only_kernel || c.only_l1 || c.only_bvp || c.only_membership || c.only_fooling || c.only_sandwich;
    if (any) {
        opt.kernel = c.only_kernel;
        opt.l1 = c.only_l1;
        opt.bvp = c.only_bvp;
        opt.membership = c.only_membership;
        opt.fooling = c.only_fooling;
        opt.sandwich = c.only_sandwich;
    }
    opt.inject_half_factor = c.inject_half_factor;
    opt.fooling_points = c.points;
    opt.fooling_dirs = c.dirs;
    opt.seed = c.seed;
    if (opt.fooling_points < 1 || opt.fooling_dirs < 1) {
        throw Error(ErrorCode::kInvalidParameter, "--points and --dirs must be positive");
    }
    const VerifySummary s = run_verify_suite(opt);
    ok = s.ok();

    Json checks = Json::array();
    std::string csv = "group,name,status,residual,tolerance,detail\n";
    for (const CheckResult& r : s.checks) {
        checks.push_back({{"group", r.group},
                          {"name", r.name},
                          {"status", to_string(r.status)},
                          {"residual", number(r.residual)},
                          {"tolerance", r.tolerance},
                          {"detail", r.detail}});
        csv += csv_field(r.group) + "," + csv_field(r.name) + "," + to_string(r.status) + "," + csv_num(r.residual) +
               "," + csv_num(r.tolerance) + "," + csv_field(r.detail) + "\n";
    }
    Json j;
    j["command"] = "verify";
    j["operator"] = opt.op ? to_json(*opt.op) : Json(nullptr);
    j["inject_half_factor"] = opt.inject_half_factor;
    j["passed"] = s.count(CheckStatus::kPass);
    j["failed"] = s.count(CheckStatus::kFail);
    j["skipped"] = s.count(CheckStatus::kSkipped);
    j["ok"] = ok;
    j["checks"] = checks;
    em.write("verify.json", "json", dump(j));
    em.write("verify.csv", "csv", csv);
    return j;
}

Json cmd_nodes(const RunConfig& c, const Emitter& em)
{
    const ConvexBody body = make_body(c);
    const int n = single_n(c);
    const double res = c.resolution > 0 ? c.resolution : auto_resolution(body, n);
    const NodeGenReport r = build_xi_star(body, n, c.theta, c.seed, res);
    Json j;
    j["command"] = "nodes";
    j["body"] = body_to_json(body);
    j["report"] = to_json(r);
    j["nodes_file"] = "nodes.csv";
    std::ostringstream csv;
    write_nodes_csv(csv, r.nodes);
    em.write("nodes.json", "json", dump(j));
    em.write("nodes.csv", "csv", csv.str());
    if (body.dim() == 2) {
        PlotSeries layer{"boundary layer", {}, true};
        PlotSeries interior{"interior", {}, true};
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            const Point& p = r.nodes.points[i];
            (i < r.k_n ? layer : interior).points.emplace_back(p[0], p[1]);
        }
        em.write("nodes.svg", "svg",
                 render_svg({"Nodes, n = " + std::to_string(n), "x1", "x2", false, false, true,
                             {{"", outline(body)}, layer, interior}, {}}));
    }
    return j;
}

Json cmd_error(const RunConfig& c, const Emitter& em)
{
    const OperatorClass op = make_operator(c);
    const ConvexBody body = make_body(c);
    NodeSet xi;
    std::optional<NodeGenReport> generated;
    if (!c.nodes.empty()) {
        xi = read_nodes_file(c.nodes);
    } else if (!c.n.empty()) {
        const int n = single_n(c);
        const double res = c.resolution > 0 ? c.resolution : auto_resolution(body, n);
        generated = build_xi_star(body, n, c.theta, c.seed, res);
        xi = generated->nodes;
    } else {
        throw Error(ErrorCode::kInvalidConfig, "error needs --nodes or --n");
    }
    if (xi.empty()) throw Error(ErrorCode::kEmptyNodeSet, "node set is empty");
    if (xi.dim != body.dim()) throw Error(ErrorCode::kDimensionMismatch, "nodes and body differ in dimension");
    const int n = static_cast<int>(xi.size());
    const double res = c.resolution > 0 ? c.resolution : auto_resolution(body, n);
    const UpperBoundForm form = c.inject_half_factor ? UpperBoundForm::kHalved : UpperBoundForm::kRadius;
    const ErrorReport r = generated ? error_from_estimates(op, xi, generated->e_omega, generated->e_boundary, form)
                          : op.is_self_adjoint() ? exact_error(op, body, xi, res, form)
                                                 : upper_bound(op, body, xi, res, form);
    Json j;
    j["command"] = "error";
    j["operator"] = to_json(op);
    j["body"] = body_to_json(body);
    j["n"] = n;
    j["resolution"] = generated ? generated->resolution : res;
    j["report"] = to_json(r);
    const AsymptoticRn asy = rn_asymptotic(body, n);
    j["asymptotic"] = {{"value", asy.value}, {"dens_status", to_string(asy.dens_status)}};
    em.write("error.json", "json", dump(j));
    em.write("error.csv", "csv",
             "n,e_omega,e_boundary,lower,upper,exact,boundary_condition_ok\n" + std::to_string(n) + "," +
                 csv_num(r.e_omega.value) + "," + csv_num(r.e_boundary.value) + "," +
                 (r.lower ? csv_num(*r.lower) : std::string()) + "," + csv_num(r.upper) + "," +
                 (r.exact ? "true" : "false") + "," + (r.boundary_condition_ok ? "true" : "false") + "\n");
    return j;
}

Json cmd_study(const RunConfig& c, const Emitter& em)
{
    const OperatorClass op = make_operator(c);
    const ConvexBody body = make_body(c);
    const std::vector<int> ns = parse_n_list(c.n.empty() ? "64,256,1024" : c.n);
    const std::vector<StudyRow> rows = convergence_study(op, body, ns, c.theta, c.seed, c.resolution);
    const AsymptoticRn asy = rn_asymptotic(body, 1);

    Json jrows = Json::array();
    std::string csv = "n,k_n,e_omega,lower,upper,exact,normalized,boundary_layer_ok\n";
    PlotSeries line{"upper * n^(2/d)", {}};
    PlotSeries dots{"", {}, true};
    for (const StudyRow& r : rows) {
        jrows.push_back(to_json(r));
        csv += std::to_string(r.n) + "," + std::to_string(r.k_n) + "," + csv_num(r.report.e_omega.value) + "," +
               (r.report.lower ? csv_num(*r.report.lower) : std::string()) + "," + csv_num(r.report.upper) + "," +
               (r.report.exact ? "true" : "false") + "," + csv_num(r.normalized) + "," +
               (r.boundary_layer_ok ? "true" : "false") + "\n";
        line.points.emplace_back(r.n, r.normalized);
        dots.points.emplace_back(r.n, r.normalized);
    }
    Json j;
    j["command"] = "study";
    j["operator"] = to_json(op);
    j["body"] = body_to_json(body);
    j["theta"] = c.theta;
    j["seed"] = c.seed;
    j["asymptotic_constant"] = asy.value;
    j["dens_status"] = to_string(asy.dens_status);
    j["rows"] = jrows;
    em.write("study.json", "json", dump(j));
    em.write("study.csv", "csv", csv);
    em.write("study.svg", "svg",
             render_svg({"Normalized error, " + op.describe(), "n", "upper * n^(2/d)", true, false, false,
                         {line, dots}, {{asy.value, "asymptotic constant"}}}));
    return j;
}

void add_operator_options(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--p", c.p, "Coefficient p of D^2 + pD + q");
    sub->add_option("--q", c.q, "Coefficient q of D^2 + pD + q");
    sub->add_option("--operator", c.op_text, "Operator as p=<num>,q=<num>");
}

void add_output_options(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--out", c.out_dir, "Output directory (default $ISOREC_OUT, else ./out)");
    sub->add_option("--format", c.formats, "Comma-separated subset of json,csv,svg");
}

void add_body_options(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--body", c.body, "Body JSON file or inline JSON object (default unit square)");
    sub->add_option("--theta", c.theta, "Boundary layer ratio in (0, 1/sqrt2)");
    sub->add_option("--seed", c.seed, "Random seed");
    sub->add_option("--resolution", c.resolution, "Distance resolution (default from n)");
}

// Config entries become flags placed right after the subcommand, so flags
// given on the command line come later and win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app)
{
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open config file " + path);
    Json cfg;
    try {
        cfg = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::kInvalidConfig, "config file is not valid JSON: " + std::string(e.what()));
    }
    if (!cfg.is_object()) throw Error(ErrorCode::kInvalidConfig, "config file must hold a JSON object");
    CLI::App* sub = app.get_subcommand_no_throw(args.front());
    if (sub == nullptr) return args;

    std::vector<std::string> injected;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config") continue;
        bool known_anywhere = false;
        for (const CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) {
            known_anywhere = known_anywhere || s->get_option_no_throw("--" + key) != nullptr;
        }
        if (!known_anywhere) throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) injected.push_back("--" + key);
            continue;
        }
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_array()) {
            for (const auto& v : value) text += (text.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
        } else {
            text = value.dump();
        }
        injected.push_back("--" + key);
        injected.push_back(text);
    }
    std::vector<std::string> out{args.front()};
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

void report_error(std::ostream& err, std::string_view code, const std::string& message, int exit_code)
{
    Json e;
    e["error"] = code;
    e["message"] = message;
    e["exit_code"] = exit_code;
    err << e.dump() << '\n';
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::kInvalidCoefficients:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidParameter:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kUnsupportedDimension:
    case ErrorCode::kUnsupportedOperator:
    case ErrorCode::kNTooSmall:
    case ErrorCode::kEmptyNodeSet:
        return 2;
    case ErrorCode::kOutOfRange:
    case ErrorCode::kDomain:
        return 3;
    default:
        return 4;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig c;
    CLI::App app{"Optimal recovery for isotropic classes W^{P(D)}", "isorec"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    std::string config_path;
    app.set_version_flag("--version", "isorec 0.1.0");

    CLI::App* kernel = app.add_subcommand("kernel", "Tabulate g, g' and G on a uniform grid");
    CLI::App* extremal = app.add_subcommand("extremal", "delta, t0, ext1 and ext2 for one segment length");
    CLI::App* verify = app.add_subcommand("verify", "Run the oracle cross-check suite");
    CLI::App* nodes = app.add_subcommand("nodes", "Build a near-optimal node set");
    CLI::App* error = app.add_subcommand("error", "Bound the recovery error of a node set");
    CLI::App* study = app.add_subcommand("study", "Normalized error across several n");
    for (CLI::App* sub : {kernel, extremal, verify, nodes, error, study}) {
        sub->add_option("--config", config_path, "JSON file of option values; flags override it");
        add_operator_options(sub, c);
        add_output_options(sub, c);
    }
    kernel->add_option("--t-max", c.t_max, "Right end of the grid");
    kernel->add_option("--steps", c.steps, "Number of grid intervals");
    extremal->add_option("--a", c.a, "Segment length a")->required();
    verify->add_flag("--inject-half-factor", c.inject_half_factor, "Use the halved upper bound in the sandwich check");
    verify->add_flag("--kernel", c.only_kernel, "Run the quadrature-vs-G checks");
    verify->add_flag("--l1", c.only_l1, "Run the L1-vs-ext2 checks");
    verify->add_flag("--bvp", c.only_bvp, "Run the BVP-vs-extremal-function checks");
    verify->add_flag("--membership", c.only_membership, "Run the class membership checks");
    verify->add_flag("--fooling", c.only_fooling, "Run the fooling function checks");
    verify->add_flag("--sandwich", c.only_sandwich, "Run the lower <= upper checks");
    verify->add_option("--points", c.points, "Fooling check sample points");
    verify->add_option("--dirs", c.dirs, "Fooling check directions per point");
    verify->add_option("--seed", c.seed, "Random seed");
    for (CLI::App* sub : {nodes, error, study}) add_body_options(sub, c);
    nodes->add_option("--n", c.n, "Number of nodes")->required();
    error->add_option("--n", c.n, "Generate this many nodes instead of reading --nodes");
    error->add_option("--nodes", c.nodes, "Node CSV file");
    error->add_flag("--inject-half-factor", c.inject_half_factor, "Report the halved upper bound");
    study->add_option("--n", c.n, "Comma-separated node counts (default 64,256,1024)");

    try {
        const std::vector<std::string> full = expand_config(args, app);
        try {
            app.parse(std::vector<std::string>(full.rbegin(), full.rend()));
        } catch (const CLI::CallForVersion&) {
            out << app.version() << '\n';
            return 0;
        } catch (const CLI::Success&) {
            out << app.help();
            return 0;
        } catch (const CLI::ParseError& e) {
            report_error(err, "invalid-config", e.what(), 2);
            return 2;
        }

        for (const CLI::App* sub : app.get_subcommands()) {
            c.op_given = sub->count("--p") + sub->count("--q") + sub->count("--operator") > 0;
        }
        const Emitter em(c);
        Json result;
        int code = 0;
        if (kernel->parsed()) {
            result = cmd_kernel(c, em);
        } else if (extremal->parsed()) {
            result = cmd_extremal(c, em);
        } else if (verify->parsed()) {
            bool ok = false;
            result = cmd_verify(c, em, ok);
            code = ok ? 0 : 1;
            err << "verify: " << result["passed"].get<std::size_t>() << " passed, "
                << result["failed"].get<std::size_t>() << " failed, " << result["skipped"].get<std::size_t>()
                << " skipped\n";
        } else if (nodes->parsed()) {
            result = cmd_nodes(c, em);
        } else if (error->parsed()) {
            result = cmd_error(c, em);
        } else {
            result = cmd_study(c, em);
        }
        out << dump(result);
        return code;
    } catch (const Error& e) {
        const int code = exit_code_for(e.code());
        report_error(err, error_code_name(e.code()), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what(), 4);
        return 4;
    }
}

}  // namespace isorec
