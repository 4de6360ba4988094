#include "pbgq/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pbgq/config.hpp"
#include "pbgq/csv.hpp"
#include "pbgq/errors.hpp"

namespace pbgq::cli {

namespace {

using config::Json;

OutputFormat resolve_format(const RunConfig& cfg, const config::OutputSection& doc, OutputFormat fallback)
{
    if (cfg.format)
        return *cfg.format;
    if (doc.format)
        return *parse_format(*doc.format);
    return fallback;
}

std::string fixed(double x, int digits = 6)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

// --- simulate ---------------------------------------------------------------

void emit_trajectory(std::ostream& os, const TrajectoryRecord& rec, OutputFormat fmt)
{
    if (fmt == OutputFormat::json) {
        os << config::trajectory_to_json(rec).dump(2) << '\n';
        return;
    }
    if (fmt == OutputFormat::csv) {
        csv::write_row(os, {"segment", "kind", "elapsed_s", "label", "probability", "leak"});
        for (const auto& s : rec.snapshots)
            for (Eigen::Index i = 0; i < s.state.dim(); ++i)
                csv::write_row(os, {std::to_string(s.segment_index), s.kind, csv::format(s.elapsed),
                                    s.state.label_of(i).to_string(), csv::format(std::norm(s.state.amplitudes()[i])),
                                    csv::format(s.leak_probability)});
        return;
    }
    const auto populations = [&](const JointState& st) {
        for (Eigen::Index i = 0; i < st.dim(); ++i) {
            const double p = std::norm(st.amplitudes()[i]);
            if (p > 1e-12)
                os << "    |" << st.label_of(i).to_string() << ">  " << fixed(p, 9) << '\n';
        }
    };
    os << "initial\n";
    populations(rec.initial);
    for (const auto& s : rec.snapshots) {
        os << "[" << s.segment_index << "] " << s.kind << "  t = " << csv::format(s.elapsed)
           << " s  leak = " << csv::format(s.leak_probability);
        if (s.measurement)
            os << "  measured " << to_char(s.measurement->outcome) << " (p = " << fixed(s.measurement->probability)
               << ", seed " << s.measurement->seed << ")";
        os << '\n';
        populations(s.state);
    }
}

int simulate(const RunConfig& cfg, const Json& doc, config::Context& ctx, std::ostream& out, std::ostream& err,
             config::OutputSection& output, OutputFormat& fmt)
{
    auto parsed = config::parse_plan_document(doc, ctx);
    if (cfg.seed)
        parsed.plan.seed = *cfg.seed;
    output = parsed.output;
    fmt = resolve_format(cfg, output, OutputFormat::text);
    const auto rec = execute_plan(parsed.plan);
    (void)err;
    emit_trajectory(out, rec, fmt);
    return ok;
}

// --- sweep ------------------------------------------------------------------

void emit_sweep(std::ostream& os, const SweepTable& table, OutputFormat fmt)
{
    if (fmt != OutputFormat::json) {
        write_sweep_csv(os, table);
        return;
    }
    Json rows = Json::array();
    for (const auto& r : table.rows) {
        Json j = {{"value", r.value}};
        if (r.result) {
            j["u2"] = std::norm(r.result->u);
            j["u"] = {r.result->u.real(), r.result->u.imag()};
            j["w"] = {r.result->w.real(), r.result->w.imag()};
            j["norm_error"] = r.result->norm_error;
        } else {
            j["error"] = r.error;
        }
        rows.push_back(std::move(j));
    }
    os << Json{{"parameter", sweep_column_name(table.parameter)}, {"rows", std::move(rows)}}.dump(2) << '\n';
}

// --- calibrate --------------------------------------------------------------

void emit_calibration(std::ostream& os, const config::CalibrateDocument& d, const std::vector<DetuningRoot>& minima,
                      OutputFormat fmt)
{
    const double w0 = d.second.coupling.omega_0;
    if (fmt == OutputFormat::csv) {
        csv::write_row(os, {"delta2_rad_per_s", "delta2_over_omega0", "abs_gamma", "alpha_deviation", "certified"});
        for (const auto& m : minima)
            csv::write_row(os, {csv::format(m.delta2), csv::format(m.delta2 / w0), csv::format(m.abs_gamma),
                                csv::format(m.alpha_deviation), m.certified ? "1" : "0"});
        return;
    }
    if (fmt == OutputFormat::json) {
        Json arr = Json::array();
        for (const auto& m : minima)
            arr.push_back({{"delta2_rad_per_s", m.delta2},
                           {"delta2_over_omega0", m.delta2 / w0},
                           {"abs_gamma", m.abs_gamma},
                           {"alpha_deviation", m.alpha_deviation},
                           {"certified", m.certified}});
        os << Json{{"tolerance", d.options.tolerance}, {"minima", std::move(arr)}}.dump(2) << '\n';
        return;
    }
    int certified = 0;
    os << "local minima of |gamma|^2 over delta2/Omega0 in [" << fixed(d.delta2_lo / w0, 4) << ", "
       << fixed(d.delta2_hi / w0, 4) << "], tolerance " << d.options.tolerance << "\n";
    os << "  delta2/Omega0   |gamma|     ||alpha|-1/sqrt2|  certified\n";
    for (const auto& m : minima) {
        certified += m.certified;
        os << "  " << std::setw(13) << fixed(m.delta2 / w0, 6) << "  " << std::setw(10) << fixed(m.abs_gamma, 6)
           << "  " << std::setw(17) << fixed(m.alpha_deviation, 6) << "  " << (m.certified ? "yes" : "no") << '\n';
    }
    os << certified << " maximal-entanglement root(s) certified\n";
}

// --- gate -------------------------------------------------------------------

void emit_gate(std::ostream& os, const GateReport& rep, OutputFormat fmt)
{
    static const char* names[4] = {"00", "01", "10", "11"};
    if (fmt == OutputFormat::json) {
        os << config::gate_report_to_json(rep).dump(2) << '\n';
        return;
    }
    if (fmt == OutputFormat::csv) {
        csv::write_row(os, {"input_pq", "output_pout_q", "probability"});
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                csv::write_row(os, {names[i], names[j], csv::format(rep.truth(i, j))});
        return;
    }
    os << "truth table P(p' q | p q)\n      ";
    for (auto n : names)
        os << "  " << n << "      ";
    os << '\n';
    for (int i = 0; i < 4; ++i) {
        os << "  " << names[i] << "  ";
        for (int j = 0; j < 4; ++j)
            os << "  " << fixed(rep.truth(i, j));
        os << "   P(e) = " << csv::format(rep.atom_excited[i]) << '\n';
    }
    os << "classical fidelity  " << fixed(rep.classical_fidelity, 9) << '\n'
       << "min P(atom in g)    " << fixed(rep.min_atom_ground, 9) << '\n'
       << "unitarity defect    " << csv::format(rep.unitarity_defect) << '\n';
}

// --- budget -----------------------------------------------------------------

void emit_budget(std::ostream& os, const BudgetLedger& ledger, OutputFormat fmt)
{
    if (fmt == OutputFormat::json) {
        os << ledger.to_json().dump(2) << '\n';
        return;
    }
    if (fmt == OutputFormat::csv) {
        csv::write_row(os, {"section", "quantity", "value", "unit", "note"});
        for (const auto& e : ledger.entries)
            csv::write_row(os, {e.section, e.quantity, csv::format(e.value), e.unit, e.note});
        for (const auto& r : ledger.remarks)
            csv::write_row(os, {"remark", r, "", "", ""});
        return;
    }
    ledger.render_text(os);
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    config::Context ctx;
    ctx.lenient = cfg.lenient;
    if (cfg.jobs < 1)
        throw ConfigError("jobs", "must be >= 1");

    Json doc = Json::object();
    if (!cfg.config_path.empty())
        doc = config::load_file(cfg.config_path);
    else if (cfg.subcommand != Subcommand::budget)
        throw ConfigError("config", "a configuration document is required");

    // Artifacts are rendered into a buffer so a failing run writes nothing.
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    config::OutputSection output;
    OutputFormat fmt = OutputFormat::text;

    switch (cfg.subcommand) {
    case Subcommand::simulate:
        simulate(cfg, doc, ctx, buf, err, output, fmt);
        break;
    case Subcommand::sweep: {
        const auto d = config::parse_sweep(doc, ctx);
        output = d.output;
        fmt = resolve_format(cfg, output, OutputFormat::csv);
        const auto table = sweep(d.spec, cfg.jobs);
        for (std::size_t i = 0; i < table.rows.size(); ++i)
            if (!table.rows[i].error.empty())
                err << "warning: grid point " << i << ": " << table.rows[i].error << '\n';
        emit_sweep(buf, table, fmt);
        break;
    }
    case Subcommand::calibrate: {
        auto d = config::parse_calibrate(doc, ctx);
        d.options.jobs = cfg.jobs;
        output = d.output;
        fmt = resolve_format(cfg, output, OutputFormat::text);
        const auto minima = scan_entanglement_minima(d.first, d.second, d.delta2_lo, d.delta2_hi, d.options);
        emit_calibration(buf, d, minima, fmt);
        break;
    }
    case Subcommand::gate: {
        const auto d = config::parse_gate(doc, ctx);
        output = d.output;
        fmt = resolve_format(cfg, output, OutputFormat::text);
        auto plan = build_cnot_plan(d.calibration, d.variant, d.layout);
        if (cfg.seed)
            plan.seed = *cfg.seed;
        emit_gate(buf, cnot_truth_table(plan, d.roles), fmt);
        break;
    }
    case Subcommand::budget: {
        const auto d = config::parse_budget(doc, ctx);
        output = d.output;
        fmt = resolve_format(cfg, output, OutputFormat::text);
        emit_budget(buf, build_budget_ledger(d.scenario), fmt);
        break;
    }
    }

    for (const auto& w : ctx.warnings)
        err << "warning: " << w << '\n';

    const auto path = cfg.out_path ? cfg.out_path : output.path;
    if (path && !path->empty() && *path != "-") {
        std::ofstream f(*path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open output file \"" + *path + "\"");
        f << buf.str();
        if (!f)
            throw std::runtime_error("failed writing \"" + *path + "\"");
    } else {
        out << buf.str();
    }
    return ok;
}

} // namespace

std::optional<Subcommand> parse_subcommand(const std::string& name)
{
    if (name == "simulate")
        return Subcommand::simulate;
    if (name == "sweep")
        return Subcommand::sweep;
    if (name == "calibrate")
        return Subcommand::calibrate;
    if (name == "gate")
        return Subcommand::gate;
    if (name == "budget")
        return Subcommand::budget;
    return std::nullopt;
}

std::optional<OutputFormat> parse_format(const std::string& name)
{
    if (name == "csv")
        return OutputFormat::csv;
    if (name == "text")
        return OutputFormat::text;
    if (name == "json")
        return OutputFormat::json;
    return std::nullopt;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        return dispatch(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const TruncationError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    } catch (const SegmentError& e) {
        err << "error: " << e.what() << '\n';
        return numeric_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return numeric_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
}

} // namespace pbgq::cli
