#include "pbgq/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pbgq/errors.hpp"

namespace pbgq::config {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

/// Read access to one JSON object that remembers which keys were consumed.
class Obj
{
public:
    Obj(const Json& j, std::string path, Context& ctx) : m_j(j), m_path(std::move(path)), m_ctx(ctx)
    {
        if (!j.is_object())
            throw ConfigError(m_path.empty() ? "document" : m_path, "expected an object");
    }

    const std::string& path() const { return m_path; }
    std::string at(const std::string& key) const { return join(m_path, key); }

    bool has(const std::string& key) const { return m_j.contains(key); }

    const Json& raw(const std::string& key)
    {
        if (!has(key))
            throw ConfigError(at(key), "required key is missing");
        m_used.insert(key);
        return m_j.at(key);
    }

    double number(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_number())
            throw ConfigError(at(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            throw ConfigError(at(key), "must be finite");
        return x;
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::int64_t integer(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_number_integer())
            throw ConfigError(at(key), "expected an integer");
        return v.get<std::int64_t>();
    }
    std::int64_t integer(const std::string& key, std::int64_t fallback) { return has(key) ? integer(key) : fallback; }

    std::uint64_t unsigned_integer(const std::string& key)
    {
        const Json& v = raw(key);
        if (v.is_number_unsigned())
            return v.get<std::uint64_t>();
        if (v.is_number_integer())
            throw ConfigError(at(key), "must be >= 0");
        throw ConfigError(at(key), "expected an integer");
    }

    std::string string(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_string())
            throw ConfigError(at(key), "expected a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, std::string fallback)
    {
        return has(key) ? string(key) : std::move(fallback);
    }

    Obj object(const std::string& key) { return {raw(key), at(key), m_ctx}; }

    const Json& array(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_array())
            throw ConfigError(at(key), "expected an array");
        return v;
    }

    /// Rejects (or, when lenient, records) keys that were never read.
    void finish()
    {
        for (const auto& [key, value] : m_j.items()) {
            if (m_used.count(key))
                continue;
            if (!m_ctx.lenient)
                throw ConfigError(at(key), "unknown key");
            m_ctx.warnings.push_back(at(key) + ": unknown key ignored");
        }
    }

    Context& context() { return m_ctx; }

private:
    const Json& m_j;
    std::string m_path;
    Context& m_ctx;
    std::set<std::string> m_used;
};

template <class F>
auto rethrow_at(const std::string& path, const std::map<std::string, std::string>& keys, F f)
{
    try {
        return f();
    } catch (const ConfigError& e) {
        const auto it = keys.find(e.field());
        throw ConfigError(join(path, it == keys.end() ? e.field() : it->second), e.detail());
    }
}

const std::map<std::string, std::string> pass_keys = {
    {"v", "v_m_per_s"},        {"b", "b_m"},          {"delta", "delta_rad_per_s"}, {"omega0", "omega0_rad_per_s"},
    {"R_def", "R_def_m"},      {"lattice_a", "lattice_a_m"}, {"mode", "mode"},      {"max_step", "integrator.max_step_s"},
    {"alignment", "alignment"}};

const std::map<std::string, std::string> mode_keys = {
    {"omega_d", "omega_d_rad_per_s"}, {"R_def", "R_def_m"}, {"lattice_a", "lattice_a_m"}, {"Q", "Q"}};

const std::map<std::string, std::string> atom_keys = {{"omega_a", "omega_a_rad_per_s"}, {"d21", "d21_C_m"}};

// --- sections ---------------------------------------------------------------

AtomSpecies read_atom(Obj o)
{
    AtomSpecies a;
    a.label = o.string("label", "");
    a.omega_a = o.number("omega_a_rad_per_s");
    a.d21 = o.number("d21_C_m");
    o.finish();
    rethrow_at(o.path(), atom_keys, [&] { a.validate(); });
    return a;
}

Json atom_json(const AtomSpecies& a)
{
    return {{"label", a.label}, {"omega_a_rad_per_s", a.omega_a}, {"d21_C_m", a.d21}};
}

DefectMode read_mode(Obj o)
{
    DefectMode m;
    m.name = o.string("name", "");
    m.omega_d = o.number("omega_d_rad_per_s");
    m.R_def = o.number("R_def_m");
    m.lattice_a = o.number("lattice_a_m");
    m.phi = o.number("phi_rad", 0);
    m.Q = o.number("Q", std::numeric_limits<double>::infinity());
    o.finish();
    rethrow_at(o.path(), mode_keys, [&] { m.validate(); });
    return m;
}

Json mode_json(const DefectMode& m)
{
    Json j = {{"name", m.name},
              {"omega_d_rad_per_s", m.omega_d},
              {"R_def_m", m.R_def},
              {"lattice_a_m", m.lattice_a},
              {"phi_rad", m.phi}};
    if (std::isfinite(m.Q))
        j["Q"] = m.Q;
    return j;
}

std::vector<DefectMode> read_modes(Obj& parent)
{
    const Json& arr = parent.array("modes");
    std::vector<DefectMode> modes;
    for (std::size_t k = 0; k < arr.size(); ++k)
        modes.push_back(read_mode(Obj(arr[k], parent.at("modes[" + std::to_string(k) + "]"), parent.context())));
    if (modes.empty())
        throw ConfigError(parent.at("modes"), "at least one mode is required");
    return modes;
}

IntegratorConfig read_integrator(Obj o, IntegratorConfig base = {})
{
    IntegratorConfig c = base;
    if (o.has("method")) {
        const auto m = o.string("method");
        if (m == "rk4")
            c.method = IntegratorMethod::rk4;
        else if (m == "adaptive")
            c.method = IntegratorMethod::adaptive;
        else
            throw ConfigError(o.at("method"), "expected \"rk4\" or \"adaptive\", got \"" + m + "\"");
    }
    c.max_step = o.number("max_step_s", c.max_step);
    c.steps_per_period = o.number("steps_per_period", c.steps_per_period);
    c.rel_tol = o.number("rel_tol", c.rel_tol);
    c.abs_tol = o.number("abs_tol", c.abs_tol);
    c.unitarity_tol = o.number("unitarity_tol", c.unitarity_tol);
    o.finish();
    rethrow_at(o.path(), {{"max_step", "max_step_s"}}, [&] { c.validate(); });
    return c;
}

Json integrator_json(const IntegratorConfig& c)
{
    return {{"method", c.method == IntegratorMethod::rk4 ? "rk4" : "adaptive"},
            {"max_step_s", c.max_step},
            {"steps_per_period", c.steps_per_period},
            {"rel_tol", c.rel_tol},
            {"abs_tol", c.abs_tol},
            {"unitarity_tol", c.unitarity_tol}};
}

IntegratorConfig read_document_integrator(Obj& doc)
{
    return doc.has("integrator") ? read_integrator(doc.object("integrator")) : IntegratorConfig{};
}

int read_mode_index(Obj& o, std::size_t mode_count)
{
    const auto k = o.integer("mode");
    if (k < 0 || k >= static_cast<std::int64_t>(mode_count))
        throw ConfigError(o.at("mode"), "index " + std::to_string(k) + " out of range [0, " +
                                            std::to_string(mode_count) + ")");
    return static_cast<int>(k);
}

/// Reads pass keys from `o` (without calling finish). A key named in
/// `optional_key` may be absent and then takes `fallback`.
PassConfig read_pass_fields(Obj& o, const std::vector<DefectMode>& modes, const IntegratorConfig& integrator,
                            const std::string& optional_key = {}, double fallback = 0)
{
    const int k = read_mode_index(o, modes.size());
    const auto& mode = modes[k];
    const auto num = [&](const std::string& key, std::optional<double> def = {}) {
        if (key == optional_key && !o.has(key))
            return fallback;
        return def ? o.number(key, *def) : o.number(key);
    };

    PassConfig p;
    p.mode_index = k;
    p.coupling.omega_0 = num("omega0_rad_per_s");
    p.coupling.alignment = num("alignment", 1.0);
    p.coupling.profile.R_def = num("R_def_m", mode.R_def);
    p.coupling.profile.lattice_a = num("lattice_a_m", mode.lattice_a);
    p.coupling.profile.phi = num("phi_rad", mode.phi);
    p.coupling.profile.r0 = num("r0_m", 0.0);
    p.v = num("v_m_per_s");
    p.delta = num("delta_rad_per_s", 0.0);
    p.b = num("b_m", 10 * p.coupling.profile.R_def);
    p.integrator = o.has("integrator") ? read_integrator(o.object("integrator"), integrator) : integrator;
    rethrow_at(o.path(), pass_keys, [&] { p.validate(); });
    return p;
}

PassConfig read_pass(Obj o, const std::vector<DefectMode>& modes, const IntegratorConfig& integrator,
                     const std::string& optional_key = {}, double fallback = 0)
{
    auto p = read_pass_fields(o, modes, integrator, optional_key, fallback);
    o.finish();
    return p;
}

Json pass_json(const PassConfig& p, const std::vector<DefectMode>& modes, const IntegratorConfig& doc_integrator)
{
    Json j = {{"mode", p.mode_index},
              {"omega0_rad_per_s", p.coupling.omega_0},
              {"v_m_per_s", p.v},
              {"delta_rad_per_s", p.delta},
              {"b_m", p.b}};
    if (p.coupling.alignment != 1)
        j["alignment"] = p.coupling.alignment;
    const auto& prof = p.coupling.profile;
    const bool known = p.mode_index >= 0 && p.mode_index < static_cast<int>(modes.size());
    const DefectMode* m = known ? &modes[p.mode_index] : nullptr;
    if (!m || prof.R_def != m->R_def)
        j["R_def_m"] = prof.R_def;
    if (!m || prof.lattice_a != m->lattice_a)
        j["lattice_a_m"] = prof.lattice_a;
    if (!m || prof.phi != m->phi)
        j["phi_rad"] = prof.phi;
    if (prof.r0 != 0)
        j["r0_m"] = prof.r0;
    if (!(p.integrator == doc_integrator))
        j["integrator"] = integrator_json(p.integrator);
    return j;
}

BasisLabel parse_label(const std::string& text, const std::string& path)
{
    BasisLabel l;
    std::stringstream ss(text);
    std::string tok;
    bool first = true;
    while (std::getline(ss, tok, ',')) {
        if (first) {
            if (tok == "e")
                l.atom = AtomLevel::e;
            else if (tok == "g")
                l.atom = AtomLevel::g;
            else
                throw ConfigError(path, "label must start with 'e' or 'g', got \"" + text + "\"");
            first = false;
            continue;
        }
        try {
            std::size_t used = 0;
            const int n = std::stoi(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument(tok);
            l.occupations.push_back(n);
        } catch (const std::logic_error&) {
            throw ConfigError(path, "bad photon number \"" + tok + "\" in label \"" + text + "\"");
        }
    }
    if (first)
        throw ConfigError(path, "empty basis label");
    return l;
}

OutputSection read_output(Obj& doc)
{
    OutputSection out;
    if (!doc.has("output"))
        return out;
    Obj o = doc.object("output");
    if (o.has("format")) {
        const auto f = o.string("format");
        if (f != "csv" && f != "text" && f != "json")
            throw ConfigError(o.at("format"), "expected \"csv\", \"text\" or \"json\", got \"" + f + "\"");
        out.format = f;
    }
    if (o.has("path"))
        out.path = o.string("path");
    o.finish();
    return out;
}

Segment read_segment(Obj o, const std::vector<DefectMode>& modes, const IntegratorConfig& integrator)
{
    const auto type = o.string("type");
    Segment seg;
    if (type == "DefectPass") {
        seg = DefectPass{read_pass_fields(o, modes, integrator)};
    } else if (type == "DispersivePass") {
        DispersivePass d;
        d.pass = read_pass_fields(o, modes, integrator);
        d.guard = o.number("guard", d.guard);
        if (!(d.guard > 0))
            throw ConfigError(o.at("guard"), "must be > 0");
        seg = d;
    } else if (type == "IdealPulse") {
        const int k = read_mode_index(o, modes.size());
        seg = IdealPulse{k, o.number("area_rad")};
    } else if (type == "ClassicalRotation") {
        const double theta = o.number("theta_rad");
        seg = ClassicalRotation{theta, o.number("field_phase_rad", 0)};
    } else if (type == "IdealDispersive") {
        const int k = read_mode_index(o, modes.size());
        seg = IdealDispersive{k, o.number("theta_rad")};
    } else if (type == "ZRotation") {
        seg = ZRotation{o.number("angle_rad")};
    } else if (type == "LossInterval") {
        const double t = o.number("duration_s");
        if (!(t >= 0))
            throw ConfigError(o.at("duration_s"), "must be >= 0");
        seg = LossInterval{t};
    } else if (type == "MeasureAtom") {
        MeasureAtom m;
        if (o.has("seed"))
            m.seed = o.unsigned_integer("seed");
        seg = m;
    } else {
        throw ConfigError(o.at("type"), "unknown segment variant \"" + type + "\"");
    }
    o.finish();
    return seg;
}

Json segment_json(const Segment& s, const std::vector<DefectMode>& modes, const IntegratorConfig& integrator)
{
    Json j = std::visit(overloaded{
                            [&](const DefectPass& d) { return pass_json(d.pass, modes, integrator); },
                            [&](const DispersivePass& d) {
                                Json p = pass_json(d.pass, modes, integrator);
                                p["guard"] = d.guard;
                                return p;
                            },
                            [](const IdealPulse& p) { return Json{{"mode", p.mode}, {"area_rad", p.area}}; },
                            [](const ClassicalRotation& r) {
                                return Json{{"theta_rad", r.theta}, {"field_phase_rad", r.field_phase}};
                            },
                            [](const IdealDispersive& p) { return Json{{"mode", p.mode}, {"theta_rad", p.theta}}; },
                            [](const ZRotation& z) { return Json{{"angle_rad", z.angle}}; },
                            [](const LossInterval& l) { return Json{{"duration_s", l.duration}}; },
                            [](const MeasureAtom& m) {
                                Json o = Json::object();
                                if (m.seed)
                                    o["seed"] = *m.seed;
                                return o;
                            },
                        },
                        s);
    j["type"] = segment_kind(s);
    return j;
}

const IntegratorConfig* first_pass_integrator(const FlightPlan& plan)
{
    for (const auto& s : plan.segments) {
        if (const auto* d = std::get_if<DefectPass>(&s))
            return &d->pass.integrator;
        if (const auto* d = std::get_if<DispersivePass>(&s))
            return &d->pass.integrator;
    }
    return nullptr;
}

} // namespace

Json parse_text(std::string_view text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("document", e.what());
    }
}

Json load_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("config", "cannot open \"" + path + "\"");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError("document", path + ": " + e.detail());
    }
}

PlanDocument parse_plan_document(const Json& doc, Context& ctx)
{
    Obj o(doc, "", ctx);
    PlanDocument out;
    FlightPlan& plan = out.plan;
    plan.atom = read_atom(o.object("atom"));
    plan.modes = read_modes(o);
    const auto integrator = read_document_integrator(o);

    plan.n_max = static_cast<int>(o.integer("n_max", 1));
    if (plan.n_max < 1)
        throw ConfigError("n_max", "must be >= 1");
    plan.initial = parse_label(o.string("initial_state"), "initial_state");
    if (plan.initial.occupations.size() != plan.modes.size())
        throw ConfigError("initial_state", "expected " + std::to_string(plan.modes.size()) + " occupations");
    if (o.has("seed"))
        plan.seed = o.unsigned_integer("seed");

    const Json& segs = o.array("segments");
    if (segs.empty())
        throw ConfigError("segments", "at least one segment is required");
    for (std::size_t i = 0; i < segs.size(); ++i)
        plan.segments.push_back(
            read_segment(Obj(segs[i], "segments[" + std::to_string(i) + "]", ctx), plan.modes, integrator));

    out.output = read_output(o);
    o.finish();
    plan.validate();
    return out;
}

FlightPlan parse_plan(const Json& doc, Context& ctx)
{
    return parse_plan_document(doc, ctx).plan;
}

FlightPlan parse_plan(const Json& doc)
{
    Context ctx;
    return parse_plan(doc, ctx);
}

Json plan_to_json(const FlightPlan& plan)
{
    const IntegratorConfig* ip = first_pass_integrator(plan);
    const IntegratorConfig integrator = ip ? *ip : IntegratorConfig{};

    Json modes = Json::array();
    for (const auto& m : plan.modes)
        modes.push_back(mode_json(m));
    Json segs = Json::array();
    for (const auto& s : plan.segments)
        segs.push_back(segment_json(s, plan.modes, integrator));

    return {{"atom", atom_json(plan.atom)},
            {"modes", std::move(modes)},
            {"integrator", integrator_json(integrator)},
            {"initial_state", plan.initial.to_string()},
            {"n_max", plan.n_max},
            {"seed", plan.seed},
            {"segments", std::move(segs)}};
}

Json state_to_json(const JointState& s)
{
    Json modes = Json::array();
    for (const auto& m : s.modes())
        modes.push_back(mode_json(m));
    Json amps = Json::array();
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        const auto a = s.amplitudes()[i];
        amps.push_back({{"label", s.label_of(i).to_string()}, {"re", a.real()}, {"im", a.imag()}});
    }
    return {{"n_max", s.n_max()}, {"modes", std::move(modes)}, {"amplitudes", std::move(amps)}};
}

JointState state_from_json(const Json& doc, Context& ctx)
{
    Obj o(doc, "", ctx);
    const int n_max = static_cast<int>(o.integer("n_max", 1));
    if (n_max < 1)
        throw ConfigError("n_max", "must be >= 1");
    auto modes = read_modes(o);
    JointState s = build_state(AtomLevel::g, std::vector<int>(modes.size(), 0), modes, n_max);
    JointState::Vector amps = JointState::Vector::Zero(s.dim());
    std::vector<bool> seen(s.dim(), false);

    const Json& arr = o.array("amplitudes");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string path = "amplitudes[" + std::to_string(k) + "]";
        Obj e(arr[k], path, ctx);
        const auto label = parse_label(e.string("label"), path + ".label");
        const auto i = s.index_of(label);
        if (seen[i])
            throw ConfigError(path + ".label", "duplicate basis label \"" + label.to_string() + "\"");
        seen[i] = true;
        amps[i] = {e.number("re"), e.number("im")};
        e.finish();
    }
    o.finish();
    return s.with_amplitudes(std::move(amps));
}

JointState state_from_json(const Json& doc)
{
    Context ctx;
    return state_from_json(doc, ctx);
}

Json trajectory_to_json(const TrajectoryRecord& rec)
{
    Json snaps = Json::array();
    for (const auto& s : rec.snapshots) {
        Json j = {{"segment", s.segment_index},
                  {"kind", s.kind},
                  {"elapsed_s", s.elapsed},
                  {"leak_probability", s.leak_probability},
                  {"state", state_to_json(s.state)}};
        if (s.measurement)
            j["measurement"] = {{"outcome", std::string(1, to_char(s.measurement->outcome))},
                                {"probability", s.measurement->probability},
                                {"seed", s.measurement->seed}};
        snaps.push_back(std::move(j));
    }
    return {{"initial", state_to_json(rec.initial)}, {"snapshots", std::move(snaps)}};
}

Json gate_report_to_json(const GateReport& rep)
{
    Json truth = Json::array(), map = Json::array();
    for (int i = 0; i < 4; ++i) {
        Json row = Json::array(), mrow = Json::array();
        for (int j = 0; j < 4; ++j) {
            row.push_back(rep.truth(i, j));
            mrow.push_back({{"re", rep.occupation_map(i, j).real()}, {"im", rep.occupation_map(i, j).imag()}});
        }
        truth.push_back(std::move(row));
        map.push_back(std::move(mrow));
    }
    return {{"truth_table", std::move(truth)},
            {"occupation_map", std::move(map)},
            {"output_phase_rad", rep.output_phase},
            {"atom_excited", rep.atom_excited},
            {"classical_fidelity", rep.classical_fidelity},
            {"min_atom_ground", rep.min_atom_ground},
            {"unitarity_defect", rep.unitarity_defect}};
}

SweepDocument parse_sweep(const Json& doc, Context& ctx)
{
    Obj o(doc, "", ctx);
    SweepDocument out;
    if (o.has("atom"))
        read_atom(o.object("atom"));
    const auto modes = read_modes(o);
    const auto integrator = read_document_integrator(o);

    Obj s = o.object("sweep");
    const auto param = s.string("parameter");
    if (param == "v_m_per_s")
        out.spec.parameter = SweepParameter::velocity;
    else if (param == "delta_rad_per_s")
        out.spec.parameter = SweepParameter::detuning;
    else
        throw ConfigError(s.at("parameter"), "expected \"v_m_per_s\" or \"delta_rad_per_s\", got \"" + param + "\"");
    out.spec.from = s.number("from");
    out.spec.to = s.number("to");
    const auto count = s.integer("count");
    if (count < 1 || count > 10'000'000)
        throw ConfigError(s.at("count"), "must be in [1, 1e7]");
    out.spec.count = static_cast<int>(count);
    s.finish();
    rethrow_at("sweep", {}, [&] { out.spec.validate(); });

    // Every grid value must be admissible; the endpoints bound the range.
    for (double x : {out.spec.from, out.spec.to})
        out.spec.base = read_pass(o.object("pass"), modes, integrator, param, x);

    out.output = read_output(o);
    o.finish();
    return out;
}

CalibrateDocument parse_calibrate(const Json& doc, Context& ctx)
{
    Obj o(doc, "", ctx);
    CalibrateDocument out;
    if (o.has("atom"))
        read_atom(o.object("atom"));
    const auto modes = read_modes(o);
    const auto integrator = read_document_integrator(o);
    out.first = read_pass(o.object("first"), modes, integrator);
    out.second = read_pass(o.object("second"), modes, integrator, "delta_rad_per_s", 0);

    Obj s = o.object("scan");
    const double w0 = out.second.coupling.omega_0;
    if (!(w0 > 0))
        throw ConfigError("second.omega0_rad_per_s", "must be > 0 to scale the scan range");
    out.delta2_lo = s.number("delta2_over_omega0_from") * w0;
    out.delta2_hi = s.number("delta2_over_omega0_to") * w0;
    if (!(out.delta2_hi > out.delta2_lo))
        throw ConfigError(s.at("delta2_over_omega0_to"), "must exceed delta2_over_omega0_from");
    const auto grid = s.integer("grid", out.options.grid);
    if (grid < 3 || grid > 1'000'000)
        throw ConfigError(s.at("grid"), "must be in [3, 1e6]");
    out.options.grid = static_cast<int>(grid);
    out.options.tolerance = s.number("tolerance", out.options.tolerance);
    if (!(out.options.tolerance > 0))
        throw ConfigError(s.at("tolerance"), "must be > 0");
    out.options.step_factor = s.number("step_factor", out.options.step_factor);
    if (!(out.options.step_factor > 0))
        throw ConfigError(s.at("step_factor"), "must be > 0");
    s.finish();

    out.output = read_output(o);
    o.finish();
    return out;
}

GateDocument parse_gate(const Json& doc, Context& ctx)
{
    Obj o(doc, "", ctx);
    GateDocument out;
    out.layout.atom = read_atom(o.object("atom"));
    out.layout.modes = read_modes(o);
    out.layout.integrator = read_document_integrator(o);
    out.layout.v = o.number("v_m_per_s", out.layout.v);
    if (!(out.layout.v > 0))
        throw ConfigError("v_m_per_s", "speed must be > 0");

    const auto variant = o.string("variant", "ideal");
    if (variant == "ideal")
        out.variant = CnotVariant::ideal;
    else if (variant == "physical")
        out.variant = CnotVariant::physical;
    else
        throw ConfigError("variant", "expected \"ideal\" or \"physical\", got \"" + variant + "\"");

    Obj c = o.object("calibration");
    const auto opt = [&](const std::string& key) -> std::optional<double> {
        if (!c.has(key))
            return std::nullopt;
        return c.number(key);
    };
    out.calibration.transfer_area = opt("transfer_area_rad");
    out.calibration.rotation = opt("rotation_rad");
    out.calibration.dispersive_theta = opt("dispersive_theta_rad");
    out.calibration.compensation_angle = opt("compensation_angle_rad");
    out.calibration.write_area = opt("write_area_rad");
    out.calibration.field_phase = c.number("field_phase_rad", 0);
    c.finish();

    if (o.has("roles")) {
        Obj r = o.object("roles");
        const auto idx = [&](const std::string& key, int fallback) {
            const auto k = r.integer(key, fallback);
            if (k < 0 || k >= static_cast<std::int64_t>(out.layout.modes.size()))
                throw ConfigError(r.at(key), "mode index out of range");
            return static_cast<int>(k);
        };
        out.roles.p = idx("p", 0);
        out.roles.q = idx("q", 1);
        out.roles.p_out = idx("p_out", 2);
        r.finish();
    } else if (out.layout.modes.size() < 3) {
        throw ConfigError("modes", "the default roles need three modes (p, q, p')");
    }
    out.layout.p = out.roles.p;
    out.layout.q = out.roles.q;
    out.layout.p_out = out.roles.p_out;

    out.output = read_output(o);
    o.finish();
    return out;
}

BudgetDocument parse_budget(const Json& doc, Context& ctx)
{
    Obj o(doc, "", ctx);
    BudgetDocument out;
    auto& sc = out.scenario;
    sc = BudgetScenario::standard();

    const auto inputs = [&](const std::string& key, BudgetInputs& in) {
        if (!o.has(key))
            return;
        Obj b = o.object(key);
        in.epsilon2 = b.number("epsilon2", in.epsilon2);
        in.eta = b.number("eta", in.eta);
        in.omega_d = b.number("omega_d_rad_per_s", in.omega_d);
        in.separation_in_lattice_constants = b.number("separation_lattice_constants", in.separation_in_lattice_constants);
        in.v = b.number("v_m_per_s", in.v);
        in.lattice_a = b.number("lattice_a_m", in.lattice_a);
        in.R_def = b.number("R_def_m", in.R_def);
        in.waveguide_width = b.number("waveguide_width_m", in.waveguide_width);
        b.finish();
        rethrow_at(key,
                   {{"v", "v_m_per_s"},
                    {"omega_d", "omega_d_rad_per_s"},
                    {"lattice_a", "lattice_a_m"},
                    {"R_def", "R_def_m"},
                    {"waveguide_width", "waveguide_width_m"},
                    {"separation_in_lattice_constants", "separation_lattice_constants"}},
                   [&] { in.validate(); });
    };
    inputs("optical", sc.optical);
    inputs("microwave", sc.microwave);
    if (o.has("optical_atom"))
        sc.optical_atom = read_atom(o.object("optical_atom"));
    if (o.has("microwave_atom"))
        sc.microwave_atom = read_atom(o.object("microwave_atom"));
    sc.field_speed = o.number("field_speed_m_per_s", sc.field_speed);
    sc.free_fall_speed = o.number("free_fall_speed_m_per_s", sc.free_fall_speed);
    sc.theta_target = o.number("theta_target_rad", sc.theta_target);
    for (const auto& [key, x] : {std::pair{"field_speed_m_per_s", sc.field_speed},
                                 std::pair{"free_fall_speed_m_per_s", sc.free_fall_speed},
                                 std::pair{"theta_target_rad", sc.theta_target}})
        if (!(x > 0))
            throw ConfigError(key, "must be > 0");

    out.output = read_output(o);
    o.finish();
    return out;
}

} // namespace pbgq::config
