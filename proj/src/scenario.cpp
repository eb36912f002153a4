#include "osqm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace osqm {

using nlohmann::json;

namespace {

enum class Kind { number, vector, matrix };
struct ParamSpec {
    const char* name;
    Kind kind;
    json def;
};

const std::map<std::string, std::vector<ParamSpec>>& hamiltonian_table() {
    static const std::map<std::string, std::vector<ParamSpec>> t{
        {"free", {{"mass", Kind::number, 1.0}}},
        {"oscillator", {{"mass", Kind::number, 1.0}, {"omega", Kind::number, 1.0}, {"center", Kind::number, 0.0}}},
        {"double-well",
         {{"mass", Kind::number, 1.0}, {"a", Kind::number, 2.0}, {"barrier", Kind::number, 1.0}, {"tilt", Kind::number, 0.0}}},
        {"von-neumann-coupling",
         {{"rate", Kind::number, 7.5},
          {"eigenvalues", Kind::vector, json::array({-1.0, 1.0})},
          {"levels", Kind::vector, json::array({0, 1})},
          {"observed_omega", Kind::number, 1.0}}},
    };
    return t;
}

const std::map<std::string, std::vector<ParamSpec>>& initial_table() {
    static const std::map<std::string, std::vector<ParamSpec>> t{
        {"coherent", {{"x", Kind::vector, json()}, {"p", Kind::vector, json()}}},
        {"cat", {{"centers", Kind::matrix, json::array()}, {"amplitudes", Kind::vector, json::array()}}},
        {"oscillator-eigenstate", {{"level", Kind::number, 0}, {"omega", Kind::number, 1.0}}},
        {"measurement",
         {{"ready_x", Kind::number, 0.0}, {"ready_p", Kind::number, 0.0}, {"amplitudes", Kind::vector, json::array({1.0, 0.0})}}},
    };
    return t;
}

std::string join(const std::vector<std::string>& v) { return fmt::format("{}", fmt::join(v, ", ")); }

template <class M>
std::vector<std::string> keys_of(const M& m) {
    std::vector<std::string> out;
    for (const auto& kv : m) out.push_back(kv.first);
    return out;
}

// Strict reader for one JSON object: records every problem, remembers which
// keys were consumed and reports the rest as unknown.
class Reader {
public:
    Reader(const json& j, std::string path, std::vector<std::string>& errs) : j_(j), path_(std::move(path)), errs_(errs) {
        if (!j_.is_object()) {
            errs_.push_back(path_ + ": expected an object");
            ok_ = false;
        }
    }
    ~Reader() {
        if (!ok_) return;
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                errs_.push_back(fmt::format("{}.{}: unknown key (allowed: {})", path_, it.key(),
                                            join({seen_.begin(), seen_.end()})));
    }

    bool has(const std::string& k) {
        seen_.insert(k);
        return ok_ && j_.contains(k);
    }

    template <class T>
    T get(const std::string& k, T def) {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        if constexpr (std::is_same_v<T, std::string>) {
            if (v.is_string()) return v.get<std::string>();
            errs_.push_back(path_ + "." + k + ": expected a string");
        } else if constexpr (std::is_integral_v<T>) {
            if (v.is_number_integer()) return v.get<T>();
            errs_.push_back(path_ + "." + k + ": expected an integer");
        } else {
            if (v.is_number()) return v.get<T>();
            errs_.push_back(path_ + "." + k + ": expected a number");
        }
        return def;
    }

    std::vector<double> numbers(const std::string& k, std::vector<double> def = {}) {
        if (!has(k)) return def;
        return to_numbers(j_.at(k), path_ + "." + k, errs_);
    }

    std::vector<std::string> strings(const std::string& k) {
        if (!has(k)) return {};
        const json& v = j_.at(k);
        std::vector<std::string> out;
        if (!v.is_array()) {
            errs_.push_back(path_ + "." + k + ": expected an array of strings");
            return out;
        }
        for (const auto& e : v) {
            if (e.is_string()) out.push_back(e.get<std::string>());
            else errs_.push_back(path_ + "." + k + ": expected an array of strings");
        }
        return out;
    }

    json object(const std::string& k) {
        if (!has(k)) return json::object();
        return j_.at(k);
    }

    static std::vector<double> to_numbers(const json& v, const std::string& where, std::vector<std::string>& errs) {
        std::vector<double> out;
        if (!v.is_array()) {
            errs.push_back(where + ": expected an array of numbers");
            return out;
        }
        for (const auto& e : v) {
            if (e.is_number()) out.push_back(e.get<double>());
            else {
                errs.push_back(where + ": expected an array of numbers");
                return {};
            }
        }
        return out;
    }

private:
    const json& j_;
    std::string path_;
    std::vector<std::string>& errs_;
    std::set<std::string> seen_;
    bool ok_ = true;
};

// Fill defaults and type-check preset parameters.
json read_params(const json& in, const std::vector<ParamSpec>& spec, const std::string& path, std::vector<std::string>& errs) {
    json out = json::object();
    if (!in.is_object()) {
        errs.push_back(path + ": expected an object");
        return out;
    }
    std::set<std::string> known;
    for (const auto& s : spec) {
        known.insert(s.name);
        if (!in.contains(s.name)) {
            out[s.name] = s.def;
            continue;
        }
        const json& v = in.at(s.name);
        const std::string where = path + "." + s.name;
        switch (s.kind) {
            case Kind::number:
                if (!v.is_number()) errs.push_back(where + ": expected a number");
                break;
            case Kind::vector:
                Reader::to_numbers(v, where, errs);
                break;
            case Kind::matrix:
                if (!v.is_array()) errs.push_back(where + ": expected an array of arrays");
                else
                    for (const auto& r : v) Reader::to_numbers(r, where, errs);
                break;
        }
        out[s.name] = v;
    }
    for (auto it = in.begin(); it != in.end(); ++it)
        if (!known.count(it.key()))
            errs.push_back(fmt::format("{}.{}: unknown parameter (allowed: {})", path, it.key(), join({known.begin(), known.end()})));
    return out;
}

const char* mode_name(ScheduleMode m) {
    switch (m) {
        case ScheduleMode::continuous:
            return "continuous";
        case ScheduleMode::periodic:
            return "periodic";
        case ScheduleMode::single_shot:
            return "single-shot";
    }
    return "";
}

const char* kVarNames[2][4] = {{"x1", "p1", "", ""}, {"x1", "x2", "p1", "p2"}};

std::vector<double> vec(const json& j) { return j.is_array() ? j.get<std::vector<double>>() : std::vector<double>{}; }

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::vector<std::string> hamiltonian_presets() { return keys_of(hamiltonian_table()); }
std::vector<std::string> initial_state_presets() { return keys_of(initial_table()); }

json ScenarioConfig::to_json() const {
    json j;
    j["scenario"] = scenario;
    j["backend"] = backend;
    j["grid"] = {{"n", grid.n}, {"N", grid.N}, {"hbar", grid.hbar}, {"x_ext", grid.x_ext}};
    j["hamiltonian"] = {{"preset", hamiltonian.preset}, {"params", hamiltonian.params}};
    json part = json::object();
    const int n = std::clamp(grid.n, 1, 2);
    for (int v = 0; v < 2 * n; ++v) part[kVarNames[n - 1][v]] = v < int(partition.cuts.size()) ? partition.cuts[v] : std::vector<double>{};
    part["labels"] = partition.labels;
    j["partition"] = part;
    j["initial_state"] = {{"preset", initial_state.preset}, {"params", initial_state.params}, {"project_onto", initial_state.project_onto}};
    j["schedule"] = {{"dt", schedule.dt},
                     {"dt_proj", schedule.dt_proj},
                     {"t_final", schedule.t_final},
                     {"mode", mode_name(schedule.mode)},
                     {"form", form == UpdateForm::povm ? "povm" : "projector"}};
    j["ensemble"] = {{"num_seeds", ensemble.num_seeds}, {"base_seed", ensemble.base_seed}};
    j["output"] = {{"dir", output.dir}, {"snapshot_stride", output.snapshot_stride}, {"trajectory_files", output.trajectory_files}};
    j["zeno"] = {{"dt_proj", zeno.dt_proj}, {"t_total", zeno.t_total}, {"home", zeno.home}, {"seeds", zeno.seeds}};
    return j;
}

ScenarioConfig parse_config_json(const json& j) {
    std::vector<std::string> errs;
    ScenarioConfig c;
    {
        Reader r(j, "config", errs);
        c.scenario = r.get<std::string>("scenario", c.scenario);
        c.backend = r.get<std::string>("backend", c.backend);
        {
            json gj = r.object("grid");
            Reader g(gj, "grid", errs);
            c.grid.n = g.get<int>("n", c.grid.n);
            c.grid.N = g.get<int>("N", c.grid.N);
            c.grid.hbar = g.get<double>("hbar", c.grid.hbar);
            c.grid.x_ext = g.numbers("x_ext");
        }
        {
            json hj = r.object("hamiltonian");
            Reader h(hj, "hamiltonian", errs);
            c.hamiltonian.preset = h.get<std::string>("preset", c.hamiltonian.preset);
            json params = h.object("params");
            auto it = hamiltonian_table().find(c.hamiltonian.preset);
            if (it == hamiltonian_table().end())
                errs.push_back(fmt::format("hamiltonian.preset: unknown preset '{}' (available: {})", c.hamiltonian.preset,
                                           join(hamiltonian_presets())));
            else
                c.hamiltonian.params = read_params(params, it->second, "hamiltonian.params", errs);
        }
        const int n = (c.grid.n == 1 || c.grid.n == 2) ? c.grid.n : 1;
        {
            json pj = r.object("partition");
            Reader p(pj, "partition", errs);
            for (int v = 0; v < 2 * n; ++v) c.partition.cuts.push_back(p.numbers(kVarNames[n - 1][v]));
            c.partition.labels = p.strings("labels");
        }
        {
            json ij = r.object("initial_state");
            Reader i(ij, "initial_state", errs);
            c.initial_state.preset = i.get<std::string>("preset", c.initial_state.preset);
            c.initial_state.project_onto = i.get<std::string>("project_onto", "");
            json params = i.object("params");
            auto it = initial_table().find(c.initial_state.preset);
            if (it == initial_table().end())
                errs.push_back(fmt::format("initial_state.preset: unknown preset '{}' (available: {})", c.initial_state.preset,
                                           join(initial_state_presets())));
            else {
                c.initial_state.params = read_params(params, it->second, "initial_state.params", errs);
                if (c.initial_state.preset == "coherent")
                    for (const char* k : {"x", "p"})
                        if (c.initial_state.params[k].is_null()) c.initial_state.params[k] = std::vector<double>(n, 0.0);
            }
        }
        {
            json sj = r.object("schedule");
            Reader s(sj, "schedule", errs);
            c.schedule.dt = s.get<double>("dt", c.schedule.dt);
            c.schedule.dt_proj = s.get<double>("dt_proj", c.schedule.dt_proj);
            c.schedule.t_final = s.get<double>("t_final", c.schedule.t_final);
            const std::string mode = s.get<std::string>("mode", "periodic");
            if (mode == "continuous") c.schedule.mode = ScheduleMode::continuous;
            else if (mode == "periodic") c.schedule.mode = ScheduleMode::periodic;
            else if (mode == "single-shot") c.schedule.mode = ScheduleMode::single_shot;
            else errs.push_back("schedule.mode: '" + mode + "' is not one of continuous, periodic, single-shot");
            const std::string form = s.get<std::string>("form", "povm");
            if (form == "povm") c.form = UpdateForm::povm;
            else if (form == "projector") c.form = UpdateForm::projector;
            else errs.push_back("schedule.form: '" + form + "' is not one of povm, projector");
        }
        {
            json ej = r.object("ensemble");
            Reader e(ej, "ensemble", errs);
            c.ensemble.num_seeds = e.get<long>("num_seeds", c.ensemble.num_seeds);
            c.ensemble.base_seed = e.get<std::uint64_t>("base_seed", c.ensemble.base_seed);
        }
        {
            json oj = r.object("output");
            Reader o(oj, "output", errs);
            c.output.dir = o.get<std::string>("dir", c.output.dir);
            c.output.snapshot_stride = o.get<int>("snapshot_stride", c.output.snapshot_stride);
            c.output.trajectory_files = o.get<int>("trajectory_files", c.output.trajectory_files);
        }
        {
            json zj = r.object("zeno");
            Reader z(zj, "zeno", errs);
            c.zeno.dt_proj = z.numbers("dt_proj");
            c.zeno.t_total = z.get<double>("t_total", c.zeno.t_total);
            c.zeno.home = z.get<std::string>("home", c.zeno.home);
            c.zeno.seeds = z.get<long>("seeds", c.zeno.seeds);
        }
    }

    // Values.
    const auto& hp = c.hamiltonian.params;
    const auto& ip = c.initial_state.params;
    if (c.scenario != "trajectory" && c.scenario != "measurement" && c.scenario != "zeno")
        errs.push_back("scenario: '" + c.scenario + "' is not one of trajectory, measurement, zeno");
    if (c.backend != "oracle" && c.backend != "phase")
        errs.push_back("backend: '" + c.backend + "' is not one of oracle, phase");
    if (c.grid.n != 1 && c.grid.n != 2) errs.push_back("grid.n: must be 1 or 2");
    if (c.grid.N < 16 || c.grid.N % 2) errs.push_back("grid.N: must be even and at least 16");
    if (!(c.grid.hbar > 0)) errs.push_back("grid.hbar: must be positive");
    if (!c.grid.x_ext.empty() && int(c.grid.x_ext.size()) != c.grid.n)
        errs.push_back(fmt::format("grid.x_ext: needs one extent per degree of freedom ({})", c.grid.n));
    for (double x : c.grid.x_ext)
        if (!(x > 0)) errs.push_back("grid.x_ext: extents must be positive");
    if (c.partition.cuts.size() != std::size_t(2 * c.grid.n) && (c.grid.n == 1 || c.grid.n == 2))
        errs.push_back("partition: cut arrays do not match grid.n");
    for (const auto& cuts : c.partition.cuts)
        if (!std::is_sorted(cuts.begin(), cuts.end()) || std::adjacent_find(cuts.begin(), cuts.end()) != cuts.end())
            errs.push_back("partition: cut points must be strictly increasing");
    if (hp.is_object()) {
        for (const char* k : {"mass", "omega", "a", "observed_omega"})
            if (hp.contains(k) && hp[k].is_number() && !(hp[k].get<double>() > 0))
                errs.push_back(fmt::format("hamiltonian.params.{}: must be positive", k));
        if (c.hamiltonian.preset == "von-neumann-coupling") {
            auto ev = vec(hp["eigenvalues"]);
            auto lv = vec(hp["levels"]);
            if (ev.size() < 2) errs.push_back("hamiltonian.params.eigenvalues: need at least two outcomes");
            if (lv.size() != ev.size()) errs.push_back("hamiltonian.params.levels: one level per eigenvalue");
            std::set<double> ue(ev.begin(), ev.end()), ul(lv.begin(), lv.end());
            if (ue.size() != ev.size()) errs.push_back("hamiltonian.params.eigenvalues: must be distinct");
            if (ul.size() != lv.size()) errs.push_back("hamiltonian.params.levels: must be distinct");
            for (double l : lv)
                if (l < 0 || l != std::floor(l)) errs.push_back("hamiltonian.params.levels: must be non-negative integers");
            if (c.grid.n != 2) errs.push_back("hamiltonian.preset: von-neumann-coupling needs grid.n = 2");
        }
    }
    if (ip.is_object()) {
        if (c.initial_state.preset == "coherent")
            for (const char* k : {"x", "p"})
                if (vec(ip[k]).size() != std::size_t(c.grid.n))
                    errs.push_back(fmt::format("initial_state.params.{}: needs {} entries", k, c.grid.n));
        if (c.initial_state.preset == "cat") {
            if (ip["centers"].size() < 1 || ip["centers"].size() != ip["amplitudes"].size())
                errs.push_back("initial_state.params: cat needs one amplitude per centre");
            for (const auto& z : ip["centers"])
                if (z.size() != std::size_t(2 * c.grid.n))
                    errs.push_back(fmt::format("initial_state.params.centers: each centre has {} coordinates", 2 * c.grid.n));
        }
        if (c.initial_state.preset == "oscillator-eigenstate" && c.grid.n != 1)
            errs.push_back("initial_state.preset: oscillator-eigenstate needs grid.n = 1");
        if (c.initial_state.preset == "measurement") {
            if (c.hamiltonian.preset != "von-neumann-coupling")
                errs.push_back("initial_state.preset: measurement needs the von-neumann-coupling Hamiltonian");
            else if (vec(ip["amplitudes"]).size() != vec(hp["eigenvalues"]).size())
                errs.push_back("initial_state.params.amplitudes: one amplitude per eigenvalue");
        }
    }
    if (c.scenario == "measurement" &&
        (c.initial_state.preset != "measurement" || c.hamiltonian.preset != "von-neumann-coupling"))
        errs.push_back("scenario: measurement needs the von-neumann-coupling Hamiltonian and the measurement initial state");
    if (c.backend == "phase") {
        if (c.grid.n != 1) errs.push_back("backend: phase runs n = 1 only");
        if (c.hamiltonian.preset == "von-neumann-coupling") errs.push_back("backend: phase needs a polynomial Hamiltonian");
    }
    try {
        c.schedule.validate();
    } catch (const ValidationError& e) {
        errs.push_back(e.what());
    }
    if (c.ensemble.num_seeds < 1) errs.push_back("ensemble.num_seeds: must be at least 1");
    if (c.output.snapshot_stride < 0) errs.push_back("output.snapshot_stride: must be non-negative");
    if (c.output.trajectory_files < 0) errs.push_back("output.trajectory_files: must be non-negative");
    if (c.scenario == "zeno") {
        if (c.zeno.dt_proj.empty()) errs.push_back("zeno.dt_proj: needs at least one interval");
        if (!(c.zeno.t_total > 0)) errs.push_back("zeno.t_total: must be positive");
        for (double d : c.zeno.dt_proj)
            if (!(d > 0) || d > c.zeno.t_total * (1 + 1e-9)) errs.push_back("zeno.dt_proj: intervals must lie in (0, t_total]");
        if (c.zeno.seeds < 0) errs.push_back("zeno.seeds: must be non-negative");
    }

    // Module preconditions, checked by building the pieces.
    if (errs.empty()) {
        try {
            const PhaseGrid g = make_grid(c);
            const Partition P = make_partition(c, g);
            if (!c.partition.labels.empty() && c.partition.labels.size() != P.size())
                errs.push_back(fmt::format("partition.labels: {} labels for {} regions", c.partition.labels.size(), P.size()));
            for (const std::string& l : {c.initial_state.project_onto, c.zeno.home})
                if (!l.empty() && P.index_of(l) < 0) errs.push_back("partition: no region labelled '" + l + "'");
            if (c.scenario == "zeno" && c.zeno.home.empty()) errs.push_back("zeno.home: name the starting region");
            if (errs.empty()) {
                if (c.scenario == "measurement") make_measurement(c);
                else {
                    std::optional<ExactProjectors> E;
                    if (!c.initial_state.project_onto.empty()) E = classicality_projectors(P, false);
                    make_initial_state(c, g, P, E ? &*E : nullptr);
                }
            }
        } catch (const ValidationError& e) {
            errs.push_back(e.what());
        }
    }
    if (!errs.empty()) {
        std::string msg = fmt::format("{} configuration error{}:", errs.size(), errs.size() > 1 ? "s" : "");
        for (const auto& e : errs) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return c;
}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: malformed JSON in ") + path + ": " + e.what());
    }
    return parse_config_json(j);
}

// The output directory is where results go, not what they are, so it stays out
// of the echo and the hash.
json config_echo(const ScenarioConfig& cfg) {
    json j = cfg.to_json();
    j["output"].erase("dir");
    return j;
}

std::string config_hash(const ScenarioConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : config_echo(cfg).dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

PhaseGrid make_grid(const ScenarioConfig& cfg) {
    if (cfg.grid.x_ext.empty()) return PhaseGrid::symmetric(cfg.grid.n, cfg.grid.N, cfg.grid.hbar);
    return PhaseGrid(cfg.grid.n, cfg.grid.N, cfg.grid.hbar, cfg.grid.x_ext);
}

namespace {

// Lowest oscillator eigenvectors with a fixed sign convention.
std::vector<VecC> oscillator_levels(const PhaseGrid& g1, double omega, const std::vector<int>& levels) {
    MatC X = position_operator(g1, 0), P = momentum_operator(g1, 0);
    MatC H = (P * P + omega * omega * X * X) / 2.0;
    Eigen::SelfAdjointEigenSolver<MatC> es((H + H.adjoint()) / 2.0);
    std::vector<VecC> out;
    for (int l : levels) {
        if (l >= g1.N()) throw ValidationError("oscillator level beyond the grid size");
        VecC v = es.eigenvectors().col(l);
        Eigen::Index k = 0;
        v.cwiseAbs().maxCoeff(&k);
        v *= std::polar(1.0, -std::arg(v(k)));
        out.push_back(v);
    }
    return out;
}

}  // namespace

HamiltonianModel make_hamiltonian(const ScenarioConfig& cfg, const PhaseGrid& g) {
    const auto& p = cfg.hamiltonian.params;
    const std::string& preset = cfg.hamiltonian.preset;
    const int n = g.dof();
    HamiltonianModel m;
    if (preset == "von-neumann-coupling") {
        if (n != 2) throw ValidationError("hamiltonian: von-neumann-coupling needs two degrees of freedom");
        const PhaseGrid g1 = dof_grid(g, 0), g2 = dof_grid(g, 1);
        VonNeumannCoupling c;
        c.pointer_generator = momentum_operator(g1, 0);
        std::vector<int> levels;
        for (double l : vec(p["levels"])) levels.push_back(int(l));
        c.eigenvectors = oscillator_levels(g2, p["observed_omega"].get<double>(), levels);
        c.eigenvalues = vec(p["eigenvalues"]);
        c.strength = p["rate"].get<double>();
        MatC A = MatC::Zero(g2.N(), g2.N());
        for (std::size_t j = 0; j < c.eigenvectors.size(); ++j)
            A += c.eigenvalues[j] * c.eigenvectors[j] * c.eigenvectors[j].adjoint();
        m.H = OperatorMatrix::hermitian_op(c.strength * kron(c.pointer_generator, A));
        m.coupling = c;
        return m;
    }
    const double mass = p["mass"].get<double>();
    const int nv = 2 * n;
    const std::size_t D = g.config_dim();
    MatC H = MatC::Zero(D, D);
    Poly sym(nv);
    for (int d = 0; d < n; ++d) {
        MatC X = position_operator(g, d), P = momentum_operator(g, d);
        Poly x = Poly::var(nv, d), pp = Poly::var(nv, n + d);
        H += P * P / (2 * mass);
        sym += pp * pp * cplx(1 / (2 * mass));
        if (preset == "oscillator") {
            const double w = p["omega"].get<double>(), c0 = p["center"].get<double>();
            MatC Xc = X - c0 * MatC::Identity(D, D);
            H += mass * w * w / 2 * Xc * Xc;
            Poly xc = x - Poly::constant(nv, c0);
            sym += xc * xc * cplx(mass * w * w / 2);
        } else if (preset == "double-well") {
            const double a = p["a"].get<double>(), b = p["barrier"].get<double>(), tilt = p["tilt"].get<double>();
            MatC Y = X * X / (a * a) - MatC::Identity(D, D);
            H += b * Y * Y + tilt * X;
            Poly y = x * x * cplx(1 / (a * a)) - Poly::constant(nv, 1);
            sym += y * y * cplx(b) + x * cplx(tilt);
        }
    }
    m.H = OperatorMatrix::hermitian_op((H + H.adjoint()) / 2.0);
    m.symbol = WeylSymbol::from_poly(g, sym);
    return m;
}

Partition make_partition(const ScenarioConfig& cfg, const PhaseGrid& g) {
    BoxSpec spec;
    for (int v = 0; v < 2 * g.dof(); ++v) spec.cuts.push_back(v < int(cfg.partition.cuts.size()) ? cfg.partition.cuts[v] : std::vector<double>{});
    spec.labels = cfg.partition.labels;
    return Partition::build(g, spec);
}

WaveFunction make_initial_state(const ScenarioConfig& cfg, const PhaseGrid& g, const Partition& P, const ExactProjectors* E) {
    const auto& p = cfg.initial_state.params;
    const std::string& preset = cfg.initial_state.preset;
    const int n = g.dof();
    WaveFunction psi;
    if (preset == "coherent") {
        psi = coherent_state(g, PhasePoint{vec(p["x"]), vec(p["p"])});
    } else if (preset == "cat") {
        psi = WaveFunction{g, VecC::Zero(g.config_dim())};
        auto amps = vec(p["amplitudes"]);
        for (std::size_t k = 0; k < amps.size(); ++k) {
            auto z = vec(p["centers"][k]);
            PhasePoint pt{{z.begin(), z.begin() + n}, {z.begin() + n, z.end()}};
            psi.values += amps[k] * coherent_state(g, pt).values;
        }
        if (!(psi.norm() > 0)) throw ValidationError("initial_state: cat amplitudes cancel");
        psi.normalize();
    } else if (preset == "oscillator-eigenstate") {
        const int level = p["level"].get<int>();
        if (level < 0) throw ValidationError("initial_state: level must be non-negative");
        psi = WaveFunction::from_coeffs(g, oscillator_levels(g, p["omega"].get<double>(), {level})[0]);
    } else if (preset == "measurement") {
        auto ms = make_measurement(cfg);
        VecC r = ms.ready_state.coeffs(), s = ms.observed_state.coeffs();
        VecC out(r.size() * s.size());
        for (Eigen::Index a = 0; a < r.size(); ++a) out.segment(a * s.size(), s.size()) = r(a) * s;
        psi = WaveFunction::from_coeffs(g, out);
    } else {
        throw ValidationError("initial_state: unknown preset '" + preset + "'");
    }
    if (!cfg.initial_state.project_onto.empty()) {
        const int j = P.index_of(cfg.initial_state.project_onto);
        if (j < 0) throw ValidationError("initial_state: no region labelled '" + cfg.initial_state.project_onto + "'");
        psi = apply_quasiprojection(psi, P, j, UpdateForm::projector, E);
    }
    return psi;
}

MeasurementScenario make_measurement(const ScenarioConfig& cfg) {
    MeasurementScenario ms;
    ms.composite = make_grid(cfg);
    if (ms.composite.dof() != 2) throw ValidationError("measurement: needs a pointer and an observed degree of freedom");
    ms.pointer_grid = dof_grid(ms.composite, 0);
    ms.observed_grid = dof_grid(ms.composite, 1);
    for (std::size_t v = 1; v < cfg.partition.cuts.size(); ++v)
        if (!cfg.partition.cuts[v].empty())
            throw ValidationError("measurement: pointer regions are position bands; only x1 may have cut points");
    const auto& cuts = cfg.partition.cuts.empty() ? std::vector<double>{} : cfg.partition.cuts[0];
    if (cuts.size() < 2) throw ValidationError("measurement: needs at least two cut points on x1 (a ready band and outcomes)");
    ms.partition = make_partition(cfg, ms.composite);

    auto model = make_hamiltonian(cfg, ms.composite);
    ms.coupling = *model.coupling;
    ms.rate = ms.coupling.strength;
    ms.coupling.strength *= cfg.schedule.t_final;
    const auto& ip = cfg.initial_state.params;
    auto amps = vec(ip["amplitudes"]);
    if (amps.size() != ms.coupling.eigenvalues.size())
        throw ValidationError("measurement: one amplitude per eigenvalue");
    double nn = 0;
    for (double a : amps) nn += a * a;
    if (!(nn > 0)) throw ValidationError("measurement: amplitudes are all zero");
    VecC s = VecC::Zero(ms.observed_grid.config_dim());
    for (std::size_t j = 0; j < amps.size(); ++j) {
        ms.amplitudes.push_back(amps[j] / std::sqrt(nn));
        s += ms.amplitudes[j] * ms.coupling.eigenvectors[j];
    }
    ms.observed_state = WaveFunction::from_coeffs(ms.observed_grid, s);
    ms.ready_state = coherent_state(ms.pointer_grid, PhasePoint{{ip["ready_x"].get<double>()}, {ip["ready_p"].get<double>()}});

    // The ready band must hold the ready pointer and be wide enough to separate the outcome bands.
    const double sep = 5 * std::sqrt(ms.composite.hbar());
    const double rx = ip["ready_x"].get<double>();
    int band = 0;
    while (band < int(cuts.size()) && cuts[band] <= rx) ++band;
    if (band == 0 || band == int(cuts.size()))
        throw ValidationError("measurement: the ready pointer must sit in an inner band");
    const double width = cuts[band] - cuts[band - 1];
    if (!(width > sep))
        throw ValidationError(fmt::format("measurement: outcome regions are separated by {:.4g}; the minimum is 5*sqrt(hbar) = {:.4g}",
                                          width, sep));
    ms.ready = band;  // regions are ordered by the x1 band

    const auto outs = pointer_outcomes(ms.ready_state, ms.coupling);
    std::set<int> used{ms.ready};
    for (std::size_t j = 0; j < outs.size(); ++j) {
        VecC full(outs[j].size() * ms.coupling.eigenvectors[j].size());
        for (Eigen::Index a = 0; a < outs[j].size(); ++a)
            full.segment(a * ms.coupling.eigenvectors[j].size(), ms.coupling.eigenvectors[j].size()) =
                outs[j](a) * ms.coupling.eigenvectors[j];
        auto p = transition_probabilities(WaveFunction::from_coeffs(ms.composite, full), ms.partition);
        const int r = int(std::max_element(p.begin(), p.end()) - p.begin());
        if (p[r] < 0.99 || used.count(r))
            throw ValidationError(fmt::format("measurement: the coupling does not carry outcome {} (eigenvalue {:g}) into a "
                                              "region of its own (best region '{}' with weight {:.4f})",
                                              j, ms.coupling.eigenvalues[j], ms.partition[r].label, p[r]));
        used.insert(r);
        ms.outcome_region.push_back(r);
    }
    return ms;
}

MeasurementSummary run_measurement_scenario(const ScenarioConfig& cfg) { return run_measurement_scenario(cfg, make_measurement(cfg)); }

MeasurementSummary run_measurement_scenario(const ScenarioConfig& cfg, const MeasurementScenario& ms) {
    const PhaseGrid& g = ms.composite;
    MeasurementSummary out;
    for (std::size_t j = 0; j < ms.amplitudes.size(); ++j) {
        out.labels.push_back(ms.partition[ms.outcome_region[j]].label);
        out.eigenvalues.push_back(ms.coupling.eigenvalues[j]);
        out.born.push_back(std::norm(ms.amplitudes[j]));
    }
    // Born weights on the premeasured composite state.
    const auto pre = measurement_premeasurement(ms.ready_state, ms.observed_state, ms.coupling, g);
    const VecC v = pre.coeffs();
    for (int r : ms.outcome_region) out.born_oracle.push_back(v.dot(ms.partition[r].op.apply(v)).real());

    std::optional<ExactProjectors> E;
    if (cfg.form == UpdateForm::projector) E = classicality_projectors(ms.partition, false);
    TrajectoryContext ctx;
    ctx.partition = &ms.partition;
    ctx.exact = E ? &*E : nullptr;
    ctx.dynamics = Dynamics::oracle(make_hamiltonian(cfg, g).H, g);
    ctx.schedule = cfg.schedule;
    ctx.options.form = cfg.form;
    ctx.options.snapshot_stride = cfg.output.snapshot_stride;
    const auto psi0 = make_initial_state(cfg, g, ms.partition, nullptr);
    out.ensemble = run_ensemble(psi0, ctx, cfg.ensemble.base_seed, cfg.ensemble.num_seeds, cfg.output.trajectory_files);
    const double n = double(out.ensemble.runs);
    for (int r : ms.outcome_region) {
        out.counts.push_back(out.ensemble.final_counts[r]);
        out.frequency.push_back(out.counts.back() / n);
        out.sigma.push_back(std::sqrt(out.frequency.back() * (1 - out.frequency.back()) / n));
    }
    return out;
}

ScenarioConfig apply_overrides(ScenarioConfig cfg, const RunOverrides& o) {
    if (o.seed) cfg.ensemble.base_seed = *o.seed;
    if (o.out_dir) cfg.output.dir = *o.out_dir;
    if (o.snapshots) cfg.output.snapshot_stride = *o.snapshots;
    if (o.backend) cfg.backend = *o.backend;
    return parse_config_json(cfg.to_json());
}

void write_json(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path);
    f << j.dump(2) << "\n";
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec, const Partition& P) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path);
    f << "step,time,region";
    for (const auto& R : P.regions()) f << ",p_" << R.label;
    f << ",event\n";
    f << "0,0," << P[rec.initial_region].label;
    for (std::size_t j = 0; j < P.size(); ++j) f << ",";
    f << ",0\n";
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        f << k + 1 << "," << num(rec.times[k]) << "," << P[rec.region[k]].label;
        for (double p : rec.probabilities[k]) f << "," << num(p);
        f << "," << int(rec.event[k]) << "\n";
    }
}

void write_snapshots_csv(const std::string& path, const TrajectoryRecord& rec) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path);
    f << "step,time,index,re,im\n";
    for (const auto& s : rec.snapshots)
        for (Eigen::Index i = 0; i < s.coeffs.size(); ++i)
            f << s.step << "," << num(s.time) << "," << i << "," << num(s.coeffs(i).real()) << "," << num(s.coeffs(i).imag())
              << "\n";
}

void write_ensemble_csv(const std::string& path, const EnsembleSummary& s, const Partition& P) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path);
    f << "region,label,count,frequency,sigma,wilson_lo,wilson_hi\n";
    for (std::size_t j = 0; j < P.size(); ++j)
        f << j << "," << P[j].label << "," << s.final_counts[j] << "," << num(s.frequency[j]) << "," << num(s.sigma[j]) << ","
          << num(s.wilson_lo[j]) << "," << num(s.wilson_hi[j]) << "\n";
}

void write_zeno_csv(const std::string& path, const ZenoResult& z) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write " + path);
    f << "dt_proj,intervals,misprojection,survival,survival_ensemble,survival_sigma,flagged\n";
    for (const auto& r : z.rows)
        f << num(r.dt_proj) << "," << r.intervals << "," << num(r.misprojection) << "," << num(r.survival) << ","
          << num(r.survival_ensemble) << "," << num(r.survival_sigma) << "," << int(r.flagged) << "\n";
}

namespace {

void write_records(const std::string& dir, const EnsembleSummary& s, const Partition& P) {
    for (const auto& rec : s.kept) {
        write_trajectory_csv(fmt::format("{}/trajectory_{}.csv", dir, rec.seed), rec, P);
        if (!rec.snapshots.empty()) write_snapshots_csv(fmt::format("{}/snapshots_{}.csv", dir, rec.seed), rec);
    }
}

json ensemble_json(const EnsembleSummary& s) {
    return {{"runs", s.runs},
            {"final_counts", s.final_counts},
            {"stayed", s.stayed},
            {"projection_events", s.restriction_checks},
            {"quasirestriction_failures", s.restriction_failures},
            {"worst_quasirestriction_residual", s.restriction_worst}};
}

}  // namespace

json run_scenario(const ScenarioConfig& cfg) {
    namespace fs = std::filesystem;
    const std::string dir = cfg.output.dir;
    fs::create_directories(dir);
    json meta;
    meta["version"] = kVersion;
    meta["config_hash"] = config_hash(cfg);
    meta["base_seed"] = cfg.ensemble.base_seed;
    meta["config"] = config_echo(cfg);
    std::string text;

    if (cfg.scenario == "measurement") {
        auto ms = make_measurement(cfg);
        auto res = run_measurement_scenario(cfg, ms);
        std::ofstream f(dir + "/measurement.csv");
        f << "outcome,eigenvalue,region,amplitude_sq,born_oracle,count,frequency,sigma\n";
        for (std::size_t j = 0; j < res.labels.size(); ++j)
            f << j << "," << num(res.eigenvalues[j]) << "," << res.labels[j] << "," << num(res.born[j]) << ","
              << num(res.born_oracle[j]) << "," << res.counts[j] << "," << num(res.frequency[j]) << "," << num(res.sigma[j])
              << "\n";
        write_ensemble_csv(dir + "/ensemble_summary.csv", res.ensemble, ms.partition);
        write_records(dir, res.ensemble, ms.partition);
        meta["results"] = {{"frequency", res.frequency}, {"born", res.born}, {"born_oracle", res.born_oracle},
                           {"ensemble", ensemble_json(res.ensemble)}};
        for (std::size_t j = 0; j < res.labels.size(); ++j)
            text += fmt::format("outcome {:+g} -> {}: frequency {:.4f} +- {:.4f}, |c|^2 {:.4f}, oracle {:.4f}\n",
                                res.eigenvalues[j], res.labels[j], res.frequency[j], res.sigma[j], res.born[j],
                                res.born_oracle[j]);
    } else {
        const PhaseGrid g = make_grid(cfg);
        const Partition P = make_partition(cfg, g);
        const auto model = make_hamiltonian(cfg, g);
        std::optional<ExactProjectors> E;
        if (cfg.form == UpdateForm::projector || !cfg.initial_state.project_onto.empty())
            E = classicality_projectors(P, false);
        const auto psi0 = make_initial_state(cfg, g, P, E ? &*E : nullptr);
        if (cfg.scenario == "zeno") {
            auto z = zeno_experiment(psi0, model.H, P, E ? &*E : nullptr, cfg.form, P.index_of(cfg.zeno.home),
                                     cfg.zeno.dt_proj, cfg.zeno.t_total, cfg.zeno.seeds, cfg.ensemble.base_seed);
            write_zeno_csv(dir + "/zeno.csv", z);
            meta["results"] = {{"slope", z.slope}, {"intercept", z.intercept}, {"fitted_rows", z.fitted},
                               {"unmonitored_home_probability", z.unmonitored}};
            text = fmt::format("misprojection slope {:.4f} over {} rows; unmonitored home probability {:.4f}\n", z.slope,
                               z.fitted, z.unmonitored);
        } else {
            TrajectoryContext ctx;
            ctx.partition = &P;
            ctx.exact = E ? &*E : nullptr;
            ctx.dynamics = cfg.backend == "phase" ? Dynamics::phase(*model.symbol) : Dynamics::oracle(model.H, g);
            ctx.schedule = cfg.schedule;
            ctx.options.form = cfg.form;
            ctx.options.snapshot_stride = cfg.output.snapshot_stride;
            auto s = run_ensemble(psi0, ctx, cfg.ensemble.base_seed, cfg.ensemble.num_seeds, cfg.output.trajectory_files);
            write_ensemble_csv(dir + "/ensemble_summary.csv", s, P);
            write_records(dir, s, P);
            meta["results"] = ensemble_json(s);
            for (std::size_t j = 0; j < P.size(); ++j)
                text += fmt::format("{}: {} of {} ({:.4f}, 95% [{:.4f}, {:.4f}])\n", P[j].label, s.final_counts[j], s.runs,
                                    s.frequency[j], s.wilson_lo[j], s.wilson_hi[j]);
        }
    }
    write_json(dir + "/metadata.json", meta);
    meta["summary"] = text;
    return meta;
}

}  // namespace osqm
