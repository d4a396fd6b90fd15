// cvqd: experiment runners for the gadget, oracle, two-prover and NTCF suites.

#include <openssl/sha.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <thread>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cvqd/gadgets.hpp"
#include "cvqd/game.hpp"
#include "cvqd/ntcf.hpp"
#include "cvqd/oracles.hpp"
#include "cvqd/qsim.hpp"

using namespace cvqd;
using nlohmann::json;
namespace fs = std::filesystem;
namespace g = cvqd::qsim::gates;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 2;
constexpr int kExitConfig = 3;
constexpr int kExitCapacity = 4;
constexpr int kSchemaVersion = 1;

struct ConfigViolations : std::runtime_error {
    explicit ConfigViolations(std::vector<std::string> v) : std::runtime_error("invalid configuration"), list(std::move(v)) {}
    std::vector<std::string> list;
};

class Checks {
public:
    void require(bool ok, const std::string& msg) {
        if (!ok) list_.push_back(msg);
    }
    void add(const std::vector<std::string>& v) { list_.insert(list_.end(), v.begin(), v.end()); }
    void raise() const {
        if (!list_.empty()) throw ConfigViolations(list_);
    }

private:
    std::vector<std::string> list_;
};

struct Common {
    u64 seed = 1;
    int jobs = 1;
    std::string out;
    std::string out_dir;
    int transcripts = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_dir) {
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--jobs", c.jobs, "worker threads (results do not depend on it)");
    cmd->add_option("--out", c.out, "write the report here instead of stdout");
    if (with_dir) {
        cmd->add_option("--out-dir", c.out_dir, "directory for report, manifest and transcripts");
        cmd->add_option("--transcripts", c.transcripts, "number of trial transcripts to write into --out-dir");
    }
}

void check_common(Checks& ck, const Common& c) {
    ck.require(c.jobs >= 1, "jobs must be positive");
    ck.require(c.transcripts >= 0, "transcripts must be nonnegative");
    ck.require(c.transcripts == 0 || !c.out_dir.empty(), "transcripts require --out-dir");
}

std::string git_blob_hash(const std::string& content) {
    const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
    unsigned char md[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
    std::ostringstream os;
    for (unsigned char b : md) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
    return os.str();
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

void emit(const Common& c, const json& report) {
    if (!c.out.empty()) write_json(c.out, report);
    else std::cout << report.dump(2) << std::endl;
}

void write_manifest(const Common& c, const std::string& command, const std::string& config_path, const json& descriptor,
                    const json& report) {
    if (c.out_dir.empty()) return;
    fs::create_directories(c.out_dir);
    write_json(fs::path(c.out_dir) / "report.json", report);
    write_json(fs::path(c.out_dir) / "manifest.json",
               {{"schema_version", kSchemaVersion},
                {"command", command},
                {"config_path", config_path},
                {"seed", c.seed},
                {"oracle_hash", git_blob_hash(descriptor.dump())},
                {"oracle_descriptor", descriptor},
                {"output_dir", c.out_dir}});
}

fs::path transcript_dir(const Common& c) {
    auto p = fs::path(c.out_dir) / "transcripts";
    fs::create_directories(p);
    return p;
}

// ---------------------------------------------------------------- gadget-check

struct GadgetArgs {
    Common common;
    int states = 10;
    int wires = 2;
    std::string attack;
    int attack_trials = 200;
};

qsim::StateVector random_state(int n, Rng& rng) {
    std::normal_distribution<double> nd;
    qsim::StateVector s(n);
    for (auto& a : s.amplitudes()) a = {nd(rng), nd(rng)};
    s.normalize();
    return s;
}

qsim::Matrix pad_matrix(int a, int b) { return g::power(g::X(), a) * g::power(g::Z(), b); }

qsim::StateVector apply1(const qsim::Matrix& m, qsim::StateVector s) {
    s.apply_1q(m, 0);
    return s;
}

std::pair<char, int> parse_attack(const std::string& text, int wires, Checks& ck) {
    const auto colon = text.find(':');
    if (colon != 1 || std::string("XYZ").find(text[0]) == std::string::npos) {
        ck.require(false, "planted attack must look like X:1, Y:0 or Z:1");
        return {'X', 0};
    }
    int w = -1;
    try {
        w = std::stoi(text.substr(2));
    } catch (const std::logic_error&) {
    }
    ck.require(w >= 0 && w < wires, "planted attack wire must lie in [0, wires)");
    return {text[0], w};
}

struct CheckRow {
    std::string name;
    int cases = 0;
    int failures = 0;
    double max_error = 0.0;

    void record(double err, double tol) {
        cases++;
        max_error = std::max(max_error, err);
        if (err > tol) failures++;
    }
    json to_json() const { return {{"check", name}, {"cases", cases}, {"failures", failures}, {"max_error", max_error}}; }
};

int cmd_gadget_check(const GadgetArgs& a) {
    Checks ck;
    check_common(ck, a.common);
    ck.require(a.states >= 1, "states must be positive");
    ck.require(a.wires >= 1 && a.wires <= 8, "wires must lie in [1, 8]");
    ck.require(a.attack_trials >= 1, "attack trials must be positive");
    std::pair<char, int> attack{'X', 0};
    if (!a.attack.empty()) attack = parse_attack(a.attack, a.wires, ck);
    ck.raise();

    using gadgets::Parity;
    using gadgets::RoundType;
    Rng rng = stream_rng(a.common.seed, 0);
    std::vector<CheckRow> rows;

    CheckRow hc{"h_compilation"};
    qsim::Matrix prod = qsim::Matrix::identity(2);
    for (auto k : gadgets::compile_H()) prod = (k == qsim::GateKind::H ? g::H() : g::T()) * prod;
    const qsim::Matrix target = g::H() * std::polar(1.0, std::numbers::pi / 4);
    double herr = 0;
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) herr = std::max(herr, std::abs(prod(r, c) - target(r, c)));
    hc.record(herr, 1e-12);
    rows.push_back(hc);

    CheckRow comp{"t_gadget_computation"};
    for (int pa = 0; pa < 2; ++pa)
        for (int pb = 0; pb < 2; ++pb)
            for (int z = 0; z < 2; ++z)
                for (int t = 0; t < a.states; ++t) {
                    const auto psi = random_state(1, rng);
                    std::set<std::pair<int, int>> seen;
                    for (int rep = 0; rep < 400 && seen.size() < 4; ++rep) {
                        auto s = qsim::place_state(apply1(pad_matrix(pa, pb), psi), 3, {0});
                        gadgets::GadgetPair pair{1, 2};
                        gadgets::prepare_pair(s, pair);
                        auto out = gadgets::run_t_gadget(s, 0, pair, RoundType::Computation, Parity::Even, z, {pa, pb}, rng);
                        if (!seen.insert({out.c, out.e}).second) continue;
                        const auto ideal = apply1(pad_matrix(out.keys_after.a, out.keys_after.b) * g::T(), psi);
                        comp.record(1.0 - qsim::fidelity(qsim::qubit_state(s, out.output_qubit), ideal), 1e-9);
                    }
                    if (seen.size() < 4) comp.failures++;
                }
    rows.push_back(comp);

    CheckRow ident{"t_gadget_test_identity"};
    qsim::StateVector zero(1), plus(1);
    plus.apply_1q(g::H(), 0);
    for (int pa = 0; pa < 2; ++pa)
        for (int pb = 0; pb < 2; ++pb)
            for (int z = 0; z < 2; ++z)
                for (int rep = 0; rep < 16; ++rep) {
                    for (auto [round, parity, input] : {std::tuple{RoundType::XTest, Parity::Even, zero},
                                                        std::tuple{RoundType::ZTest, Parity::Odd, plus}}) {
                        const int za = round == RoundType::ZTest ? 0 : pa;
                        const int zb = round == RoundType::XTest ? 0 : pb;
                        auto s = qsim::place_state(apply1(pad_matrix(za, zb), input), 3, {0});
                        gadgets::GadgetPair pair{1, 2};
                        gadgets::prepare_pair(s, pair);
                        auto out = gadgets::run_t_gadget(s, 0, pair, round, parity, z, {za, zb}, rng);
                        const auto ideal = apply1(pad_matrix(out.keys_after.a, out.keys_after.b), input);
                        ident.record(1.0 - qsim::fidelity(qsim::qubit_state(s, out.output_qubit), ideal), 1e-9);
                    }
                }
    rows.push_back(ident);

    CheckRow circ{"key_update_circuit"};
    gadgets::GateCircuit c(3);
    c.h(0).t(0).cnot(0, 1).t(1).h(2).cnot(2, 0).t(2).h(1).t(0);
    gadgets::GadgetSession session(RoundType::Computation, c);
    for (int t = 0; t < a.states; ++t) {
        const auto psi = random_state(3, rng);
        auto r = session.run({}, rng, psi);
        auto ideal = psi;
        c.apply_ideal(ideal, {0, 1, 2});
        circ.record(1.0 - qsim::fidelity(r.output, ideal), 1e-9);
    }
    rows.push_back(circ);

    json table = json::array();
    bool ok = true;
    for (const auto& r : rows) {
        table.push_back(r.to_json());
        ok = ok && r.failures == 0;
    }
    json report = {{"schema_version", kSchemaVersion}, {"command", "gadget-check"}, {"seed", a.common.seed},
                   {"checks", table}, {"passed", ok}};

    if (!a.attack.empty()) {
        u64 code = 0;
        if (attack.first != 'Z') code |= u64{1} << attack.second;
        if (attack.first != 'X') code |= u64{1} << (a.wires + attack.second);
        const qsim::Kraus phi = {qsim::PauliOp::from_code(a.wires, code).matrix()};
        const auto circuit = gadgets::standin_circuit(a.wires, 1);
        int rx = 0, rz = 0;
        for (int t = 0; t < a.attack_trials; ++t) {
            rx += !gadgets::GadgetSession(RoundType::XTest, circuit).run(phi, rng).accepted;
            rz += !gadgets::GadgetSession(RoundType::ZTest, circuit).run(phi, rng).accepted;
        }
        report["planted_attack"] = {{"pauli", std::string(1, attack.first)},
                                    {"wire", attack.second},
                                    {"trials", a.attack_trials},
                                    {"xtest_reject_rate", static_cast<double>(rx) / a.attack_trials},
                                    {"ztest_reject_rate", static_cast<double>(rz) / a.attack_trials}};
    }
    emit(a.common, report);
    return ok ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------- twirl-check

struct TwirlArgs {
    Common common;
    std::vector<int> qubits{1, 2};
    int trials = 50;
    int rank = 3;
    double tol = 1e-9;
};

int cmd_twirl_check(const TwirlArgs& a) {
    Checks ck;
    check_common(ck, a.common);
    for (int n : a.qubits) ck.require(n >= 1 && n <= 2, "twirl qubits must be 1 or 2");
    ck.require(a.trials >= 1, "trials must be positive");
    ck.require(a.rank >= 1, "rank must be positive");
    ck.raise();

    json rows = json::array();
    bool ok = true;
    for (int n : a.qubits) {
        Rng rng = stream_rng(a.common.seed, static_cast<u64>(n));
        const std::size_t dim = std::size_t{1} << n, np = dim * dim;
        double worst = 0;
        for (int t = 0; t < a.trials; ++t) {
            auto phi = qsim::random_channel(n, a.rank, rng);
            auto r = qsim::twirl(phi, n);
            // Brute-force twirl: average of P^dag Phi(P . P^dag) P over the Pauli group.
            qsim::Kraus twirled;
            for (u64 c = 0; c < np; ++c) {
                const auto p = qsim::PauliOp::from_code(n, c).matrix();
                for (const auto& k : phi) twirled.push_back(p.adjoint() * k * p * (1.0 / static_cast<double>(dim)));
            }
            const auto lhs = qsim::choi(twirled), rhs = qsim::choi(qsim::pauli_channel_kraus(r));
            const auto chi = qsim::process_matrix(twirled, n);
            double err = 0;
            for (std::size_t i = 0; i < lhs.rows(); ++i)
                for (std::size_t j = 0; j < lhs.cols(); ++j) err = std::max(err, std::abs(lhs(i, j) - rhs(i, j)));
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t j = 0; j < np; ++j)
                    err = std::max(err, std::abs(chi(i, j) - (i == j ? qsim::cplx(r.weight(i)) : qsim::cplx(0))));
            worst = std::max(worst, err);
        }
        ok = ok && worst <= a.tol;
        rows.push_back({{"qubits", n}, {"trials", a.trials}, {"max_error", worst}, {"passed", worst <= a.tol}});
    }
    emit(a.common, {{"schema_version", kSchemaVersion}, {"command", "twirl-check"}, {"seed", a.common.seed},
                    {"tolerance", a.tol}, {"results", rows}, {"passed", ok}});
    return ok ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------- simon

struct SimonArgs {
    Common common;
    int n_min = 2;
    int n_max = 10;
    int keys = 100;
    int m = 0;
};

int cmd_simon(const SimonArgs& a) {
    Checks ck;
    check_common(ck, a.common);
    ck.require(a.n_min >= 2, "n-min must be at least 2");
    ck.require(a.n_max >= a.n_min, "n-max must be at least n-min");
    ck.require(a.n_max <= 22, "exhaustive check is limited to n <= 22");
    ck.require(a.keys >= 1, "keys must be positive");
    ck.require(a.m == 0 || a.m >= a.n_max - 1, "m must be at least n-1");
    ck.raise();

    json rows = json::array();
    bool ok = true;
    for (int n = a.n_min; n <= a.n_max; ++n) {
        Rng rng = stream_rng(a.common.seed, static_cast<u64>(n));
        const int m = a.m ? a.m : n;
        int good = 0;
        for (int k = 0; k < a.keys; ++k) {
            const u64 s = oracles::sample_shift(n, rng);
            good += oracles::is_simon_function(oracles::pseudorandom_simon(oracles::key_from_seed(rng()), s, n, m));
        }
        ok = ok && good == a.keys;
        rows.push_back({{"n", n}, {"m", m}, {"keys", a.keys}, {"simon", good}});
    }
    emit(a.common, {{"schema_version", kSchemaVersion}, {"command", "simon"}, {"seed", a.common.seed},
                    {"results", rows}, {"passed", ok}});
    return ok ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------- dssp-run

struct DsspArgs {
    Common common;
    int n = 3;
    int d = 2;
    std::string solver = "inplace";
    std::string mode = "exact";
    int samples = 0;
    int trials = 100;
    int width_factor = 0;
    double min_recovery = 0.0;
};

int cmd_dssp_run(const DsspArgs& a, const std::string& config_path) {
    Checks ck;
    check_common(ck, a.common);
    ck.require(a.n >= 2 && a.n <= 8, "n must lie in [2, 8]");
    ck.require(a.d >= 1, "d must be at least 1");
    ck.require(a.samples >= 0, "samples must be nonnegative");
    ck.require(a.trials >= 1, "trials must be positive");
    ck.require(a.width_factor >= 0, "width factor must be nonnegative");
    ck.require(a.min_recovery >= 0 && a.min_recovery <= 1, "min-recovery must lie in [0, 1]");
    game::SolverKind kind{};
    oracles::OracleMode mode{};
    try {
        kind = game::parse_solver(a.solver);
    } catch (const ConfigError& e) {
        ck.require(false, e.what());
    }
    try {
        mode = oracles::parse_mode(a.mode);
    } catch (const ConfigError& e) {
        ck.require(false, e.what());
    }
    ck.raise();

    const int wanted = a.samples ? a.samples : 3 * a.n;
    struct Slot {
        game::SamplingReport rep;
        bool recovered = false;
        json descriptor;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(a.trials));
    std::atomic<int> next{0};
    std::atomic<bool> capacity{false};
    std::string capacity_msg;
    std::mutex mu;
    auto worker = [&] {
        for (int t = next++; t < a.trials; t = next++) {
            try {
                Rng rng = stream_rng(a.common.seed, static_cast<u64>(t));
                auto oracle = game::sample_query_oracle(kind, a.n, a.d, mode, rng, a.width_factor);
                auto& s = slots[static_cast<std::size_t>(t)];
                s.rep = game::collect_samples(oracle, wanted, rng);
                s.recovered = s.rep.recovered && *s.rep.recovered == oracle.shift();
                if (t == 0) s.descriptor = oracle.shuffling().descriptor();
            } catch (const CapacityError& e) {
                std::lock_guard lock(mu);
                capacity = true;
                capacity_msg = e.what();
            }
        }
    };
    const int jobs = std::max(1, std::min(a.common.jobs, a.trials));
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (capacity) throw CapacityError(capacity_msg);

    int attempts = 0, accepted = 0, recovered = 0, depth = 0;
    for (const auto& s : slots) {
        attempts += s.rep.attempts;
        accepted += s.rep.accepted;
        recovered += s.recovered;
        depth = std::max(depth, s.rep.audited_depth);
    }
    const int expected_depth = kind == game::SolverKind::InPlace ? a.d + 3 : 2 * a.d + 3;
    const double rate = static_cast<double>(recovered) / a.trials;
    const bool ok = depth == expected_depth && rate >= a.min_recovery;
    json report = {{"schema_version", kSchemaVersion},
                   {"command", "dssp-run"},
                   {"seed", a.common.seed},
                   {"n", a.n},
                   {"d", a.d},
                   {"solver", a.solver},
                   {"mode", a.mode},
                   {"samples_per_trial", wanted},
                   {"trials", a.trials},
                   {"recovery_rate", rate},
                   {"flag_success_rate", attempts ? static_cast<double>(accepted) / attempts : 0.0},
                   {"solver_runs", attempts},
                   {"audited_depth", depth},
                   {"expected_depth", expected_depth},
                   {"passed", ok}};
    write_manifest(a.common, "dssp-run", config_path, slots.front().descriptor, report);
    emit(a.common, report);
    return ok ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------- game-run

struct GameArgs {
    Common common;
    game::ProtocolConfig cfg;
    std::string solver = "inplace";
    std::string mode = "exact";
    std::string fidelity = "abstract";
    std::string prover_a = "honest";
    std::string prover_o = "honest";
    int repeat = 1;
    int gamma = -1;
    std::string test;
    int width_factor = 0;
    double min_accept = -1;
    double max_accept = -1;
};

int cmd_game_run(GameArgs a, const std::string& config_path) {
    Checks ck;
    check_common(ck, a.common);
    try {
        a.cfg.solver = game::parse_solver(a.solver);
    } catch (const ConfigError& e) {
        ck.require(false, e.what());
    }
    try {
        a.cfg.oracle_mode = oracles::parse_mode(a.mode);
    } catch (const ConfigError& e) {
        ck.require(false, e.what());
    }
    try {
        a.cfg.fidelity = game::parse_fidelity(a.fidelity);
    } catch (const ConfigError& e) {
        ck.require(false, e.what());
    }
    a.cfg.seed = a.common.seed;
    ck.add(a.cfg.violations());
    game::ProverAFactory fa;
    game::ProverOFactory fo;
    try {
        fa = game::prover_a_factory(a.prover_a, a.cfg.d);
    } catch (const ConfigError& e) {
        ck.require(false, e.what());
    }
    try {
        fo = game::prover_o_factory(a.prover_o);
    } catch (const ConfigError& e) {
        ck.require(false, e.what());
    }
    ck.require(a.repeat >= 1, "repeat must be positive");
    ck.require(a.gamma == -1 || a.gamma == 0 || a.gamma == 1, "gamma must be 0 or 1");
    ck.require(a.width_factor >= 0, "width factor must be nonnegative");
    game::EstimateOptions opts;
    if (!a.test.empty()) {
        if (a.test == "x" || a.test == "xtest") opts.test = game::TestKind::XTest;
        else if (a.test == "z" || a.test == "ztest") opts.test = game::TestKind::ZTest;
        else if (a.test == "rigid") opts.test = game::TestKind::Rigid;
        else ck.require(false, "test must be one of x, z, rigid");
    }
    ck.require(a.common.transcripts <= a.cfg.trials, "transcripts cannot exceed trials");
    ck.raise();

    if (a.gamma >= 0) opts.gamma = a.gamma;
    opts.jobs = a.common.jobs;
    opts.repeat = a.repeat;
    opts.width_factor = a.width_factor;
    auto est = game::estimate_acceptance(a.cfg, fa, fo, a.cfg.trials, opts);

    json report = est.to_json();
    report["schema_version"] = kSchemaVersion;
    report["command"] = "game-run";
    report["config"] = a.cfg.to_json();
    report["prover_a"] = a.prover_a;
    report["prover_o"] = a.prover_o;
    bool ok = true;
    const bool honest = a.prover_a == "honest" && a.prover_o == "honest";
    if (honest && !opts.gamma && !opts.test && a.repeat == 1) {
        const double bound = 1.0 - a.cfg.alpha_value() / 3.0 - 0.02;
        report["completeness_bound"] = bound;
        ok = est.p_hat() >= bound;
    }
    if (a.min_accept >= 0) ok = ok && est.p_hat() >= a.min_accept;
    if (a.max_accept >= 0) ok = ok && est.p_hat() <= a.max_accept;
    report["passed"] = ok;

    json descriptor;
    if (!a.common.out_dir.empty()) {
        auto first = game::instance_transcript(a.cfg, fa, fo, opts, 0);
        descriptor = first["oracle"];
        if (a.common.transcripts > 0) {
            const auto dir = transcript_dir(a.common);
            for (int t = 0; t < a.common.transcripts; ++t) {
                const u64 stream = static_cast<u64>(t) * static_cast<u64>(a.repeat);
                auto j = t == 0 ? first : game::instance_transcript(a.cfg, fa, fo, opts, stream);
                write_json(dir / ("trial_" + std::to_string(t) + ".json"), j);
            }
        }
    }
    write_manifest(a.common, "game-run", config_path, descriptor, report);
    emit(a.common, report);
    return ok ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------- ntcf-run

struct NtcfArgs {
    Common common;
    int n = 3;
    int d = 3;
    int d0 = ntcf::kDefaultD0;
    std::string prover = "honest";
    int trials = 1000;
    bool extract = false;
    double min_accept = -1;
    double max_accept = -1;
};

int cmd_ntcf_run(const NtcfArgs& a, const std::string& config_path) {
    Checks ck;
    check_common(ck, a.common);
    ck.require(a.n >= 2 && a.n <= 16, "n must lie in [2, 16]");
    ck.require(a.d >= 1, "d must be at least 1");
    ck.require(a.d0 >= 1, "d0 must be positive");
    ck.require(a.trials >= 1, "trials must be positive");
    ck.require(a.common.transcripts <= a.trials, "transcripts cannot exceed trials");
    ntcf::ProverFactory factory;
    try {
        factory = ntcf::prover_factory(a.prover);
        factory();
    } catch (const ConfigError& e) {
        ck.require(false, e.what());
    }
    if (a.extract && factory) {
        auto p = factory();
        ck.require(dynamic_cast<ntcf::HonestProver*>(p.get()) == nullptr ||
                       dynamic_cast<ntcf::ResetProver*>(p.get()) != nullptr,
                   "extraction needs a prover with a classical state (not honest or noisy)");
    }
    ck.raise();

    auto r = ntcf::run_experiment(a.d, a.prover, a.trials, a.common.seed, a.extract, a.n, a.d0, a.common.jobs);
    json report = r.to_json();
    report["schema_version"] = kSchemaVersion;
    report["command"] = "ntcf-run";
    report["seed"] = a.common.seed;
    bool ok = true;
    if (a.prover == "honest") {
        ok = r.accept_rate() == 1.0 && r.audited_depth == a.d0 + a.d;
        report["expected_depth"] = a.d0 + a.d;
    }
    if (a.extract) {
        // both - p0 - p1 + 1 is a per-trial indicator difference; its spread bounds the Monte Carlo error
        const double gap = r.both_rate() - (r.p0() + r.p1() - 1);
        const double sigma = std::sqrt(0.75 / r.trials);
        report["extractor"]["gap"] = gap;
        report["extractor"]["sigma"] = sigma;
        ok = ok && gap >= -3 * sigma;
    }
    if (a.min_accept >= 0) ok = ok && r.accept_rate() >= a.min_accept;
    if (a.max_accept >= 0) ok = ok && r.accept_rate() <= a.max_accept;
    report["passed"] = ok;

    if (a.common.transcripts > 0) {
        const auto dir = transcript_dir(a.common);
        for (int t = 0; t < a.common.transcripts; ++t) {
            Rng rng = stream_rng(a.common.seed, static_cast<u64>(t));
            auto p = factory();
            write_json(dir / ("trial_" + std::to_string(t) + ".json"), ntcf::run_cvqd(a.d, *p, rng, a.n, a.d0).to_json());
        }
    }
    write_manifest(a.common, "ntcf-run", config_path,
                   {{"family", "toy-ntcf"}, {"n", a.n}, {"d", a.d}, {"d0", a.d0}, {"seed", a.common.seed}}, report);
    emit(a.common, report);
    return ok ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    Common common;
    int reps = 5;
};

template <class F>
double time_ms(int reps, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f(i);
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / reps;
}

int cmd_bench(const BenchArgs& a) {
    Checks ck;
    check_common(ck, a.common);
    ck.require(a.reps >= 1, "reps must be positive");
    ck.raise();

    Rng rng = stream_rng(a.common.seed, 0);
    json rows = json::array();
    rows.push_back({{"op", "dense_h_layer_16q"}, {"ms", time_ms(a.reps, [&](int) {
                        qsim::StateVector s(16);
                        for (int q = 0; q < 16; ++q) s.apply_1q(g::H(), q);
                    })}});
    const auto circuit = gadgets::standin_circuit(3, 2);
    rows.push_back({{"op", "gadget_session_3w_2l"}, {"ms", time_ms(a.reps, [&](int) {
                        gadgets::GadgetSession(gadgets::RoundType::Computation, circuit).run({}, rng);
                    })}});
    game::ProtocolConfig cfg;
    cfg.seed = a.common.seed;
    auto fa = game::prover_a_factory("honest", cfg.d);
    auto fo = game::prover_o_factory("honest");
    rows.push_back({{"op", "query_protocol_instance_n3_d2"}, {"ms", time_ms(a.reps, [&](int i) {
                        game::run_instance(cfg, fa, fo, {}, static_cast<u64>(i));
                    })}});
    rows.push_back({{"op", "ntcf_honest_d3"}, {"ms", time_ms(a.reps, [&](int) {
                        ntcf::HonestProver p;
                        ntcf::run_cvqd(3, p, rng);
                    })}});
    emit(a.common, {{"schema_version", kSchemaVersion}, {"command", "bench"}, {"reps", a.reps}, {"timings", rows}});
    return kExitOk;
}

void print_violations(const std::vector<std::string>& v) {
    std::cerr << json({{"error", "config"}, {"violations", v}}).dump(2) << std::endl;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification experiments for depth-bounded quantum provers"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI file; one [command] section per subcommand, flags override it");
    app.allow_config_extras(false);

    GadgetArgs ga;
    auto* gadget = app.add_subcommand("gadget-check", "exhaustive T-gadget, H-compilation and key-update checks");
    add_common(gadget, ga.common, false);
    gadget->add_option("--states", ga.states, "random input states per key setting");
    gadget->add_option("--wires", ga.wires, "wires of the planted-attack circuit");
    gadget->add_option("--planted-attack", ga.attack, "Pauli attack on one wire, e.g. X:1");
    gadget->add_option("--attack-trials", ga.attack_trials, "rounds per test type for the planted attack");

    TwirlArgs ta;
    auto* twirl = app.add_subcommand("twirl-check", "Pauli twirl of random channels against the brute-force average");
    add_common(twirl, ta.common, false);
    twirl->add_option("--qubits", ta.qubits, "channel widths to check (1, 2)");
    twirl->add_option("--trials", ta.trials, "random channels per width");
    twirl->add_option("--rank", ta.rank, "Kraus rank of the random channels");
    twirl->add_option("--tol", ta.tol, "entrywise tolerance");

    SimonArgs sa;
    auto* simon = app.add_subcommand("simon", "exhaustive check of the pseudorandom Simon construction");
    add_common(simon, sa.common, false);
    simon->add_option("--n-min", sa.n_min);
    simon->add_option("--n-max", sa.n_max);
    simon->add_option("--keys", sa.keys, "random keys per n");
    simon->add_option("--m", sa.m, "output width (default n)");

    DsspArgs da;
    auto* dssp = app.add_subcommand("dssp-run", "d-shuffling Simon solver: recovery, flag statistic and depth");
    add_common(dssp, da.common, true);
    dssp->add_option("--n", da.n);
    dssp->add_option("--d", da.d);
    dssp->add_option("--solver", da.solver, "inplace | standard");
    dssp->add_option("--mode", da.mode, "exact | prp");
    dssp->add_option("--samples", da.samples, "accepted samples per trial (default 3n)");
    dssp->add_option("--trials", da.trials);
    dssp->add_option("--width-factor", da.width_factor);
    dssp->add_option("--min-recovery", da.min_recovery, "fail below this recovery rate");

    GameArgs gm;
    auto* gamecmd = app.add_subcommand("game-run", "two-prover query protocol acceptance");
    add_common(gamecmd, gm.common, true);
    gamecmd->add_option("--n", gm.cfg.n);
    gamecmd->add_option("--d", gm.cfg.d);
    gamecmd->add_option("--q", gm.cfg.q, "query count (default from the solver)");
    gamecmd->add_option("--p", gm.cfg.p);
    gamecmd->add_option("--alpha", gm.cfg.alpha, "test probability (default chosen from q and p)");
    gamecmd->add_option("--alpha-constant", gm.cfg.alpha_constant);
    gamecmd->add_option("--block-size", gm.cfg.block_size);
    gamecmd->add_option("--standin-layers", gm.cfg.standin_layers);
    gamecmd->add_option("--copies", gm.cfg.copies);
    gamecmd->add_option("--rigid-tolerance", gm.cfg.rigid_tolerance);
    gamecmd->add_option("--trials", gm.cfg.trials);
    gamecmd->add_option("--solver", gm.solver, "inplace | standard");
    gamecmd->add_option("--mode", gm.mode, "exact | prp");
    gamecmd->add_option("--fidelity", gm.fidelity, "abstract | gadget");
    gamecmd->add_option("--prover-a", gm.prover_a, "honest | lying | classical | midreset | basis-swap");
    gamecmd->add_option("--prover-o", gm.prover_o, "honest | skip | pauli");
    gamecmd->add_option("--repeat", gm.repeat, "sequential repetitions; accept iff all accept");
    gamecmd->add_option("--gamma", gm.gamma, "force the branch (0 computation, 1 test)");
    gamecmd->add_option("--test", gm.test, "force the test: x | z | rigid");
    gamecmd->add_option("--width-factor", gm.width_factor);
    gamecmd->add_option("--min-accept", gm.min_accept, "fail below this acceptance rate");
    gamecmd->add_option("--max-accept", gm.max_accept, "fail above this acceptance rate");

    NtcfArgs na;
    auto* ntcfcmd = app.add_subcommand("ntcf-run", "sequential-challenge protocol on the toy claw-free family");
    add_common(ntcfcmd, na.common, true);
    ntcfcmd->add_option("--n", na.n);
    ntcfcmd->add_option("--d", na.d);
    ntcfcmd->add_option("--d0", na.d0, "constant depth charged for preparation");
    ntcfcmd->add_option("--prover", na.prover, "honest | noisy-<mu> | zero | preimage-only | reset-at-<j> | trapdoor");
    ntcfcmd->add_option("--trials", na.trials);
    ntcfcmd->add_flag("--extract", na.extract, "run the rewinding extractor");
    ntcfcmd->add_option("--min-accept", na.min_accept);
    ntcfcmd->add_option("--max-accept", na.max_accept);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "timings of core operations");
    add_common(bench, ba.common, false);
    bench->add_option("--reps", ba.reps);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    const auto* cfg_opt = app.get_config_ptr();
    const std::string config_path = cfg_opt && cfg_opt->count() ? cfg_opt->results().front() : "";

    try {
        if (*gadget) return cmd_gadget_check(ga);
        if (*twirl) return cmd_twirl_check(ta);
        if (*simon) return cmd_simon(sa);
        if (*dssp) return cmd_dssp_run(da, config_path);
        if (*gamecmd) return cmd_game_run(gm, config_path);
        if (*ntcfcmd) return cmd_ntcf_run(na, config_path);
        if (*bench) return cmd_bench(ba);
    } catch (const ConfigViolations& e) {
        print_violations(e.list);
        return kExitConfig;
    } catch (const ConfigError& e) {
        print_violations({e.what()});
        return kExitConfig;
    } catch (const CapacityError& e) {
        std::cerr << json({{"error", "capacity"}, {"message", e.what()}}).dump(2) << std::endl;
        return kExitCapacity;
    } catch (const std::exception& e) {
        std::cerr << json({{"error", "failure"}, {"message", e.what()}}).dump(2) << std::endl;
        return kExitFail;
    }
    return kExitFail;
}
