#include "klucb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "klucb/family_io.hpp"
#include "klucb/rng.hpp"

namespace klucb {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("config field \"" + field + "\": " + why);
}

const json& require_field(const json& j, const char* field) {
    if (!j.contains(field)) throw ConfigError("config field \"" + std::string(field) + "\": missing");
    return j.at(field);
}

long int_field(const json& j, const char* field, long lo, long hi) {
    const json& v = require_field(j, field);
    if (!v.is_number_integer()) bad_field(field, "must be an integer");
    const long x = v.get<long>();
    if (x < lo || x > hi)
        bad_field(field, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    return x;
}

double num_or(const json& j, const char* field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j.at(field).is_number()) bad_field(field, "must be a number");
    return j.at(field).get<double>();
}

std::vector<double> sample_thetas(const json& spec, int K) {
    if (!spec.contains("normal") || !spec.at("normal").is_object())
        bad_field("thetas", "sampler must look like {\"normal\": {\"mean\":..,\"var\":..}, \"seed\": ..}");
    const json& normal = spec.at("normal");
    const double mean = num_or(normal, "mean", 0.0);
    const double var = num_or(normal, "var", -1.0);
    if (!(var >= 0.0)) bad_field("thetas.normal.var", "must be a nonnegative number");
    if (!spec.contains("seed") || !spec.at("seed").is_number_integer())
        bad_field("thetas.seed", "sampler needs an integer seed");
    Rng rng(mix_seed(spec.at("seed").get<std::uint64_t>(), 0x74686574u));
    std::vector<double> thetas(K);
    const double sd = std::sqrt(var);
    for (int a = 0; a < K; ++a) thetas[a] = mean + sd * rng.normal();
    return thetas;
}

InitDist parse_init(const json& j) {
    if (!j.contains("init")) return InitDist::stationary();
    const json& v = j.at("init");
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "stationary") return InitDist::stationary();
        if (s == "uniform") return InitDist::uniform();
        bad_field("init", "expected \"stationary\", \"uniform\" or {\"point\": state}");
    }
    if (v.is_object() && v.contains("point") && v.at("point").is_number_integer()) {
        const long s = v.at("point").get<long>();
        if (s < 0) bad_field("init.point", "state index must be nonnegative");
        return InitDist::point(static_cast<std::size_t>(s));
    }
    bad_field("init", "expected \"stationary\", \"uniform\" or {\"point\": state}");
}

std::vector<long> parse_checkpoints(const json& j, long K, long T) {
    int log_points = 50;
    if (j.contains("checkpoints")) {
        const json& v = j.at("checkpoints");
        if (v.is_array()) {
            std::vector<long> pts;
            long prev = 0;
            for (const json& e : v) {
                if (!e.is_number_integer()) bad_field("checkpoints", "entries must be integers");
                const long t = e.get<long>();
                if (t < 1 || t > T) bad_field("checkpoints", "round " + std::to_string(t) + " outside [1, T]");
                if (t <= prev) bad_field("checkpoints", "rounds must be strictly increasing");
                pts.push_back(t);
                prev = t;
            }
            if (pts.empty() || pts.back() != T) bad_field("checkpoints", "the last round must equal T");
            return pts;
        }
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            int n = 0;
            if (std::sscanf(s.c_str(), "log(%d)", &n) != 1 || n < 1 || s.back() != ')')
                bad_field("checkpoints", "expected an array of rounds or \"log(N)\"");
            log_points = n;
        } else {
            bad_field("checkpoints", "expected an array of rounds or \"log(N)\"");
        }
    }
    return log_checkpoints(K, T, log_points);
}

double csv_num(const std::string& cell, const char* column) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) throw IoError(std::string("bad numeric cell in column ") + column);
    return v;
}

}  // namespace

std::vector<long> log_checkpoints(long first, long T, int n_points) {
    if (first < 1 || T < first) throw OutOfRange("need 1 <= first <= T");
    if (n_points < 1) throw OutOfRange("need at least one checkpoint");
    std::vector<long> pts;
    const double la = std::log(static_cast<double>(first));
    const double lb = std::log(static_cast<double>(T));
    for (int i = 0; i < n_points; ++i) {
        const double frac = n_points == 1 ? 1.0 : static_cast<double>(i) / (n_points - 1);
        const double v = std::exp(la + (lb - la) * frac);
        long t = std::clamp(static_cast<long>(std::llround(v)), first, T);
        if (pts.empty() || t > pts.back()) pts.push_back(t);
    }
    if (pts.empty() || pts.back() != T) pts.push_back(T);
    return pts;
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const char* known[] = {"family", "thetas", "K",           "M",
                                  "T",      "policies", "delta",     "beta",
                                  "reps",   "master_seed", "checkpoints", "output_dir",
                                  "record_counts", "init"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("config field \"" + it.key() + "\": unknown field");
    }

    ExperimentConfig cfg;
    try {
        cfg.family = family_from_json(require_field(j, "family"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        bad_field("family", e.what());
    }

    const json& jt = require_field(j, "thetas");
    if (jt.is_array()) {
        for (const json& e : jt) {
            if (!e.is_number()) bad_field("thetas", "entries must be numbers");
            cfg.thetas.push_back(e.get<double>());
        }
        if (cfg.thetas.empty()) bad_field("thetas", "needs at least one arm");
        cfg.K = static_cast<int>(cfg.thetas.size());
        if (j.contains("K") && int_field(j, "K", 1, 1 << 20) != cfg.K)
            bad_field("K", "disagrees with the number of explicit thetas");
    } else if (jt.is_object()) {
        cfg.K = static_cast<int>(int_field(j, "K", 1, 1 << 20));
        cfg.thetas = sample_thetas(jt, cfg.K);
        cfg.thetas_sampled = true;
    } else {
        bad_field("thetas", "expected an array or a sampler object");
    }

    cfg.M = static_cast<int>(j.contains("M") ? int_field(j, "M", 1, cfg.K) : 1);
    cfg.T = int_field(j, "T", cfg.K, std::numeric_limits<long>::max() / 4);

    const json& jp = require_field(j, "policies");
    if (!jp.is_array() || jp.empty()) bad_field("policies", "must be a nonempty array");
    for (const json& e : jp) {
        PolicyChoice choice;
        if (e.is_string()) {
            choice.name = e.get<std::string>();
        } else if (e.is_object() && e.contains("name") && e.at("name").is_string()) {
            choice.name = e.at("name").get<std::string>();
            choice.delta = num_or(e, "delta", 0.0);
            choice.beta = num_or(e, "beta", 0.0);
        } else {
            bad_field("policies", "entries must be names or {\"name\":.., \"delta\":.., \"beta\":..}");
        }
        choice.kind = policy_kind_from_name(choice.name);
        cfg.policies.push_back(choice);
    }

    cfg.delta = num_or(j, "delta", 0.0);
    if (cfg.delta != 0.0 && !(cfg.delta > 0.0 && cfg.delta < 1.0 / cfg.K))
        bad_field("delta", "must lie in (0, 1/K)");
    cfg.beta = num_or(j, "beta", 1.0);
    if (!(cfg.beta >= 0.0)) bad_field("beta", "must be nonnegative");

    cfg.reps = j.contains("reps") ? int_field(j, "reps", 1, 1L << 40) : 1;
    if (!j.contains("master_seed") || !j.at("master_seed").is_number_integer())
        bad_field("master_seed", "needs an integer seed");
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();

    cfg.checkpoints = parse_checkpoints(j, cfg.K, cfg.T);
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) bad_field("output_dir", "must be a string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("record_counts")) {
        if (!j.at("record_counts").is_boolean()) bad_field("record_counts", "must be a boolean");
        cfg.record_counts = j.at("record_counts").get<bool>();
    }
    cfg.init = parse_init(j);
    if (cfg.init.kind == InitDist::Kind::Point && cfg.init.state >= cfg.family.size())
        bad_field("init.point", "state index outside the chain");
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path + ": " + e.what());
    }
    return parse_config(j);
}

namespace {

void run_one(const ExperimentConfig& cfg, const InstanceProfile& prof, int policy_index,
             long rep, RunRecord& rec) {
    const PolicyChoice& choice = cfg.policies[policy_index];
    const double delta = choice.delta > 0.0 ? choice.delta : cfg.delta;
    const double beta = choice.beta > 0.0 ? choice.beta : cfg.beta;
    const std::uint64_t seed = mix_seed(cfg.master_seed, static_cast<std::uint64_t>(policy_index),
                                        static_cast<std::uint64_t>(rep));
    BanditEnv env(cfg.family, cfg.thetas, cfg.M, cfg.init, seed, cfg.record_counts);
    PolicyState st = make_policy_state(cfg.K, cfg.M, delta, beta);
    FamilyEvaluator ev(cfg.family);

    const auto started = std::chrono::steady_clock::now();
    std::size_t next_cp = 0;
    auto maybe_record = [&] {
        if (next_cp >= cfg.checkpoints.size() || env.t() != cfg.checkpoints[next_cp]) return;
        ++next_cp;
        rec.reward_at.push_back(env.cum_reward());
        rec.proxy_at.push_back(proxy_regret(prof, env.counts(), env.t()));
        rec.evals_at.push_back(st.index_evals);
        rec.wall_ns_at.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                     std::chrono::steady_clock::now() - started)
                                     .count());
        if (cfg.record_counts) rec.counts_at.push_back(env.counts());
    };

    for (long t = 1; t <= cfg.K && t <= cfg.T; ++t) {
        observe(st, env.step(init_schedule(cfg.K, cfg.M, t)));
        maybe_record();
    }
    for (long t = cfg.K; t < cfg.T; ++t) {
        const std::vector<int> chosen = step_policy(choice.kind, st, ev, t);
        observe(st, env.step(chosen));
        maybe_record();
    }
    rec.final_counts = env.counts();
    rec.final_reward = env.cum_reward();
    rec.min_candidate_size =
        st.min_candidate_size == std::numeric_limits<long>::max() ? cfg.K : st.min_candidate_size;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers) {
    ExperimentResult res;
    res.cfg = cfg;
    res.prof = profile(cfg.family, cfg.thetas, cfg.M);
    const int np = static_cast<int>(cfg.policies.size());
    res.records.resize(np);
    for (int p = 0; p < np; ++p) res.records[p].resize(static_cast<std::size_t>(cfg.reps));

    const long tasks = static_cast<long>(np) * cfg.reps;
    const int nw = static_cast<int>(std::max<long>(1, std::min<long>(workers, tasks)));
    if (nw == 1) {
        for (int p = 0; p < np; ++p)
            for (long r = 0; r < cfg.reps; ++r) run_one(cfg, res.prof, p, r, res.records[p][r]);
        return res;
    }
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (long task = next.fetch_add(1); task < tasks; task = next.fetch_add(1)) {
                try {
                    const int p = static_cast<int>(task / cfg.reps);
                    const long r = task % cfg.reps;
                    run_one(cfg, res.prof, p, r, res.records[p][r]);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return res;
}

std::vector<SummaryRow> summarize(const ExperimentResult& res) {
    const double lb = lower_bound_constant(res.prof, res.cfg.family);
    std::vector<SummaryRow> rows;
    for (std::size_t p = 0; p < res.cfg.policies.size(); ++p) {
        const auto& reps = res.records[p];
        for (std::size_t c = 0; c < res.cfg.checkpoints.size(); ++c) {
            const long t = res.cfg.checkpoints[c];
            SummaryRow row;
            row.policy = res.cfg.policies[p].name;
            row.t = t;
            double sum = 0.0, sum_proxy = 0.0, sum_wall = 0.0;
            for (const RunRecord& rec : reps) {
                sum += static_cast<double>(t) * res.prof.top_sum - rec.reward_at[c];
                sum_proxy += rec.proxy_at[c];
                sum_wall += static_cast<double>(rec.wall_ns_at[c]);
            }
            const double n = static_cast<double>(reps.size());
            row.regret_mean = sum / n;
            row.proxy_mean = sum_proxy / n;
            row.wall_time_ns = sum_wall / n;
            if (reps.size() > 1) {
                double ss = 0.0;
                for (const RunRecord& rec : reps) {
                    const double r = static_cast<double>(t) * res.prof.top_sum - rec.reward_at[c];
                    ss += (r - row.regret_mean) * (r - row.regret_mean);
                }
                row.regret_stderr = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
            }
            row.index_evals = static_cast<double>(reps.front().evals_at[c]);
            row.regret_over_logt =
                t >= 2 ? row.regret_mean / std::log(static_cast<double>(t)) : 0.0;
            row.lower_bound_const = lb;
            rows.push_back(row);
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        if (a.policy != b.policy) return a.policy < b.policy;
        return a.t < b.t;
    });
    return rows;
}

std::string emit_csv(const std::vector<SummaryRow>& rows) {
    std::string out =
        "policy,t,regret_mean,regret_stderr,proxy_mean,index_evals,wall_time_ns,"
        "regret_over_logt,lower_bound_const\n";
    char buf[512];
    for (const SummaryRow& r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.policy.c_str(),
                      r.t, r.regret_mean, r.regret_stderr, r.proxy_mean, r.index_evals,
                      r.wall_time_ns, r.regret_over_logt, r.lower_bound_const);
        out += buf;
    }
    return out;
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "policy,t,regret_mean,regret_stderr,proxy_mean,index_evals,wall_time_ns,"
                "regret_over_logt,lower_bound_const")
        throw IoError("summary csv header does not match");
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                cells.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (cells.size() != 9) throw IoError("summary csv row has wrong arity");
        SummaryRow r;
        r.policy = cells[0];
        r.t = static_cast<long>(csv_num(cells[1], "t"));
        r.regret_mean = csv_num(cells[2], "regret_mean");
        r.regret_stderr = csv_num(cells[3], "regret_stderr");
        r.proxy_mean = csv_num(cells[4], "proxy_mean");
        r.index_evals = csv_num(cells[5], "index_evals");
        r.wall_time_ns = csv_num(cells[6], "wall_time_ns");
        r.regret_over_logt = csv_num(cells[7], "regret_over_logt");
        r.lower_bound_const = csv_num(cells[8], "lower_bound_const");
        rows.push_back(r);
    }
    return rows;
}

void write_outputs(const ExperimentResult& res, const std::vector<SummaryRow>& rows,
                   const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    {
        std::ofstream csv(dir + "/summary.csv", std::ios::binary);
        if (!csv) throw IoError("cannot write " + dir + "/summary.csv");
        csv << emit_csv(rows);
    }
    json meta;
    meta["family"] = family_to_json(res.cfg.family);
    meta["thetas"] = res.cfg.thetas;
    meta["thetas_sampled"] = res.cfg.thetas_sampled;
    meta["K"] = res.cfg.K;
    meta["M"] = res.cfg.M;
    meta["T"] = res.cfg.T;
    json pols = json::array();
    for (const PolicyChoice& p : res.cfg.policies) pols.push_back(p.name);
    meta["policies"] = pols;
    meta["delta"] = res.cfg.delta;
    meta["beta"] = res.cfg.beta;
    meta["reps"] = res.cfg.reps;
    meta["master_seed"] = res.cfg.master_seed;
    meta["checkpoints"] = res.cfg.checkpoints;
    meta["record_counts"] = res.cfg.record_counts;
    meta["sorted_means"] = res.prof.mus;
    meta["lower_bound_const"] = lower_bound_constant(res.prof, res.cfg.family);
    std::ofstream mj(dir + "/meta.json", std::ios::binary);
    if (!mj) throw IoError("cannot write " + dir + "/meta.json");
    mj << meta.dump(2) << "\n";
}

}  // namespace klucb
