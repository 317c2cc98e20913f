#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include <json.hpp>

#include "klucb/concentration.hpp"
#include "klucb/exp_family.hpp"
#include "klucb/family_io.hpp"
#include "klucb/harness.hpp"
#include "klucb/policies.hpp"
#include "klucb/regret.hpp"

namespace py = pybind11;
using namespace klucb;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix P(rows.size());
    for (std::size_t x = 0; x < rows.size(); ++x) {
        if (rows[x].size() != rows.size())
            throw OutOfRange("transition matrix must be square");
        for (std::size_t y = 0; y < rows.size(); ++y) P(x, y) = rows[x][y];
    }
    return P;
}

std::vector<std::vector<double>> to_rows(const Matrix& P) {
    std::vector<std::vector<double>> rows(P.size(), std::vector<double>(P.size()));
    for (std::size_t x = 0; x < P.size(); ++x)
        for (std::size_t y = 0; y < P.size(); ++y) rows[x][y] = P(x, y);
    return rows;
}

InitDist make_init(const std::string& kind, std::size_t state) {
    if (kind == "stationary") return InitDist::stationary();
    if (kind == "uniform") return InitDist::uniform();
    if (kind == "point") return InitDist::point(state);
    throw ConfigError("init must be stationary, uniform or point");
}

py::dict member_dict(const Member& m) {
    py::dict d;
    d["theta"] = m.theta;
    d["rho"] = m.rho;
    d["log_pf"] = m.log_pf;
    d["mean"] = m.mean;
    d["P_theta"] = to_rows(m.P_theta);
    d["u"] = m.u;
    d["v"] = m.v;
    d["pi"] = m.pi;
    d["left_residual"] = m.left_residual;
    d["right_residual"] = m.right_residual;
    return d;
}

py::dict report_dict(const BoundReport& r) {
    py::dict d;
    d["event"] = r.event;
    d["level"] = r.level;
    d["n"] = r.n;
    d["constant"] = r.constant;
    d["bound"] = r.bound_value;
    d["empirical"] = r.empirical;
    d["stderr"] = r.stderr_;
    d["replications"] = r.replications;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Markov-chain exponential families, confidence-bound bandit policies, and the "
              "simulation harness behind the klucb command line tool.";

    py::register_exception<Error>(m, "KlucbError");

    py::class_<FamilySpec>(m, "Family")
        .def_property_readonly("states", [](const FamilySpec& f) { return f.states; })
        .def_property_readonly("P", [](const FamilySpec& f) { return to_rows(f.P); })
        .def_property_readonly("f", [](const FamilySpec& f) { return f.f; })
        .def("__len__", [](const FamilySpec& f) { return f.size(); })
        .def("__repr__", [](const FamilySpec& f) {
            return "<Family with " + std::to_string(f.size()) + " states>";
        });

    py::class_<InstanceProfile>(m, "InstanceProfile")
        .def_readonly("K", &InstanceProfile::K)
        .def_readonly("M", &InstanceProfile::M)
        .def_readonly("mus", &InstanceProfile::mus)
        .def_readonly("thetas", &InstanceProfile::thetas)
        .def_readonly("order", &InstanceProfile::order)
        .def_readonly("N", &InstanceProfile::N)
        .def_readonly("L", &InstanceProfile::L)
        .def_readonly("top_sum", &InstanceProfile::top_sum);

    m.def(
        "build_family",
        [](std::vector<std::string> states, const std::vector<std::vector<double>>& P,
           std::vector<double> f) {
            return build_family(std::move(states), to_matrix(P), std::move(f));
        },
        py::arg("states"), py::arg("P"), py::arg("f"));
    m.def("two_state_family", &two_state_family, py::arg("p"), py::arg("q"));
    m.def("iid_family", &iid_family, py::arg("h"), py::arg("f"));
    m.def("family_from_json", [](const std::string& text) {
        return family_from_json(nlohmann::json::parse(text));
    });
    m.def("family_to_json", [](const FamilySpec& fam) { return family_to_json(fam).dump(); });

    m.def("rho_two_state", &rho_two_state, py::arg("p"), py::arg("q"), py::arg("theta"));
    m.def(
        "member", [](const FamilySpec& fam, double theta) { return member_dict(member(fam, theta)); },
        py::arg("family"), py::arg("theta"));
    m.def("stationary_mean", &stationary_mean, py::arg("family"), py::arg("theta"));
    m.def(
        "mean_space",
        [](const FamilySpec& fam, double cap) {
            const MeanSpace sp = mean_space(fam, cap);
            return py::make_tuple(sp.lo, sp.hi);
        },
        py::arg("family"), py::arg("theta_cap") = kDefaultThetaCap);
    m.def("mean_to_natural", &mean_to_natural, py::arg("family"), py::arg("mu"),
          py::arg("theta_cap") = kDefaultThetaCap);
    m.def("kl_rate", &kl_rate, py::arg("family"), py::arg("theta"), py::arg("lambda_"));
    m.def("kl_rate_direct", &kl_rate_direct, py::arg("family"), py::arg("theta"),
          py::arg("lambda_"));
    m.def("kl_rate_mean", &kl_rate_mean, py::arg("family"), py::arg("mu"), py::arg("nu"),
          py::arg("theta_cap") = kDefaultThetaCap);
    m.def("klucb_index", &klucb_index, py::arg("family"), py::arg("mean"), py::arg("n"),
          py::arg("g_val"), py::arg("theta_cap") = kDefaultThetaCap);

    m.def("g", &g, py::arg("t"));
    m.def("ucb_index", &ucb_index, py::arg("mean"), py::arg("n"), py::arg("t"), py::arg("beta"));

    m.def(
        "is_doeblin",
        [](const FamilySpec& fam, const std::vector<std::size_t>& A) { return is_doeblin(fam, A); },
        py::arg("family"), py::arg("A"));
    m.def(
        "martingale_residual",
        [](const FamilySpec& fam, double theta) {
            return martingale_residual(fam, theta).residual;
        },
        py::arg("family"), py::arg("theta"));
    m.def("chernoff_constant", &chernoff_constant, py::arg("family"), py::arg("mu"),
          py::arg("theta_cap") = kDefaultThetaCap);
    m.def("chernoff_bound", &chernoff_bound, py::arg("family"), py::arg("mu"), py::arg("n"),
          py::arg("theta_cap") = kDefaultThetaCap);
    m.def("maximal_constant", &maximal_constant, py::arg("family"),
          py::arg("theta_cap") = kDefaultThetaCap);
    m.def("maximal_bound", &maximal_bound, py::arg("family"), py::arg("eps"), py::arg("n"),
          py::arg("theta_cap") = kDefaultThetaCap);
    m.def(
        "empirical_tail",
        [](const FamilySpec& fam, double theta0, const std::string& event, double level, long n,
           long reps, std::uint64_t seed, const std::string& init, std::size_t point_state,
           int workers) {
            if (event != "chernoff" && event != "maximal")
                throw ConfigError("event must be chernoff or maximal");
            const TailEvent ev =
                event == "chernoff" ? TailEvent::chernoff(level) : TailEvent::maximal(level);
            return report_dict(
                empirical_tail(fam, theta0, ev, n, reps, seed, make_init(init, point_state),
                               workers));
        },
        py::arg("family"), py::arg("theta0"), py::arg("event"), py::arg("level"), py::arg("n"),
        py::arg("reps"), py::arg("seed"), py::arg("init") = "stationary",
        py::arg("point_state") = 0, py::arg("workers") = 1);

    m.def("profile", &profile, py::arg("family"), py::arg("thetas"), py::arg("M"),
          py::arg("tie_tol") = 1e-12);
    m.def("proxy_regret", &proxy_regret, py::arg("profile"), py::arg("counts"), py::arg("T"));
    m.def(
        "return_time",
        [](const FamilySpec& fam, double theta, const std::string& init, std::size_t state) {
            return return_time(fam, theta, make_init(init, state));
        },
        py::arg("family"), py::arg("theta"), py::arg("init") = "stationary",
        py::arg("point_state") = 0);
    m.def(
        "proxy_gap_bound",
        [](const FamilySpec& fam, const std::vector<double>& thetas, const std::string& init,
           std::size_t state) { return proxy_gap_bound(fam, thetas, make_init(init, state)); },
        py::arg("family"), py::arg("thetas"), py::arg("init") = "stationary",
        py::arg("point_state") = 0);
    m.def("lower_bound_constant", &lower_bound_constant, py::arg("profile"), py::arg("family"));

    m.def(
        "simulate",
        [](const std::string& config_json, int workers) {
            const ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
            const ExperimentResult res = run_experiment(cfg, workers);
            return emit_csv(summarize(res));
        },
        py::arg("config_json"), py::arg("workers") = 1,
        "Run the experiment described by a JSON config string; returns the summary CSV.");
}
