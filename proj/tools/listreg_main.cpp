#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "listreg/compression.hpp"
#include "listreg/harness.hpp"
#include "listreg/json_io.hpp"
#include "listreg/oig.hpp"

using namespace listreg;

namespace {

Json witness_json(const ShatterWitness& w) {
    Json j;
    j["points"] = w.points;
    Json anchors = Json::array();
    for (const auto& a : w.anchors) {
        Json row = Json::array();
        for (const auto& v : a) row.push_back(v.str());
        anchors.push_back(std::move(row));
    }
    j["anchors"] = std::move(anchors);
    Json assign = Json::array();
    for (const auto& [pattern, row] : w.assignment)
        assign.push_back(Json{{"pattern", pattern}, {"row", row}});
    j["assignment"] = std::move(assign);
    return j;
}

std::vector<int> parse_seq(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stoi(cur));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"list regression toolkit"};
    app.require_subcommand(1);

    // ---- dims
    auto* dims = app.add_subcommand("dims", "dimension calculators");
    std::string dims_class, dims_gamma = "1/4", dims_which = "fat";
    int dims_k = 1, dims_maxd = 8;
    dims->add_option("--class", dims_class, "hypothesis class file")->required();
    dims->add_option("--gamma", dims_gamma, "scale p/q");
    dims->add_option("--k", dims_k, "list size");
    dims->add_option("--which", dims_which, "fat|strongfat|natarajan|packing|sandwich");
    dims->add_option("--max-d", dims_maxd, "sequence length cap");

    // ---- oig
    auto* oig = app.add_subcommand("oig", "orientation of a projected one-inclusion graph");
    std::string oig_class, oig_seq, oig_gamma = "1/4", oig_mode = "exact";
    int oig_k = 1;
    oig->add_option("--class", oig_class)->required();
    oig->add_option("--seq", oig_seq, "comma-separated point indices")->required();
    oig->add_option("--gamma", oig_gamma);
    oig->add_option("--k", oig_k);
    oig->add_option("--mode", oig_mode, "exact|greedy");

    // ---- oigdim
    auto* oigdim = app.add_subcommand("oigdim", "scaled k-list OIG dimension");
    std::string od_class, od_gamma = "1/4";
    int od_k = 1, od_nmax = 3;
    oigdim->add_option("--class", od_class)->required();
    oigdim->add_option("--gamma", od_gamma);
    oigdim->add_option("--k", od_k);
    oigdim->add_option("--nmax", od_nmax);

    // ---- train
    auto* train = app.add_subcommand("train", "run a list regression pipeline");
    std::string tr_class, tr_sample, tr_gamma = "1/4", tr_mode = "realizable";
    std::string tr_hyp_out = "hypothesis.json", tr_rep_out = "report.json";
    int tr_k = 1;
    std::uint64_t tr_seed = 1;
    std::int64_t tr_m = -1, tr_l = -1;
    double tr_scale = 1.0;
    train->add_option("--class", tr_class)->required();
    train->add_option("--sample", tr_sample)->required();
    train->add_option("--gamma", tr_gamma);
    train->add_option("--k", tr_k);
    train->add_option("--mode", tr_mode, "agnostic|realizable|oig");
    train->add_option("--seed", tr_seed);
    train->add_option("--m", tr_m, "weak sample size override");
    train->add_option("--l", tr_l, "subsequence count override");
    train->add_option("--scale-constants", tr_scale, "multiplier on default m and l");
    train->add_option("--out-hypothesis", tr_hyp_out);
    train->add_option("--out-report", tr_rep_out);

    // ---- eval
    auto* eval = app.add_subcommand("eval", "population error of a hypothesis file");
    std::string ev_hyp, ev_dist;
    eval->add_option("--hypothesis", ev_hyp)->required();
    eval->add_option("--dist", ev_dist)->required();

    // ---- run
    auto* run = app.add_subcommand("run", "seeded experiment sweep");
    std::string run_cfg, run_out = "report.json";
    run->add_option("--config", run_cfg)->required();
    run->add_option("--out", run_out);

    // ---- verify
    auto* verify = app.add_subcommand("verify", "property suite");
    std::string verify_filter;
    verify->add_option("--filter", verify_filter);

    // ---- build-class
    auto* bc = app.add_subcommand("build-class", "emit a reference hypothesis class");
    std::string bc_name, bc_out = "class.json";
    int bc_n = 3;
    bc->add_option("name", bc_name, "example1|example2")->required();
    bc->add_option("--n", bc_n);
    bc->add_option("--out", bc_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*dims) {
            HypothesisClass cls = class_from_json(load_json_file(dims_class));
            Rat gamma = Rat::parse(dims_gamma);
            auto start = std::chrono::steady_clock::now();
            Json out;
            DimCaps caps;
            caps.max_sequence = dims_maxd;
            if (dims_which == "fat" || dims_which == "strongfat" || dims_which == "natarajan") {
                DimResult res = dims_which == "fat"
                                    ? fat_dim(cls, gamma, dims_k, caps)
                                    : dims_which == "strongfat"
                                          ? strong_fat_dim(cls, gamma, dims_k, caps)
                                          : k_natarajan_dim(cls, dims_k, caps);
                out["dimension"] = res.dimension;
                out["witness"] = witness_json(res.witness);
            } else if (dims_which == "packing") {
                PackingResult res = k_ary_packing(cls, gamma, dims_k, caps);
                out["dimension"] = res.number;
                out["witness"] = Json{{"rows", res.witness.rows}};
            } else if (dims_which == "sandwich") {
                SandwichReport rep = packing_sandwich_check(cls, gamma, dims_k, caps);
                out["packing"] = rep.packing;
                out["strong_dim"] = rep.strong_dim;
                out["fat_dim"] = rep.fat_dim;
                out["upper_bound"] = rep.upper_bound;
                out["lower_bound"] = rep.lower_bound;
                out["pass"] = rep.pass;
                if (!rep.pass) {
                    std::cout << out.dump(2) << "\n";
                    return 1;
                }
            } else {
                std::cerr << "unknown --which: " << dims_which << "\n";
                return 2;
            }
            auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
            out["elapsed"] = elapsed.count();
            std::cout << out.dump(2) << "\n";
        } else if (*oig) {
            HypothesisClass cls = class_from_json(load_json_file(oig_class));
            Rat gamma = Rat::parse(oig_gamma);
            RestrictedClass proj = restrict(cls, parse_seq(oig_seq));
            OneInclusionGraph g = build_oig(proj.cls);
            OrientationResult res = min_max_k_outdeg(
                g, gamma, oig_k, oig_mode == "greedy" ? OrientMode::Greedy : OrientMode::Exact);
            Json out;
            out["vertices"] = static_cast<int>(g.vertices.size());
            out["edges"] = static_cast<int>(g.edges.size());
            out["max_outdeg"] = res.max_outdeg;
            out["optimal"] = res.optimal;
            std::cout << out.dump(2) << "\n";
        } else if (*oigdim) {
            HypothesisClass cls = class_from_json(load_json_file(od_class));
            KoigResult res = koig_dim(cls, Rat::parse(od_gamma), od_k, od_nmax);
            Json out;
            out["dimension"] = res.dimension;
            out["witness_points"] = res.witness_points;
            out["witness_vertices"] = res.witness_vertices;
            out["exact_up_to_n_max"] = res.exact_up_to_n_max;
            out["note"] = res.note;
            std::cout << out.dump(2) << "\n";
        } else if (*train) {
            HypothesisClass cls = class_from_json(load_json_file(tr_class));
            LabeledSample sample = sample_from_json(load_json_file(tr_sample));
            PipelineParams params;
            params.gamma = Rat::parse(tr_gamma);
            params.k = tr_k;
            params.seed = tr_seed;
            params.constant_scale = tr_scale;
            if (tr_m >= 0) params.m_override = tr_m;
            if (tr_l >= 0) params.l_override = tr_l;
            PipelineResult res;
            if (tr_mode == "realizable")
                res = reg_realizable(sample, cls, params);
            else if (tr_mode == "agnostic")
                res = reg_agnostic(sample, cls, params);
            else if (tr_mode == "oig")
                res = realizable_oig_pipeline(sample, cls, params);
            else {
                std::cerr << "unknown --mode: " << tr_mode << "\n";
                return 2;
            }
            save_json_file(tr_hyp_out, hypothesis_to_json(res.hypothesis, tr_k, params.gamma));
            Json rep = res.report;
            rep["record"] = record_to_json(res.record);
            save_json_file(tr_rep_out, rep);
            std::cout << res.report.dump(2) << "\n";
        } else if (*eval) {
            auto hyp = hypothesis_from_json(load_json_file(ev_hyp));
            FiniteDistribution dist = distribution_from_json(load_json_file(ev_dist));
            ListPredictor pred = [&](int x) {
                if (x < 0 || x >= static_cast<int>(hyp.size()))
                    throw std::out_of_range("hypothesis undefined at queried point");
                return hyp[static_cast<std::size_t>(x)];
            };
            Rat err = population_error(pred, dist);
            Json out;
            out["population_error"] = err.str();
            out["population_error_decimal"] = err.to_double();
            std::cout << out.dump(2) << "\n";
        } else if (*run) {
            ExperimentConfig cfg = ExperimentConfig::from_json(load_json_file(run_cfg));
            ExperimentReport rep = run_experiment(cfg);
            save_json_file(run_out, rep.json);
            std::string csv_path = run_out + ".csv";
            {
                std::ofstream out(csv_path);
                out << rep.csv;
            }
            std::cout << "report written to " << run_out << " and " << csv_path << "\n";
        } else if (*verify) {
            auto results = verify_suite(verify_filter);
            bool all = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
                if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
                std::cout << "\n";
                all = all && r.pass;
            }
            std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
            return all ? 0 : 1;
        } else if (*bc) {
            HypothesisClass cls;
            if (bc_name == "example1")
                cls = build_example1(bc_n);
            else if (bc_name == "example2")
                cls = build_example2(bc_n);
            else {
                std::cerr << "unknown class name: " << bc_name << "\n";
                return 2;
            }
            save_json_file(bc_out, class_to_json(cls));
            std::cout << "wrote " << bc_out << " (" << cls.num_rows() << " rows)\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
