#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "biq2/biq2.hpp"

namespace {

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << text;
}

std::string render(const biq2::VerificationReport& rep, const std::string& format) {
    if (format == "json") return biq2::to_json(rep).dump(2) + "\n";
    return biq2::to_csv(rep);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-class groups and 2-Iwasawa ranks of real biquadratic fields"};
    app.require_subcommand(1);

    int case_id = 1;
    biq2::u64 bound = 0;
    std::string format = "json", out_path, in_path, family = "cyclic";
    int workers = 1;
    biq2::u64 disc_cap = 1000000;
    bool with_structure = false;

    auto add_common = [&](CLI::App* c, bool with_case) {
        if (with_case) c->add_option("--case", case_id, "theorem case id (1..29)")->required();
        c->add_option("--bound", bound, "prime bound (default 300 two-prime, 100 three-prime)");
        c->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
        c->add_option("--out", out_path, "output path (default stdout)");
        c->add_option("--workers", workers, "worker threads");
        c->add_option("--disc-cap", disc_cap, "form-enumeration discriminant cap");
    };

    auto* search = app.add_subcommand("search", "prime tuples matching a theorem case");
    add_common(search, true);
    auto* verify = app.add_subcommand("verify", "rank verification campaign for a case");
    add_common(verify, true);
    verify->add_flag("--with-structure", with_structure, "also compute A(K_infty) structure");
    auto* structure = app.add_subcommand("structure", "Iwasawa-module structure families");
    add_common(structure, false);
    structure->add_option("--family", family, "family")->check(CLI::IsMember({"cyclic", "two_by"}));
    auto* report = app.add_subcommand("report", "re-serialize a saved JSON report");
    report->add_option("--in", in_path, "input JSON report")->required();
    report->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
    report->add_option("--out", out_path, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);
    biq2::set_disc_cap(disc_cap);

    try {
        if (search->parsed() || verify->parsed()) {
            const biq2::theorem::Item* item = nullptr;
            for (auto& it : biq2::theorem::items())
                if (it.id == case_id) item = &it;
            if (!item) throw std::runtime_error("unknown case id");
            if (bound == 0) bound = item->nprimes >= 3 ? 100 : 300;
        }
        if (search->parsed()) {
            auto tuples = biq2::cli_search(case_id, bound);
            if (format == "json") {
                biq2::ordered_json j = biq2::ordered_json::array();
                for (auto& tp : tuples)
                    j.push_back({{"case_id", tp.case_id}, {"cond", tp.cond}, {"q", tp.q},
                                 {"q1", tp.q1}, {"q2", tp.q2}, {"r", tp.r}, {"s", tp.s},
                                 {"t", tp.t}, {"delta", tp.delta}});
                write_out(out_path, j.dump(2) + "\n");
            } else {
                std::ostringstream os;
                os << "case_id,cond,q,q1,q2,r,s,t,delta\n";
                for (auto& tp : tuples)
                    os << tp.case_id << ',' << tp.cond << ',' << tp.q << ',' << tp.q1 << ','
                       << tp.q2 << ',' << tp.r << ',' << tp.s << ',' << tp.t << ',' << tp.delta
                       << '\n';
                write_out(out_path, os.str());
            }
        } else if (verify->parsed()) {
            auto rep = biq2::cli_verify(case_id, bound, workers, with_structure);
            write_out(out_path, render(rep, format));
            std::cerr << "case " << case_id << ": " << rep.rows.size() << " tuples, "
                      << rep.agreed << " agree, " << rep.disagreed << " disagree, " << rep.errors
                      << " errors\n";
            if (rep.disagreed || rep.errors) return 2;
        } else if (structure->parsed()) {
            if (bound == 0) bound = 100;
            auto rows = biq2::structure_campaign(family, bound);
            biq2::ordered_json j = biq2::ordered_json::array();
            int bad = 0;
            for (auto& r : rows) {
                biq2::ordered_json row{{"q", r.q}, {"r", r.r}, {"s", r.s},
                                       {"family", r.family}, {"group", r.group},
                                       {"m", r.m},       {"nu", r.nu},
                                       {"h2_K", r.h2_K}, {"h2_K1", r.h2_K1},
                                       {"agree", r.agree}};
                if (!r.error.empty()) row["error"] = r.error;
                if (!r.agree) ++bad;
                j.push_back(row);
            }
            write_out(out_path, j.dump(2) + "\n");
            std::cerr << family << ": " << rows.size() << " tuples, " << bad << " anomalies\n";
            if (bad) return 2;
        } else if (report->parsed()) {
            std::ifstream is(in_path);
            if (!is) throw std::runtime_error("cannot open " + in_path);
            biq2::ordered_json j;
            is >> j;
            auto rep = biq2::report_from_json(j);
            write_out(out_path, render(rep, format));
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
