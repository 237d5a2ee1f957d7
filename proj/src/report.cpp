#include "nonconv/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nonconv {

namespace {

using ordered_json = nlohmann::ordered_json;

char verdict_char(LayerVerdict v) {
    switch (v) {
    case LayerVerdict::CertifiedInactive: return 'D'; // dead
    case LayerVerdict::CertifiedActive: return 'A';
    case LayerVerdict::Unknown: return 'U';
    }
    return '?';
}

std::string verdict_string(const std::vector<LayerVerdict>& vs) {
    std::string s;
    for (LayerVerdict v : vs) s.push_back(verdict_char(v));
    return s;
}

double plot_x(double t, double t_max, double w) {
    return 60.0 + (t_max > 0 ? t / t_max : 0.0) * (w - 80.0);
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    ordered_json j = v;
    return j.dump();
}

std::string trials_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream os;
    os << "trial,seed,method,first_dead_layer,dead_verdicts,frozen_prefix_ok,"
          "downstream_moved,risk_init,risk_final,final_gap,nonconvergent\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TrialRecord& r = records[i];
        os << i << ',' << r.seed << ',' << method_name(r.method) << ','
           << r.first_dead_layer << ',' << verdict_string(r.dead_at_init) << ','
           << (r.frozen_prefix_ok ? 1 : 0) << ',' << (r.downstream_moved ? 1 : 0) << ','
           << format_double(r.risk_trace.front()) << ','
           << format_double(r.risk_trace.back()) << ',' << format_double(r.final_gap)
           << ',' << (r.nonconvergent ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string sweep_csv(const std::vector<DepthSweepRow>& rows) {
    std::ostringstream os;
    os << "depth,analytic_bound,witness_freq,certified_freq,nonconv_freq,trained,ci3,"
          "n_trials\n";
    for (const DepthSweepRow& r : rows)
        os << r.depth << ',' << format_double(r.analytic_bound) << ','
           << format_double(r.witness_freq) << ',' << format_double(r.certified_freq)
           << ',' << format_double(r.nonconv_freq) << ',' << (r.trained ? 1 : 0) << ','
           << format_double(r.ci3) << ',' << r.n_trials << '\n';
    return os.str();
}

std::string bound_report_json(const BoundReport& rep, const Architecture& arch,
                              const std::string& activation,
                              const std::string& distribution,
                              const BoundInputs& in) {
    ordered_json j;
    j["schema"] = "nonconv.bound/1";
    j["arch"] = arch.widths();
    j["activation"] = activation;
    j["distribution"] = distribution;
    j["window"] = {in.window_lo, in.window_hi};
    j["gamma"] = in.gamma;
    j["layer1_bound"] = rep.layer1;
    j["deep_bound"] = rep.deep;
    j["combined_bound"] = rep.combined;
    j["deep_applicable"] = rep.deep_applicable;
    j["diagnostic"] = rep.diagnostic;
    return j.dump(2) + "\n";
}

std::string frequency_json(const FrequencyResult& res, const std::string& label) {
    ordered_json j;
    j["schema"] = "nonconv.frequency/1";
    j["label"] = label;
    j["n_trials"] = res.n_trials;
    j["nonconvergence_freq"] = res.freq;
    j["ci3"] = res.ci3;
    j["dead_at_init_freq"] = res.dead_at_init_freq;
    j["analytic_bound"] = res.analytic_bound;
    j["layer1_bound"] = res.layer1_bound;
    j["deep_bound"] = res.deep_bound;
    j["hypothesis_ok"] = res.hypothesis_ok;
    j["satisfied"] = res.freq >= res.analytic_bound - res.ci3;
    return j.dump(2) + "\n";
}

std::string sweep_json(const std::vector<DepthSweepRow>& rows,
                       const DepthSweepBoundResult* analytic) {
    ordered_json j;
    j["schema"] = "nonconv.sweep/1";
    j["rows"] = ordered_json::array();
    for (const DepthSweepRow& r : rows) {
        ordered_json row;
        row["depth"] = r.depth;
        row["analytic_bound"] = r.analytic_bound;
        row["witness_freq"] = r.witness_freq;
        row["certified_freq"] = r.certified_freq;
        row["nonconv_freq"] = r.nonconv_freq;
        row["trained"] = r.trained;
        row["ci3"] = r.ci3;
        row["n_trials"] = r.n_trials;
        j["rows"].push_back(row);
    }
    if (analytic) {
        j["asymptotic"] = ordered_json::object();
        j["asymptotic"]["q"] = analytic->q;
        j["asymptotic"]["hypothesis_diverging"] = analytic->hypothesis_diverging;
        ordered_json rows_j = ordered_json::array();
        for (const DepthBoundRow& r : analytic->rows) {
            ordered_json row;
            row["depth"] = r.depth;
            row["bound"] = r.bound;
            row["hypothesis_value"] = r.hypothesis_value;
            rows_j.push_back(row);
        }
        j["asymptotic"]["rows"] = rows_j;
    }
    return j.dump(2) + "\n";
}

std::string mc_init_csv(const std::vector<std::string>& layer_labels,
                        const std::vector<double>& freqs,
                        const std::vector<double>& bounds) {
    std::ostringstream os;
    os << "layer,empirical_freq,analytic_bound\n";
    for (std::size_t i = 0; i < layer_labels.size(); ++i)
        os << layer_labels[i] << ',' << format_double(freqs[i]) << ','
           << format_double(bounds[i]) << '\n';
    return os.str();
}

std::string risk_traces_svg(const std::vector<TrialRecord>& records,
                            std::size_t max_traces) {
    const double W = 640, H = 400;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
       << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    double t_max = 1.0, r_max = 0.0;
    for (const TrialRecord& r : records) {
        if (!r.logged_steps.empty())
            t_max = std::max(t_max, static_cast<double>(r.logged_steps.back()));
        for (double v : r.risk_trace) r_max = std::max(r_max, v);
    }
    if (r_max <= 0.0) r_max = 1.0;

    auto py = [&](double v) { return H - 40.0 - v / r_max * (H - 80.0); };
    os << "<line x1=\"60\" y1=\"" << fixed4(H - 40) << "\" x2=\"" << fixed4(W - 20)
       << "\" y2=\"" << fixed4(H - 40) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"60\" y1=\"40\" x2=\"60\" y2=\"" << fixed4(H - 40)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"10\" y=\"30\" font-size=\"12\">risk (max " << format_double(r_max)
       << ")</text>\n";

    const std::size_t n = std::min(records.size(), max_traces);
    for (std::size_t i = 0; i < n; ++i) {
        const TrialRecord& r = records[i];
        os << "<polyline fill=\"none\" stroke=\"hsl(" << (i * 47) % 360
           << ",60%,40%)\" stroke-width=\"1\" points=\"";
        for (std::size_t s = 0; s < r.logged_steps.size(); ++s) {
            os << fixed4(plot_x(static_cast<double>(r.logged_steps[s]), t_max, W)) << ','
               << fixed4(py(r.risk_trace[s]));
            if (s + 1 < r.logged_steps.size()) os << ' ';
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string sweep_svg(const std::vector<DepthSweepRow>& rows) {
    const double W = 640, H = 400;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
       << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    double d_max = 1.0;
    for (const DepthSweepRow& r : rows)
        d_max = std::max(d_max, static_cast<double>(r.depth));
    auto py = [&](double v) { return H - 40.0 - v * (H - 80.0); };
    os << "<line x1=\"60\" y1=\"" << fixed4(H - 40) << "\" x2=\"" << fixed4(W - 20)
       << "\" y2=\"" << fixed4(H - 40) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"60\" y1=\"40\" x2=\"60\" y2=\"" << fixed4(H - 40)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"10\" y=\"30\" font-size=\"12\">dead / nonconv frequency vs depth"
          "</text>\n";

    auto polyline = [&](const char* color, auto getter) {
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            os << fixed4(plot_x(static_cast<double>(rows[i].depth), d_max, W)) << ','
               << fixed4(py(getter(rows[i])));
            if (i + 1 < rows.size()) os << ' ';
        }
        os << "\"/>\n";
    };
    polyline("steelblue", [](const DepthSweepRow& r) { return r.witness_freq; });
    polyline("crimson", [](const DepthSweepRow& r) { return r.analytic_bound; });
    polyline("seagreen", [](const DepthSweepRow& r) { return r.nonconv_freq; });
    os << "</svg>\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

} // namespace nonconv
