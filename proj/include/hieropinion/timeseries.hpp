#ifndef HIEROPINION_TIMESERIES_HPP
#define HIEROPINION_TIMESERIES_HPP

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace hieropinion {

// Per-level statistics recorded over time. Rows are stored row-major,
// one block of `num_levels` entries per recorded time. mean_ns etc. are
// over the non-stubborn agents of the level; mean_all is the whole
// population mean, repeated on every level row.
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> level_h;
    std::vector<double> mean_ns;
    std::vector<double> var_ns;
    std::vector<double> support_ns;
    std::vector<double> mean_all;

    std::size_t num_levels() const { return level_h.size(); }
    std::size_t num_times() const { return times.size(); }

    double& at(std::vector<double>& col, std::size_t t, std::size_t lv) {
        return col[t * num_levels() + lv];
    }
    double at(const std::vector<double>& col, std::size_t t, std::size_t lv) const {
        return col[t * num_levels() + lv];
    }

    void append_row(double t, const std::vector<double>& m_ns,
                    const std::vector<double>& v_ns, const std::vector<double>& s_ns,
                    double m_all) {
        times.push_back(t);
        for (std::size_t i = 0; i < num_levels(); ++i) {
            mean_ns.push_back(m_ns[i]);
            var_ns.push_back(v_ns[i]);
            support_ns.push_back(s_ns[i]);
            mean_all.push_back(m_all);
        }
    }
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_csv(const TimeSeries& ts, std::ostream& os) {
    os << "t,level,h,mean_ns,var_ns,support_ns,mean_all\n";
    for (std::size_t t = 0; t < ts.num_times(); ++t) {
        for (std::size_t lv = 0; lv < ts.num_levels(); ++lv) {
            os << detail::fmt17(ts.times[t]) << ',' << lv << ','
               << detail::fmt17(ts.level_h[lv]) << ','
               << detail::fmt17(ts.at(ts.mean_ns, t, lv)) << ','
               << detail::fmt17(ts.at(ts.var_ns, t, lv)) << ','
               << detail::fmt17(ts.at(ts.support_ns, t, lv)) << ','
               << detail::fmt17(ts.at(ts.mean_all, t, lv)) << '\n';
        }
    }
}

inline TimeSeries read_csv(std::istream& is) {
    TimeSeries ts;
    std::string line;
    if (!std::getline(is, line) || line != "t,level,h,mean_ns,var_ns,support_ns,mean_all")
        throw std::runtime_error("time series CSV: bad header");
    double last_t = 0.0;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double vals[7];
        for (int c = 0; c < 7; ++c) {
            if (!std::getline(row, cell, ','))
                throw std::runtime_error("time series CSV: short row");
            vals[c] = std::strtod(cell.c_str(), nullptr);
        }
        const auto lv = std::size_t(vals[1]);
        if (first || vals[0] != last_t) {
            ts.times.push_back(vals[0]);
            last_t = vals[0];
            first = false;
        }
        if (lv >= ts.level_h.size()) ts.level_h.resize(lv + 1);
        ts.level_h[lv] = vals[2];
        ts.mean_ns.push_back(vals[3]);
        ts.var_ns.push_back(vals[4]);
        ts.support_ns.push_back(vals[5]);
        ts.mean_all.push_back(vals[6]);
    }
    return ts;
}

inline nlohmann::json to_json(const TimeSeries& ts) {
    return nlohmann::json{{"times", ts.times},       {"level_h", ts.level_h},
                          {"mean_ns", ts.mean_ns},   {"var_ns", ts.var_ns},
                          {"support_ns", ts.support_ns}, {"mean_all", ts.mean_all}};
}

inline TimeSeries timeseries_from_json(const nlohmann::json& j) {
    TimeSeries ts;
    j.at("times").get_to(ts.times);
    j.at("level_h").get_to(ts.level_h);
    j.at("mean_ns").get_to(ts.mean_ns);
    j.at("var_ns").get_to(ts.var_ns);
    j.at("support_ns").get_to(ts.support_ns);
    j.at("mean_all").get_to(ts.mean_all);
    return ts;
}

// Pointwise average of several runs recorded on an identical schedule.
inline TimeSeries ensemble_mean(const std::vector<TimeSeries>& runs) {
    if (runs.empty()) throw std::invalid_argument("ensemble_mean: no runs");
    TimeSeries out = runs.front();
    for (std::size_t r = 1; r < runs.size(); ++r) {
        const TimeSeries& ts = runs[r];
        if (ts.times != out.times || ts.level_h != out.level_h)
            throw std::invalid_argument("ensemble_mean: mismatched schedules");
        for (std::size_t k = 0; k < out.mean_ns.size(); ++k) {
            out.mean_ns[k] += ts.mean_ns[k];
            out.var_ns[k] += ts.var_ns[k];
            out.support_ns[k] += ts.support_ns[k];
            out.mean_all[k] += ts.mean_all[k];
        }
    }
    const double inv = 1.0 / double(runs.size());
    for (std::size_t k = 0; k < out.mean_ns.size(); ++k) {
        out.mean_ns[k] *= inv;
        out.var_ns[k] *= inv;
        out.support_ns[k] *= inv;
        out.mean_all[k] *= inv;
    }
    return out;
}

} // namespace hieropinion

#endif
