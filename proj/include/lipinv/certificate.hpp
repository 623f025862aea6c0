/**
 * Verdict-bearing result records. A Certificate says what was checked, how
 * far the claim reaches (horizon), and on what evidence; Negative verdicts
 * carry explicit witnesses inside `evidence`. The coarse verdict is refined
 * by a label (for instance "positive_to_horizon" or "negative_signal") that
 * downstream reports and corpus expectations match against.
 */

#ifndef LIPINV_CERTIFICATE_HPP
#define LIPINV_CERTIFICATE_HPP

#include <json.hpp>

#include "core.hpp"

namespace lipinv {

using Json = nlohmann::ordered_json;

enum class Verdict { Positive, Negative, Heuristic, Inconclusive };

inline const char* verdict_name(Verdict v)
{
    switch (v) {
        case Verdict::Positive: return "positive";
        case Verdict::Negative: return "negative";
        case Verdict::Heuristic: return "heuristic";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

struct Certificate {
    std::string criterion;
    Verdict verdict = Verdict::Inconclusive;
    std::string label;     // refined taxonomy; defaults to the coarse name
    double horizon = 0.0;  // radius / largest scale the claim covers; +inf = global
    Json evidence = Json::object();
    std::vector<std::string> notes;

    static Certificate make(std::string criterion, Verdict verdict, std::string label = "")
    {
        Certificate c;
        c.criterion = std::move(criterion);
        c.verdict = verdict;
        c.label = label.empty() ? verdict_name(verdict) : std::move(label);
        return c;
    }

    Certificate& note(std::string text)
    {
        notes.push_back(std::move(text));
        return *this;
    }

    bool positive() const { return verdict == Verdict::Positive; }

    Json to_json() const
    {
        Json j = Json::object();
        j["criterion"] = criterion;
        j["verdict"] = verdict_name(verdict);
        j["label"] = label;
        if (std::isfinite(horizon))
            j["horizon"] = horizon;
        else
            j["horizon"] = "inf";
        j["evidence"] = evidence;
        j["notes"] = notes;
        return j;
    }
};

/** Vector serialization helpers for evidence payloads. */
inline Json json_vec(const Vec& v)
{
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Json json_mat(const Mat& m)
{
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

/**
 * Radial profile of a pointwise quantity: values[i] is the running infimum
 * over the closed ball of radius radii[i] around `center`. Values are exact
 * for piecewise-affine maps (face enumeration) and sampled upper bounds for
 * black-box maps.
 */
struct RadialProfile {
    enum class Kind { CoNorm, SpectralPowerN };

    Kind kind = Kind::CoNorm;
    Vec center;
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<int> sample_counts;
    double horizon = kInfinity;  // largest admissible radius around the center
    Json witnesses = Json::array();

    const char* kind_name() const { return kind == Kind::CoNorm ? "conorm" : "spectral_power_n"; }

    Json to_json() const
    {
        Json j = Json::object();
        j["kind"] = kind_name();
        j["center"] = json_vec(center);
        j["radii"] = radii;
        j["values"] = values;
        j["sample_counts"] = sample_counts;
        if (std::isfinite(horizon))
            j["horizon"] = horizon;
        else
            j["horizon"] = "inf";
        j["witnesses"] = witnesses;
        return j;
    }
};

/** Finite prefix of a disc family D(t_k, r_k) with centers tending to 0. */
struct DiscSpec {
    std::vector<double> centers;
    std::vector<double> radii;
    /** True for prefixes produced by a generating rule whose limit is 0. */
    bool rule_limit_zero = false;
    std::string rule = "";

    static DiscSpec harmonic(int count, double radius)
    {
        require(count >= 1, ErrorKind::InvalidArgument, "disc prefix needs at least one disc");
        DiscSpec d;
        for (int k = 1; k <= count; ++k) {
            d.centers.push_back(1.0 / static_cast<double>(k));
            d.radii.push_back(radius);
        }
        d.rule_limit_zero = true;
        d.rule = "harmonic";
        return d;
    }

    static DiscSpec dyadic(int count)
    {
        require(count >= 1, ErrorKind::InvalidArgument, "disc prefix needs at least one disc");
        DiscSpec d;
        for (int k = 1; k <= count; ++k) {
            d.centers.push_back(std::pow(2.0, -k));
            d.radii.push_back(std::pow(2.0, -k - 1));
        }
        d.rule_limit_zero = true;
        d.rule = "dyadic";
        return d;
    }

    static DiscSpec from_lists(std::vector<double> centers, std::vector<double> radii)
    {
        DiscSpec d;
        d.centers = std::move(centers);
        d.radii = std::move(radii);
        d.validate();
        return d;
    }

    void validate() const
    {
        require(!centers.empty(), ErrorKind::ValidationError, "disc prefix is empty");
        require(centers.size() == radii.size(), ErrorKind::ValidationError, "disc centers and radii differ in length");
        for (std::size_t k = 0; k < centers.size(); ++k) {
            require(radii[k] > 0.0, ErrorKind::ValidationError, "disc radii must be positive");
            if (k > 0)
                require(std::abs(centers[k]) <= std::abs(centers[k - 1]) + 1e-15, ErrorKind::ValidationError,
                        "disc centers must be nonincreasing in magnitude");
        }
    }

    Json to_json() const
    {
        Json j = Json::object();
        j["centers"] = centers;
        j["radii"] = radii;
        j["rule"] = rule.empty() ? "explicit" : rule;
        j["rule_limit_zero"] = rule_limit_zero;
        return j;
    }
};

}  // namespace lipinv

#endif  // LIPINV_CERTIFICATE_HPP
