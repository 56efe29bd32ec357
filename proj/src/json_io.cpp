#include "bmclab/json_io.hpp"

#include "bmclab/errors.hpp"

#include <fstream>

namespace bmclab {

namespace {

Site site_from_json(const nlohmann::json& j, int dimension) {
    if (!j.is_array() || static_cast<int>(j.size()) != dimension)
        throw ConfigError("step vectors must be arrays of length `dimension`");
    Site s;
    for (const auto& c : j) {
        if (!c.is_number_integer())
            throw ConfigError("step coordinates must be integers");
        s.push_back(c.get<std::int64_t>());
    }
    return s;
}

} // namespace

EnvironmentSpec spec_from_json(const nlohmann::json& doc) {
    try {
        EnvironmentSpec spec;
        spec.generator.dimension = doc.at("dimension").get<int>();
        for (const auto& step : doc.at("steps"))
            spec.generator.steps.push_back(site_from_json(step, spec.generator.dimension));
        for (const auto& gen : doc.at("gen_subset")) {
            auto s = site_from_json(gen, spec.generator.dimension);
            auto idx = spec.generator.find_step(s);
            if (idx == GeneratorSet::npos)
                throw ConfigError("gen_subset entry " + format_site(s) +
                                  " is not a declared step");
            spec.generator.gen_subset.push_back(idx);
        }
        spec.epsilon = doc.at("epsilon").get<double>();

        const std::size_t nsteps = spec.generator.steps.size();
        for (const auto& law_doc : doc.at("palette")) {
            std::vector<SiteLaw::Atom> atoms;
            for (const auto& atom_doc : law_doc.at("atoms")) {
                SiteLaw::Atom atom;
                const auto& counts = atom_doc.at("counts");
                if (!counts.is_array() || counts.size() != nsteps)
                    throw ConfigError("atom counts must be arrays matching `steps`");
                for (const auto& c : counts) {
                    if (!c.is_number_integer() || c.get<std::int64_t>() < 0)
                        throw ConfigError("offspring counts must be nonnegative integers");
                    atom.offspring.counts.push_back(c.get<std::uint32_t>());
                }
                atom.prob = atom_doc.at("prob").get<double>();
                atoms.push_back(std::move(atom));
            }
            spec.palette.push_back(SiteLaw::from_atoms(std::move(atoms), nsteps));
        }
        for (const auto& w : doc.at("weights"))
            spec.weights.push_back(w.get<double>());

        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed environment spec: ") + e.what());
    }
}

EnvironmentSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return spec_from_json(doc);
}

nlohmann::json spec_to_json(const EnvironmentSpec& spec) {
    nlohmann::json doc;
    doc["dimension"] = spec.generator.dimension;
    doc["steps"] = spec.generator.steps;
    nlohmann::json gens = nlohmann::json::array();
    for (auto idx : spec.generator.gen_subset) gens.push_back(spec.generator.steps[idx]);
    doc["gen_subset"] = gens;
    doc["epsilon"] = spec.epsilon;
    nlohmann::json palette = nlohmann::json::array();
    for (const auto& law : spec.palette) {
        nlohmann::json atoms = nlohmann::json::array();
        for (const auto& atom : law.atoms())
            atoms.push_back({{"counts", atom.offspring.counts}, {"prob", atom.prob}});
        palette.push_back({{"atoms", atoms}});
    }
    doc["palette"] = palette;
    doc["weights"] = spec.weights;
    return doc;
}

nlohmann::json report_to_json(const CriterionReport& report) {
    return {
        {"c", report.c},
        {"theta_star", report.theta_star},
        {"active_laws", report.active_laws},
        {"verdict", to_string(report.verdict)},
        {"boundary_flag", report.boundary_flag},
    };
}

} // namespace bmclab
