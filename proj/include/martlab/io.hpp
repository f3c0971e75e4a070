#ifndef MARTLAB_IO_HPP
#define MARTLAB_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "martlab/ensemble.hpp"
#include "martlab/integrand.hpp"
#include "martlab/limits.hpp"
#include "martlab/stopping.hpp"
#include "martlab/variation.hpp"

// Serialization, deterministic by construction: %.17g floats, LF line ends,
// no timestamps or environment echoes, so identical inputs give identical
// bytes regardless of thread count or locale.
namespace martlab::io {

std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

// header `path,t_0,...,t_{2^n}` + sidecar {model, seed, grid_level,
// n_paths, synthesis_method}
void write_ensemble_csv(const std::string& file, const PathEnsemble& S);
void write_ensemble_sidecar(const std::string& file, const PathEnsemble& S);
PathEnsemble read_ensemble_csv(const std::string& csv_file,
                               const std::string& sidecar_file);

ModelDescriptor model_from_json(const nlohmann::json& j);

// same row layout as ensembles, one column per cell coefficient
void write_integrand_csv(const std::string& file,
                         const ElementaryIntegrand& h);
void write_integrand_sidecar(const std::string& file,
                             const ElementaryIntegrand& h,
                             const std::string& kind);

// `path,index,time`; never-stopping paths print "inf" in both columns
void write_stopping_csv(const std::string& file,
                        const StoppingTimeVector& rho);

// `level,estimate,stderr,oracle,stopped`
void write_mean_variation_csv(const std::string& file,
                              const MeanVariationReport& rep);
void write_mean_variation_json(const std::string& file,
                               const MeanVariationReport& rep);

// ensemble layout with a `component` column; two rows per path
void write_decomposition_csv(const std::string& file, const PathEnsemble& a,
                             const PathEnsemble& b,
                             const std::string& label_a,
                             const std::string& label_b);

// {verdict, levels: [{n, C, stderr}], exponent, fit} / `level,quantity,value,stderr`
void write_probe_json(const std::string& file, const ProbeReport& rep);
void write_probe_csv(const std::string& file, const ProbeReport& rep);

void write_riemann_json(const std::string& file, const RiemannReport& rep);
void write_riemann_csv(const std::string& file, const RiemannReport& rep);

void write_pipeline_json(const std::string& file, const PipelineReport& rep);
void write_pipeline_csv(const std::string& file, const PipelineReport& rep);

void write_mazur_json(const std::string& file, const MazurResult& res);

// machine-readable list of violated postconditions, [{check, detail}]
void write_failures_json(
    const std::string& file,
    const std::vector<std::pair<std::string, std::string>>& failures);

}  // namespace martlab::io

#endif
