#ifndef SRDA_CONFIG_HPP
#define SRDA_CONFIG_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "srda/train.hpp"

namespace srda {

/// A full experiment description parsed from an INI-style config file
/// ([section] headers, key = value lines, '#' comments). Unknown sections or
/// keys are rejected; parse errors cite file and line number.
struct RunSpec {
    // [data]
    std::string data_kind = "two-moons"; // two-moons | blobs | csv | idx
    std::size_t data_n = 400;            // per-domain count for synthetic kinds
    std::size_t blob_classes = 3;
    double noise_sd = 0.1;
    double rotate_deg = 30.0;
    std::vector<double> translate;       // empty = no offset
    std::string source_path;             // csv kind
    std::string target_path;
    std::string source_images, source_labels; // idx kind
    std::string target_images, target_labels;
    std::size_t n_source = 0;            // idx subsample, 0 = all
    std::size_t n_target = 0;
    bool standardize = true;
    std::uint64_t data_seed = 0;         // 0 = derived from train.seed

    // [model]
    std::vector<std::size_t> generator_widths = {2, 32, 32, 16};
    std::vector<std::size_t> classifier_widths = {16, 2};

    // [train]
    TrainConfig train;
    bool entropy_enabled = false; // entropy_weight defaults to 0.05 when set

    // [output]
    std::string out_dir = "out";
    std::size_t checkpoint_every = 0; // epochs between checkpoints, 0 = final only

    void validate() const;

    /// TrainConfig with the entropy switch folded into entropy_weight and
    /// learning rates resolved.
    TrainConfig resolved_train_config() const;
};

RunSpec parse_run_spec(std::istream& in, const std::string& filename);
RunSpec parse_run_spec_file(const std::string& path);

/// Echo of the fully resolved spec, itself parseable as a config file.
void write_run_spec(const RunSpec& spec, std::ostream& out);

/// Loads the source and target datasets described by the [data] section
/// (generation, file ingestion, subsampling, standardization on source
/// statistics).
struct DomainPair {
    Dataset source;
    Dataset target;
};
DomainPair load_domains(const RunSpec& spec);

} // namespace srda

#endif
