#ifndef SRDA_DATA_HPP
#define SRDA_DATA_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "srda/matrix.hpp"
#include "srda/rng.hpp"

namespace srda {

/// A named collection of row samples, optionally labeled.
struct Dataset {
    Matrix features;                          // n x d
    std::optional<std::vector<int>> labels;   // class indices in [0, K)
    std::string name;
    int num_classes = 0;                      // 0 when unlabeled

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
    bool labeled() const { return labels.has_value(); }
    void validate() const;
};

/// Two interleaving unit semicircles with Gaussian jitter:
/// class 0 at (cos t, sin t), class 1 at (1 - cos t, -sin t + 0.5),
/// t uniform in [0, pi]. Labels are balanced (within 1 when n is odd).
Dataset gen_two_moons(std::size_t n, double noise_sd, Rng& rng);

/// k Gaussian blobs with means on a circle of radius 3, balanced labels.
Dataset gen_blobs(std::size_t n, std::size_t k, double noise_sd, Rng& rng);

/// Rotates 2-d features by theta degrees about the dataset centroid.
Dataset rotate_domain(const Dataset& ds, double theta_degrees);

/// Adds a fixed offset to every sample.
Dataset translate_domain(const Dataset& ds, const std::vector<double>& offset);

/// Seeded random subset. Labeled data is class-stratified: kept per-class
/// counts differ by at most 1 where the input allows it.
Dataset subsample(const Dataset& ds, std::size_t n_keep, Rng& rng);

/// (x - mean) / sd per feature, with mean/sd estimated on fit (population
/// sd, clamped at 1e-8) and applied unchanged to apply.
Dataset standardize(const Dataset& fit, const Dataset& apply);

// --- IDX format ------------------------------------------------------------
// Big-endian magic (0x00000801: 1-D unsigned-byte labels, 0x00000803: 3-D
// unsigned-byte images), one big-endian u32 size per dimension, raw payload.
// Images are flattened row-major to n x (rows*cols) and scaled to [0,1].

std::variant<Matrix, std::vector<int>> parse_idx(const std::vector<unsigned char>& bytes);
Matrix parse_idx_images(const std::vector<unsigned char>& bytes);
std::vector<int> parse_idx_labels(const std::vector<unsigned char>& bytes);

/// Inverse of parse_idx for round-trips and fixture generation. Image values
/// must already lie on the k/255 grid.
std::vector<unsigned char> write_idx_images(const Matrix& images, std::size_t img_rows,
                                            std::size_t img_cols);
std::vector<unsigned char> write_idx_labels(const std::vector<int>& labels);

/// Loads an image IDX file plus an optional label IDX file.
Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path,
                         const std::string& name);

// --- CSV -------------------------------------------------------------------
// Header "label,f0,f1,...", one row per sample, label -1 when unlabeled.

void write_dataset_csv(const Dataset& ds, std::ostream& out);
void write_dataset_csv_file(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(std::istream& in, const std::string& name);
Dataset read_dataset_csv_file(const std::string& path);

// --- Batching ---------------------------------------------------------------

/// Seeded minibatch index stream. Indices come from per-epoch permutations
/// (epoch e uses the child stream of the base rng tagged e), so every block
/// of n consecutive draws visits each index exactly once. Batches keep their
/// full size across permutation boundaries; the stream cycles forever.
class BatchStream {
public:
    BatchStream(std::size_t n, std::size_t batch_size, Rng rng);

    std::vector<std::size_t> next_batch();
    std::size_t dataset_size() const { return n_; }
    std::size_t batch_size() const { return batch_size_; }

private:
    void refill();

    std::size_t n_;
    std::size_t batch_size_;
    Rng base_rng_;
    std::uint64_t pass_ = 0;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

} // namespace srda

#endif
