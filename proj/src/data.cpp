#include "srda/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace srda {

void Dataset::validate() const {
    if (size() == 0) throw InvalidInput("dataset: need at least one sample");
    if (!features.all_finite()) throw InvalidInput("dataset: non-finite feature values");
    if (labels) {
        if (labels->size() != size())
            throw ShapeError("dataset: label count != sample count");
        for (int y : *labels) {
            if (y < 0 || y >= num_classes)
                throw InvalidLabel("dataset: label out of range");
        }
    }
}

Dataset gen_two_moons(std::size_t n, double noise_sd, Rng& rng) {
    if (n < 2) throw InvalidInput("gen_two_moons: need n >= 2");
    const std::size_t n0 = (n + 1) / 2;
    Dataset ds;
    ds.features = Matrix(n, 2);
    ds.labels = std::vector<int>(n);
    ds.num_classes = 2;
    ds.name = "two-moons";
    for (std::size_t i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, std::numbers::pi);
        double x, y;
        if (i < n0) {
            x = std::cos(t);
            y = std::sin(t);
            (*ds.labels)[i] = 0;
        } else {
            x = 1.0 - std::cos(t);
            y = -std::sin(t) + 0.5;
            (*ds.labels)[i] = 1;
        }
        ds.features.at(i, 0) = x + noise_sd * rng.normal();
        ds.features.at(i, 1) = y + noise_sd * rng.normal();
    }
    return ds;
}

Dataset gen_blobs(std::size_t n, std::size_t k, double noise_sd, Rng& rng) {
    if (n < k || k < 2) throw InvalidInput("gen_blobs: need n >= k >= 2");
    Dataset ds;
    ds.features = Matrix(n, 2);
    ds.labels = std::vector<int>(n);
    ds.num_classes = static_cast<int>(k);
    ds.name = "blobs";
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % k; // balanced within 1
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) /
                             static_cast<double>(k);
        ds.features.at(i, 0) = 3.0 * std::cos(angle) + noise_sd * rng.normal();
        ds.features.at(i, 1) = 3.0 * std::sin(angle) + noise_sd * rng.normal();
        (*ds.labels)[i] = static_cast<int>(c);
    }
    return ds;
}

Dataset rotate_domain(const Dataset& ds, double theta_degrees) {
    if (ds.dim() != 2) throw NonPlanarData("rotate_domain: only 2-d data can be rotated");
    const double theta = theta_degrees * std::numbers::pi / 180.0;
    const double c = std::cos(theta), s = std::sin(theta);
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        cx += ds.features.at(i, 0);
        cy += ds.features.at(i, 1);
    }
    cx /= static_cast<double>(ds.size());
    cy /= static_cast<double>(ds.size());
    Dataset out = ds;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double x = ds.features.at(i, 0) - cx;
        const double y = ds.features.at(i, 1) - cy;
        out.features.at(i, 0) = cx + c * x - s * y;
        out.features.at(i, 1) = cy + s * x + c * y;
    }
    return out;
}

Dataset translate_domain(const Dataset& ds, const std::vector<double>& offset) {
    if (offset.size() != ds.dim()) throw ShapeError("translate_domain: offset dim mismatch");
    Dataset out = ds;
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t c = 0; c < ds.dim(); ++c) out.features.at(i, c) += offset[c];
    return out;
}

Dataset subsample(const Dataset& ds, std::size_t n_keep, Rng& rng) {
    if (n_keep == 0 || n_keep > ds.size())
        throw InvalidCount("subsample: n_keep must be in [1, n]");
    std::vector<std::size_t> chosen;
    chosen.reserve(n_keep);
    if (ds.labeled()) {
        // Class-stratified: shuffle within each class, then deal round-robin.
        std::vector<std::vector<std::size_t>> per_class(static_cast<std::size_t>(ds.num_classes));
        for (std::size_t i = 0; i < ds.size(); ++i)
            per_class[static_cast<std::size_t>((*ds.labels)[i])].push_back(i);
        for (auto& group : per_class) rng.shuffle(group);
        std::size_t round = 0;
        while (chosen.size() < n_keep) {
            bool any = false;
            for (auto& group : per_class) {
                if (round < group.size() && chosen.size() < n_keep) {
                    chosen.push_back(group[round]);
                    any = true;
                }
            }
            if (!any) break; // all classes exhausted
            ++round;
        }
    } else {
        std::vector<std::size_t> order(ds.size());
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_keep));
    }
    Dataset out;
    out.name = ds.name;
    out.num_classes = ds.num_classes;
    out.features = ds.features.gather_rows(chosen);
    if (ds.labeled()) {
        out.labels = std::vector<int>();
        out.labels->reserve(chosen.size());
        for (std::size_t i : chosen) out.labels->push_back((*ds.labels)[i]);
    }
    return out;
}

Dataset standardize(const Dataset& fit, const Dataset& apply) {
    if (fit.dim() != apply.dim()) throw ShapeError("standardize: dim mismatch");
    const std::size_t d = fit.dim();
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (std::size_t i = 0; i < fit.size(); ++i)
        for (std::size_t c = 0; c < d; ++c) mean[c] += fit.features.at(i, c);
    for (std::size_t c = 0; c < d; ++c) mean[c] /= static_cast<double>(fit.size());
    for (std::size_t i = 0; i < fit.size(); ++i)
        for (std::size_t c = 0; c < d; ++c) {
            const double dv = fit.features.at(i, c) - mean[c];
            sd[c] += dv * dv;
        }
    for (std::size_t c = 0; c < d; ++c)
        sd[c] = std::max(std::sqrt(sd[c] / static_cast<double>(fit.size())), 1e-8);
    Dataset out = apply;
    for (std::size_t i = 0; i < apply.size(); ++i)
        for (std::size_t c = 0; c < d; ++c)
            out.features.at(i, c) = (apply.features.at(i, c) - mean[c]) / sd[c];
    return out;
}

// --- IDX ---------------------------------------------------------------------

namespace {

std::uint32_t read_be_u32(const std::vector<unsigned char>& b, std::size_t pos) {
    if (pos + 4 > b.size()) throw TruncatedPayload("idx: truncated header");
    return (static_cast<std::uint32_t>(b[pos]) << 24) |
           (static_cast<std::uint32_t>(b[pos + 1]) << 16) |
           (static_cast<std::uint32_t>(b[pos + 2]) << 8) |
           static_cast<std::uint32_t>(b[pos + 3]);
}

void put_be_u32(std::vector<unsigned char>& b, std::uint32_t v) {
    b.push_back(static_cast<unsigned char>(v >> 24));
    b.push_back(static_cast<unsigned char>(v >> 16));
    b.push_back(static_cast<unsigned char>(v >> 8));
    b.push_back(static_cast<unsigned char>(v));
}

// Valid magics are 0x0000TTDD with type TT = 0x08 and dims DD in {1, 3}.
// Anything whose zero bytes or dimension count is off is BadMagic; a
// recognized layout with a non-ubyte element code is UnsupportedType.
unsigned check_idx_magic(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 4) throw BadMagic("idx: file shorter than the magic");
    if (bytes[0] != 0 || bytes[1] != 0) throw BadMagic("idx: bad magic");
    const unsigned dims = bytes[3];
    if (dims != 1 && dims != 3) throw BadMagic("idx: bad magic (dimension count)");
    if (bytes[2] != 0x08) throw UnsupportedType("idx: only unsigned-byte payloads supported");
    return dims;
}

} // namespace

std::variant<Matrix, std::vector<int>> parse_idx(const std::vector<unsigned char>& bytes) {
    if (check_idx_magic(bytes) == 1) return parse_idx_labels(bytes);
    return parse_idx_images(bytes);
}

Matrix parse_idx_images(const std::vector<unsigned char>& bytes) {
    if (check_idx_magic(bytes) != 3) throw BadMagic("idx: expected a 3-D image file");
    const std::size_t n = read_be_u32(bytes, 4);
    const std::size_t rows = read_be_u32(bytes, 8);
    const std::size_t cols = read_be_u32(bytes, 12);
    if (bytes.size() < 16) throw TruncatedPayload("idx: truncated header");
    // division-based size checks so hostile headers cannot wrap n*rows*cols
    const std::size_t payload = bytes.size() - 16;
    if (rows == 0 || cols == 0 || cols > payload || rows > payload / cols)
        throw TruncatedPayload("idx: declared image count does not match payload size");
    const std::size_t pixels = rows * cols;
    if (payload % pixels != 0 || n != payload / pixels)
        throw TruncatedPayload("idx: declared image count does not match payload size");
    Matrix m(n, pixels);
    for (std::size_t i = 0; i < payload; ++i)
        m.data()[i] = static_cast<double>(bytes[16 + i]) / 255.0;
    return m;
}

std::vector<int> parse_idx_labels(const std::vector<unsigned char>& bytes) {
    if (check_idx_magic(bytes) != 1) throw BadMagic("idx: expected a 1-D label file");
    const std::size_t n = read_be_u32(bytes, 4);
    if (bytes.size() != 8 + n)
        throw TruncatedPayload("idx: declared label count does not match payload size");
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(bytes[8 + i]);
    return labels;
}

std::vector<unsigned char> write_idx_images(const Matrix& images, std::size_t img_rows,
                                            std::size_t img_cols) {
    if (images.cols() != img_rows * img_cols)
        throw ShapeError("write_idx_images: rows*cols does not match feature width");
    std::vector<unsigned char> out;
    put_be_u32(out, 0x00000803u);
    put_be_u32(out, static_cast<std::uint32_t>(images.rows()));
    put_be_u32(out, static_cast<std::uint32_t>(img_rows));
    put_be_u32(out, static_cast<std::uint32_t>(img_cols));
    for (double v : images.data()) {
        const double scaled = v * 255.0;
        const double rounded = std::round(scaled);
        if (!(rounded >= 0.0 && rounded <= 255.0) || std::abs(scaled - rounded) > 1e-9)
            throw InvalidInput("write_idx_images: value not on the k/255 grid");
        out.push_back(static_cast<unsigned char>(rounded));
    }
    return out;
}

std::vector<unsigned char> write_idx_labels(const std::vector<int>& labels) {
    std::vector<unsigned char> out;
    put_be_u32(out, 0x00000801u);
    put_be_u32(out, static_cast<std::uint32_t>(labels.size()));
    for (int y : labels) {
        if (y < 0 || y > 255) throw InvalidLabel("write_idx_labels: label outside u8 range");
        out.push_back(static_cast<unsigned char>(y));
    }
    return out;
}

namespace {

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open file: " + path);
    return std::vector<unsigned char>((std::istreambuf_iterator<char>(f)),
                                      std::istreambuf_iterator<char>());
}

} // namespace

Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path,
                         const std::string& name) {
    Dataset ds;
    ds.name = name;
    ds.features = parse_idx_images(read_file_bytes(images_path));
    if (!labels_path.empty()) {
        ds.labels = parse_idx_labels(read_file_bytes(labels_path));
        if (ds.labels->size() != ds.size())
            throw ShapeError("idx: image and label counts differ");
        int maxy = 0;
        for (int y : *ds.labels) maxy = std::max(maxy, y);
        ds.num_classes = maxy + 1;
    }
    return ds;
}

// --- CSV ---------------------------------------------------------------------

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    out << "label";
    for (std::size_t c = 0; c < ds.dim(); ++c) out << ",f" << c;
    out << "\n";
    char buf[40];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << (ds.labeled() ? (*ds.labels)[i] : -1);
        for (std::size_t c = 0; c < ds.dim(); ++c) {
            // %.17g round-trips doubles exactly
            std::snprintf(buf, sizeof buf, "%.17g", ds.features.at(i, c));
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("dataset csv write failed");
}

void write_dataset_csv_file(const Dataset& ds, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_dataset_csv(ds, f);
}

Dataset read_dataset_csv(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("dataset csv: empty input");
    if (line.rfind("label", 0) != 0) throw IoError("dataset csv: missing 'label' header");
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t dim = 0, n = 0;
    bool any_labeled = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError("dataset csv: bad number '" + cell + "'");
            }
        }
        if (row.size() < 2) throw IoError("dataset csv: row with no features");
        if (dim == 0) dim = row.size() - 1;
        if (row.size() - 1 != dim) throw IoError("dataset csv: ragged rows");
        const int y = static_cast<int>(row[0]);
        labels.push_back(y);
        if (y >= 0) any_labeled = true;
        values.insert(values.end(), row.begin() + 1, row.end());
        ++n;
    }
    if (n == 0) throw IoError("dataset csv: no data rows");
    Dataset ds;
    ds.name = name;
    ds.features = Matrix(n, dim);
    ds.features.data() = values;
    if (any_labeled) {
        ds.labels = labels;
        int maxy = 0;
        for (int y : labels) maxy = std::max(maxy, y);
        ds.num_classes = maxy + 1;
    }
    if (!ds.features.all_finite()) throw IoError("dataset csv: non-finite feature values");
    ds.validate();
    return ds;
}

Dataset read_dataset_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open dataset: " + path);
    return read_dataset_csv(f, path);
}

// --- BatchStream ---------------------------------------------------------------

BatchStream::BatchStream(std::size_t n, std::size_t batch_size, Rng rng)
    : n_(n), batch_size_(batch_size), base_rng_(rng) {
    if (n == 0) throw InvalidInput("BatchStream: empty dataset");
    if (batch_size == 0) throw InvalidInput("BatchStream: batch size must be >= 1");
    refill();
}

void BatchStream::refill() {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    Rng perm_rng = base_rng_.child(pass_);
    perm_rng.shuffle(order_);
    cursor_ = 0;
    ++pass_;
}

std::vector<std::size_t> BatchStream::next_batch() {
    std::vector<std::size_t> batch;
    batch.reserve(batch_size_);
    while (batch.size() < batch_size_) {
        if (cursor_ == n_) refill();
        batch.push_back(order_[cursor_++]);
    }
    return batch;
}

} // namespace srda
