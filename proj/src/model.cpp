#include "srda/model.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace srda {

std::vector<LayerSpec> layers_from_widths(const std::vector<std::size_t>& widths) {
    if (widths.size() < 2) throw InvalidInput("layer widths: need input and output width");
    std::vector<LayerSpec> layers;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const bool last = (i + 2 == widths.size());
        layers.push_back(LayerSpec{widths[i], widths[i + 1],
                                   last ? Activation::Identity : Activation::Relu});
    }
    return layers;
}

Model::Model(const GeneratorSpec& gen, const ClassifierSpec& clf, Rng& init_rng)
    : Model(layers_from_widths(gen.widths), layers_from_widths(clf.widths), init_rng) {}

Model::Model(std::vector<LayerSpec> gen_layers, std::vector<LayerSpec> clf_layers,
             Rng& init_rng)
    : generator_(std::move(gen_layers), init_rng),
      classifier_(std::move(clf_layers), init_rng) {
    if (generator_.output_width() != classifier_.input_width())
        throw ShapeError("model: generator output width != classifier input width");
    if (feature_width() < 1) throw InvalidInput("model: feature dim must be >= 1");
    if (num_classes() < 2) throw InvalidInput("model: need at least 2 classes");
}

Matrix Model::forward_features(const Matrix& x, NetCache* cache) const {
    return generator_.forward(x, cache);
}

Matrix Model::classify(const Matrix& g, NetCache* cache) const {
    return softmax(classifier_.forward(g, cache));
}

std::vector<std::size_t> Model::predict_labels(const Matrix& x) const {
    const Matrix probs = classify(forward_features(x));
    std::vector<std::size_t> out(probs.rows());
    for (std::size_t r = 0; r < probs.rows(); ++r) out[r] = argmax_row(probs, r);
    return out;
}

double Model::source_loss(const Matrix& x, const std::vector<int>& labels) const {
    if (labels.size() != x.rows()) throw ShapeError("source_loss: batch/label count mismatch");
    if (x.rows() == 0) throw ShapeError("source_loss: empty batch");
    const Matrix probs = classify(forward_features(x));
    double acc = 0.0;
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes())
            throw InvalidLabel("source_loss: label out of range");
        acc -= std::log(std::max(probs.at(r, static_cast<std::size_t>(y)), kProbFloor));
    }
    return acc / static_cast<double>(probs.rows());
}

double Model::source_loss_backward(const Matrix& x, const std::vector<int>& labels) {
    if (labels.size() != x.rows()) throw ShapeError("source_loss: batch/label count mismatch");
    if (x.rows() == 0) throw ShapeError("source_loss: empty batch");
    NetCache gcache, ccache;
    const Matrix g = generator_.forward(x, &gcache);
    const Matrix logits = classifier_.forward(g, &ccache);
    const Matrix probs = softmax(logits);
    const double inv_b = 1.0 / static_cast<double>(x.rows());

    double loss = 0.0;
    Matrix dlogits = probs; // (q - onehot(y)) / B
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes())
            throw InvalidLabel("source_loss: label out of range");
        loss -= std::log(std::max(probs.at(r, static_cast<std::size_t>(y)), kProbFloor));
        dlogits.at(r, static_cast<std::size_t>(y)) -= 1.0;
    }
    dlogits *= inv_b;
    const Matrix dg = classifier_.backward(ccache, dlogits);
    generator_.backward(gcache, dg);
    return loss * inv_b;
}

double Model::entropy_loss(const Matrix& x) const {
    if (x.rows() == 0) throw ShapeError("entropy_loss: empty batch");
    const Matrix probs = classify(forward_features(x));
    double acc = 0.0;
    for (std::size_t r = 0; r < probs.rows(); ++r) acc += entropy(probs.row_copy(r));
    return acc / static_cast<double>(probs.rows());
}

Matrix Model::entropy_logit_grad(const Matrix& q, double weight) {
    // dH/dz_j = -q_j (log q_j + H(q)) per row, scaled by weight / batch.
    Matrix dlogits(q.rows(), q.cols());
    const double scale = weight / static_cast<double>(q.rows());
    for (std::size_t r = 0; r < q.rows(); ++r) {
        const double h = entropy(q.row_copy(r));
        for (std::size_t c = 0; c < q.cols(); ++c) {
            const double qi = q.at(r, c);
            const double logq = std::log(std::max(qi, kProbFloor));
            dlogits.at(r, c) = -scale * qi * (logq + h);
        }
    }
    return dlogits;
}

double Model::entropy_loss_backward(const Matrix& x, double weight) {
    if (x.rows() == 0) throw ShapeError("entropy_loss: empty batch");
    NetCache gcache, ccache;
    const Matrix g = generator_.forward(x, &gcache);
    const Matrix probs = softmax(classifier_.forward(g, &ccache));
    double acc = 0.0;
    for (std::size_t r = 0; r < probs.rows(); ++r) acc += entropy(probs.row_copy(r));
    const Matrix dlogits = entropy_logit_grad(probs, weight);
    const Matrix dg = classifier_.backward(ccache, dlogits);
    generator_.backward(gcache, dg);
    return weight * acc / static_cast<double>(probs.rows());
}

void Model::zero_grads() {
    generator_.params().zero_grads();
    classifier_.params().zero_grads();
}

// ---------------------------------------------------------------------------
// Checkpoint format (all integers little-endian):
//   8 bytes   magic "SRDACKP1"
//   per net (generator, then classifier):
//     u32 layer count
//     per layer: u32 in_width, u32 out_width, u8 activation (0=identity, 1=relu)
//   per net, per segment: u64 rows, u64 cols, rows*cols raw f64 values
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'S', 'R', 'D', 'A', 'C', 'K', 'P', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_f64(std::vector<unsigned char>& out, double d) {
    put_u64(out, std::bit_cast<std::uint64_t>(d));
}

struct Reader {
    const std::vector<unsigned char>& bytes;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > bytes.size()) throw TruncatedPayload("checkpoint: truncated file");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    unsigned char u8() {
        need(1);
        return bytes[pos++];
    }
};

void put_net_spec(std::vector<unsigned char>& out, const LayeredNet& net) {
    put_u32(out, static_cast<std::uint32_t>(net.layer_count()));
    for (const auto& l : net.layers()) {
        put_u32(out, static_cast<std::uint32_t>(l.in_width));
        put_u32(out, static_cast<std::uint32_t>(l.out_width));
        out.push_back(l.act == Activation::Relu ? 1 : 0);
    }
}

std::vector<LayerSpec> read_net_spec(Reader& r) {
    const std::uint32_t n = r.u32();
    if (n == 0 || n > 1024) throw BadMagic("checkpoint: implausible layer count");
    std::vector<LayerSpec> layers(n);
    for (auto& l : layers) {
        l.in_width = r.u32();
        l.out_width = r.u32();
        const unsigned char a = r.u8();
        if (a > 1) throw UnsupportedType("checkpoint: unknown activation code");
        l.act = a == 1 ? Activation::Relu : Activation::Identity;
    }
    return layers;
}

void put_params(std::vector<unsigned char>& out, const ParamStore& store) {
    for (const auto& seg : store) {
        put_u64(out, seg.rows);
        put_u64(out, seg.cols);
        for (double v : seg.values) put_f64(out, v);
    }
}

void read_params(Reader& r, ParamStore& store) {
    for (auto& seg : store) {
        if (r.u64() != seg.rows || r.u64() != seg.cols)
            throw ShapeError("checkpoint: segment shape does not match layer spec");
        for (double& v : seg.values) v = r.f64();
    }
}

} // namespace

void save_checkpoint_bytes(const Model& model, std::vector<unsigned char>& out) {
    out.clear();
    for (char c : kMagic) out.push_back(static_cast<unsigned char>(c));
    put_net_spec(out, model.generator());
    put_net_spec(out, model.classifier());
    put_params(out, model.generator().params());
    put_params(out, model.classifier().params());
}

Model load_checkpoint_bytes(const std::vector<unsigned char>& bytes) {
    Reader r{bytes};
    r.need(8);
    for (int i = 0; i < 8; ++i) {
        if (bytes[i] != static_cast<unsigned char>(kMagic[i]))
            throw BadMagic("checkpoint: bad magic");
    }
    r.pos = 8;
    auto gen_layers = read_net_spec(r);
    auto clf_layers = read_net_spec(r);
    Rng scratch(0);
    Model model(std::move(gen_layers), std::move(clf_layers), scratch);
    read_params(r, model.generator().params());
    read_params(r, model.classifier().params());
    if (r.pos != bytes.size()) throw TruncatedPayload("checkpoint: trailing bytes");
    return model;
}

void save_checkpoint(const Model& model, const std::string& path) {
    std::vector<unsigned char> bytes;
    save_checkpoint_bytes(model, bytes);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("checkpoint write failed: " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    return load_checkpoint_bytes(bytes);
}

} // namespace srda
