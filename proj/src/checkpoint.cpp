#include "drlsim/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "drlsim/errors.hpp"

namespace drlsim::agents {

namespace {

constexpr char kMagic[4] = {'D', 'R', 'L', 'C'};

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff),
                            static_cast<unsigned char>((v >> 8) & 0xff),
                            static_cast<unsigned char>((v >> 16) & 0xff),
                            static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::size_t offset() const { return offset_; }
    bool at_eof() {
        return in_.peek() == std::char_traits<char>::eof();
    }

    void bytes(void* dst, std::size_t n, const char* what) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw CorruptCheckpointError(std::string("truncated while reading ") + what,
                                         offset_ + static_cast<std::size_t>(in_.gcount()));
        offset_ += n;
    }

    std::uint32_t u32(const char* what) {
        unsigned char buf[4];
        bytes(buf, 4, what);
        return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
               (static_cast<std::uint32_t>(buf[2]) << 16) |
               (static_cast<std::uint32_t>(buf[3]) << 24);
    }

    float f32(const char* what) {
        const std::uint32_t bits = u32(what);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

private:
    std::istream& in_;
    std::size_t offset_ = 0;
};

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    out.write(kMagic, 4);
    put_u32(out, kCheckpointVersion);
    const std::string meta = checkpoint.metadata.dump();
    put_u32(out, static_cast<std::uint32_t>(meta.size()));
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    for (const Tensor& t : checkpoint.tensors) {
        put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
        std::size_t count = 1;
        for (const std::uint32_t d : t.dims) {
            put_u32(out, d);
            count *= d;
        }
        if (count != t.data.size())
            throw std::invalid_argument("tensor dims do not match payload size");
        for (const float v : t.data) put_f32(out, v);
    }
    if (!out.good()) throw std::runtime_error("write failure on checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open checkpoint '" + path + "'");
    Reader r(in);
    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw CorruptCheckpointError("bad magic bytes", 0);
    const std::uint32_t version = r.u32("version");
    if (version != kCheckpointVersion)
        throw CorruptCheckpointError("unsupported format version " + std::to_string(version), 4);
    const std::uint32_t meta_len = r.u32("metadata length");
    std::string meta(meta_len, '\0');
    const std::size_t meta_offset = r.offset();
    r.bytes(meta.data(), meta_len, "metadata");
    Checkpoint ck;
    try {
        ck.metadata = nlohmann::json::parse(meta);
    } catch (const nlohmann::json::parse_error&) {
        throw CorruptCheckpointError("metadata is not valid JSON", meta_offset);
    }
    while (!r.at_eof()) {
        const std::size_t tensor_offset = r.offset();
        Tensor t;
        const std::uint32_t rank = r.u32("tensor rank");
        if (rank > 8) throw CorruptCheckpointError("implausible tensor rank", tensor_offset);
        std::size_t count = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            t.dims.push_back(r.u32("tensor dims"));
            count *= t.dims.back();
            if (count > (1u << 28))
                throw CorruptCheckpointError("implausible tensor size", tensor_offset);
        }
        t.data.resize(count);
        for (std::size_t i = 0; i < count; ++i) t.data[i] = r.f32("tensor payload");
        ck.tensors.push_back(std::move(t));
    }
    return ck;
}

void append_mlp(std::vector<Tensor>& tensors, const MlpParams& params) {
    for (const Layer& layer : params.layers) {
        tensors.push_back(Tensor{{static_cast<std::uint32_t>(layer.rows),
                                  static_cast<std::uint32_t>(layer.cols)},
                                 layer.weights});
        tensors.push_back(Tensor{{static_cast<std::uint32_t>(layer.rows)}, layer.bias});
    }
}

MlpParams read_mlp(const std::vector<Tensor>& tensors, std::size_t& cursor,
                   const Architecture& arch) {
    MlpParams p;
    p.arch = arch;
    std::size_t fan_in = arch.input_dim;
    std::vector<std::size_t> widths = arch.hidden;
    widths.push_back(arch.output_dim);
    for (const std::size_t rows : widths) {
        if (cursor + 2 > tensors.size())
            throw CorruptCheckpointError("missing tensors for declared architecture", 0);
        const Tensor& w = tensors[cursor++];
        const Tensor& b = tensors[cursor++];
        if (w.dims != std::vector<std::uint32_t>{static_cast<std::uint32_t>(rows),
                                                 static_cast<std::uint32_t>(fan_in)} ||
            b.dims != std::vector<std::uint32_t>{static_cast<std::uint32_t>(rows)})
            throw CorruptCheckpointError("tensor shape does not match declared architecture", 0);
        Layer layer;
        layer.rows = rows;
        layer.cols = fan_in;
        layer.weights = w.data;
        layer.bias = b.data;
        p.layers.push_back(std::move(layer));
        fan_in = rows;
    }
    return p;
}

}  // namespace drlsim::agents
