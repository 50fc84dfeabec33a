#include "naphtha/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "naphtha/error.hpp"

namespace naphtha {

namespace {

constexpr char kMagic[8] = {'N', 'A', 'P', 'H', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v, const char* field) {
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
        raise(ErrorCode::CorruptTensor, std::string("truncated checkpoint while reading ") + field);
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in, const char* field, std::uint32_t max_len = 1u << 20) {
    std::uint32_t len = 0;
    read_pod(in, len, field);
    if (len > max_len) raise(ErrorCode::CorruptTensor, std::string("implausible length for ") + field);
    std::string s(len, '\0');
    if (len && !in.read(s.data(), len))
        raise(ErrorCode::CorruptTensor, std::string("truncated checkpoint while reading ") + field);
    return s;
}

void write_tensor_values(std::ostream& out, const Tensor& t) {
    out.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
}

void read_tensor_values(std::istream& in, Tensor& t, const std::string& name) {
    if (!in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.size() * sizeof(double))))
        raise(ErrorCode::CorruptTensor, "truncated tensor data for '" + name + "'");
}

void read_header(std::istream& in, CheckpointMeta& meta, Sha256Digest& fp) {
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        raise(ErrorCode::CorruptTensor, "bad checkpoint magic");
    std::uint32_t version = 0;
    read_pod(in, version, "version");
    if (version != kVersion)
        raise(ErrorCode::CorruptTensor, "unsupported checkpoint version " + std::to_string(version));
    if (!in.read(reinterpret_cast<char*>(fp.data()), static_cast<std::streamsize>(fp.size())))
        raise(ErrorCode::CorruptTensor, "truncated fingerprint");
    read_pod(in, meta.seed, "seed");
    meta.config_echo = read_string(in, "meta");
    std::uint8_t has_opt = 0;
    read_pod(in, has_opt, "optimizer flag");
    meta.has_optimizer_state = has_opt != 0;
}

} // namespace

void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoFailure, "cannot write checkpoint '" + path + "'");

    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    const Sha256Digest fp = model.fingerprint();
    out.write(reinterpret_cast<const char*>(fp.data()), static_cast<std::streamsize>(fp.size()));
    write_pod(out, meta.seed);
    write_string(out, meta.config_echo);
    write_pod(out, static_cast<std::uint8_t>(meta.has_optimizer_state ? 1 : 0));

    std::uint32_t count = 0;
    model.params().for_each_param([&](const std::string&, const ParamTensor&) { ++count; });
    write_pod(out, count);
    model.params().for_each_param([&](const std::string& group, const ParamTensor& p) {
        write_string(out, group + "." + p.name);
        write_pod(out, static_cast<std::uint32_t>(p.value.rank()));
        for (std::size_t d = 0; d < p.value.rank(); ++d) write_pod(out, static_cast<std::uint64_t>(p.value.dim(d)));
        write_tensor_values(out, p.value);
    });

    if (meta.has_optimizer_state) {
        const auto& names = model.params().group_names();
        write_pod(out, static_cast<std::uint32_t>(names.size()));
        for (const auto& gname : names) {
            write_string(out, gname);
            write_pod(out, static_cast<std::int64_t>(model.params().group(gname).step));
        }
        model.params().for_each_param([&](const std::string&, const ParamTensor& p) {
            write_tensor_values(out, p.adam_m);
            write_tensor_values(out, p.adam_v);
        });
    }
    if (!out) raise(ErrorCode::IoFailure, "write failed for checkpoint '" + path + "'");
}

CheckpointMeta load_checkpoint(Model& model, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoFailure, "cannot open checkpoint '" + path + "'");

    CheckpointMeta meta;
    Sha256Digest fp;
    read_header(in, meta, fp);
    if (fp != model.fingerprint())
        raise(ErrorCode::FingerprintMismatch, "checkpoint architecture " + hex_string(fp) + " does not match model " +
                                                  hex_string(model.fingerprint()));

    std::uint32_t count = 0;
    read_pod(in, count, "tensor count");
    std::uint32_t expected = 0;
    model.params().for_each_param([&](const std::string&, const ParamTensor&) { ++expected; });
    if (count != expected)
        raise(ErrorCode::CorruptTensor, "checkpoint has " + std::to_string(count) + " tensors, model expects " +
                                            std::to_string(expected));

    model.params().for_each_param([&](const std::string& group, ParamTensor& p) {
        const std::string want = group + "." + p.name;
        std::string name = read_string(in, "tensor name");
        if (name != want)
            raise(ErrorCode::CorruptTensor, "tensor '" + name + "' out of order, expected '" + want + "'");
        std::uint32_t rank = 0;
        read_pod(in, rank, "tensor rank");
        if (rank != p.value.rank()) raise(ErrorCode::CorruptTensor, "tensor '" + name + "' rank mismatch");
        for (std::size_t d = 0; d < rank; ++d) {
            std::uint64_t dim = 0;
            read_pod(in, dim, "tensor dim");
            if (dim != p.value.dim(d)) raise(ErrorCode::CorruptTensor, "tensor '" + name + "' shape mismatch");
        }
        read_tensor_values(in, p.value, name);
        p.grad.fill(0.0);
        p.adam_m.fill(0.0);
        p.adam_v.fill(0.0);
    });

    for (const auto& gname : model.params().group_names()) {
        model.params().group(gname).step = 0;
        model.params().group(gname).grad_ready = false;
    }

    if (meta.has_optimizer_state) {
        std::uint32_t n_groups = 0;
        read_pod(in, n_groups, "optimizer group count");
        if (n_groups != model.params().group_names().size())
            raise(ErrorCode::CorruptTensor, "optimizer state group count mismatch");
        for (const auto& gname : model.params().group_names()) {
            std::string name = read_string(in, "optimizer group name");
            if (name != gname) raise(ErrorCode::CorruptTensor, "optimizer group '" + name + "' out of order");
            std::int64_t step = 0;
            read_pod(in, step, "optimizer step");
            model.params().group(gname).step = step;
        }
        model.params().for_each_param([&](const std::string&, ParamTensor& p) {
            read_tensor_values(in, p.adam_m, p.name + ".m");
            read_tensor_values(in, p.adam_v, p.name + ".v");
        });
    }

    // Nothing may trail the declared payload.
    char extra;
    if (in.read(&extra, 1)) raise(ErrorCode::CorruptTensor, "trailing bytes after checkpoint payload");
    return meta;
}

CheckpointMeta peek_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoFailure, "cannot open checkpoint '" + path + "'");
    CheckpointMeta meta;
    Sha256Digest fp;
    read_header(in, meta, fp);
    return meta;
}

} // namespace naphtha
