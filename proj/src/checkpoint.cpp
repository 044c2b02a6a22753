#include "xmodal/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "xmodal/data.hpp"

namespace xmodal {

namespace {

constexpr const char* kVersionTag = "xmodal-checkpoint v1";

void write_values(std::ofstream& out, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ' ';
        out << format_double(values[i]);
    }
    out << '\n';
}

std::vector<double> read_values(std::istream& in, std::size_t count, const char* what) {
    std::vector<double> values;
    values.reserve(count);
    std::string token;
    while (values.size() < count && in >> token) {
        double v = 0.0;
        const auto* last = token.data() + token.size();
        auto [ptr, ec] = std::from_chars(token.data(), last, v);
        if (ec != std::errc() || ptr != last)
            throw FormatError(std::string("checkpoint: bad number in ") + what);
        values.push_back(v);
    }
    if (values.size() != count)
        throw FormatError(std::string("checkpoint: truncated ") + what);
    return values;
}

std::string expect_key(std::istream& in, const std::string& key) {
    std::string k, v;
    if (!(in >> k >> v)) throw FormatError("checkpoint: truncated header");
    if (k != key) throw FormatError("checkpoint: expected key '" + key + "', found '" + k + "'");
    return v;
}

long parse_long(const std::string& s, const char* what) {
    long v = 0;
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), last, v);
    if (ec != std::errc() || ptr != last) throw FormatError(std::string("checkpoint: bad ") + what);
    return v;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
    std::uint64_t v = 0;
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), last, v);
    if (ec != std::errc() || ptr != last) throw FormatError(std::string("checkpoint: bad ") + what);
    return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << kVersionTag << '\n';
    out << "modality " << checkpoint.modality << '\n';
    out << "seed " << checkpoint.seed << '\n';
    out << "input_frame_dim " << checkpoint.spec.input_frame_dim << '\n';
    out << "hidden_dim " << checkpoint.spec.hidden_dim << '\n';
    out << "embedding_dim " << checkpoint.spec.embedding_dim << '\n';
    out << "pooling mean\n";
    out << "w1\n";
    write_values(out, checkpoint.params.w1.data);
    out << "b1\n";
    write_values(out, checkpoint.params.b1);
    out << "w2\n";
    write_values(out, checkpoint.params.w2.data);
    out << "b2\n";
    write_values(out, checkpoint.params.b2);
    out << "end\n";
    if (!out) throw IoError("failed writing '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string version_line;
    if (!std::getline(in, version_line)) throw FormatError("checkpoint: empty file");
    if (version_line != kVersionTag)
        throw FormatVersionMismatch("checkpoint: unsupported version tag '" + version_line + "'");

    Checkpoint c;
    c.modality = expect_key(in, "modality");
    c.seed = parse_u64(expect_key(in, "seed"), "seed");
    c.spec.input_frame_dim = static_cast<int>(parse_long(expect_key(in, "input_frame_dim"), "input_frame_dim"));
    c.spec.hidden_dim = static_cast<int>(parse_long(expect_key(in, "hidden_dim"), "hidden_dim"));
    c.spec.embedding_dim = static_cast<int>(parse_long(expect_key(in, "embedding_dim"), "embedding_dim"));
    const std::string pooling = expect_key(in, "pooling");
    if (pooling != "mean") throw FormatError("checkpoint: unknown pooling '" + pooling + "'");
    c.spec.validate();

    const auto n1 = static_cast<std::size_t>(c.spec.hidden_dim) * static_cast<std::size_t>(c.spec.input_frame_dim);
    const auto n2 = static_cast<std::size_t>(c.spec.embedding_dim) * static_cast<std::size_t>(c.spec.hidden_dim);
    std::string marker;
    if (!(in >> marker) || marker != "w1") throw FormatError("checkpoint: missing w1 block");
    c.params.w1 = Matrix(c.spec.hidden_dim, c.spec.input_frame_dim);
    c.params.w1.data = read_values(in, n1, "w1");
    if (!(in >> marker) || marker != "b1") throw FormatError("checkpoint: missing b1 block");
    c.params.b1 = read_values(in, static_cast<std::size_t>(c.spec.hidden_dim), "b1");
    if (!(in >> marker) || marker != "w2") throw FormatError("checkpoint: missing w2 block");
    c.params.w2 = Matrix(c.spec.embedding_dim, c.spec.hidden_dim);
    c.params.w2.data = read_values(in, n2, "w2");
    if (!(in >> marker) || marker != "b2") throw FormatError("checkpoint: missing b2 block");
    c.params.b2 = read_values(in, static_cast<std::size_t>(c.spec.embedding_dim), "b2");
    if (!(in >> marker) || marker != "end") throw FormatError("checkpoint: missing end marker");
    return c;
}

}  // namespace xmodal
